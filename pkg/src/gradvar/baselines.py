"""Pointwise scattered-data fitters used for comparison runs.

Moving least squares fits a low-degree polynomial around each query with
distance-decaying weights; Shepard interpolation is the inverse-distance
weighted average.  Both operate on raw planar coordinates, independent
of any graph structure, and can be evaluated over a whole domain that
carries vertex coordinates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .domain import Domain
from .fields import ScalarField


@dataclass(frozen=True)
class SamplePoints:
    """Scattered (x, y, value) samples with unique coordinates.

    Use from_points for ingest: points sharing bit-identical coordinates
    are merged into one sample carrying their mean value.
    """

    xy: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        xy = np.asarray(self.xy, dtype=np.float64)
        vals = np.asarray(self.values, dtype=np.float64)
        if xy.ndim != 2 or xy.shape[1] != 2 or vals.shape != (xy.shape[0],):
            raise ValueError("xy must be (n, 2) with one value per point")
        if xy.shape[0] == 0:
            raise ValueError("sample set must be nonempty")
        if not (np.isfinite(xy).all() and np.isfinite(vals).all()):
            raise ValueError("sample coordinates and values must be finite")
        if len(np.unique(xy, axis=0)) != len(xy):
            raise ValueError("duplicate coordinates; merge via from_points")
        xy = np.array(xy)
        vals = np.array(vals)
        xy.setflags(write=False)
        vals.setflags(write=False)
        object.__setattr__(self, "xy", xy)
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_points(cls, points) -> "SamplePoints":
        pts = np.asarray(list(points), dtype=np.float64)
        if pts.ndim != 2 or pts.shape[1] != 3 or pts.shape[0] == 0:
            raise ValueError("points must be a nonempty list of (x, y, value)")
        uniq, inverse = np.unique(pts[:, :2], axis=0, return_inverse=True)
        sums = np.bincount(inverse, weights=pts[:, 2], minlength=len(uniq))
        counts = np.bincount(inverse, minlength=len(uniq))
        return cls(xy=uniq, values=sums / counts)

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class GaussianWeight:
    """theta(s) = exp(-(s / scale)^2); strictly decreasing, scale > 0.

    scale=inf gives the constant weight 1 (plain least squares).
    """

    scale: float = 1.0

    def __post_init__(self):
        if not self.scale > 0:
            raise ValueError("scale must be positive")

    def __call__(self, dist: np.ndarray) -> np.ndarray:
        if math.isinf(self.scale):
            return np.ones_like(np.asarray(dist, dtype=np.float64))
        return np.exp(-np.square(np.asarray(dist, dtype=np.float64) / self.scale))


@dataclass(frozen=True)
class InversePowerWeight:
    """theta(d) = 1 / (d + epsilon)^power; epsilon regularizes d = 0."""

    power: float
    epsilon: float = 0.0

    def __post_init__(self):
        if not self.power > 0:
            raise ValueError("power must be positive")
        if not self.epsilon >= 0:
            raise ValueError("epsilon must be nonnegative")

    def __call__(self, dist: np.ndarray) -> np.ndarray:
        base = np.asarray(dist, dtype=np.float64) + self.epsilon
        with np.errstate(divide="ignore"):
            return base ** -self.power


@dataclass(frozen=True)
class MlsConfig:
    """Degree (0, 1 or 2) and weight function for moving least squares."""

    degree: int = 1
    weight: object = GaussianWeight()

    def __post_init__(self):
        if self.degree not in (0, 1, 2):
            raise ValueError("degree must be 0, 1 or 2")
        if not callable(self.weight):
            raise ValueError("weight must be callable on distance arrays")


@dataclass(frozen=True)
class ShepardConfig:
    power: float = 2.0

    def __post_init__(self):
        if not self.power > 0:
            raise ValueError("power must be positive")


class MlsResult(NamedTuple):
    """Fitted value plus rank diagnostics.

    fallback is True when the weighted system did not determine all
    basis coefficients (rank < basis size); the undetermined directions
    are dropped (minimum-norm solution), which reduces the effective
    fitted degree along them.
    """

    value: float
    fallback: bool
    rank: int
    basis_size: int


def _basis(u: np.ndarray, degree: int) -> np.ndarray:
    """Polynomial basis columns evaluated at centered points u (n, 2)."""
    cols = [np.ones(len(u))]
    if degree >= 1:
        cols += [u[:, 0], u[:, 1]]
    if degree >= 2:
        cols += [u[:, 0] ** 2, u[:, 0] * u[:, 1], u[:, 1] ** 2]
    return np.stack(cols, axis=1)


def mls_fit(query, samples: SamplePoints, config: MlsConfig) -> MlsResult:
    """Weighted least-squares polynomial fit around one query point.

    Minimizes sum_i (p(x_i) - f_i)^2 * theta(||query - x_i||) over
    polynomials p of the configured degree and evaluates p at the query.
    The system is solved in a basis centered on the weighted centroid
    and isotropically scaled, which keeps the fit translation-equivariant
    and makes rank detection scale-free.  With every sample weight
    infinite-dominated (e.g. zero-distance under an epsilon-free inverse
    power weight), the fit restricts to those dominating samples.
    """
    q = np.asarray(query, dtype=np.float64)
    if q.shape != (2,):
        raise ValueError("query must be an (x, y) pair")
    xy, vals = samples.xy, samples.values
    dist = np.hypot(xy[:, 0] - q[0], xy[:, 1] - q[1])
    w = np.asarray(config.weight(dist), dtype=np.float64)
    if (w < 0).any():
        raise ValueError("weights must be nonnegative")
    if np.isinf(w).any():
        keep = np.isinf(w)
        xy, vals, dist = xy[keep], vals[keep], dist[keep]
        w = np.ones(keep.sum())
    total = w.sum()
    if not total > 0:
        raise ValueError("zero total weight at query; widen the weight function")

    centroid = (w @ xy) / total
    spread = math.sqrt(float(w @ np.square(xy - centroid).sum(axis=1)) / total)
    scale = spread if spread > 0 else 1.0
    u = (xy - centroid) / scale
    a = _basis(u, config.degree) * np.sqrt(w)[:, None]
    b = vals * np.sqrt(w)
    coef, _, rank, _ = np.linalg.lstsq(a, b, rcond=None)
    uq = (q - centroid) / scale
    value = float(_basis(uq[None, :], config.degree)[0] @ coef)
    size = len(coef)
    return MlsResult(value=value, fallback=rank < size, rank=int(rank),
                     basis_size=size)


def shepard(query, samples: SamplePoints, power: float = 2.0) -> float:
    """Inverse-distance weighted average of the sample values.

    Weights are 1 / d^power; a query exactly at a sample site returns
    that site's value.  Always lands inside [min, max] of the values
    (convex combination).
    """
    if not power > 0:
        raise ValueError("power must be positive")
    q = np.asarray(query, dtype=np.float64)
    if q.shape != (2,):
        raise ValueError("query must be an (x, y) pair")
    dist = np.hypot(samples.xy[:, 0] - q[0], samples.xy[:, 1] - q[1])
    hit = dist == 0.0
    if hit.any():
        return float(samples.values[np.nonzero(hit)[0][0]])
    with np.errstate(over="ignore"):
        w = dist ** -power
    if np.isinf(w).any():
        # d^power underflowed; those sites dominate every finite weight.
        return float(samples.values[np.isinf(w)].mean())
    total = w.sum()
    if total == 0.0:
        # All weights underflowed; the nearest site dominates in the limit.
        return float(samples.values[int(np.argmin(dist))])
    return float((w @ samples.values) / total)


class DomainFit(NamedTuple):
    """A field evaluated vertex-by-vertex plus where MLS degraded."""

    field: ScalarField
    fallback_vertices: tuple[int, ...]


def evaluate_on_domain(config, samples: SamplePoints, domain: Domain) -> DomainFit:
    """Apply a pointwise method at every vertex coordinate of a domain.

    config is an MlsConfig or ShepardConfig.  MLS rank fallbacks are
    collected per vertex; a hard failure (such as zero total weight)
    aborts with the offending vertex named.
    """
    if domain.coords is None:
        raise ValueError("domain has no vertex coordinates")
    out = np.empty(domain.vertex_count, dtype=np.float64)
    fallbacks: list[int] = []
    if isinstance(config, MlsConfig):
        for v in range(domain.vertex_count):
            try:
                res = mls_fit(domain.coords[v], samples, config)
            except ValueError as exc:
                raise ValueError(f"MLS failed at vertex {v}: {exc}") from exc
            out[v] = res.value
            if res.fallback:
                fallbacks.append(v)
    elif isinstance(config, ShepardConfig):
        for v in range(domain.vertex_count):
            out[v] = shepard(domain.coords[v], samples, config.power)
    else:
        raise TypeError("config must be an MlsConfig or ShepardConfig")
    return DomainFit(field=ScalarField(domain=domain, values=out),
                     fallback_vertices=tuple(fallbacks))
