"""Error and smoothness metrics for reconstructed fields."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .domain import GridSpec
from .fields import ScalarField
from .smoothing import discrete_gradient, total_variation


@dataclass(frozen=True)
class Metrics:
    """RMSE and max error against a truth field, plus a smoothness proxy."""

    rmse: float
    max_abs_error: float
    tv_gradient: float

    def __post_init__(self):
        for name in ("rmse", "max_abs_error", "tv_gradient"):
            if not getattr(self, name) >= 0:
                raise ValueError(f"{name} must be nonnegative")
        if self.rmse > self.max_abs_error * (1 + 1e-12):
            raise ValueError("rmse cannot exceed max_abs_error")


def compute_metrics(field: ScalarField, truth: ScalarField,
                    grid: GridSpec | None = None) -> Metrics:
    """Compare a field against ground truth on the same domain.

    tv_gradient is the total variation of the finite-difference gradient
    when a grid is given; without grid structure the gradient stencil is
    undefined, so the field's own total variation substitutes.
    """
    if field.domain is not truth.domain and \
            field.domain.vertex_count != truth.domain.vertex_count:
        raise ValueError("field and truth live on different domains")
    err = field.values - truth.values
    rmse = float(np.sqrt(np.mean(np.square(err))))
    max_abs = float(np.abs(err).max())
    if grid is not None:
        tv = total_variation(discrete_gradient(field, grid))
    else:
        tv = total_variation(field)
    return Metrics(rmse=rmse, max_abs_error=max_abs, tv_gradient=tv)
