import json
import os

import numpy as np
import pytest

from gradvar import (Domain, GridSpec, LevelField, LevelTable, ParsedSamples,
                     ScalarField, build_graph, build_grid, load_mesh,
                     read_edge_list, read_field_csv, read_pgm16, read_ppm,
                     read_samples_csv, render_heatmap, render_heightmesh,
                     render_pgm16, sample_coords, snap_to_vertices,
                     write_level_csv, write_metrics_json, write_scalar_csv)


def field_on(grid, values):
    return ScalarField(domain=build_grid(grid), values=values)


class TestHeatmap:
    def test_two_pixel_extremes(self, tmp_path):
        grid = GridSpec(2, 1)
        p = tmp_path / "a.ppm"
        render_heatmap(field_on(grid, [0.0, 1.0]), grid, p)
        data = p.read_bytes()
        assert data == b"P6\n2 1\n255\n" + bytes([0, 0, 255, 255, 0, 0])

    def test_midpoint_is_purple(self, tmp_path):
        grid = GridSpec(3, 1)
        p = tmp_path / "a.ppm"
        render_heatmap(field_on(grid, [0.0, 0.5, 1.0]), grid, p)
        rgb = read_ppm(p)
        assert rgb[0, 1].tolist() == [128, 0, 128]

    def test_constant_field_mid_gray(self, tmp_path):
        grid = GridSpec(3, 2)
        p = tmp_path / "a.ppm"
        render_heatmap(field_on(grid, np.full(6, 4.25)), grid, p)
        assert (read_ppm(p) == 128).all()

    def test_row_major_layout(self, tmp_path):
        grid = GridSpec(2, 2)
        p = tmp_path / "a.ppm"
        render_heatmap(field_on(grid, [0.0, 0.0, 0.0, 1.0]), grid, p)
        rgb = read_ppm(p)
        assert rgb[1, 1].tolist() == [255, 0, 0]
        assert rgb[0, 0].tolist() == [0, 0, 255]

    def test_field_grid_mismatch(self, tmp_path):
        d = build_graph([(0, 1)], 2)
        f = ScalarField(domain=d, values=[0.0, 1.0])
        with pytest.raises(ValueError, match="grid"):
            render_heatmap(f, GridSpec(3, 3), tmp_path / "a.ppm")

    def test_deterministic_bytes(self, tmp_path):
        grid = GridSpec(5, 4)
        rng = np.random.default_rng(3)
        f = field_on(grid, rng.uniform(-2, 2, 20))
        render_heatmap(f, grid, tmp_path / "a.ppm")
        render_heatmap(f, grid, tmp_path / "b.ppm")
        assert (tmp_path / "a.ppm").read_bytes() == (tmp_path / "b.ppm").read_bytes()


class TestPgm16:
    def test_round_trip_within_quantum(self, tmp_path):
        grid = GridSpec(8, 5)
        rng = np.random.default_rng(11)
        vals = rng.uniform(-3.7, 9.2, 40)
        p = tmp_path / "h.pgm"
        render_pgm16(field_on(grid, vals), grid, p)
        back, (lo, hi) = read_pgm16(p)
        assert lo == vals.min() and hi == vals.max()
        quantum = (hi - lo) / 65535
        assert np.abs(back.ravel() - vals).max() <= quantum / 2 + 1e-12

    def test_constant_round_trips_exactly(self, tmp_path):
        grid = GridSpec(3, 3)
        p = tmp_path / "h.pgm"
        render_pgm16(field_on(grid, np.full(9, -1.5)), grid, p)
        back, rng_ = read_pgm16(p)
        assert (back == -1.5).all() and rng_ == (-1.5, -1.5)

    def test_big_endian_sixteen_bit(self, tmp_path):
        grid = GridSpec(2, 1)
        p = tmp_path / "h.pgm"
        render_pgm16(field_on(grid, [0.0, 1.0]), grid, p)
        data = p.read_bytes()
        assert b"65535" in data
        assert data.endswith(bytes([0, 0, 255, 255]))

    def test_missing_range_comment_rejected(self, tmp_path):
        p = tmp_path / "h.pgm"
        p.write_bytes(b"P5\n2 1\n65535\n" + bytes(4))
        with pytest.raises(ValueError, match="range"):
            read_pgm16(p)

    def test_wrong_magic_rejected(self, tmp_path):
        p = tmp_path / "h.pgm"
        p.write_bytes(b"P2\n2 1\n65535\n0 0\n")
        with pytest.raises(ValueError, match="P5"):
            read_pgm16(p)


class TestHeightmesh:
    def test_two_by_two_layout(self, tmp_path):
        grid = GridSpec(2, 2)
        p = tmp_path / "m.obj"
        render_heightmesh(field_on(grid, [0.0, 1.0, 2.0, 3.0]), grid, p)
        lines = p.read_text().splitlines()
        assert lines[:4] == ["v 0.0 0.0 0.0", "v 1.0 0.0 1.0",
                             "v 0.0 1.0 2.0", "v 1.0 1.0 3.0"]
        assert lines[4:] == ["f 1 2 4", "f 1 4 3"]

    def test_counts_follow_grid_size(self, tmp_path):
        grid = GridSpec(4, 3)
        p = tmp_path / "m.obj"
        render_heightmesh(field_on(grid, np.arange(12.0)), grid, p)
        lines = p.read_text().splitlines()
        assert sum(ln.startswith("v ") for ln in lines) == 12
        assert sum(ln.startswith("f ") for ln in lines) == 2 * 3 * 2

    def test_output_loads_as_mesh_domain(self, tmp_path):
        grid = GridSpec(3, 2, spacing=0.5)
        p = tmp_path / "m.obj"
        render_heightmesh(field_on(grid, np.arange(6.0)), grid, p)
        d = load_mesh(p)
        assert isinstance(d, Domain)
        assert d.vertex_count == 6
        # grid edges plus one diagonal per cell
        assert d.edge_count == 7 + 2
        assert d.coords[4].tolist() == [0.5, 0.5]


class TestSamplesCsv:
    def test_xy_flavor(self, tmp_path):
        p = tmp_path / "s.csv"
        p.write_text("# comment\nx,y,value\n0.0,0.0,1.5\n2.0,1.0,-3.0\n")
        parsed = read_samples_csv(p)
        assert parsed.kind == "xy"
        assert parsed.rows.tolist() == [[0.0, 0.0, 1.5], [2.0, 1.0, -3.0]]

    def test_vertex_flavor(self, tmp_path):
        p = tmp_path / "s.csv"
        p.write_text("vertex,value\n3,0.25\n0,9.0\n")
        parsed = read_samples_csv(p)
        assert parsed.kind == "vertex"
        assert parsed.rows.tolist() == [[3.0, 0.25], [0.0, 9.0]]

    @pytest.mark.parametrize("body,msg", [
        ("a,b\n1,2\n", "header"),
        ("x,y,value\n1,2\n", "line 2"),
        ("x,y,value\n1,2,zebra\n", "line 2"),
        ("vertex,value\n1.5,2\n", "integers"),
        ("vertex,value\n", "no sample rows"),
        ("", "empty"),
        ("x,y,value\n0,0,nan\n", "finite"),
    ])
    def test_malformed_inputs(self, tmp_path, body, msg):
        p = tmp_path / "s.csv"
        p.write_text(body)
        with pytest.raises(ValueError, match=msg):
            read_samples_csv(p)


class TestSnapping:
    def test_nearest_vertex_with_ties_up(self):
        grid = GridSpec(4, 4, spacing=1.0)
        d = build_grid(grid)
        parsed = ParsedSamples(kind="xy", rows=np.array(
            [[0.4, 0.0, 1.0], [0.5, 0.0, 2.0], [2.6, 3.4, 3.0]]))
        out = snap_to_vertices(parsed, grid, d)
        assert out == {0: 1.0, 1: 2.0, 3 * 4 + 3: 3.0}

    def test_out_of_bounds_clips_to_border(self):
        grid = GridSpec(3, 3)
        d = build_grid(grid)
        parsed = ParsedSamples(kind="xy", rows=np.array(
            [[-50.0, -50.0, 1.0], [50.0, 50.0, 2.0]]))
        out = snap_to_vertices(parsed, grid, d)
        assert out == {0: 1.0, 8: 2.0}

    def test_collisions_merge_by_mean_with_warning(self):
        grid = GridSpec(3, 3)
        d = build_grid(grid)
        parsed = ParsedSamples(kind="xy", rows=np.array(
            [[1.0, 1.0, 2.0], [1.1, 0.9, 6.0]]))
        with pytest.warns(UserWarning, match="merged"):
            out = snap_to_vertices(parsed, grid, d)
        assert out == {4: 4.0}

    def test_spacing_scales_snap(self):
        grid = GridSpec(3, 3, spacing=2.0)
        d = build_grid(grid)
        parsed = ParsedSamples(kind="xy", rows=np.array([[3.2, 0.0, 5.0]]))
        assert snap_to_vertices(parsed, grid, d) == {2: 5.0}

    def test_vertex_rows_on_plain_graph(self):
        d = build_graph([(0, 1), (1, 2)], 3)
        parsed = ParsedSamples(kind="vertex", rows=np.array([[2.0, 7.0]]))
        assert snap_to_vertices(parsed, None, d) == {2: 7.0}

    def test_vertex_id_out_of_range(self):
        d = build_graph([(0, 1)], 2)
        parsed = ParsedSamples(kind="vertex", rows=np.array([[5.0, 1.0]]))
        with pytest.raises(ValueError, match="id 5"):
            snap_to_vertices(parsed, None, d)

    def test_xy_without_grid_rejected(self):
        d = build_graph([(0, 1)], 2)
        parsed = ParsedSamples(kind="xy", rows=np.array([[0.0, 0.0, 1.0]]))
        with pytest.raises(ValueError, match="grid"):
            snap_to_vertices(parsed, None, d)


class TestSampleCoords:
    def test_xy_passes_through(self):
        d = build_grid(GridSpec(2, 2))
        parsed = ParsedSamples(kind="xy", rows=np.array([[0.3, 0.4, 1.0]]))
        assert sample_coords(parsed, d).tolist() == [[0.3, 0.4, 1.0]]

    def test_vertex_resolves_coordinates(self):
        d = build_grid(GridSpec(3, 2, spacing=0.5))
        parsed = ParsedSamples(kind="vertex", rows=np.array([[4.0, 9.0]]))
        assert sample_coords(parsed, d).tolist() == [[0.5, 0.5, 9.0]]

    def test_vertex_without_coords_rejected(self):
        d = build_graph([(0, 1)], 2)
        parsed = ParsedSamples(kind="vertex", rows=np.array([[0.0, 1.0]]))
        with pytest.raises(ValueError, match="coordinates"):
            sample_coords(parsed, d)


class TestFieldCsv:
    def test_level_round_trip_bit_identical(self, tmp_path):
        d = build_graph([(0, 1), (1, 2)], 3)
        table = LevelTable(base=0.1, delta=0.2, count=3)
        field = LevelField(domain=d, idx=[1, 2, 3], table=table)
        p = tmp_path / "f.csv"
        write_level_csv(p, field)
        back = read_field_csv(p)
        assert back.vertices.tolist() == [0, 1, 2]
        assert back.indices.tolist() == [1, 2, 3]
        expect = np.array([0.1 + (i - 1) * 0.2 for i in (1, 2, 3)])
        assert back.values.tobytes() == expect.tobytes()

    def test_scalar_round_trip_awkward_floats(self, tmp_path):
        vals = np.array([0.1 + 0.2, 1e-17, -3.333333333333333e5, 2.0 / 3.0])
        p = tmp_path / "f.csv"
        write_scalar_csv(p, vals)
        back = read_field_csv(p)
        assert back.indices is None
        assert back.values.tobytes() == vals.tobytes()

    def test_rewrite_is_byte_identical(self, tmp_path):
        vals = np.random.default_rng(0).normal(size=17)
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        write_scalar_csv(a, vals)
        write_scalar_csv(b, vals)
        assert a.read_bytes() == b.read_bytes()

    def test_malformed_field_csv(self, tmp_path):
        p = tmp_path / "f.csv"
        p.write_text("vertex,index,value\n0,1\n")
        with pytest.raises(ValueError, match="line 2"):
            read_field_csv(p)
        p.write_text("wrong,header\n")
        with pytest.raises(ValueError, match="header"):
            read_field_csv(p)


class TestMetricsJson:
    def test_schema_tag_and_sorted_keys(self, tmp_path):
        p = tmp_path / "m.json"
        write_metrics_json(p, {"rmse": 0.5, "count": 3})
        text = p.read_text()
        data = json.loads(text)
        assert data == {"schema": 1, "rmse": 0.5, "count": 3}
        assert text.index('"count"') < text.index('"rmse"') < text.index('"schema"')

    def test_payload_not_mutated(self, tmp_path):
        payload = {"a": 1}
        write_metrics_json(tmp_path / "m.json", payload)
        assert payload == {"a": 1}


class TestEdgeList:
    def test_parse_with_comments(self, tmp_path):
        p = tmp_path / "g.txt"
        p.write_text("# graph\nvertices 4\n0 1\n1 2  # chain\n\n2 3\n")
        count, edges = read_edge_list(p)
        assert count == 4
        assert edges.tolist() == [[0, 1], [1, 2], [2, 3]]

    def test_edge_only_errors(self, tmp_path):
        p = tmp_path / "g.txt"
        p.write_text("0 1\n")
        with pytest.raises(ValueError, match="vertices N"):
            read_edge_list(p)
        p.write_text("vertices 3\n0 1 2\n")
        with pytest.raises(ValueError, match="line 2"):
            read_edge_list(p)
        p.write_text("vertices 3\n0 x\n")
        with pytest.raises(ValueError, match="non-integer"):
            read_edge_list(p)
        p.write_text("# nothing\n")
        with pytest.raises(ValueError, match="missing"):
            read_edge_list(p)

    def test_isolated_vertices_allowed(self, tmp_path):
        p = tmp_path / "g.txt"
        p.write_text("vertices 5\n")
        count, edges = read_edge_list(p)
        assert count == 5 and edges.shape == (0, 2)


class TestAtomicWrites:
    def test_no_temp_files_left_behind(self, tmp_path):
        write_scalar_csv(tmp_path / "f.csv", np.arange(3.0))
        assert sorted(os.listdir(tmp_path)) == ["f.csv"]

    def test_overwrite_replaces_contents(self, tmp_path):
        p = tmp_path / "f.csv"
        write_scalar_csv(p, np.array([1.0]))
        write_scalar_csv(p, np.array([2.0]))
        assert read_field_csv(p).values.tolist() == [2.0]
