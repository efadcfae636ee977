"""Compiled core vs pure-NumPy fallback: both routes must agree exactly."""

import numpy as np
import pytest

from cellbench._kernels import _fallback

try:
    from cellbench._kernels import _core
except ImportError:
    _core = None

needs_core = pytest.mark.skipif(_core is None, reason="compiled kernels not built")


def random_flood_inputs(rng, h, w, n_markers):
    elevation = rng.normal(size=(h, w))
    fg = rng.random((h, w)) > 0.25
    markers = np.zeros((h, w), np.int32)
    ys, xs = np.nonzero(fg)
    if ys.size:
        picks = rng.choice(ys.size, size=min(n_markers, ys.size), replace=False)
        for i, k in enumerate(picks):
            markers[ys[k], xs[k]] = i + 1
    return elevation, markers, fg


class TestFallbackBasics:
    def test_label_overlap_counts(self):
        a = np.array([[0, 1], [2, 2]])
        b = np.array([[0, 1], [1, 0]])
        ov = _fallback.label_overlap(a, b)
        assert ov.shape == (3, 2)
        assert ov[1, 1] == 1 and ov[2, 1] == 1 and ov[2, 0] == 1 and ov[0, 0] == 1

    def test_components_numbered_by_raster_order(self):
        labels = np.zeros((4, 6), int)
        labels[3, 0] = 7
        labels[0, 5] = 7
        out, n = _fallback.connected_components_4(labels)
        assert n == 2
        assert out[0, 5] == 1  # first in raster order
        assert out[3, 0] == 2

    def test_flood_respects_elevation_order(self):
        elevation = np.array([[0.0, 1.0, 0.5, 0.0]])
        markers = np.array([[1, 0, 0, 2]], np.int32)
        fg = np.ones((1, 4), bool)
        out = _fallback.priority_flood(elevation, markers, fg)
        # basin 2 reaches the 0.5 pixel before basin 1 crosses the 1.0 ridge
        assert out.tolist() == [[1, 1, 2, 2]]

    def test_advect_moves_toward_sink(self):
        h = w = 9
        fy = np.zeros((h, w))
        fx = np.zeros((h, w))
        yy, xx = np.mgrid[0:h, 0:w]
        fy = np.sign(4 - yy).astype(float)
        fx = np.sign(4 - xx).astype(float)
        ys, xs = np.array([0.0, 8.0]), np.array([0.0, 8.0])
        y1, x1 = _fallback.flow_advect(fy, fx, ys, xs, 20)
        assert np.allclose(y1, 4.0) and np.allclose(x1, 4.0)


@needs_core
class TestCompiledMatchesFallback:
    def test_label_overlap(self, rng):
        for _ in range(10):
            a = rng.integers(0, 9, (31, 27))
            b = rng.integers(0, 6, (31, 27))
            assert np.array_equal(_core.label_overlap(a, b), _fallback.label_overlap(a, b))

    def test_connected_components(self, rng):
        for _ in range(10):
            labels = rng.integers(0, 5, (24, 24))
            got, ng = _core.connected_components_4(labels)
            want, nw = _fallback.connected_components_4(labels)
            assert ng == nw
            assert np.array_equal(got, want)

    def test_connected_components_empty_and_full(self):
        for labels in (np.zeros((5, 5), int), np.ones((5, 5), int)):
            got, ng = _core.connected_components_4(labels)
            want, nw = _fallback.connected_components_4(labels)
            assert ng == nw and np.array_equal(got, want)

    def test_priority_flood(self, rng):
        for _ in range(10):
            elevation, markers, fg = random_flood_inputs(rng, 25, 30, 6)
            got = _core.priority_flood(elevation, markers, fg)
            want = _fallback.priority_flood(elevation, markers, fg)
            assert np.array_equal(got, want)

    def test_heat_diffusion_bit_identical(self, rng):
        mask = np.zeros((30, 26), bool)
        mask[3:27, 4:22] = rng.random((24, 18)) > 0.3
        mask[15, 12] = True
        got = _core.heat_diffusion(mask, 15, 12, 80)
        want = _fallback.heat_diffusion(mask, 15, 12, 80)
        assert np.array_equal(got, want)

    def test_flow_advect_bit_identical(self, rng):
        fy = rng.normal(size=(40, 40))
        fx = rng.normal(size=(40, 40))
        ys = rng.random(500) * 39
        xs = rng.random(500) * 39
        gy, gx = _core.flow_advect(fy, fx, ys, xs, 150)
        wy, wx = _fallback.flow_advect(fy, fx, ys, xs, 150)
        assert np.array_equal(gy, wy)
        assert np.array_equal(gx, wx)


class TestImportSelection:
    def test_env_var_forces_fallback(self, tmp_path):
        import subprocess
        import sys

        code = (
            "import cellbench._kernels as k; import sys; "
            "sys.exit(0 if not k.HAVE_COMPILED else 1)"
        )
        proc = subprocess.run(
            [sys.executable, "-c", code],
            env={"CELLBENCH_NO_EXT": "1", "PATH": "/usr/bin:/bin"},
            capture_output=True,
        )
        assert proc.returncode == 0, proc.stderr.decode()
