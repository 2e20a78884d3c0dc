"""Contrastive refinement, spatial resampling, and fusion."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from carve.attention import AttentionMap
from carve.contrast import (
    ContrastConfig,
    FusedSaliency,
    contrast_refine,
    fuse,
    resolve_steps,
    spatial_reshape,
)
from carve.errors import ValidationError
from conftest import pair_from_grids


class TestContrastRefine:
    def test_worked_example(self):
        got = contrast_refine(
            np.array([0.2, 0.8]), np.array([0.1, 0.9]), ContrastConfig(lam=0.05)
        )
        assert got[0] == pytest.approx(0.2 / 0.15, abs=1e-15)
        assert got[1] == pytest.approx(0.8 / 0.95, abs=1e-15)

    def test_default_lambda(self):
        got = contrast_refine(np.array([1.0]), np.array([0.0]))
        assert got[0] == 1.0 / 0.05

    def test_attention_map_inputs(self):
        q = AttentionMap(0, 0, 1, 2, np.array([0.25, 0.75]))
        g = AttentionMap(0, 0, 1, 2, np.array([0.5, 0.5]))
        got = contrast_refine(q, g, ContrastConfig(lam=0.0))
        assert np.allclose(got, [0.5, 1.5])

    def test_grid_mismatch_rejected(self):
        q = AttentionMap(0, 0, 1, 4, np.full(4, 0.25))
        g = AttentionMap(0, 0, 2, 2, np.full(4, 0.25))
        with pytest.raises(ValidationError, match="grid"):
            contrast_refine(q, g)

    def test_shape_mismatch_rejected(self):
        with pytest.raises(ValidationError, match="shape"):
            contrast_refine(np.ones(3), np.ones(4))

    def test_mixed_inputs_rejected(self):
        q = AttentionMap(0, 0, 1, 2, np.array([0.5, 0.5]))
        with pytest.raises(ValidationError):
            contrast_refine(q, np.array([0.5, 0.5]))

    def test_lam_zero_needs_positive_general(self):
        with pytest.raises(ValidationError, match="lam"):
            contrast_refine(np.array([1.0]), np.array([0.0]), ContrastConfig(lam=0.0))

    def test_negative_weights_rejected(self):
        with pytest.raises(ValidationError):
            contrast_refine(np.array([-1.0]), np.array([1.0]))
        with pytest.raises(ValidationError):
            contrast_refine(np.array([1.0]), np.array([-1.0]))

    def test_bad_lambda_rejected(self):
        with pytest.raises(ValidationError):
            ContrastConfig(lam=-0.1)
        with pytest.raises(ValidationError):
            ContrastConfig(lam=float("nan"))

    @settings(max_examples=50, deadline=None)
    @given(st.integers(1, 32), st.integers(0, 2**32 - 1))
    def test_property_matches_scalar_division(self, n, seed):
        r = np.random.default_rng(seed)
        q = r.uniform(0.0, 1.0, n)
        g = r.uniform(0.0, 1.0, n)
        lam = float(r.uniform(1e-3, 1.0))
        got = contrast_refine(q, g, ContrastConfig(lam=lam))
        for i in range(n):
            assert got[i] == q[i] / (g[i] + lam)


class TestSpatialReshape:
    def test_nearest_integer_multiple_gives_blocks(self):
        g = np.array([[1.0, 2.0], [3.0, 4.0]])
        out = spatial_reshape(g, 4, 4, "nearest")
        want = np.array(
            [
                [1.0, 1.0, 2.0, 2.0],
                [1.0, 1.0, 2.0, 2.0],
                [3.0, 3.0, 4.0, 4.0],
                [3.0, 3.0, 4.0, 4.0],
            ]
        )
        assert np.array_equal(out, want)

    def test_nearest_non_multiple_uses_floor_rule(self):
        g = np.array([[1.0, 2.0], [3.0, 4.0]])
        out = spatial_reshape(g, 3, 3, "nearest")
        # row/col index = i * 2 // 3 -> [0, 0, 1]
        want = np.array([[1.0, 1.0, 2.0], [1.0, 1.0, 2.0], [3.0, 3.0, 4.0]])
        assert np.array_equal(out, want)

    def test_identity_when_target_equals_grid(self):
        g = np.arange(12, dtype=np.float64).reshape(3, 4) + 1.0
        for mode in ("nearest", "bilinear"):
            assert np.array_equal(spatial_reshape(g, 3, 4, mode), g)

    def test_bilinear_midpoint_interpolates(self):
        g = np.array([[0.0, 1.0]])
        out = spatial_reshape(g, 1, 4, "bilinear")
        # src centers (j + .5) * 2/4 - .5 = [-.25, .25, .75, 1.25], clamped
        assert np.allclose(out, [[0.0, 0.25, 0.75, 1.0]])

    def test_bilinear_preserves_range(self, rng):
        g = rng.uniform(0.0, 5.0, (7, 5))
        out = spatial_reshape(g, 30, 41, "bilinear")
        assert out.min() >= g.min() - 1e-12
        assert out.max() <= g.max() + 1e-12

    def test_downscale_rejected(self):
        g = np.ones((4, 4))
        with pytest.raises(ValidationError, match="smaller"):
            spatial_reshape(g, 2, 8)

    def test_bad_mode_rejected(self):
        with pytest.raises(ValidationError, match="mode"):
            spatial_reshape(np.ones((2, 2)), 4, 4, "bicubic")

    def test_constant_grid_stays_constant(self, rng):
        g = np.full((3, 3), 2.5)
        for mode in ("nearest", "bilinear"):
            out = spatial_reshape(g, 17, 23, mode)
            assert np.allclose(out, 2.5)


class TestResolveSteps:
    def make_pair(self, q_steps, g_steps):
        grid = np.full((2, 2), 0.25)
        q = pair_from_grids(grid, grid, steps=q_steps)[0]
        g = pair_from_grids(grid, grid, steps=g_steps)[1]
        return q, g

    def test_selectors(self):
        q, g = self.make_pair(range(0, 6), range(2, 9))
        assert resolve_steps(q, g, "start") == (2,)
        assert resolve_steps(q, g, "end") == (5,)
        assert resolve_steps(q, g, "full") == (2, 3, 4, 5)

    def test_identical_ranges(self):
        q, g = self.make_pair(range(3), range(3))
        assert resolve_steps(q, g, "full") == (0, 1, 2)

    def test_disjoint_ranges_rejected(self):
        q, g = self.make_pair(range(0, 3), range(5, 8))
        with pytest.raises(ValidationError, match="share no steps"):
            resolve_steps(q, g, "end")

    def test_bad_selector_rejected(self):
        q, g = self.make_pair(range(3), range(3))
        with pytest.raises(ValidationError, match="selector"):
            resolve_steps(q, g, "middle")


class TestFuse:
    def test_single_grid_weight_one(self):
        g = np.array([[1.0, 2.0], [3.0, 4.0]])
        out = fuse({(0, 5): g}, [0], [5], 2, 2)
        assert np.array_equal(out.values, g)

    def test_step_weights_grow_linearly(self):
        a = np.full((1, 1), 1.0)
        b = np.full((1, 1), 10.0)
        out = fuse({(0, 3): a, (0, 4): b}, [0], [3, 4], 1, 1)
        # w(3) = 1, w(4) = 2 -> 1*1 + 2*10
        assert out.values[0, 0] == 21.0

    def test_layers_sum_unweighted(self):
        a = np.full((1, 1), 1.0)
        b = np.full((1, 1), 10.0)
        out = fuse({(0, 0): a, (1, 0): b}, [0, 1], [0], 1, 1)
        assert out.values[0, 0] == 11.0

    def test_weights_anchor_at_first_fused_step(self):
        # identical values at steps (7, 8) weigh 1 and 2, not 8 and 9
        g = np.full((1, 1), 1.0)
        out = fuse({(0, 7): g, (0, 8): g}, [0], [7, 8], 1, 1)
        assert out.values[0, 0] == 3.0

    def test_upscales_while_fusing(self):
        g = np.array([[1.0, 3.0]])
        out = fuse({(2, 0): g}, [2], [0], 2, 4)
        assert np.array_equal(out.values, [[1.0, 1.0, 3.0, 3.0], [1.0, 1.0, 3.0, 3.0]])

    def test_missing_grid_rejected(self):
        g = np.ones((2, 2))
        with pytest.raises(ValidationError, match="missing"):
            fuse({(0, 0): g}, [0, 1], [0], 2, 2)

    def test_empty_selection_rejected(self):
        with pytest.raises(ValidationError):
            fuse({}, [], [0], 2, 2)


class TestFusedSaliency:
    def test_invariants(self):
        with pytest.raises(ValidationError):
            FusedSaliency(np.ones(4))  # 1-d
        with pytest.raises(ValidationError):
            FusedSaliency(np.array([[1.0, np.inf]]))
        with pytest.raises(ValidationError):
            FusedSaliency(np.array([[1.0, -1.0]]))
        with pytest.raises(ValidationError):
            FusedSaliency(np.zeros((2, 2)))

    def test_values_frozen(self):
        s = FusedSaliency(np.ones((2, 3)))
        assert (s.height, s.width) == (2, 3)
        with pytest.raises(ValueError):
            s.values[0, 0] = 9.0
