"""Thresholding, component selection, extraction, and the full pipeline."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from carve.errors import EmptyMaskWarning, ValidationError
from carve.imaging import ImageRGB
from carve.maskgen import (
    CarveConfig,
    CarveMask,
    Region,
    carve_pipeline,
    connected_components,
    extract,
    percentile_threshold,
    progressive_mask,
    select_regions,
)
from conftest import block_fixture, flood_regions


def checker_image(h=8, w=8):
    """Distinct pixel values so resampling mistakes are visible."""
    base = (np.arange(h * w, dtype=np.uint8) % 251).reshape(h, w)
    return ImageRGB(np.stack([base, base + 1, base + 2], axis=-1).astype(np.uint8))


class TestPercentileThreshold:
    def test_worked_example(self):
        s = np.arange(1.0, 9.0).reshape(2, 4)
        # k = ceil(0.25 * 8) = 2 -> threshold is the 2nd largest
        assert percentile_threshold(s, 0.25) == 7.0

    def test_p_one_keeps_everything(self):
        s = np.array([[3.0, 1.0], [2.0, 5.0]])
        assert percentile_threshold(s, 1.0) == 1.0

    def test_tiny_p_keeps_at_least_one(self):
        s = np.array([[3.0, 1.0], [2.0, 5.0]])
        assert percentile_threshold(s, 1e-9) == 5.0

    def test_ties_keep_the_whole_tier(self):
        s = np.array([[1.0, 2.0, 2.0, 2.0, 5.0]])
        tau = percentile_threshold(s, 0.4)  # k = 2
        assert tau == 2.0
        assert int((s >= tau).sum()) == 4

    def test_scale_invariance(self, rng):
        s = rng.uniform(0.0, 1.0, (13, 17))
        for p in (0.1, 0.3, 0.7):
            m1 = s >= percentile_threshold(s, p)
            m2 = 3.0 * s >= percentile_threshold(3.0 * s, p)
            assert np.array_equal(m1, m2)

    def test_bad_p_rejected(self):
        s = np.ones((2, 2))
        for p in (0.0, -0.1, 1.5):
            with pytest.raises(ValidationError):
                percentile_threshold(s, p)

    @settings(max_examples=100, deadline=None)
    @given(
        st.integers(1, 12),
        st.integers(1, 12),
        st.floats(1e-6, 1.0),
        st.integers(0, 2**32 - 1),
    )
    def test_property_nearest_rank(self, h, w, p, seed):
        r = np.random.default_rng(seed)
        s = r.uniform(0.0, 1.0, (h, w))
        if r.uniform() < 0.5:  # exercise ties too
            s = np.round(s, 1)
        tau = percentile_threshold(s, p)
        k = int(np.ceil(p * s.size))
        kept = int((s >= tau).sum())
        strictly_above = int((s > tau).sum())
        assert kept >= k  # retention covers the quota
        assert strictly_above < k  # smallest threshold doing so


class TestConnectedComponents:
    def test_matches_flood_fill_oracle(self, rng):
        for _ in range(30):
            mask = (rng.uniform(size=(9, 11)) < 0.45).astype(np.uint8)
            s = rng.uniform(0.5, 1.5, mask.shape)
            for conn in (4, 8):
                regions = connected_components(mask, conn, s)
                got = {frozenset(map(tuple, r.pixels.tolist())) for r in regions}
                assert got == flood_regions(mask, conn)

    def test_diagonal_connectivity(self):
        mask = np.eye(4, dtype=np.uint8)
        s = np.ones((4, 4))
        assert len(connected_components(mask, 8, s)) == 1
        assert len(connected_components(mask, 4, s)) == 4

    def test_regions_ordered_by_bbox(self):
        mask = np.zeros((5, 5), np.uint8)
        mask[3:5, 0:2] = 1  # bottom-left
        mask[0:2, 3:5] = 1  # top-right
        regions = connected_components(mask, 4, np.ones((5, 5)))
        assert [r.bbox for r in regions] == [(0, 3, 1, 4), (3, 0, 4, 1)]

    def test_pixels_row_major_and_scored(self):
        mask = np.zeros((3, 3), np.uint8)
        mask[1, 1] = mask[1, 2] = mask[2, 1] = 1
        s = np.arange(9.0).reshape(3, 3)
        (region,) = connected_components(mask, 4, s)
        assert region.pixels.tolist() == [[1, 1], [1, 2], [2, 1]]
        assert region.cumulative_score == s[1, 1] + s[1, 2] + s[2, 1]
        assert region.size == 3
        assert region.bbox == (1, 1, 2, 2)

    def test_empty_mask_no_regions(self):
        assert connected_components(np.zeros((3, 3)), 8, np.ones((3, 3))) == []

    def test_shape_mismatch_rejected(self):
        with pytest.raises(ValidationError):
            connected_components(np.ones((2, 2)), 8, np.ones((3, 3)))

    def test_bad_connectivity_rejected(self):
        with pytest.raises(ValidationError):
            connected_components(np.ones((2, 2)), 6, np.ones((2, 2)))


class TestSelectRegions:
    def two_region_setup(self):
        s = np.zeros((4, 6))
        s[0, 0:2] = 5.0  # region A, score 10
        s[3, 3:6] = 4.0  # region B, score 12
        mask = (s > 0).astype(np.uint8)
        regions = connected_components(mask, 4, s)
        return regions, s

    def test_keeps_top_k_by_score(self):
        regions, s = self.two_region_setup()
        kept = select_regions(regions, s, 1)
        assert len(kept.regions) == 1
        assert kept.regions[0].cumulative_score == 12.0
        assert kept.bits[3, 3] == 1 and kept.bits[0, 0] == 0

    def test_k_beyond_region_count_keeps_all(self):
        regions, s = self.two_region_setup()
        kept = select_regions(regions, s, 10)
        assert len(kept.regions) == 2
        assert kept.coverage == pytest.approx(5 / 24)

    def test_score_tie_prefers_earlier_bbox(self):
        s = np.ones((4, 4))
        mask = np.zeros((4, 4), np.uint8)
        mask[0, 0:2] = 1
        mask[3, 2:4] = 1
        regions = connected_components(mask, 4, s)
        kept = select_regions(regions, s, 1)
        assert kept.regions[0].bbox == (0, 0, 0, 1)

    def test_no_regions_gives_empty_mask(self):
        mask = select_regions([], np.ones((2, 2)), 3)
        assert mask.is_empty()

    def test_bad_k_rejected(self):
        with pytest.raises(ValidationError):
            select_regions([], np.ones((2, 2)), 0)


class TestRegionAndMaskTypes:
    def test_region_validation(self):
        with pytest.raises(ValidationError):
            Region(np.zeros((0, 2)), (0, 0, 0, 0), 0.0)
        with pytest.raises(ValidationError):
            Region(np.zeros((3, 3)), (0, 0, 0, 0), 0.0)

    def test_mask_normalizes_to_bits(self):
        mask = CarveMask(np.array([[0, 7], [3, 0]]))
        assert mask.bits.tolist() == [[0, 1], [1, 0]]
        assert mask.coverage == 0.5
        assert not mask.is_empty()
        with pytest.raises(ValueError):
            mask.bits[0, 0] = 1

    def test_mask_validation(self):
        with pytest.raises(ValidationError):
            CarveMask(np.ones(4))


class TestExtract:
    def quadrant_mask(self, h=8, w=8):
        bits = np.zeros((h, w), np.uint8)
        bits[h // 2:, w // 2:] = 1
        return CarveMask(bits)

    def test_stretch_upscales_the_quadrant(self):
        img = checker_image()
        cfg = CarveConfig(resize_policy="stretch")
        res = extract(img, self.quadrant_mask(), cfg)
        assert not res.used_fallback
        assert res.crop_bbox == (4, 4, 7, 7)
        # nearest upscale 4x4 -> 8x8 duplicates each source pixel 2x2
        quad = img.pixels[4:8, 4:8]
        want = quad.repeat(2, axis=0).repeat(2, axis=1)
        assert np.array_equal(res.image.pixels, want)

    def test_fit_pad_square_crop_equals_stretch(self):
        img = checker_image()
        a = extract(img, self.quadrant_mask(), CarveConfig(resize_policy="stretch"))
        b = extract(img, self.quadrant_mask(), CarveConfig(resize_policy="fit_pad"))
        assert np.array_equal(a.image.pixels, b.image.pixels)

    def test_fit_pad_pads_the_short_axis(self):
        img = checker_image()
        bits = np.zeros((8, 8), np.uint8)
        bits[:, 3] = 1  # full-height single column
        res = extract(img, CarveMask(bits), CarveConfig(fill=(7, 7, 7)))
        assert res.crop_bbox == (0, 3, 7, 3)
        # scale = min(8/8, 8/1) = 1: the column lands centered at x = 3
        assert np.array_equal(res.image.pixels[:, 3], img.pixels[:, 3])
        other = np.delete(res.image.pixels, 3, axis=1)
        assert (other == 7).all()

    def test_fill_applies_inside_the_crop(self):
        img = checker_image(4, 4)
        bits = np.zeros((4, 4), np.uint8)
        bits[0, 0] = bits[3, 3] = 1
        res = extract(img, CarveMask(bits), CarveConfig(fill=(255, 0, 255)))
        assert res.crop_bbox == (0, 0, 3, 3)
        assert np.array_equal(res.image.pixels[0, 0], img.pixels[0, 0])
        assert np.array_equal(res.image.pixels[1, 1], [255, 0, 255])

    def test_empty_mask_falls_back_with_warning(self):
        img = checker_image(4, 4)
        with pytest.warns(EmptyMaskWarning):
            res = extract(img, CarveMask(np.zeros((4, 4))))
        assert res.used_fallback
        assert res.crop_bbox is None
        assert np.array_equal(res.image.pixels, img.pixels)

    def test_size_mismatch_rejected(self):
        with pytest.raises(ValidationError):
            extract(checker_image(4, 4), self.quadrant_mask(8, 8))


class TestProgressiveMask:
    def test_fills_floor_ratio_least_salient(self):
        img = checker_image(4, 4)
        s = np.arange(16.0).reshape(4, 4)
        out = progressive_mask(img, s, 0.25, fill=(0, 0, 0))
        # floor(0.25 * 16) = 4 lowest-saliency pixels are the first row
        assert (out.pixels[0] == 0).all()
        assert np.array_equal(out.pixels[1:], img.pixels[1:])

    def test_ratio_zero_is_identity(self):
        img = checker_image(4, 4)
        out = progressive_mask(img, np.ones((4, 4)), 0.0)
        assert np.array_equal(out.pixels, img.pixels)

    def test_ratio_one_fills_everything(self):
        img = checker_image(4, 4)
        out = progressive_mask(img, np.ones((4, 4)), 1.0, fill=(5, 6, 7))
        assert (out.pixels == [5, 6, 7]).all()

    def test_deterministic_under_ties(self, rng):
        img = checker_image(6, 6)
        s = np.round(rng.uniform(0.0, 1.0, (6, 6)), 1)
        a = progressive_mask(img, s, 0.5)
        b = progressive_mask(img, s, 0.5)
        assert np.array_equal(a.pixels, b.pixels)

    def test_monotone_in_ratio(self, rng):
        img = ImageRGB(rng.integers(1, 255, (6, 6, 3)).astype(np.uint8))
        s = rng.uniform(0.0, 1.0, (6, 6))
        prev_filled = -1
        for ratio in (0.0, 0.2, 0.5, 0.9, 1.0):
            out = progressive_mask(img, s, ratio, fill=(0, 0, 0))
            filled = int((out.pixels == 0).all(axis=-1).sum())
            assert filled == int(np.floor(ratio * 36))
            assert filled >= prev_filled
            prev_filled = filled

    def test_bad_inputs_rejected(self):
        img = checker_image(4, 4)
        with pytest.raises(ValidationError):
            progressive_mask(img, np.ones((4, 4)), 1.5)
        with pytest.raises(ValidationError):
            progressive_mask(img, np.ones((2, 2)), 0.5)
        with pytest.raises(ValidationError):
            progressive_mask(img, np.ones((4, 4)), 0.5, fill=(300, 0, 0))


class TestCarveConfig:
    def test_defaults_are_valid(self):
        cfg = CarveConfig()
        assert cfg.p == 0.4 and cfg.k == 2 and cfg.layer_range == (20, 25)

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"p": 0.0},
            {"p": 1.2},
            {"k": 0},
            {"lam": -1.0},
            {"layer_start": 5, "layer_end": 4},
            {"step_select": "median"},
            {"connectivity": 5},
            {"fill": (0, 0)},
            {"fill": (0, 0, 300)},
            {"resize_policy": "crop"},
            {"reshape_mode": "cubic"},
        ],
    )
    def test_invalid_rejected(self, kwargs):
        with pytest.raises(ValidationError):
            CarveConfig(**kwargs)


class TestCarvePipeline:
    def run_block(self, lam):
        question, general, bbox = block_fixture()
        image = ImageRGB(np.full((448, 448, 3), 128, np.uint8))
        cfg = CarveConfig(p=0.3, k=1, lam=lam, step_select="full")
        return carve_pipeline(image, question, general, cfg), bbox

    @pytest.mark.parametrize("lam", [0.05, 1e-3])
    def test_block_recovered_exactly(self, lam):
        result, bbox = self.run_block(lam)
        assert result.crop_bbox == bbox
        assert not result.used_fallback
        assert result.regions_considered == 2
        (kept,) = result.mask.regions
        assert kept.bbox == bbox
        assert kept.size == 96 * 96

    def test_diagnostics_populated(self):
        result, _ = self.run_block(0.05)
        assert result.steps_used == tuple(range(10))
        assert sorted(result.per_layer_entropy) == list(range(20, 26))
        assert result.overall_entropy == pytest.approx(
            np.mean(list(result.per_layer_entropy.values()))
        )
        assert 0.0 < result.tau
        assert result.mask.coverage == pytest.approx(9216 / 200704)

    def test_prompt_kind_roles_enforced(self):
        question, general, _ = block_fixture()
        image = ImageRGB(np.full((448, 448, 3), 128, np.uint8))
        with pytest.raises(ValidationError, match="question"):
            carve_pipeline(image, general, general)
        with pytest.raises(ValidationError, match="general"):
            carve_pipeline(image, question, question)

    def test_layer_range_outside_stack_rejected(self):
        question, general, _ = block_fixture()
        image = ImageRGB(np.full((448, 448, 3), 128, np.uint8))
        cfg = CarveConfig(layer_start=0, layer_end=5)
        with pytest.raises(ValidationError, match="layers"):
            carve_pipeline(image, question, general, cfg)

    def test_repeat_runs_identical(self):
        a, _ = self.run_block(0.05)
        b, _ = self.run_block(0.05)
        assert np.array_equal(a.image.pixels, b.image.pixels)
        assert np.array_equal(a.mask.bits, b.mask.bits)
        assert a.tau == b.tau
        assert np.array_equal(a.saliency.values, b.saliency.values)
