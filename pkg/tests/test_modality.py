import numpy as np
import pytest

from cellbench.decoders import classify_modality_group, mean_saturation_value


def rgb_with_sv(saturation, value, shape=(16, 16)):
    """Uniform RGB image with the requested HSV saturation and value."""
    v = value
    mn = v * (1 - saturation)
    img = np.empty(shape + (3,))
    img[..., 0] = v
    img[..., 1] = mn
    img[..., 2] = mn
    return img


class TestGroupRules:
    def test_single_channel_goes_to_group_one(self, rng):
        assert classify_modality_group(rng.random((12, 12))) == 1
        assert classify_modality_group(rng.random((12, 12, 1))) == 1

    def test_stained_rgb_goes_to_group_two(self):
        img = rgb_with_sv(0.5, 0.3)
        s, v = mean_saturation_value(img)
        assert s == pytest.approx(0.5)
        assert v == pytest.approx(0.3)
        assert classify_modality_group(img) == 2

    def test_low_saturation_large_cells_group_three(self):
        img = rgb_with_sv(0.05, 0.3)
        assert classify_modality_group(img, cell_area_hint=10000) == 3

    def test_low_saturation_small_cells_group_four(self):
        img = rgb_with_sv(0.05, 0.3)
        assert classify_modality_group(img, cell_area_hint=500) == 4

    def test_value_out_of_range_falls_through(self):
        bright = rgb_with_sv(0.5, 0.9)
        assert classify_modality_group(bright, cell_area_hint=9000) == 3
        dark = rgb_with_sv(0.5, 0.05)
        assert classify_modality_group(dark, cell_area_hint=100) == 4

    def test_two_channel_image_rejected(self, rng):
        with pytest.raises(ValueError, match="channels"):
            classify_modality_group(rng.random((8, 8, 2)))

    def test_total_over_valid_inputs(self, rng):
        for _ in range(50):
            channels = int(rng.choice([1, 3]))
            img = rng.random((10, 10, channels)) if channels == 3 else rng.random((10, 10))
            group = classify_modality_group(img, cell_area_hint=float(rng.integers(0, 20000)))
            assert group in (1, 2, 3, 4)


class TestSaturationValue:
    def test_black_image_zero_saturation(self):
        s, v = mean_saturation_value(np.zeros((4, 4, 3)))
        assert (s, v) == (0.0, 0.0)

    def test_gray_pixels_zero_saturation(self):
        img = np.full((4, 4, 3), 0.5)
        s, v = mean_saturation_value(img)
        assert s == 0.0
        assert v == 0.5
