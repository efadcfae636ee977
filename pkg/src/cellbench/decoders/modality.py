"""Rule-based routing of images into four modality groups.

Group 1: single-channel images. Group 2: RGB images whose HSV statistics
(mean saturation > 0.1, mean value in [0.1, 0.6]) indicate stained
brightfield-like content. Group 3: remaining images with large cells (mean
cell area above 8000 px). Group 4: everything else.
"""

from __future__ import annotations

import numpy as np

SATURATION_MIN = 0.1
VALUE_RANGE = (0.1, 0.6)
LARGE_CELL_AREA = 8000.0


def mean_saturation_value(rgb: np.ndarray) -> tuple[float, float]:
    """Mean HSV saturation and value of an RGB image scaled to [0, 1]."""
    rgb = np.asarray(rgb, np.float64)
    v = rgb.max(axis=2)
    mn = rgb.min(axis=2)
    with np.errstate(invalid="ignore", divide="ignore"):
        s = np.where(v > 0, (v - mn) / v, 0.0)
    return float(s.mean()), float(v.mean())


def classify_modality_group(image: np.ndarray, cell_area_hint: float = 0.0) -> int:
    """Route an intensity image (values in [0, 1]) to a group in {1,2,3,4}."""
    arr = np.asarray(image, np.float64)
    if arr.ndim == 2 or (arr.ndim == 3 and arr.shape[2] == 1):
        return 1
    if arr.ndim != 3 or arr.shape[2] != 3:
        channels = arr.shape[2] if arr.ndim == 3 else arr.ndim
        raise ValueError(f"expected 1 or 3 channels, got {channels}")
    s_mean, v_mean = mean_saturation_value(arr)
    if s_mean > SATURATION_MIN and VALUE_RANGE[0] <= v_mean <= VALUE_RANGE[1]:
        return 2
    if cell_area_hint > LARGE_CELL_AREA:
        return 3
    return 4
