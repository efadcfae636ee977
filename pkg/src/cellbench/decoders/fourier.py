"""Fourier-series cell contours: sampling, rasterization, uncertainty NMS."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..labelmap import LabelMap
from .starpoly import DEFAULT_NMS_IOU, points_in_polygon

MIN_CONTOUR_SAMPLES = 8


@dataclass
class FourierContour:
    """Closed contour encoded by truncated Fourier series per axis.

    ``coefficients`` has one row (a_k, b_k, c_k, d_k) per harmonic k >= 1;
    the x (column) curve uses a/b, the y (row) curve uses c/d, with DC
    offsets ``a0`` (column) and ``c0`` (row).
    """

    a0: float
    c0: float
    coefficients: np.ndarray
    score: float = 1.0
    uncertainty: float = 0.0

    def __post_init__(self):
        self.coefficients = np.asarray(self.coefficients, np.float64).reshape(-1, 4)
        if not np.all(np.isfinite(self.coefficients)):
            raise ValueError("coefficients must be finite")
        if self.uncertainty < 0:
            raise ValueError("uncertainty must be non-negative")

    @property
    def order(self) -> int:
        return int(self.coefficients.shape[0])


def sample_contour(contour: FourierContour, samples: int) -> tuple[np.ndarray, np.ndarray]:
    """(rows, cols) of the curve at ``samples`` equally spaced parameters."""
    if samples < MIN_CONTOUR_SAMPLES:
        raise ValueError(f"samples must be >= {MIN_CONTOUR_SAMPLES}")
    t = 2.0 * np.pi * np.arange(samples) / samples
    cols = np.full(samples, contour.a0)
    rows = np.full(samples, contour.c0)
    for k in range(1, contour.order + 1):
        a, b, c, d = contour.coefficients[k - 1]
        cols = cols + a * np.cos(k * t) + b * np.sin(k * t)
        rows = rows + c * np.cos(k * t) + d * np.sin(k * t)
    return rows, cols


def contour_pixels(contour: FourierContour, samples: int) -> tuple[np.ndarray, np.ndarray]:
    """Lattice pixels enclosed by the sampled curve (unclipped coordinates).

    The sampled closed curve is filled with the even-odd rule, the standard
    scanline rasterization (self-intersecting curves fill by parity). A
    degenerate curve that encloses no pixel center yields its single rounded
    start point.
    """
    rows, cols = sample_contour(contour, samples)
    verts = np.stack([rows, cols], axis=1)
    r_lo, r_hi = int(np.floor(rows.min())), int(np.ceil(rows.max()))
    c_lo, c_hi = int(np.floor(cols.min())), int(np.ceil(cols.max()))
    rr, cc = np.meshgrid(np.arange(r_lo, r_hi + 1), np.arange(c_lo, c_hi + 1), indexing="ij")
    inside = points_in_polygon(verts, rr.ravel(), cc.ravel())
    ys, xs = rr.ravel()[inside], cc.ravel()[inside]
    if ys.size == 0:
        ys = np.array([int(np.floor(rows[0] + 0.5))])
        xs = np.array([int(np.floor(cols[0] + 0.5))])
    return ys, xs


def rasterize_contour(contour: FourierContour, samples: int, height: int, width: int) -> np.ndarray:
    """Boolean mask of the filled contour, clipped to the canvas."""
    ys, xs = contour_pixels(contour, samples)
    mask = np.zeros((height, width), bool)
    keep = (ys >= 0) & (ys < height) & (xs >= 0) & (xs < width)
    mask[ys[keep], xs[keep]] = True
    return mask


def contour_nms(
    contours: list[FourierContour],
    samples: int,
    iou_threshold: float = DEFAULT_NMS_IOU,
) -> list[FourierContour]:
    """Uncertainty-aware NMS: score descending, lower uncertainty wins ties.

    Suppression uses rasterized IoU against already-kept contours; remaining
    ties fall back to input order.
    """
    order = sorted(
        range(len(contours)),
        key=lambda i: (-contours[i].score, contours[i].uncertainty, i),
    )
    kept: list[FourierContour] = []
    kept_sets: list[set] = []
    for i in order:
        ys, xs = contour_pixels(contours[i], samples)
        pixels = set(zip(ys.tolist(), xs.tolist()))
        suppressed = False
        for other in kept_sets:
            union = len(pixels | other)
            if union and len(pixels & other) / union > iou_threshold:
                suppressed = True
                break
        if not suppressed:
            kept.append(contours[i])
            kept_sets.append(pixels)
    return kept


def decode_fourier_contours(
    contours: list[FourierContour],
    samples_per_contour: int,
    height: int,
    width: int,
    iou_threshold: float = DEFAULT_NMS_IOU,
) -> LabelMap:
    """Contours to an instance map: NMS, rasterize, fill; earlier keeps win."""
    if samples_per_contour < MIN_CONTOUR_SAMPLES:
        raise ValueError(f"samples_per_contour must be >= {MIN_CONTOUR_SAMPLES}")
    survivors = contour_nms(contours, samples_per_contour, iou_threshold)
    out = np.zeros((height, width), np.int32)
    next_label = 0
    for contour in survivors:
        mask = rasterize_contour(contour, samples_per_contour, height, width)
        vacant = mask & (out == 0)
        if vacant.any():
            next_label += 1
            out[vacant] = next_label
    return out
