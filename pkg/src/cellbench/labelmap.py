"""Instance label maps: loading, normalization, and quality-control rules.

A label map is a 2D integer array where 0 is background and each positive
value identifies one cell instance. Functions here treat arrays as immutable
and always return new arrays.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np
import tifffile
from PIL import Image

from ._kernels import connected_components_4

# QC thresholds used for dataset curation
SMALL_CELL_MIN_PIXELS = 15
QC_MIN_CELLS = 5

# type alias: 2D non-negative integer array, 0 = background
LabelMap = np.ndarray

_PNG_SUFFIXES = {".png"}
_TIFF_SUFFIXES = {".tif", ".tiff"}


@dataclass(frozen=True)
class ImageMeta:
    """Basic file-level facts about an image on disk."""

    path: str
    channels: int
    height: int
    width: int

    @property
    def pixel_count(self) -> int:
        return self.height * self.width


@dataclass
class QcReport:
    """Outcome of the image quality-control rules."""

    cell_count: int
    removed_small_cells: int
    passed: bool
    reasons: list[str] = field(default_factory=list)


def as_label_map(arr) -> LabelMap:
    """Validate and return ``arr`` as a label map (2D, integer, >= 0)."""
    out = np.asarray(arr)
    if out.ndim != 2:
        raise ValueError(f"label map must be 2D, got shape {out.shape}")
    if out.shape[0] < 1 or out.shape[1] < 1:
        raise ValueError(f"label map must be at least 1x1, got shape {out.shape}")
    if not np.issubdtype(out.dtype, np.integer):
        if np.issubdtype(out.dtype, np.bool_):
            out = out.astype(np.int32)
        else:
            raise ValueError(f"label map must have integer dtype, got {out.dtype}")
    if out.size and out.min() < 0:
        raise ValueError("label map contains negative values")
    return out


def instance_labels(labels: LabelMap) -> np.ndarray:
    """Sorted unique nonzero instance ids."""
    u = np.unique(labels)
    return u[u > 0]


def instance_count(labels: LabelMap) -> int:
    return int(instance_labels(labels).size)


def load_label_map(path) -> LabelMap:
    """Read a single-channel 8/16-bit PNG or TIFF as a label map.

    Pixel values are taken verbatim as instance ids; no normalization is
    applied on load.
    """
    path = os.fspath(path)
    suffix = os.path.splitext(path)[1].lower()
    if suffix in _TIFF_SUFFIXES:
        arr = tifffile.imread(path)
        if arr.ndim == 3:
            raise ValueError(f"multi-channel label image: {path}")
        if not np.issubdtype(arr.dtype, np.integer):
            raise ValueError(f"label image must be integer, got {arr.dtype}: {path}")
        if arr.dtype.itemsize > 2:
            raise ValueError(f"label image bit depth > 16: {path}")
        return as_label_map(arr.astype(np.int32))
    with Image.open(path) as img:
        if img.mode in ("L", "P") or img.mode.startswith("I;16"):
            # palette images carry instance ids as raw indices
            arr = np.asarray(img, dtype=np.int32)
        elif img.mode == "I":
            raise ValueError(f"label image bit depth > 16: {path}")
        else:
            raise ValueError(f"multi-channel label image: {path}")
    return as_label_map(arr)


def save_label_map(labels: LabelMap, path) -> None:
    """Write a label map as 16-bit single-channel PNG."""
    labels = as_label_map(labels)
    if labels.size and labels.max() > np.iinfo(np.uint16).max:
        raise ValueError("label ids exceed 16-bit range")
    Image.fromarray(labels.astype(np.uint16)).save(os.fspath(path))


def image_meta(path) -> ImageMeta:
    """File metadata (channel count and dimensions) without full decoding."""
    path = os.fspath(path)
    suffix = os.path.splitext(path)[1].lower()
    if suffix in _TIFF_SUFFIXES:
        arr = tifffile.imread(path)
        if arr.ndim == 2:
            h, w = arr.shape
            channels = 1
        else:
            h, w = arr.shape[:2]
            channels = int(arr.shape[2])
        return ImageMeta(path=path, channels=channels, height=int(h), width=int(w))
    with Image.open(path) as img:
        w, h = img.size
        channels = len(img.getbands())
    return ImageMeta(path=path, channels=channels, height=int(h), width=int(w))


def relabel_connected(labels: LabelMap) -> LabelMap:
    """Split each label into its 4-connected components, renumbered 1..K.

    Components are numbered by first raster-scan occurrence; background is
    preserved. Idempotent up to the label partition.
    """
    labels = as_label_map(labels)
    out, _ = connected_components_4(labels)
    return out


def remove_boundary_cells(labels: LabelMap) -> LabelMap:
    """Zero out every instance with at least one pixel on the image border."""
    labels = as_label_map(labels)
    border = np.concatenate(
        [labels[0, :], labels[-1, :], labels[:, 0], labels[:, -1]]
    )
    border_ids = np.unique(border)
    border_ids = border_ids[border_ids > 0]
    if border_ids.size == 0:
        return labels.copy()
    out = labels.copy()
    out[np.isin(labels, border_ids)] = 0
    return out


def filter_small_cells(labels: LabelMap, min_pixels: int = SMALL_CELL_MIN_PIXELS) -> LabelMap:
    """Zero out instances with fewer than ``min_pixels`` pixels."""
    if min_pixels < 1:
        raise ValueError("min_pixels must be >= 1")
    labels = as_label_map(labels)
    ids, counts = np.unique(labels, return_counts=True)
    small = ids[(ids > 0) & (counts < min_pixels)]
    if small.size == 0:
        return labels.copy()
    out = labels.copy()
    out[np.isin(labels, small)] = 0
    return out


def qc_image(labels: LabelMap) -> QcReport:
    """Apply the curation rules: drop sub-15px cells, require >= 5 cells."""
    labels = as_label_map(labels)
    before = instance_count(labels)
    filtered = filter_small_cells(labels, SMALL_CELL_MIN_PIXELS)
    after = instance_count(filtered)
    reasons = []
    passed = after >= QC_MIN_CELLS
    if not passed:
        reasons.append(f"fewer than {QC_MIN_CELLS} cells (found {after})")
    return QcReport(
        cell_count=after,
        removed_small_cells=before - after,
        passed=passed,
        reasons=reasons,
    )
