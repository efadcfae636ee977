"""Marker-based watershed over an elevation map, plus marker derivation."""

from __future__ import annotations

import numpy as np
from scipy import ndimage

from .._kernels import priority_flood
from ..labelmap import LabelMap, as_label_map


def marker_watershed(elevation, markers: LabelMap, foreground) -> LabelMap:
    """Flood the elevation map from the markers, ascending.

    Every foreground pixel reachable from a marker gets the label of the
    first basin to claim it (ties broken by insertion order); background and
    marker-free foreground components stay 0.
    """
    elevation = np.asarray(elevation, np.float64)
    markers = as_label_map(markers)
    foreground = np.asarray(foreground, bool)
    if not (elevation.shape == markers.shape == foreground.shape):
        raise ValueError("elevation, markers and foreground must share dimensions")
    if np.any((markers > 0) & ~foreground):
        raise ValueError("marker outside foreground")
    return priority_flood(elevation, markers.astype(np.int32), foreground)


def distance_elevation(foreground) -> np.ndarray:
    """Negated Euclidean distance transform: basins at cell centers."""
    return -ndimage.distance_transform_edt(np.asarray(foreground, bool))


def distance_markers(foreground, min_distance: int = 1) -> LabelMap:
    """One marker per local maximum of the distance transform.

    Plateau maxima are merged into a single marker; ``min_distance`` sets
    the maximum-filter footprint radius.
    """
    fg = np.asarray(foreground, bool)
    dist = ndimage.distance_transform_edt(fg)
    size = 2 * min_distance + 1
    peaks = fg & (dist == ndimage.maximum_filter(dist, size=size)) & (dist > 0)
    markers, _ = ndimage.label(peaks, structure=np.ones((3, 3), bool))
    return markers.astype(np.int32)
