"""Seeded region growing for unlabeled foreground pixels."""

from __future__ import annotations

import logging

import numpy as np

from ..labelmap import LabelMap, as_label_map

log = logging.getLogger(__name__)


def region_grow_assign(labels: LabelMap, foreground) -> LabelMap:
    """Grow labeled regions into unlabeled foreground, breadth-first.

    All region frontiers advance simultaneously one 4-connected layer per
    round; a pixel reached by several regions in the same round takes the
    smallest adjacent label. Unlabeled components with no adjacent region
    are left at 0 and reported via a warning.
    """
    labels = as_label_map(labels)
    foreground = np.asarray(foreground, bool)
    if labels.shape != foreground.shape:
        raise ValueError("labels and foreground must share dimensions")
    if np.any((labels > 0) & ~foreground):
        raise ValueError("labeled pixels must lie inside the foreground")
    out = labels.astype(np.int64).copy()
    while True:
        unlabeled = foreground & (out == 0)
        if not unlabeled.any():
            break
        # minimum positive label among the 4 neighbors, computed from the
        # state at the start of the round (simultaneous frontier advance)
        candidate = np.full(out.shape, np.iinfo(np.int64).max, np.int64)
        blank = np.iinfo(np.int64).max
        shifted = np.full(out.shape, blank, np.int64)
        for axis, shift in ((0, 1), (0, -1), (1, 1), (1, -1)):
            shifted[:] = blank
            if axis == 0 and shift == 1:
                shifted[1:, :] = out[:-1, :]
            elif axis == 0 and shift == -1:
                shifted[:-1, :] = out[1:, :]
            elif axis == 1 and shift == 1:
                shifted[:, 1:] = out[:, :-1]
            else:
                shifted[:, :-1] = out[:, 1:]
            candidate = np.minimum(candidate, np.where(shifted > 0, shifted, blank))
        reached = unlabeled & (candidate < blank)
        if not reached.any():
            log.warning(
                "region growing left %d foreground pixels unassigned (no adjacent region)",
                int(unlabeled.sum()),
            )
            break
        out[reached] = candidate[reached]
    return out.astype(np.int32)
