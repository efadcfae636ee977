"""Instance matching at an IoU threshold and per-image F1 scoring.

Matching follows the challenge protocol: boundary cells removed, labels
normalized to connected components, predictions matched one-to-one to the
most similar ground-truth instances, and a prediction counts as correct when
its IoU passes the configured threshold test.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from scipy.optimize import linear_sum_assignment

from ._kernels import label_overlap
from .labelmap import LabelMap, as_label_map, relabel_connected, remove_boundary_cells

BoundaryMode = Literal["both", "gt_only", "none"]

DEFAULT_IOU_THRESHOLD = 0.5


@dataclass(frozen=True)
class MatchConfig:
    """Configuration of the instance-matching rule."""

    iou_threshold: float = DEFAULT_IOU_THRESHOLD
    strict_inequality: bool = True
    remove_boundary: BoundaryMode = "both"

    def __post_init__(self):
        if not 0.0 < self.iou_threshold < 1.0:
            raise ValueError(f"iou_threshold must be in (0, 1), got {self.iou_threshold}")
        if self.remove_boundary not in ("both", "gt_only", "none"):
            raise ValueError(f"unknown boundary mode: {self.remove_boundary}")

    def passes(self, iou) -> np.ndarray:
        """Threshold test applied to an IoU value or array."""
        if self.strict_inequality:
            return np.asarray(iou) > self.iou_threshold
        return np.asarray(iou) >= self.iou_threshold


@dataclass
class MatchResult:
    """Per-image matching outcome.

    ``pairs`` holds ``(gt_label, pred_label, iou)`` in the normalized label
    space (after boundary removal and connected-component renumbering).
    """

    tp: int
    fp: int
    fn_: int
    pairs: list[tuple[int, int, float]] = field(default_factory=list)


@dataclass
class MetricsRecord:
    precision: float
    recall: float
    f1: float


def iou_matrix(gt: LabelMap, pred: LabelMap) -> np.ndarray:
    """Pairwise IoU of ground-truth vs predicted instances.

    Row i / column j follow the sorted unique nonzero labels of each map.
    Computed from a single co-occurrence pass, not per-pair mask scans.
    """
    gt = as_label_map(gt)
    pred = as_label_map(pred)
    if gt.shape != pred.shape:
        raise ValueError(f"dimension mismatch: gt {gt.shape} vs pred {pred.shape}")
    gt_ids, gt_compact = np.unique(gt, return_inverse=True)
    pred_ids, pred_compact = np.unique(pred, return_inverse=True)
    # keep 0 mapped to 0 so row/col 0 is background
    if gt_ids[0] != 0:
        gt_compact = gt_compact + 1
    if pred_ids[0] != 0:
        pred_compact = pred_compact + 1
    overlap = label_overlap(
        gt_compact.reshape(gt.shape), pred_compact.reshape(pred.shape)
    ).astype(np.float64)
    area_gt = overlap.sum(axis=1, keepdims=True)
    area_pred = overlap.sum(axis=0, keepdims=True)
    union = area_gt + area_pred - overlap
    with np.errstate(divide="ignore", invalid="ignore"):
        iou = np.where(union > 0, overlap / union, 0.0)
    n_gt = int((gt_ids > 0).sum())
    n_pred = int((pred_ids > 0).sum())
    return iou[1 : n_gt + 1, 1 : n_pred + 1]


def match_instances(gt: LabelMap, pred: LabelMap, cfg: MatchConfig = MatchConfig()) -> MatchResult:
    """Match predictions to ground truth one-to-one under ``cfg``.

    Applies boundary removal (per ``cfg.remove_boundary``) and
    connected-component normalization internally, then solves a maximum
    assignment over the IoU matrix and keeps pairs that pass the threshold
    test. At thresholds >= 0.5 the qualifying pairs are unique per instance,
    so the assignment step cannot change the result, only tie-break below.
    """
    gt = as_label_map(gt)
    pred = as_label_map(pred)
    if gt.shape != pred.shape:
        raise ValueError(f"dimension mismatch: gt {gt.shape} vs pred {pred.shape}")
    if cfg.remove_boundary in ("both", "gt_only"):
        gt = remove_boundary_cells(gt)
    if cfg.remove_boundary == "both":
        pred = remove_boundary_cells(pred)
    gt = relabel_connected(gt)
    pred = relabel_connected(pred)
    n_gt = int(gt.max())
    n_pred = int(pred.max())
    if n_gt == 0 or n_pred == 0:
        return MatchResult(tp=0, fp=n_pred, fn_=n_gt, pairs=[])
    iou = iou_matrix(gt, pred)
    qualifies = cfg.passes(iou)
    n_min = min(n_gt, n_pred)
    cost = -qualifies.astype(np.float64) - iou / (2.0 * n_min)
    gt_idx, pred_idx = linear_sum_assignment(cost)
    keep = qualifies[gt_idx, pred_idx]
    pairs = [
        (int(g + 1), int(p + 1), float(iou[g, p]))
        for g, p in zip(gt_idx[keep], pred_idx[keep])
    ]
    tp = len(pairs)
    return MatchResult(tp=tp, fp=n_pred - tp, fn_=n_gt - tp, pairs=pairs)


def precision_recall_f1(tp: int, fp: int, fn_: int) -> MetricsRecord:
    """Precision, recall and their harmonic mean; 0/0 ratios are 0."""
    if tp < 0 or fp < 0 or fn_ < 0:
        raise ValueError("counts must be non-negative")
    precision = tp / (tp + fp) if tp + fp > 0 else 0.0
    recall = tp / (tp + fn_) if tp + fn_ > 0 else 0.0
    if precision + recall > 0:
        f1 = 2.0 * precision * recall / (precision + recall)
    else:
        f1 = 0.0
    return MetricsRecord(precision=precision, recall=recall, f1=f1)


def evaluate_image_pair(gt: LabelMap, pred: LabelMap, cfg: MatchConfig = MatchConfig()) -> MetricsRecord:
    """Full per-image score: boundary removal, normalization, matching, F1."""
    result = match_instances(gt, pred, cfg)
    return precision_recall_f1(result.tp, result.fp, result.fn_)
