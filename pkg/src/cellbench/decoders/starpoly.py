"""Star-convex polygon cells: rasterization and non-maximum suppression."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..labelmap import LabelMap

DEFAULT_NMS_IOU = 0.5


@dataclass
class StarPolygon:
    """Cell outline as radial distances from a center along equiangular rays."""

    center: tuple[float, float]  # (row, col)
    radii: np.ndarray
    score: float = 1.0

    def __post_init__(self):
        self.radii = np.asarray(self.radii, np.float64)
        if self.radii.ndim != 1 or self.radii.size < 3:
            raise ValueError("a star polygon needs at least 3 rays")
        if not np.all(np.isfinite(self.radii)) or np.any(self.radii < 0):
            raise ValueError("radii must be finite and non-negative")

    @property
    def n_rays(self) -> int:
        return int(self.radii.size)


def polygon_vertices(poly: StarPolygon) -> np.ndarray:
    """(K, 2) vertex array in (row, col) order, rays at angles 2*pi*k/K."""
    k = poly.n_rays
    theta = 2.0 * np.pi * np.arange(k) / k
    rows = poly.center[0] + poly.radii * np.cos(theta)
    cols = poly.center[1] + poly.radii * np.sin(theta)
    return np.stack([rows, cols], axis=1)


def points_in_polygon(vertices: np.ndarray, rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
    """Even-odd (crossing number) containment test, vectorized over points.

    Uses the half-open edge rule ``(r_i > r) != (r_j > r)`` with a strict
    crossing comparison, so results are deterministic at shared edges.
    """
    rows = np.asarray(rows, np.float64)
    cols = np.asarray(cols, np.float64)
    inside = np.zeros(rows.shape, bool)
    n = len(vertices)
    for i in range(n):
        r_i, c_i = vertices[i]
        r_j, c_j = vertices[(i + 1) % n]
        crosses = (r_i > rows) != (r_j > rows)
        if not crosses.any():
            continue
        with np.errstate(divide="ignore", invalid="ignore"):
            c_at = (c_j - c_i) * (rows - r_i) / (r_j - r_i) + c_i
        inside ^= crosses & (cols < c_at)
    return inside


def polygon_pixels(poly: StarPolygon) -> tuple[np.ndarray, np.ndarray]:
    """Lattice pixels covered by the polygon (unclipped coordinates).

    Degenerate polygons (zero area) yield the single rounded center pixel.
    """
    verts = polygon_vertices(poly)
    r_lo = int(np.floor(verts[:, 0].min()))
    r_hi = int(np.ceil(verts[:, 0].max()))
    c_lo = int(np.floor(verts[:, 1].min()))
    c_hi = int(np.ceil(verts[:, 1].max()))
    rr, cc = np.meshgrid(np.arange(r_lo, r_hi + 1), np.arange(c_lo, c_hi + 1), indexing="ij")
    inside = points_in_polygon(verts, rr.ravel(), cc.ravel())
    ys, xs = rr.ravel()[inside], cc.ravel()[inside]
    if ys.size == 0:
        ys = np.array([int(np.floor(poly.center[0] + 0.5))])
        xs = np.array([int(np.floor(poly.center[1] + 0.5))])
    return ys, xs


def rasterize_star_polygons(polys: list[StarPolygon], height: int, width: int) -> LabelMap:
    """Paint polygons onto a canvas; earlier polygons take precedence.

    Label i+1 marks the i-th polygon of the list. Callers that want
    higher-score precedence should pass a score-sorted list (``polygon_nms``
    output already is).
    """
    out = np.zeros((height, width), np.int32)
    for i, poly in enumerate(polys):
        ys, xs = polygon_pixels(poly)
        keep = (ys >= 0) & (ys < height) & (xs >= 0) & (xs < width)
        ys, xs = ys[keep], xs[keep]
        vacant = out[ys, xs] == 0
        out[ys[vacant], xs[vacant]] = i + 1
    return out


def _pixel_iou(a: tuple[np.ndarray, np.ndarray], b: tuple[np.ndarray, np.ndarray]) -> float:
    sa = set(zip(a[0].tolist(), a[1].tolist()))
    sb = set(zip(b[0].tolist(), b[1].tolist()))
    union = len(sa | sb)
    return len(sa & sb) / union if union else 0.0


def polygon_nms(polys: list[StarPolygon], iou_threshold: float = DEFAULT_NMS_IOU) -> list[StarPolygon]:
    """Greedy NMS on rasterized IoU, highest score first.

    A candidate is suppressed iff its IoU with any kept polygon exceeds
    ``iou_threshold``; score ties keep input order. Returns survivors in
    processing order (score-descending), so it is idempotent.
    """
    if not polys:
        return []
    order = np.argsort([-p.score for p in polys], kind="stable")
    kept: list[StarPolygon] = []
    kept_pixels: list[tuple[np.ndarray, np.ndarray]] = []
    for i in order:
        pixels = polygon_pixels(polys[i])
        if any(_pixel_iou(pixels, kp) > iou_threshold for kp in kept_pixels):
            continue
        kept.append(polys[i])
        kept_pixels.append(pixels)
    return kept
