"""Sliding-window tiling and importance-weighted stitching of dense maps.

Overlapping tile predictions are blended with an importance map that peaks
at the tile center, so cells straddling a patch border are not decoded
twice. Stitching happens on dense maps before any instance decoding.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

Origin = tuple[int, int]

# gaussian importance width relative to the tile size
GAUSSIAN_SIGMA_FRACTION = 1.0 / 8.0


@dataclass(frozen=True)
class TileSpec:
    tile_size: int
    overlap: int = 0
    importance: Literal["gaussian", "uniform"] = "gaussian"

    def __post_init__(self):
        if self.tile_size < 1:
            raise ValueError("tile_size must be >= 1")
        if not 0 <= self.overlap < self.tile_size:
            raise ValueError("overlap must satisfy 0 <= overlap < tile_size")
        if self.importance not in ("gaussian", "uniform"):
            raise ValueError(f"unknown importance profile: {self.importance}")


def importance_map(shape: tuple[int, int], spec: TileSpec) -> np.ndarray:
    """Per-pixel blending weight for a tile of the given shape."""
    th, tw = shape
    if spec.importance == "uniform":
        return np.ones((th, tw))
    sigma = spec.tile_size * GAUSSIAN_SIGMA_FRACTION
    cy, cx = (th - 1) / 2.0, (tw - 1) / 2.0
    dy = (np.arange(th) - cy) ** 2
    dx = (np.arange(tw) - cx) ** 2
    return np.exp(-(dy[:, None] + dx[None, :]) / (2.0 * sigma**2))


def tile_origins(height: int, width: int, spec: TileSpec) -> list[Origin]:
    """Origins of a covering grid of tiles with the requested overlap."""
    stride = spec.tile_size - spec.overlap

    def axis_origins(extent):
        if extent <= spec.tile_size:
            return [0]
        last = extent - spec.tile_size
        starts = list(range(0, last, stride))
        starts.append(last)
        return starts

    return [(r, c) for r in axis_origins(height) for c in axis_origins(width)]


def split_into_tiles(canvas: np.ndarray, spec: TileSpec) -> list[tuple[Origin, np.ndarray]]:
    """Cut a dense map into (origin, tile) pairs covering it."""
    h, w = canvas.shape[:2]
    return [
        ((r, c), canvas[r : r + spec.tile_size, c : c + spec.tile_size].copy())
        for r, c in tile_origins(h, w, spec)
    ]


def stitch_sliding_window(
    tiles: list[tuple[Origin, np.ndarray]],
    spec: TileSpec,
    height: int,
    width: int,
) -> np.ndarray:
    """Importance-weighted average of overlapping tiles on a canvas.

    Output pixel = sum(importance * tile) / sum(importance) over the tiles
    covering it. Raises if any canvas pixel is left uncovered or if tile
    channel counts disagree.
    """
    if not tiles:
        raise ValueError("no tiles given")
    first = np.asarray(tiles[0][1])
    channels = first.shape[2] if first.ndim == 3 else None
    accum_shape = (height, width) if channels is None else (height, width, channels)
    accum = np.zeros(accum_shape, np.float64)
    wsum = np.zeros((height, width), np.float64)
    for (r, c), tile in tiles:
        tile = np.asarray(tile, np.float64)
        tile_channels = tile.shape[2] if tile.ndim == 3 else None
        if tile_channels != channels:
            raise ValueError("tiles disagree on channel count")
        th, tw = tile.shape[:2]
        if r < 0 or c < 0 or r + th > height or c + tw > width:
            raise ValueError(f"tile at {(r, c)} with shape {(th, tw)} exceeds the canvas")
        w = importance_map((th, tw), spec)
        accum[r : r + th, c : c + tw] += (w if channels is None else w[:, :, None]) * tile
        wsum[r : r + th, c : c + tw] += w
    if np.any(wsum == 0):
        uncovered = int((wsum == 0).sum())
        raise ValueError(f"{uncovered} canvas pixels not covered by any tile")
    return accum / (wsum if channels is None else wsum[:, :, None])
