"""On-disk formats for dense maps, flow fields, and shape sets.

Dense multichannel maps travel as multi-page float32 TIFF (one page per
channel) or as a raw little-endian float32 blob prefixed by a one-line JSON
header carrying dims and channel names. Polygon and contour sets are JSON.
"""

from __future__ import annotations

import json
import os

import numpy as np
import tifffile

from .decoders.flow import FlowField
from .decoders.fourier import FourierContour
from .decoders.starpoly import StarPolygon

SCHEMA_VERSION = 1

_TIFF_SUFFIXES = {".tif", ".tiff"}

FLOW_CHANNELS = ("flow_y", "flow_x", "cell_prob")


def write_dense_map(channels: np.ndarray, path, channel_names: list[str] | None = None) -> None:
    """Write a (C, H, W) float stack as multi-page TIFF or raw+JSON header."""
    channels = np.asarray(channels, np.float32)
    if channels.ndim == 2:
        channels = channels[None]
    if channels.ndim != 3:
        raise ValueError(f"expected (C, H, W) stack, got shape {channels.shape}")
    path = os.fspath(path)
    suffix = os.path.splitext(path)[1].lower()
    if suffix in _TIFF_SUFFIXES:
        tifffile.imwrite(path, channels, photometric="minisblack")
        return
    header = {
        "schema_version": SCHEMA_VERSION,
        "dtype": "float32",
        "channels": channels.shape[0],
        "height": channels.shape[1],
        "width": channels.shape[2],
        "channel_names": channel_names or [f"ch{i}" for i in range(channels.shape[0])],
    }
    with open(path, "wb") as fh:
        fh.write(json.dumps(header, sort_keys=True).encode() + b"\n")
        fh.write(channels.astype("<f4").tobytes())


def read_dense_map(path) -> np.ndarray:
    """Read a (C, H, W) float32 stack written by ``write_dense_map``."""
    path = os.fspath(path)
    suffix = os.path.splitext(path)[1].lower()
    if suffix in _TIFF_SUFFIXES:
        arr = tifffile.imread(path)
        arr = np.asarray(arr, np.float32)
        if arr.ndim == 2:
            arr = arr[None]
        return arr
    with open(path, "rb") as fh:
        header = json.loads(fh.readline().decode())
        count = header["channels"] * header["height"] * header["width"]
        data = np.frombuffer(fh.read(), dtype="<f4", count=count)
    return data.reshape(header["channels"], header["height"], header["width"]).copy()


def write_flow_field(field: FlowField, path) -> None:
    stack = np.stack([field.flow_y, field.flow_x, field.cell_prob]).astype(np.float32)
    write_dense_map(stack, path, channel_names=list(FLOW_CHANNELS))


def read_flow_field(path) -> FlowField:
    stack = read_dense_map(path)
    if stack.shape[0] != 3:
        raise ValueError(f"a flow field needs 3 channels, got {stack.shape[0]}: {path}")
    return FlowField(flow_y=stack[0], flow_x=stack[1], cell_prob=stack[2])


def write_polygons(polys: list[StarPolygon], path, height: int | None = None, width: int | None = None) -> None:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "height": height,
        "width": width,
        "polygons": [
            {
                "center": [float(p.center[0]), float(p.center[1])],
                "radii": [float(r) for r in p.radii],
                "score": float(p.score),
            }
            for p in polys
        ],
    }
    with open(os.fspath(path), "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)


def read_polygons(path) -> tuple[list[StarPolygon], int | None, int | None]:
    """Read a polygon set; accepts a bare JSON array or the full document."""
    with open(os.fspath(path)) as fh:
        doc = json.load(fh)
    if isinstance(doc, list):
        entries, height, width = doc, None, None
    else:
        entries = doc["polygons"]
        height, width = doc.get("height"), doc.get("width")
    polys = [
        StarPolygon(
            center=(float(e["center"][0]), float(e["center"][1])),
            radii=np.asarray(e["radii"], np.float64),
            score=float(e.get("score", 1.0)),
        )
        for e in entries
    ]
    return polys, height, width


def write_contours(
    contours: list[FourierContour], path, height: int | None = None, width: int | None = None
) -> None:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "height": height,
        "width": width,
        "contours": [
            {
                "a0": float(c.a0),
                "c0": float(c.c0),
                "coefficients": [[float(v) for v in row] for row in c.coefficients],
                "score": float(c.score),
                "uncertainty": float(c.uncertainty),
            }
            for c in contours
        ],
    }
    with open(os.fspath(path), "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)


def read_contours(path) -> tuple[list[FourierContour], int | None, int | None]:
    """Read a contour set; accepts a bare JSON array or the full document."""
    with open(os.fspath(path)) as fh:
        doc = json.load(fh)
    if isinstance(doc, list):
        entries, height, width = doc, None, None
    else:
        entries = doc["contours"]
        height, width = doc.get("height"), doc.get("width")
    contours = [
        FourierContour(
            a0=float(e["a0"]),
            c0=float(e["c0"]),
            coefficients=np.asarray(e.get("coefficients", np.zeros((0, 4))), np.float64).reshape(-1, 4),
            score=float(e.get("score", 1.0)),
            uncertainty=float(e.get("uncertainty", 0.0)),
        )
        for e in entries
    ]
    return contours, height, width
