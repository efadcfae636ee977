"""Instance decoders over dense prediction maps.

Each decoder is a pure per-image function: gradient-flow tracking,
marker-based watershed, star-convex polygon rasterization with NMS,
Fourier-contour rasterization with uncertainty-aware NMS, seeded region
growing, sliding-window stitching, and modality-group routing.
"""

from .flow import FlowField, decode_flow_field, encode_flow_field
from .fourier import (
    FourierContour,
    contour_nms,
    decode_fourier_contours,
    rasterize_contour,
    sample_contour,
)
from .modality import classify_modality_group, mean_saturation_value
from .regions import region_grow_assign
from .starpoly import (
    StarPolygon,
    points_in_polygon,
    polygon_nms,
    polygon_pixels,
    polygon_vertices,
    rasterize_star_polygons,
)
from .tiling import (
    TileSpec,
    importance_map,
    split_into_tiles,
    stitch_sliding_window,
    tile_origins,
)
from .watershed import distance_elevation, distance_markers, marker_watershed

__all__ = [
    "FlowField",
    "FourierContour",
    "StarPolygon",
    "TileSpec",
    "classify_modality_group",
    "contour_nms",
    "decode_flow_field",
    "decode_fourier_contours",
    "distance_elevation",
    "distance_markers",
    "encode_flow_field",
    "importance_map",
    "marker_watershed",
    "mean_saturation_value",
    "points_in_polygon",
    "polygon_nms",
    "polygon_pixels",
    "polygon_vertices",
    "rasterize_contour",
    "rasterize_star_polygons",
    "region_grow_assign",
    "sample_contour",
    "split_into_tiles",
    "stitch_sliding_window",
    "tile_origins",
]
