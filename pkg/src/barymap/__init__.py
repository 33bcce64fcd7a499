"""Barycenters of publication profiles on science overlay maps.

Parse Pajek overlay maps, place publication profiles on them as 2-D
barycenters or similarity-adapted vectors, compare research groups with
evaluation panels, audit normalization claims, and render SVG overlays.
"""

from .analysis import (
    AGGREGATIONS,
    DEFAULT_SCALE_FACTORS,
    POOLED_UNIT_ID,
    SCALE_DRIFT_TOLERANCE,
    BoundingBoxCheck,
    DistanceReport,
    NormalizationAudit,
    Representation,
    ScaleAudit,
    bounding_box_check,
    format_significant,
    normalization_audit,
    pairwise_distances,
    pool_profiles,
    report_to_csv,
    report_to_json,
    represent,
    scale_invariance_audit,
)
from .core import (
    NormalizationMode,
    Point2D,
    SimilarityAdaptedVector,
    adapted_coordinate_sum,
    barycenter_2d,
    barycenter_set,
    cosine_normalize,
    euclidean_distance,
    neumaier_row_sum,
    similarity_adapt,
    weighted_barycenter,
)
from .errors import DataError, PajekParseError, ProfileError, ValidationError
from .map_io import (
    OverlayMap,
    PajekDocument,
    PajekNetwork,
    ProfileLoadResult,
    PublicationProfile,
    SimilarityMatrix,
    SubjectCategory,
    UnitKind,
    extract_overlay_map,
    load_profiles_csv,
    parse_pajek,
    parse_pajek_bytes,
    read_map_json,
    validate_similarity_matrix,
    write_map_json,
)
from .plot import CanvasTransform, PlotSpec, canvas_transform, render_overlay_svg

__version__ = "0.1.0"

__all__ = [
    "AGGREGATIONS",
    "DEFAULT_SCALE_FACTORS",
    "POOLED_UNIT_ID",
    "SCALE_DRIFT_TOLERANCE",
    "BoundingBoxCheck",
    "CanvasTransform",
    "DataError",
    "DistanceReport",
    "NormalizationAudit",
    "NormalizationMode",
    "OverlayMap",
    "PajekDocument",
    "PajekNetwork",
    "PajekParseError",
    "PlotSpec",
    "Point2D",
    "ProfileError",
    "ProfileLoadResult",
    "PublicationProfile",
    "Representation",
    "ScaleAudit",
    "SimilarityAdaptedVector",
    "SimilarityMatrix",
    "SubjectCategory",
    "UnitKind",
    "ValidationError",
    "adapted_coordinate_sum",
    "barycenter_2d",
    "barycenter_set",
    "bounding_box_check",
    "canvas_transform",
    "cosine_normalize",
    "euclidean_distance",
    "extract_overlay_map",
    "format_significant",
    "load_profiles_csv",
    "neumaier_row_sum",
    "normalization_audit",
    "pairwise_distances",
    "parse_pajek",
    "parse_pajek_bytes",
    "pool_profiles",
    "read_map_json",
    "render_overlay_svg",
    "report_to_csv",
    "report_to_json",
    "represent",
    "scale_invariance_audit",
    "similarity_adapt",
    "validate_similarity_matrix",
    "weighted_barycenter",
    "write_map_json",
    "__version__",
]
