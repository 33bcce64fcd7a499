"""Distance reports between unit families, plus numerical audits.

A "representation" places a unit either at its 2-D map barycenter or at its
similarity-adapted N-vector under one normalization mode. Reports compare a
row family (research groups) against a column family (panel members), either
member by member or against the pooled panel.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from math import fsum, isfinite
from typing import Mapping, Sequence

import numpy as np

from .core import (
    NormalizationMode,
    Point2D,
    SimilarityAdaptedVector,
    adapted_coordinate_sum,
    barycenter_2d,
    euclidean_distance,
    similarity_adapt,
)
from .errors import DataError
from .map_io import OverlayMap, PublicationProfile, SimilarityMatrix, UnitKind

DEFAULT_SCALE_FACTORS = (1e-3, 1e-1, 1.0, 1e1, 1e3)
SCALE_DRIFT_TOLERANCE = 1e-9
POOLED_UNIT_ID = "panel:pooled"
AGGREGATIONS = ("per_member", "pooled")


@dataclass(frozen=True)
class Representation:
    """Either the 2-D barycenter or an adapted vector with one mode."""

    kind: str
    mode: NormalizationMode | None = None

    def __post_init__(self):
        if self.kind not in ("barycenter2d", "adapted"):
            raise ValueError(
                f"representation kind must be 'barycenter2d' or 'adapted', "
                f"got {self.kind!r}"
            )
        if self.kind == "adapted":
            if self.mode is None:
                raise ValueError("adapted representation requires a mode")
            object.__setattr__(self, "mode", NormalizationMode(self.mode))
        elif self.mode is not None:
            raise ValueError("barycenter2d representation takes no mode")

    @classmethod
    def barycenter2d(cls) -> "Representation":
        return cls(kind="barycenter2d")

    @classmethod
    def adapted(cls, mode: NormalizationMode | str) -> "Representation":
        return cls(kind="adapted", mode=NormalizationMode(mode))

    @classmethod
    def parse(cls, text: str) -> "Representation":
        """Accepts 'barycenter2d' and 'adapted(<mode>)', hyphens tolerated."""
        token = text.strip()
        if token == "barycenter2d":
            return cls.barycenter2d()
        if token.startswith("adapted(") and token.endswith(")"):
            mode = token[len("adapted(") : -1].strip().replace("-", "_")
            try:
                return cls.adapted(mode)
            except ValueError:
                pass
        allowed = ", ".join(
            ["barycenter2d"] + [f"adapted({m.value})" for m in NormalizationMode]
        )
        raise ValueError(
            f"unknown representation {text!r} (expected one of: {allowed})"
        )

    @property
    def label(self) -> str:
        if self.kind == "barycenter2d":
            return "barycenter2d"
        assert self.mode is not None
        return f"adapted({self.mode.value})"

    @property
    def expected_scale_invariant(self) -> bool:
        """raw grows linearly with the profile; everything else must hold."""
        return not (self.kind == "adapted" and self.mode is NormalizationMode.RAW)


def represent(
    profile: PublicationProfile,
    overlay_map: OverlayMap,
    representation: Representation,
) -> Point2D | SimilarityAdaptedVector:
    if representation.kind == "barycenter2d":
        return barycenter_2d(profile, overlay_map)
    if overlay_map.similarity is None:
        raise DataError(
            "map has no similarity matrix; adapted representations are "
            "unavailable"
        )
    assert representation.mode is not None
    return similarity_adapt(profile, overlay_map.similarity, representation.mode)


def pool_profiles(
    profiles: Sequence[PublicationProfile],
    unit_id: str = POOLED_UNIT_ID,
    kind: UnitKind = UnitKind.OTHER,
) -> PublicationProfile:
    """Merge profiles into one by summing counts per category."""
    if not profiles:
        raise DataError("cannot pool an empty profile list")
    gathered: dict[int, list[float]] = {}
    for profile in profiles:
        for index, count in profile.counts.items():
            gathered.setdefault(index, []).append(count)
    counts = {index: fsum(sorted(values)) for index, values in gathered.items()}
    return PublicationProfile(unit_id=unit_id, kind=kind, counts=counts)


# ---------------------------------------------------------------------------
# distance reports
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class DistanceReport:
    representation: Representation
    row_units: tuple[str, ...]
    column_units: tuple[str, ...]
    distances: np.ndarray
    rankings: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        arr = np.array(self.distances, dtype=np.float64)
        if arr.shape != (len(self.row_units), len(self.column_units)):
            raise DataError(
                f"distance matrix shape {arr.shape} does not match "
                f"{len(self.row_units)} rows x {len(self.column_units)} columns"
            )
        if arr.size and (not np.all(np.isfinite(arr)) or arr.min() < 0):
            raise DataError("distances must be finite and >= 0")
        arr.setflags(write=False)
        object.__setattr__(self, "distances", arr)
        expected = set(range(len(self.column_units)))
        for row_no, ranking in enumerate(self.rankings):
            if set(ranking) != expected or len(ranking) != len(expected):
                raise DataError(
                    f"ranking for row {row_no} is not a permutation of columns"
                )
            if ranking and arr[row_no, ranking[0]] != arr[row_no].min():
                raise DataError(f"ranking for row {row_no} does not lead with "
                                f"the nearest column")


def _rank_row(row: np.ndarray) -> tuple[int, ...]:
    # ascending by distance, ties broken by column position
    return tuple(sorted(range(row.shape[0]), key=lambda j: (row[j], j)))


def pairwise_distances(
    groups: Sequence[PublicationProfile],
    panel: Sequence[PublicationProfile],
    overlay_map: OverlayMap,
    representation: Representation,
    aggregation: str = "per_member",
) -> DistanceReport:
    """Distance matrix of groups (rows) against panel members (columns).

    aggregation 'pooled' first merges the panel into a single unit, so the
    report has one column.
    """
    if aggregation not in AGGREGATIONS:
        raise ValueError(
            f"aggregation must be one of {AGGREGATIONS}, got {aggregation!r}"
        )
    if not groups or not panel:
        raise DataError("both unit families must be non-empty")
    columns = list(panel) if aggregation == "per_member" else [pool_profiles(panel)]

    row_ids = tuple(p.unit_id for p in groups)
    column_ids = tuple(p.unit_id for p in columns)
    for ids, family in ((row_ids, "row"), (column_ids, "column")):
        if len(set(ids)) != len(ids):
            raise DataError(f"duplicate unit ids in the {family} family")

    row_reps = [represent(p, overlay_map, representation) for p in groups]
    column_reps = [represent(p, overlay_map, representation) for p in columns]
    distances = np.empty((len(row_reps), len(column_reps)), dtype=np.float64)
    for i, left in enumerate(row_reps):
        for j, right in enumerate(column_reps):
            distances[i, j] = euclidean_distance(left, right)
    rankings = tuple(_rank_row(distances[i]) for i in range(len(row_reps)))
    return DistanceReport(
        representation=representation,
        row_units=row_ids,
        column_units=column_ids,
        distances=distances,
        rankings=rankings,
    )


def format_significant(value: float, digits: int = 17) -> str:
    if digits < 1:
        raise ValueError(f"digits must be >= 1, got {digits}")
    return format(float(value), f".{digits}g")


def report_to_csv(report: DistanceReport, digits: int = 17) -> str:
    """Distance matrix as CSV with unit-id headers."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(("unit_id",) + report.column_units)
    for row_no, unit_id in enumerate(report.row_units):
        writer.writerow(
            [unit_id]
            + [
                format_significant(v, digits)
                for v in report.distances[row_no].tolist()
            ]
        )
    return out.getvalue()


def report_to_json(report: DistanceReport) -> str:
    doc = {
        "representation": report.representation.label,
        "row_units": list(report.row_units),
        "column_units": list(report.column_units),
        "distances": report.distances.tolist(),
        "rankings": [list(r) for r in report.rankings],
    }
    return json.dumps(doc, indent=2) + "\n"


# ---------------------------------------------------------------------------
# audits
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ScaleAudit:
    """Drift of each representation under positive rescaling of one profile."""

    unit_id: str
    scale_factors: tuple[float, ...]
    tolerance: float
    max_drift: Mapping[str, float]
    drift_by_factor: Mapping[str, Mapping[float, float]]
    passed: Mapping[str, bool]
    expected_invariant: Mapping[str, bool]


def scale_invariance_audit(
    profile: PublicationProfile,
    overlay_map: OverlayMap,
    representations: Sequence[Representation],
    scale_factors: Sequence[float] = DEFAULT_SCALE_FACTORS,
    tolerance: float = SCALE_DRIFT_TOLERANCE,
) -> ScaleAudit:
    """Compare representation(M) with representation(c*M) for each factor c."""
    factors = tuple(float(c) for c in scale_factors)
    for factor in factors:
        if not (isfinite(factor) and factor > 0):
            raise DataError(
                f"scale factors must be finite and strictly positive, "
                f"got {factor!r}"
            )
    if not representations:
        raise ValueError("at least one representation is required")
    if not (isfinite(tolerance) and tolerance >= 0):
        raise ValueError(f"tolerance must be finite and >= 0, got {tolerance!r}")

    max_drift: dict[str, float] = {}
    drift_by_factor: dict[str, dict[float, float]] = {}
    passed: dict[str, bool] = {}
    expected: dict[str, bool] = {}
    scaled = {factor: profile.scaled(factor) for factor in factors}
    for representation in representations:
        base = represent(profile, overlay_map, representation)
        drifts = {
            factor: euclidean_distance(
                base, represent(scaled[factor], overlay_map, representation)
            )
            for factor in factors
        }
        label = representation.label
        drift_by_factor[label] = drifts
        max_drift[label] = max(drifts.values(), default=0.0)
        passed[label] = max_drift[label] <= tolerance
        expected[label] = representation.expected_scale_invariant
    return ScaleAudit(
        unit_id=profile.unit_id,
        scale_factors=factors,
        tolerance=float(tolerance),
        max_drift=max_drift,
        drift_by_factor=drift_by_factor,
        passed=passed,
        expected_invariant=expected,
    )


@dataclass(frozen=True)
class NormalizationAudit:
    """Coordinate sum of the by_total vector; 1 would mean a true
    normalization, anything else quantifies the pseudo-normalization."""

    unit_id: str
    coordinate_sum: float
    deviation: float


def normalization_audit(
    profile: PublicationProfile, similarity: SimilarityMatrix
) -> NormalizationAudit:
    coordinate_sum = adapted_coordinate_sum(profile, similarity)
    return NormalizationAudit(
        unit_id=profile.unit_id,
        coordinate_sum=coordinate_sum,
        deviation=abs(coordinate_sum - 1.0),
    )


@dataclass(frozen=True)
class BoundingBoxCheck:
    unit_id: str
    passed: bool
    point: Point2D
    box: tuple[tuple[float, float], tuple[float, float]]
    witness: str | None


def _box_witness(
    point: Point2D, box: tuple[tuple[float, float], tuple[float, float]]
) -> str | None:
    (x_min, x_max), (y_min, y_max) = box
    if not x_min <= point.c1 <= x_max:
        return f"c1={point.c1!r} outside [{x_min!r}, {x_max!r}]"
    if not y_min <= point.c2 <= y_max:
        return f"c2={point.c2!r} outside [{y_min!r}, {y_max!r}]"
    return None


def bounding_box_check(
    profile: PublicationProfile, overlay_map: OverlayMap
) -> BoundingBoxCheck:
    """Verify the barycenter sits inside the support's bounding box."""
    point = barycenter_2d(profile, overlay_map)
    xs = [overlay_map.categories[j].x for j in profile.counts]
    ys = [overlay_map.categories[j].y for j in profile.counts]
    box = ((min(xs), max(xs)), (min(ys), max(ys)))
    witness = _box_witness(point, box)
    return BoundingBoxCheck(
        unit_id=profile.unit_id,
        passed=witness is None,
        point=point,
        box=box,
        witness=witness,
    )
