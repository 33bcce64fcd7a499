"""Core math: barycenters, similarity adaptation, cosine similarity, distance.

Every reduction uses compensated summation (math.fsum for scalars, a
vectorized Neumaier accumulator for row sums) with a fixed summation order,
so results are reproducible bitwise and the documented 1e-12 identities
survive at map size N=224.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from math import fsum, isfinite, sqrt
from typing import Iterable, Sequence

import numpy as np

from .errors import DataError
from .map_io import (
    OverlayMap,
    PublicationProfile,
    SimilarityMatrix,
    validate_similarity_matrix,
)


@dataclass(frozen=True)
class Point2D:
    c1: float
    c2: float

    def __post_init__(self):
        object.__setattr__(self, "c1", float(self.c1))
        object.__setattr__(self, "c2", float(self.c2))
        if not (isfinite(self.c1) and isfinite(self.c2)):
            raise DataError(f"point coordinates must be finite, got {self}")

    @property
    def coords(self) -> tuple[float, float]:
        return (self.c1, self.c2)


class NormalizationMode(Enum):
    RAW = "raw"
    BY_TOTAL = "by_total"
    BY_ADAPTED_SUM = "by_adapted_sum"


@dataclass(frozen=True, eq=False)
class SimilarityAdaptedVector:
    """Similarity-weighted N-vector for one unit under one normalization."""

    values: np.ndarray
    mode: NormalizationMode
    source_total: float

    def __post_init__(self):
        arr = np.array(self.values, dtype=np.float64)
        if arr.ndim != 1:
            raise DataError("adapted vector must be one-dimensional")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)


def neumaier_row_sum(terms: Iterable[np.ndarray], width: int) -> np.ndarray:
    """Compensated elementwise sum of equal-width float vectors."""
    total = np.zeros(width, dtype=np.float64)
    compensation = np.zeros(width, dtype=np.float64)
    for term in terms:
        partial = total + term
        lost = np.where(
            np.abs(total) >= np.abs(term),
            (total - partial) + term,
            (term - partial) + total,
        )
        compensation += lost
        total = partial
    return total + compensation


def _sorted_counts(
    profile: PublicationProfile, size: int, what: str
) -> list[tuple[int, float]]:
    items = sorted(profile.counts.items())
    if items and items[-1][0] >= size:
        raise DataError(
            f"profile {profile.unit_id!r} references category index "
            f"{items[-1][0]} but the {what} has only {size} categories"
        )
    return items


def barycenter_2d(profile: PublicationProfile, overlay_map: OverlayMap) -> Point2D:
    """Count-weighted mean position of a profile on the map.

    The quotient is clamped into the bounding box of the supporting
    categories: the final IEEE rounding can overshoot the hull by one ulp
    (e.g. fl(fl(3*0.1)/3) > 0.1), and containment is part of the contract.
    """
    categories = overlay_map.categories
    items = _sorted_counts(profile, len(categories), "map")
    xs = [categories[j].x for j, _ in items]
    ys = [categories[j].y for j, _ in items]
    c1 = fsum(m * categories[j].x for j, m in items) / profile.total
    c2 = fsum(m * categories[j].y for j, m in items) / profile.total
    c1 = min(max(c1, min(xs)), max(xs))
    c2 = min(max(c2, min(ys)), max(ys))
    return Point2D(c1, c2)


def _coerce_point(point: object) -> tuple[float, ...]:
    if isinstance(point, Point2D):
        return point.coords
    coords = tuple(float(v) for v in point)  # type: ignore[arg-type]
    if not coords:
        raise DataError("points must have at least one coordinate")
    if not all(isfinite(v) for v in coords):
        raise DataError(f"point coordinates must be finite, got {coords}")
    return coords


def barycenter_set(points: Sequence[object]) -> tuple[float, ...]:
    """Plain mean of a non-empty set of k-dimensional points."""
    coerced = [_coerce_point(p) for p in points]
    if not coerced:
        raise DataError("barycenter of an empty point set is undefined")
    dim = len(coerced[0])
    if any(len(p) != dim for p in coerced):
        raise DataError("all points must share one dimensionality")
    if len(coerced) == 1:
        return coerced[0]
    k = len(coerced)
    return tuple(fsum(p[d] for p in coerced) / k for d in range(dim))


def weighted_barycenter(
    points: Sequence[object], weights: Sequence[float]
) -> tuple[float, ...]:
    """Mass-weighted mean of points; weights nonnegative with positive total.

    A singleton comes back unchanged (fl(w*x)/w may be one ulp off x, and the
    singleton must be its own barycenter exactly). Unit weights reproduce
    barycenter_set bit-for-bit.
    """
    coerced = [_coerce_point(p) for p in points]
    if not coerced:
        raise DataError("barycenter of an empty point set is undefined")
    if len(weights) != len(coerced):
        raise DataError(
            f"{len(coerced)} points but {len(weights)} weights"
        )
    ws = [float(w) for w in weights]
    if any(not isfinite(w) or w < 0 for w in ws):
        raise DataError("weights must be finite and >= 0")
    total = fsum(ws)
    if not total > 0:
        raise DataError("total weight must be > 0")
    dim = len(coerced[0])
    if any(len(p) != dim for p in coerced):
        raise DataError("all points must share one dimensionality")
    if len(coerced) == 1:
        return coerced[0]
    return tuple(
        fsum(w * p[d] for w, p in zip(ws, coerced)) / total for d in range(dim)
    )


def similarity_adapt(
    profile: PublicationProfile,
    similarity: SimilarityMatrix,
    mode: NormalizationMode | str = NormalizationMode.BY_TOTAL,
) -> SimilarityAdaptedVector:
    """Similarity-weighted vector (S.M)_k = sum_j m_j s_jk, then normalize.

    raw: no normalization (scales linearly with the profile).
    by_total: divide by the profile total (scale-invariant).
    by_adapted_sum: divide by sum_k (S.M)_k (scale-invariant; requires the
    sum to be positive).
    """
    mode = NormalizationMode(mode)
    items = _sorted_counts(profile, similarity.n, "similarity matrix")
    rows = similarity.values
    raw = neumaier_row_sum((m * rows[j, :] for j, m in items), similarity.n)
    if mode is NormalizationMode.RAW:
        values = raw
    elif mode is NormalizationMode.BY_TOTAL:
        values = raw / profile.total
    else:
        denominator = fsum(raw.tolist())
        if not denominator > 0:
            raise DataError(
                f"unit {profile.unit_id!r}: adapted coordinate sum is "
                f"{denominator!r}; by_adapted_sum needs it to be positive"
            )
        values = raw / denominator
    return SimilarityAdaptedVector(
        values=values, mode=mode, source_total=profile.total
    )


def adapted_coordinate_sum(
    profile: PublicationProfile, similarity: SimilarityMatrix
) -> float:
    """sum_k of the by_total vector, computed as fsum(S.M)/T.

    Dividing the compensated sum once (instead of summing per-coordinate
    quotients) keeps the identity matrix case exactly 1.
    """
    raw = similarity_adapt(profile, similarity, NormalizationMode.RAW)
    return fsum(raw.values.tolist()) / profile.total


def cosine_normalize(
    counts: object, direction: str = "rows_as_citing"
) -> tuple[SimilarityMatrix, tuple[int, ...]]:
    """Cosine-normalize a nonnegative count matrix in the citing direction.

    Row i is category i's citing distribution; s_ij is the cosine of rows i
    and j. Zero rows yield zero similarity everywhere including s_ii, and
    their indices come back as the second element. The matrix passes strict
    validation.
    """
    if direction != "rows_as_citing":
        raise ValueError(
            f"unsupported direction {direction!r}; only 'rows_as_citing' "
            f"is defined"
        )
    array = np.asarray(counts, dtype=np.float64)
    if array.ndim != 2 or array.size == 0:
        raise DataError("counts must be a non-empty 2-D matrix")
    if not np.all(np.isfinite(array)):
        raise DataError("counts must be finite")
    if (array < 0).any():
        i, j = map(int, np.argwhere(array < 0)[0])
        raise DataError(f"negative count at ({i}, {j})")

    norms = np.sqrt((array * array).sum(axis=1))
    zero = norms == 0.0
    if zero.all():
        raise DataError("all rows are zero; cosine similarity is undefined")
    unit = np.divide(
        array,
        norms[:, None],
        out=np.zeros_like(array),
        where=~zero[:, None],
    )
    values = unit @ unit.T
    values[zero, :] = 0.0
    values[:, zero] = 0.0
    diagonal = np.where(zero, 0.0, 1.0)
    np.fill_diagonal(values, diagonal)

    matrix = validate_similarity_matrix(
        SimilarityMatrix(n=array.shape[0], values=values), policy="strict"
    )
    return matrix, tuple(int(i) for i in np.flatnonzero(zero))


def euclidean_distance(a: object, b: object) -> float:
    """Euclidean distance between two points, vectors, or adapted vectors.

    Operands must be the same kind; adapted vectors must share one
    normalization mode. Computed as sqrt(fsum of squared differences), which
    makes the metric exactly symmetric and exactly zero on equal inputs.
    """
    if isinstance(a, SimilarityAdaptedVector) or isinstance(
        b, SimilarityAdaptedVector
    ):
        if not (
            isinstance(a, SimilarityAdaptedVector)
            and isinstance(b, SimilarityAdaptedVector)
        ):
            raise DataError("cannot mix adapted vectors with other operands")
        if a.mode is not b.mode:
            raise DataError(
                f"cannot compare adapted vectors with different modes: "
                f"{a.mode.value} vs {b.mode.value}"
            )
        xs, ys = a.values, b.values
    elif isinstance(a, Point2D) or isinstance(b, Point2D):
        if not (isinstance(a, Point2D) and isinstance(b, Point2D)):
            raise DataError("cannot mix 2-D points with other operands")
        xs = np.asarray(a.coords, dtype=np.float64)
        ys = np.asarray(b.coords, dtype=np.float64)
    else:
        xs = np.asarray(a, dtype=np.float64)
        ys = np.asarray(b, dtype=np.float64)
        if xs.ndim != 1 or ys.ndim != 1:
            raise DataError("vectors must be one-dimensional")
        if not (np.all(np.isfinite(xs)) and np.all(np.isfinite(ys))):
            raise DataError("vector entries must be finite")
    if xs.shape != ys.shape:
        raise DataError(
            f"dimension mismatch: {xs.shape[0]} vs {ys.shape[0]} coordinates"
        )
    diff = xs - ys
    return sqrt(fsum((diff * diff).tolist()))
