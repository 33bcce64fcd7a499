"""Overlay map I/O: Pajek project files, profile CSVs, and map JSON.

The map model is deliberately small: subject categories with fixed 2-D
coordinates, an optional category-by-category similarity matrix, and
publication profiles (per-unit category counts). Parsing is lenient where
real Pajek files are messy (display parameters, extra sections) and strict
where the numbers matter.
"""

from __future__ import annotations

import csv
import io
import json
import re
from dataclasses import dataclass, field
from enum import Enum
from math import fsum, isfinite
from typing import Mapping

import numpy as np

from .errors import PajekParseError, ProfileError, ValidationError

# Validation tolerances. Symmetry is a hard physical property of a similarity
# matrix; the negative slack only absorbs rounding dust from upstream tools.
SYMMETRY_TOLERANCE = 1e-9
NEGATIVE_TOLERANCE = 1e-12
UPPER_TOLERANCE = 1e-12

CSV_HEADER = ("unit_id", "kind", "category", "count")


# ---------------------------------------------------------------------------
# model types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SubjectCategory:
    """One subject category: contiguous 0-based index plus map coordinates."""

    index: int
    pajek_id: int
    label: str
    x: float
    y: float

    def __post_init__(self):
        object.__setattr__(self, "index", int(self.index))
        object.__setattr__(self, "pajek_id", int(self.pajek_id))
        object.__setattr__(self, "label", str(self.label))
        object.__setattr__(self, "x", float(self.x))
        object.__setattr__(self, "y", float(self.y))
        if self.index < 0:
            raise ValidationError(f"category index must be >= 0, got {self.index}")
        if self.pajek_id < 1:
            raise ValidationError(f"pajek id must be >= 1, got {self.pajek_id}")
        if not (isfinite(self.x) and isfinite(self.y)):
            raise ValidationError(
                f"category {self.label!r} has non-finite coordinates "
                f"({self.x}, {self.y})"
            )


@dataclass(frozen=True, eq=False)
class SimilarityMatrix:
    """Square category-similarity matrix.

    `from_edges` records that the values were assembled from an edge/arc list
    (no self-loops), which makes validate_similarity_matrix() fill the
    diagonal with 1. `max_asymmetry` is set by validation and reports the
    largest |s_ij - s_ji| observed before any symmetrization.
    """

    n: int
    values: np.ndarray
    from_edges: bool = False
    max_asymmetry: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "n", int(self.n))
        arr = np.array(self.values, dtype=np.float64)
        if arr.shape != (self.n, self.n):
            raise ValidationError(
                f"similarity matrix must be {self.n}x{self.n}, got shape {arr.shape}"
            )
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SimilarityMatrix):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.values, other.values)

    __hash__ = None  # type: ignore[assignment]


@dataclass(frozen=True)
class OverlayMap:
    """A base map: ordered subject categories plus optional similarity."""

    categories: tuple[SubjectCategory, ...]
    similarity: SimilarityMatrix | None = None

    def __post_init__(self):
        object.__setattr__(self, "categories", tuple(self.categories))
        if not self.categories:
            raise ValidationError("overlay map has no categories")
        for pos, cat in enumerate(self.categories):
            if cat.index != pos:
                raise ValidationError(
                    f"category indices must be contiguous from 0; "
                    f"position {pos} holds index {cat.index}"
                )
        ids = [c.pajek_id for c in self.categories]
        if len(set(ids)) != len(ids):
            raise ValidationError("duplicate pajek ids in overlay map")
        normalized = [" ".join(c.label.split()) for c in self.categories]
        seen: dict[str, str] = {}
        for label in normalized:
            if label in seen:
                raise ValidationError(
                    f"duplicate category label after whitespace "
                    f"normalization: {label!r}"
                )
            seen[label] = label
        if self.similarity is not None and self.similarity.n != len(self.categories):
            raise ValidationError(
                f"similarity matrix is {self.similarity.n}x{self.similarity.n} "
                f"but the map has {len(self.categories)} categories"
            )

    @property
    def n(self) -> int:
        return len(self.categories)


class UnitKind(str, Enum):
    PANEL_MEMBER = "panel_member"
    RESEARCH_GROUP = "research_group"
    OTHER = "other"


@dataclass(frozen=True)
class PublicationProfile:
    """Per-unit publication counts keyed by category index.

    Zero entries are dropped at construction so two profiles with the same
    support compare equal regardless of how they were assembled. `total` is
    computed with math.fsum (exactly rounded, hence order-independent).
    """

    unit_id: str
    kind: UnitKind
    counts: Mapping[int, float]
    total: float = field(init=False, compare=False)

    def __post_init__(self):
        if not isinstance(self.unit_id, str) or not self.unit_id:
            raise ProfileError("unit_id must be a non-empty string")
        if not isinstance(self.kind, UnitKind):
            raise ProfileError(f"kind must be a UnitKind, got {self.kind!r}")
        cleaned: dict[int, float] = {}
        for key, value in self.counts.items():
            j = int(key)
            m = float(value)
            if j < 0:
                raise ProfileError(
                    f"unit {self.unit_id!r}: category index {j} is negative"
                )
            if not isfinite(m) or m < 0:
                raise ProfileError(
                    f"unit {self.unit_id!r}: count for category {j} "
                    f"must be finite and >= 0, got {value!r}"
                )
            if m > 0:
                cleaned[j] = m
        object.__setattr__(self, "counts", dict(sorted(cleaned.items())))
        total = fsum(self.counts.values())
        if not total > 0:
            raise ProfileError(f"unit {self.unit_id!r} has total count 0")
        object.__setattr__(self, "total", total)

    def scaled(self, factor: float) -> "PublicationProfile":
        """Profile with every count multiplied by a strictly positive factor."""
        f = float(factor)
        if not (isfinite(f) and f > 0):
            raise ProfileError(f"scale factor must be finite and > 0, got {factor!r}")
        return PublicationProfile(
            unit_id=self.unit_id,
            kind=self.kind,
            counts={j: m * f for j, m in self.counts.items()},
        )


# ---------------------------------------------------------------------------
# Pajek project files
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PajekVertex:
    id: int
    label: str
    coords: tuple[float, ...]


@dataclass(frozen=True, eq=False)
class PajekNetwork:
    name: str | None
    vertices: tuple[PajekVertex, ...]
    arcs: tuple[tuple[int, int, float], ...]
    edges: tuple[tuple[int, int, float], ...]
    matrix: np.ndarray | None


@dataclass(frozen=True, eq=False)
class PajekDocument:
    networks: tuple[PajekNetwork, ...]
    ignored_sections: tuple[str, ...]


_VERTEX_RE = re.compile(r'^(\d+)\s+(?:"([^"]*)"|(\S+))\s*(.*)$')

# Sections we materialize; anything else is skipped and recorded.
_KNOWN = {"network", "vertices", "arcs", "edges", "matrix"}


class _NetworkBuilder:
    def __init__(self, name: str | None, line_no: int):
        self.name = name
        self.line_no = line_no
        self.declared: int | None = None
        self.vertices: list[PajekVertex] = []
        self.seen_ids: set[int] = set()
        self.arcs: list[tuple[int, int, int, float]] = []  # (line, i, j, w)
        self.edges: list[tuple[int, int, int, float]] = []
        self.matrix_rows: list[list[float]] | None = None

    def finish(self) -> PajekNetwork:
        if self.declared is not None and len(self.vertices) != self.declared:
            raise PajekParseError(
                self.line_no,
                f"*Vertices declares {self.declared} vertices but "
                f"{len(self.vertices)} were found",
            )
        matrix = None
        if self.matrix_rows is not None:
            want = self.declared if self.declared is not None else len(self.vertices)
            if len(self.matrix_rows) != want:
                raise PajekParseError(
                    self.line_no,
                    f"*Matrix has {len(self.matrix_rows)} rows, expected {want}",
                )
            matrix = np.array(self.matrix_rows, dtype=np.float64)
        for line_no, i, j, _w in self.arcs + self.edges:
            for endpoint in (i, j):
                if endpoint not in self.seen_ids:
                    raise PajekParseError(
                        line_no,
                        f"edge endpoint {endpoint} does not reference a "
                        f"declared vertex",
                    )
        return PajekNetwork(
            name=self.name,
            vertices=tuple(self.vertices),
            arcs=tuple((i, j, w) for _l, i, j, w in self.arcs),
            edges=tuple((i, j, w) for _l, i, j, w in self.edges),
            matrix=matrix,
        )


def _parse_vertex_line(line_no: int, line: str) -> PajekVertex:
    m = _VERTEX_RE.match(line.strip())
    if m is None:
        raise PajekParseError(line_no, f"malformed vertex line: {line.strip()!r}")
    vid = int(m.group(1))
    label = m.group(2) if m.group(2) is not None else m.group(3)
    coords: list[float] = []
    # The leading run of numeric tokens is the coordinate list; Pajek display
    # parameters (shape names, "ic Blue", ...) may trail and are ignored.
    for token in m.group(4).split():
        try:
            value = float(token)
        except ValueError:
            break
        coords.append(value)
    return PajekVertex(id=vid, label=label, coords=tuple(coords))


def _parse_link_line(line_no: int, line: str) -> tuple[int, int, int, float]:
    tokens = line.split()
    if len(tokens) < 2:
        raise PajekParseError(line_no, f"malformed edge line: {line.strip()!r}")
    try:
        i, j = int(tokens[0]), int(tokens[1])
    except ValueError:
        raise PajekParseError(
            line_no, f"edge endpoints must be integers: {line.strip()!r}"
        ) from None
    weight = 1.0
    if len(tokens) > 2:
        try:
            weight = float(tokens[2])
        except ValueError:
            raise PajekParseError(
                line_no, f"edge weight must be numeric: {line.strip()!r}"
            ) from None
    return line_no, i, j, weight


def parse_pajek(text: str) -> PajekDocument:
    """Parse the Pajek project subset: *Network, *Vertices, *Arcs, *Edges,
    *Matrix. Unknown sections are skipped and recorded in ignored_sections.
    """
    networks: list[PajekNetwork] = []
    ignored: list[str] = []
    builder: _NetworkBuilder | None = None
    mode = "none"
    # After an unknown header, one immediately following *Vertices block (a
    # partition/vector body) belongs to the unknown section.
    skip_owns_vertices = False

    def finish_current():
        nonlocal builder
        if builder is not None:
            networks.append(builder.finish())
            builder = None

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("%"):
            continue
        if line.startswith("*"):
            keyword = line.split()[0][1:].lower()
            rest = line[len(keyword) + 1:].strip()
            if keyword == "network":
                finish_current()
                name = rest.strip().strip('"').strip() or None
                builder = _NetworkBuilder(name, line_no)
                mode = "none"
                skip_owns_vertices = False
            elif keyword == "vertices":
                if mode == "skip" and skip_owns_vertices:
                    skip_owns_vertices = False
                    continue
                tokens = rest.split()
                if not tokens:
                    raise PajekParseError(line_no, "*Vertices requires a count")
                try:
                    declared = int(tokens[0])
                except ValueError:
                    raise PajekParseError(
                        line_no, f"*Vertices count must be an integer: {tokens[0]!r}"
                    ) from None
                if builder is None or builder.vertices or builder.declared is not None:
                    # a bare second *Vertices starts a new (unnamed) network
                    finish_current()
                    builder = _NetworkBuilder(None, line_no)
                builder.declared = declared
                builder.line_no = line_no
                mode = "vertices"
                skip_owns_vertices = False
            elif keyword in ("arcs", "edges"):
                if builder is None:
                    raise PajekParseError(
                        line_no, f"*{keyword.capitalize()} before any *Vertices"
                    )
                mode = keyword
                skip_owns_vertices = False
            elif keyword == "matrix":
                if builder is None or builder.declared is None:
                    raise PajekParseError(line_no, "*Matrix before *Vertices")
                builder.matrix_rows = []
                mode = "matrix"
                skip_owns_vertices = False
            else:
                ignored.append(line.split()[0])
                mode = "skip"
                skip_owns_vertices = True
            continue

        if mode == "vertices":
            assert builder is not None
            vertex = _parse_vertex_line(line_no, line)
            if vertex.id in builder.seen_ids:
                raise PajekParseError(line_no, f"duplicate vertex id {vertex.id}")
            builder.seen_ids.add(vertex.id)
            builder.vertices.append(vertex)
        elif mode in ("arcs", "edges"):
            assert builder is not None
            link = _parse_link_line(line_no, line)
            (builder.arcs if mode == "arcs" else builder.edges).append(link)
        elif mode == "matrix":
            assert builder is not None and builder.matrix_rows is not None
            want = builder.declared
            if len(builder.matrix_rows) >= (want or 0):
                raise PajekParseError(
                    line_no, f"*Matrix has more than {want} rows"
                )
            try:
                row = [float(tok) for tok in line.split()]
            except ValueError:
                raise PajekParseError(
                    line_no, f"malformed matrix row: {line!r}"
                ) from None
            if len(row) != want:
                raise PajekParseError(
                    line_no,
                    f"matrix row has {len(row)} entries, expected {want}",
                )
            builder.matrix_rows.append(row)
        elif mode == "skip":
            continue
        else:
            raise PajekParseError(line_no, f"data line outside any section: {line!r}")

    finish_current()
    return PajekDocument(networks=tuple(networks), ignored_sections=tuple(ignored))


def parse_pajek_bytes(data: bytes) -> PajekDocument:
    """Decode as UTF-8, falling back to Latin-1, then parse."""
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError:
        text = data.decode("latin-1")
    return parse_pajek(text)


def extract_overlay_map(
    doc: PajekDocument, network_selector: str | None = None
) -> OverlayMap:
    """Build an OverlayMap from one network of a parsed Pajek document.

    Default network: the first one whose vertices all carry >= 2 coordinates.
    Pajek ids are reindexed to contiguous 0-based indices in file order.
    """

    def has_coords(net: PajekNetwork) -> bool:
        return bool(net.vertices) and all(len(v.coords) >= 2 for v in net.vertices)

    if network_selector is not None:
        wanted = network_selector.strip().lower()
        matches = [
            net for net in doc.networks if (net.name or "").strip().lower() == wanted
        ]
        if not matches:
            names = ", ".join(repr(n.name) for n in doc.networks) or "none"
            raise ValidationError(
                f"no network named {network_selector!r} (available: {names})"
            )
        net = matches[0]
        if not has_coords(net):
            raise ValidationError(
                f"network {network_selector!r} lacks 2-D vertex coordinates"
            )
    else:
        candidates = [n for n in doc.networks if has_coords(n)]
        if not candidates:
            raise ValidationError(
                "no network with 2-D vertex coordinates in the document"
            )
        net = candidates[0]

    categories = tuple(
        SubjectCategory(
            index=k,
            pajek_id=v.id,
            label=v.label,
            x=v.coords[0],
            y=v.coords[1],
        )
        for k, v in enumerate(net.vertices)
    )
    id_to_index = {v.id: k for k, v in enumerate(net.vertices)}

    similarity: SimilarityMatrix | None = None
    if net.matrix is not None:
        similarity = SimilarityMatrix(n=len(categories), values=net.matrix)
    elif net.arcs or net.edges:
        values = np.zeros((len(categories), len(categories)), dtype=np.float64)
        for i, j, w in net.arcs:
            values[id_to_index[i], id_to_index[j]] = w
        for i, j, w in net.edges:
            a, b = id_to_index[i], id_to_index[j]
            values[a, b] = w
            values[b, a] = w
        similarity = SimilarityMatrix(
            n=len(categories), values=values, from_edges=True
        )

    return OverlayMap(categories=categories, similarity=similarity)


# ---------------------------------------------------------------------------
# similarity matrix validation
# ---------------------------------------------------------------------------


def validate_similarity_matrix(
    matrix: SimilarityMatrix, policy: str = "strict"
) -> SimilarityMatrix:
    """Check (and under `symmetrize`, repair) a similarity matrix.

    strict: reject asymmetry beyond SYMMETRY_TOLERANCE.
    symmetrize: replace by (S + S^T)/2; the observed asymmetry is recorded on
    the result as `max_asymmetry` either way. Entries in [-1e-12, 0) are
    clamped to 0; anything below, above 1 + 1e-12, or non-finite is an error.
    Matrices assembled from edge lists get their diagonal set to 1 here.
    """
    if policy not in ("strict", "symmetrize"):
        raise ValueError(f"policy must be 'strict' or 'symmetrize', got {policy!r}")
    values = np.array(matrix.values, dtype=np.float64)

    if not np.all(np.isfinite(values)):
        i, j = map(int, np.argwhere(~np.isfinite(values))[0])
        raise ValidationError(f"non-finite similarity entry at ({i}, {j})")
    low = values.min(initial=0.0)
    if low < -NEGATIVE_TOLERANCE:
        i, j = map(int, np.argwhere(values == low)[0])
        raise ValidationError(
            f"negative similarity {low!r} at ({i}, {j}) is below the "
            f"{-NEGATIVE_TOLERANCE} tolerance"
        )
    high = values.max(initial=0.0)
    if high > 1.0 + UPPER_TOLERANCE:
        i, j = map(int, np.argwhere(values == high)[0])
        raise ValidationError(
            f"similarity {high!r} at ({i}, {j}) exceeds 1 beyond the "
            f"{UPPER_TOLERANCE} tolerance"
        )
    values[values < 0.0] = 0.0

    asymmetry = float(np.abs(values - values.T).max(initial=0.0))
    if policy == "strict":
        if asymmetry > SYMMETRY_TOLERANCE:
            delta = np.abs(values - values.T)
            i, j = map(int, np.unravel_index(int(delta.argmax()), delta.shape))
            raise ValidationError(
                f"asymmetry |s[{i},{j}] - s[{j},{i}]| = {asymmetry!r} exceeds "
                f"the {SYMMETRY_TOLERANCE} tolerance (use the symmetrize policy "
                f"to average the two triangles)"
            )
    else:
        values = (values + values.T) / 2.0

    if matrix.from_edges:
        np.fill_diagonal(values, 1.0)

    return SimilarityMatrix(
        n=matrix.n, values=values, from_edges=False, max_asymmetry=asymmetry
    )


# ---------------------------------------------------------------------------
# profile CSV
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ProfileLoadResult:
    profiles: tuple[PublicationProfile, ...]
    skipped_rows: int


def load_profiles_csv(
    text: str, overlay_map: OverlayMap, unknown_policy: str = "error"
) -> ProfileLoadResult:
    """Load publication profiles from CSV with header unit_id,kind,category,count.

    `category` matches a map label exactly, or a 0-based numeric index.
    Duplicate (unit, category) rows are summed. unknown_policy:
      error - unknown category is a ProfileError;
      skip  - the row is dropped and counted in skipped_rows.
    Profiles come back sorted by unit_id; the loader is row-order independent.
    """
    if unknown_policy not in ("error", "skip"):
        raise ValueError(
            f"unknown_policy must be 'error' or 'skip', got {unknown_policy!r}"
        )
    label_to_index = {c.label: c.index for c in overlay_map.categories}
    n = overlay_map.n

    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise ProfileError("profile CSV is empty") from None
    header = [cell.strip().lstrip("﻿") for cell in header]
    if tuple(header) != CSV_HEADER:
        raise ProfileError(
            f"profile CSV header must be {','.join(CSV_HEADER)!r}, "
            f"got {','.join(header)!r}"
        )

    kinds: dict[str, UnitKind] = {}
    cells: dict[str, dict[int, list[float]]] = {}
    skipped = 0
    for row_no, row in enumerate(reader, start=2):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != 4:
            raise ProfileError(f"row {row_no}: expected 4 fields, got {len(row)}")
        unit_id = row[0].strip()
        if not unit_id:
            raise ProfileError(f"row {row_no}: empty unit_id")
        try:
            kind = UnitKind(row[1].strip())
        except ValueError:
            allowed = ", ".join(k.value for k in UnitKind)
            raise ProfileError(
                f"row {row_no}: unknown kind {row[1].strip()!r} "
                f"(expected one of: {allowed})"
            ) from None
        previous = kinds.setdefault(unit_id, kind)
        if previous is not kind:
            raise ProfileError(
                f"row {row_no}: unit {unit_id!r} declared as both "
                f"{previous.value!r} and {kind.value!r}"
            )

        category = row[2].strip()
        if category in label_to_index:
            index = label_to_index[category]
        else:
            try:
                index = int(category)
            except ValueError:
                index = -1
            if not 0 <= index < n:
                if unknown_policy == "skip":
                    skipped += 1
                    continue
                raise ProfileError(
                    f"row {row_no}: unknown category {category!r}"
                )

        try:
            count = float(row[3])
        except ValueError:
            raise ProfileError(
                f"row {row_no}: count must be numeric, got {row[3]!r}"
            ) from None
        if not isfinite(count) or count < 0:
            raise ProfileError(
                f"row {row_no}: count must be finite and >= 0, got {row[3]!r}"
            )
        cells.setdefault(unit_id, {}).setdefault(index, []).append(count)

    profiles = []
    for unit_id in sorted(cells):
        # Value-sorted fsum per cell: exact regardless of input row order.
        counts = {
            index: fsum(sorted(values)) for index, values in cells[unit_id].items()
        }
        profiles.append(
            PublicationProfile(unit_id=unit_id, kind=kinds[unit_id], counts=counts)
        )
    if not profiles:
        raise ProfileError("profile CSV contains no data rows")
    return ProfileLoadResult(profiles=tuple(profiles), skipped_rows=skipped)


# ---------------------------------------------------------------------------
# map JSON
# ---------------------------------------------------------------------------


def write_map_json(overlay_map: OverlayMap) -> str:
    """Serialize a map to JSON. Floats use shortest round-trip repr, so
    read_map_json(write_map_json(m)) reproduces m bit-for-bit.
    """
    doc = {
        "categories": [
            {
                "index": c.index,
                "pajek_id": c.pajek_id,
                "label": c.label,
                "x": c.x,
                "y": c.y,
            }
            for c in overlay_map.categories
        ],
        "similarity": (
            None
            if overlay_map.similarity is None
            else overlay_map.similarity.values.tolist()
        ),
    }
    return json.dumps(doc, indent=2) + "\n"


def _require(condition: bool, message: str):
    if not condition:
        raise ValidationError(f"map JSON schema violation: {message}")


def read_map_json(text: str) -> OverlayMap:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"map JSON is not valid JSON: {exc}") from None

    _require(isinstance(doc, dict), "top level must be an object")
    _require("categories" in doc, "missing 'categories'")
    _require("similarity" in doc, "missing 'similarity'")
    raw_categories = doc["categories"]
    _require(
        isinstance(raw_categories, list) and raw_categories,
        "'categories' must be a non-empty array",
    )

    categories = []
    for pos, entry in enumerate(raw_categories):
        _require(isinstance(entry, dict), f"category {pos} must be an object")
        _require(
            set(entry) == {"index", "pajek_id", "label", "x", "y"},
            f"category {pos} must have exactly index/pajek_id/label/x/y",
        )
        _require(
            isinstance(entry["index"], int) and not isinstance(entry["index"], bool),
            f"category {pos}: index must be an integer",
        )
        _require(
            isinstance(entry["pajek_id"], int)
            and not isinstance(entry["pajek_id"], bool),
            f"category {pos}: pajek_id must be an integer",
        )
        _require(isinstance(entry["label"], str), f"category {pos}: label must be a string")
        for axis in ("x", "y"):
            _require(
                isinstance(entry[axis], (int, float))
                and not isinstance(entry[axis], bool),
                f"category {pos}: {axis} must be a number",
            )
        categories.append(
            SubjectCategory(
                index=entry["index"],
                pajek_id=entry["pajek_id"],
                label=entry["label"],
                x=float(entry["x"]),
                y=float(entry["y"]),
            )
        )

    similarity = None
    raw_similarity = doc["similarity"]
    if raw_similarity is not None:
        n = len(categories)
        _require(
            isinstance(raw_similarity, list) and len(raw_similarity) == n,
            f"'similarity' must be null or an {n}x{n} array",
        )
        for row_no, row in enumerate(raw_similarity):
            _require(
                isinstance(row, list) and len(row) == n,
                f"similarity row {row_no} must have {n} entries",
            )
            for value in row:
                _require(
                    isinstance(value, (int, float)) and not isinstance(value, bool),
                    f"similarity row {row_no} holds a non-numeric entry",
                )
        similarity = SimilarityMatrix(
            n=n, values=np.array(raw_similarity, dtype=np.float64)
        )

    return OverlayMap(categories=tuple(categories), similarity=similarity)
