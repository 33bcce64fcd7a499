import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from barymap import (
    DataError,
    NormalizationMode,
    Point2D,
    PublicationProfile,
    Representation,
    SimilarityMatrix,
    UnitKind,
    barycenter_2d,
    bounding_box_check,
    format_significant,
    normalization_audit,
    pairwise_distances,
    pool_profiles,
    report_to_csv,
    report_to_json,
    represent,
    scale_invariance_audit,
    weighted_barycenter,
)
from barymap.analysis import _box_witness
from conftest import (
    COORDINATE_SUM_EXPECTED,
    WORKED_S,
    RECTANGLE,
    make_map,
    random_profile,
)


def profile(counts, unit_id="u", kind=UnitKind.OTHER):
    return PublicationProfile(unit_id=unit_id, kind=kind, counts=counts)


# ---------------------------------------------------------------------------
# Representation
# ---------------------------------------------------------------------------


def test_representation_parse_forms():
    assert Representation.parse("barycenter2d") == Representation.barycenter2d()
    assert Representation.parse("adapted(by-total)") == Representation.adapted(
        NormalizationMode.BY_TOTAL
    )
    assert Representation.parse(" adapted(raw) ").mode is NormalizationMode.RAW
    with pytest.raises(ValueError, match="unknown representation"):
        Representation.parse("centroid")
    with pytest.raises(ValueError, match="unknown representation"):
        Representation.parse("adapted(normalized)")


def test_representation_constraints():
    with pytest.raises(ValueError, match="requires a mode"):
        Representation(kind="adapted")
    with pytest.raises(ValueError, match="takes no mode"):
        Representation(kind="barycenter2d", mode=NormalizationMode.RAW)
    with pytest.raises(ValueError, match="kind"):
        Representation(kind="median")


def test_representation_labels_and_invariance_flags():
    assert Representation.barycenter2d().label == "barycenter2d"
    assert Representation.adapted("raw").label == "adapted(raw)"
    assert Representation.barycenter2d().expected_scale_invariant
    assert not Representation.adapted("raw").expected_scale_invariant
    assert Representation.adapted("by_total").expected_scale_invariant
    assert Representation.adapted("by_adapted_sum").expected_scale_invariant


def test_represent_requires_similarity_for_adapted(toy_map):
    bare = make_map([(0.0, 0.0), (1.0, 1.0)])
    prof = profile({0: 1.0})
    assert isinstance(represent(prof, bare, Representation.barycenter2d()), Point2D)
    with pytest.raises(DataError, match="no similarity matrix"):
        represent(prof, bare, Representation.adapted("by_total"))
    vector = represent(prof, toy_map, Representation.adapted("by_total"))
    assert vector.values.shape == (4,)


# ---------------------------------------------------------------------------
# pooling
# ---------------------------------------------------------------------------


def test_pool_profiles_merges_counts():
    pooled = pool_profiles(
        [
            profile({0: 1.0, 1: 2.0}, unit_id="a"),
            profile({1: 3.0, 2: 4.0}, unit_id="b"),
        ]
    )
    assert pooled.unit_id == "panel:pooled"
    assert pooled.counts == {0: 1.0, 1: 5.0, 2: 4.0}
    assert pooled.kind is UnitKind.OTHER
    with pytest.raises(DataError, match="empty"):
        pool_profiles([])


def test_pooled_barycenter_equals_weighted_member_barycenters(overlay224):
    rng = np.random.default_rng(404)
    members = [
        random_profile(rng, overlay224.n, unit_id=f"m{i}", kind=UnitKind.PANEL_MEMBER)
        for i in range(5)
    ]
    pooled_point = barycenter_2d(pool_profiles(members), overlay224)
    member_points = [barycenter_2d(m, overlay224) for m in members]
    weighted = weighted_barycenter(member_points, [m.total for m in members])
    for got, want in zip(pooled_point.coords, weighted):
        assert math.isclose(got, want, rel_tol=1e-12, abs_tol=1e-15)


# ---------------------------------------------------------------------------
# distance reports
# ---------------------------------------------------------------------------


def family(prefix, kind, overlay_map, rng, count):
    return [
        random_profile(rng, overlay_map.n, unit_id=f"{prefix}{i}", kind=kind)
        for i in range(count)
    ]


def test_pairwise_distances_shape_and_rankings(toy_map):
    groups = [
        profile({0: 4.0, 1: 1.0}, "g1", UnitKind.RESEARCH_GROUP),
        profile({2: 2.0}, "g2", UnitKind.RESEARCH_GROUP),
    ]
    panel = [
        profile({0: 1.0}, "p1", UnitKind.PANEL_MEMBER),
        profile({2: 5.0, 3: 5.0}, "p2", UnitKind.PANEL_MEMBER),
        profile({1: 2.0}, "p3", UnitKind.PANEL_MEMBER),
    ]
    report = pairwise_distances(
        groups, panel, toy_map, Representation.barycenter2d()
    )
    assert report.row_units == ("g1", "g2")
    assert report.column_units == ("p1", "p2", "p3")
    assert report.distances.shape == (2, 3)
    for row_no, ranking in enumerate(report.rankings):
        assert sorted(ranking) == [0, 1, 2]
        row = report.distances[row_no]
        assert row[ranking[0]] == row.min()
        assert list(row[list(ranking)]) == sorted(row)


def test_pairwise_distances_pooled_single_column(toy_map):
    groups = [profile({0: 1.0}, "g1", UnitKind.RESEARCH_GROUP)]
    panel = [
        profile({1: 1.0}, "p1", UnitKind.PANEL_MEMBER),
        profile({3: 1.0}, "p2", UnitKind.PANEL_MEMBER),
    ]
    report = pairwise_distances(
        groups, panel, toy_map, Representation.barycenter2d(), "pooled"
    )
    assert report.column_units == ("panel:pooled",)
    assert report.distances.shape == (1, 1)
    pooled_point = barycenter_2d(pool_profiles(panel), toy_map)
    want = math.dist(
        barycenter_2d(groups[0], toy_map).coords, pooled_point.coords
    )
    assert report.distances[0, 0] == pytest.approx(want, rel=1e-15)


def test_pairwise_distances_validation(toy_map):
    g = profile({0: 1.0}, "g1", UnitKind.RESEARCH_GROUP)
    p = profile({1: 1.0}, "p1", UnitKind.PANEL_MEMBER)
    with pytest.raises(ValueError, match="aggregation"):
        pairwise_distances([g], [p], toy_map, Representation.barycenter2d(), "mean")
    with pytest.raises(DataError, match="non-empty"):
        pairwise_distances([], [p], toy_map, Representation.barycenter2d())
    with pytest.raises(DataError, match="non-empty"):
        pairwise_distances([g], [], toy_map, Representation.barycenter2d())
    with pytest.raises(DataError, match="duplicate unit ids"):
        pairwise_distances([g, g], [p], toy_map, Representation.barycenter2d())


def test_distance_report_transpose_symmetry(overlay224):
    rng = np.random.default_rng(99)
    groups = family("g", UnitKind.RESEARCH_GROUP, overlay224, rng, 6)
    panel = family("p", UnitKind.PANEL_MEMBER, overlay224, rng, 4)
    rep = Representation.adapted("by_total")
    forward = pairwise_distances(groups, panel, overlay224, rep)
    backward = pairwise_distances(panel, groups, overlay224, rep)
    assert np.array_equal(forward.distances, backward.distances.T)


def test_rank_stability_under_per_unit_scaling(overlay224):
    rng = np.random.default_rng(1234)
    groups = family("g", UnitKind.RESEARCH_GROUP, overlay224, rng, 12)
    panel = family("p", UnitKind.PANEL_MEMBER, overlay224, rng, 8)
    rep = Representation.barycenter2d()
    base = pairwise_distances(groups, panel, overlay224, rep)
    factors = rng.uniform(1e-3, 1e3, size=len(groups))
    scaled_groups = [g.scaled(float(c)) for g, c in zip(groups, factors)]
    scaled = pairwise_distances(scaled_groups, panel, overlay224, rep)
    assert scaled.rankings == base.rankings


def test_ranking_tie_break_by_column_order():
    overlay_map = make_map([(0.0, 0.0), (2.0, 0.0), (-2.0, 0.0)])
    groups = [profile({0: 1.0}, "g", UnitKind.RESEARCH_GROUP)]
    panel = [
        profile({1: 1.0}, "east", UnitKind.PANEL_MEMBER),
        profile({2: 1.0}, "west", UnitKind.PANEL_MEMBER),
    ]
    report = pairwise_distances(
        groups, panel, overlay_map, Representation.barycenter2d()
    )
    assert report.distances[0, 0] == report.distances[0, 1] == 2.0
    assert report.rankings[0] == (0, 1)


def test_report_to_csv_and_json(toy_map):
    groups = [profile({0: 4.0, 1: 1.0}, "g,1", UnitKind.RESEARCH_GROUP)]
    panel = [profile({2: 1.0}, "p1", UnitKind.PANEL_MEMBER)]
    report = pairwise_distances(
        groups, panel, toy_map, Representation.barycenter2d()
    )
    text = report_to_csv(report)
    lines = text.splitlines()
    assert lines[0] == "unit_id,p1"
    assert lines[1].startswith('"g,1",')  # comma in id stays quoted
    value = float(lines[1].split('",')[1])
    assert value == report.distances[0, 0]  # 17 digits round-trip

    doc = json.loads(report_to_json(report))
    assert doc["representation"] == "barycenter2d"
    assert doc["row_units"] == ["g,1"]
    assert doc["distances"][0][0] == report.distances[0, 0]
    assert doc["rankings"] == [[0]]


def test_report_validation_guards():
    from barymap import DistanceReport

    with pytest.raises(DataError, match="shape"):
        DistanceReport(
            representation=Representation.barycenter2d(),
            row_units=("a",),
            column_units=("b",),
            distances=np.zeros((2, 2)),
            rankings=((0,),),
        )
    with pytest.raises(DataError, match="permutation"):
        DistanceReport(
            representation=Representation.barycenter2d(),
            row_units=("a",),
            column_units=("b", "c"),
            distances=np.zeros((1, 2)),
            rankings=((0, 0),),
        )
    with pytest.raises(DataError, match="nearest"):
        DistanceReport(
            representation=Representation.barycenter2d(),
            row_units=("a",),
            column_units=("b", "c"),
            distances=np.array([[5.0, 1.0]]),
            rankings=((0, 1),),
        )
    with pytest.raises(DataError, match="finite"):
        DistanceReport(
            representation=Representation.barycenter2d(),
            row_units=("a",),
            column_units=("b",),
            distances=np.array([[-1.0]]),
            rankings=((0,),),
        )


# ---------------------------------------------------------------------------
# audits
# ---------------------------------------------------------------------------


def test_scale_audit_verdicts(toy_map):
    prof = profile({0: 4.0, 1: 1.0}, "u1")
    reps = [
        Representation.barycenter2d(),
        Representation.adapted("by_total"),
        Representation.adapted("by_adapted_sum"),
        Representation.adapted("raw"),
    ]
    audit = scale_invariance_audit(prof, toy_map, reps)
    assert audit.unit_id == "u1"
    assert audit.scale_factors == (1e-3, 1e-1, 1.0, 1e1, 1e3)
    for label in ("barycenter2d", "adapted(by_total)", "adapted(by_adapted_sum)"):
        assert audit.passed[label], audit.max_drift[label]
        assert audit.expected_invariant[label]
    assert not audit.passed["adapted(raw)"]
    assert not audit.expected_invariant["adapted(raw)"]
    for factor, drift in audit.drift_by_factor["adapted(raw)"].items():
        if factor != 1.0:
            assert drift > 1e-9
        else:
            assert drift == 0.0


def test_scale_audit_validation(toy_map):
    prof = profile({0: 1.0})
    with pytest.raises(DataError, match="strictly positive"):
        scale_invariance_audit(
            prof, toy_map, [Representation.barycenter2d()], scale_factors=(0.0,)
        )
    with pytest.raises(ValueError, match="at least one representation"):
        scale_invariance_audit(prof, toy_map, [])
    with pytest.raises(ValueError, match="tolerance"):
        scale_invariance_audit(
            prof, toy_map, [Representation.barycenter2d()], tolerance=-1.0
        )


def test_scale_audit_zero_tolerance_factor_one_passes(toy_map):
    prof = profile({0: 4.0, 1: 1.0})
    audit = scale_invariance_audit(
        prof,
        toy_map,
        [Representation.barycenter2d()],
        scale_factors=(1.0,),
        tolerance=0.0,
    )
    assert audit.passed["barycenter2d"]
    assert audit.max_drift["barycenter2d"] == 0.0


def test_normalization_audit_worked_values(worked_profile):
    similarity = SimilarityMatrix(n=4, values=WORKED_S)
    audit = normalization_audit(worked_profile, similarity)
    assert abs(audit.coordinate_sum - COORDINATE_SUM_EXPECTED) <= 1e-12
    assert abs(audit.deviation - 1.04) <= 1e-12
    assert audit.unit_id == "u1"


def test_normalization_audit_identity_deviation_zero():
    identity = SimilarityMatrix(n=3, values=np.eye(3))
    audit = normalization_audit(profile({1: 2.0, 2: 5.0}), identity)
    assert audit.coordinate_sum == 1.0
    assert audit.deviation == 0.0


def test_bounding_box_check_rectangle():
    overlay_map = make_map(RECTANGLE)
    prof = profile({0: 1.0, 1: 1.0, 2: 1.0, 3: 1.0})
    check = bounding_box_check(prof, overlay_map)
    assert check.passed
    assert check.witness is None
    assert check.point.coords == (1.0, 0.5)
    assert check.box == ((0.0, 2.0), (0.0, 1.0))


def test_bounding_box_check_single_category_degenerate_box():
    overlay_map = make_map([(0.3, 0.7), (5.0, 5.0)])
    check = bounding_box_check(profile({0: 2.0}), overlay_map)
    assert check.passed
    assert check.box == ((0.3, 0.3), (0.7, 0.7))


def test_box_witness_reports_offending_axis():
    box = ((0.0, 1.0), (0.0, 1.0))
    assert _box_witness(Point2D(0.5, 0.5), box) is None
    assert "c1=" in _box_witness(Point2D(1.5, 0.5), box)
    assert "c2=" in _box_witness(Point2D(0.5, -0.5), box)


def test_bounding_box_check_randomized(overlay224):
    rng = np.random.default_rng(777)
    for i in range(1000):
        prof = random_profile(rng, overlay224.n, unit_id=f"r{i}", integer=False)
        assert bounding_box_check(prof, overlay224).passed


# ---------------------------------------------------------------------------
# formatting
# ---------------------------------------------------------------------------


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_format_significant_17_digits_round_trips(value):
    assert float(format_significant(value)) == value


def test_format_significant_digit_control():
    assert format_significant(0.3333333333333333, 3) == "0.333"
    with pytest.raises(ValueError, match="digits"):
        format_significant(1.0, 0)
