from __future__ import annotations

from fractions import Fraction

import pytest

from tiltsheaf.branch import BranchComponent, BranchSheaf, enumerate_branches
from tiltsheaf.classify import (INFINITY, IrrationalMark, PointSet, RationalSlope,
                                TorsionfreeTag, compare_slopes, enumerate_tilting, parse_slope,
                                pruefer_ray_check, tilting_descriptor)
from tiltsheaf.curve_model import weighted_line
from tiltsheaf.errors import ClassificationError, InputError
from tiltsheaf.tube import TubeCoord

from conftest import elliptic_curve, example_branch, example_curve


def test_lukas_descriptor():
    t = tilting_descriptor(BranchSheaf(), [], weighted_line([2, 3]))
    assert t.torsionfree_tag is TorsionfreeTag.LUKAS
    assert t.resolving.base == "VectAll" and not t.pruefer
    assert not pruefer_ray_check(t.resolving, "x1", 0)


def test_example_pruefer_set():
    t = tilting_descriptor(example_branch(), ["x"], example_curve())
    assert [rx.members for rx in t.pruefer] == [frozenset({0, 1, 5, 6})]
    assert t.torsionfree_tag is TorsionfreeTag.LAMBDA_V
    torsion = t.torsion_part()
    assert [X for X in torsion if X.is_pruefer] == [TubeCoord("x", j, None, 11) for j in (0, 1, 5, 6)]


def test_homogeneous_point_full_ray():
    d = weighted_line([2], homogeneous=["y"])
    t = tilting_descriptor(BranchSheaf(), ["y"], d)
    assert t.torsion_part() == [TubeCoord("y", 0, None, 1)]
    assert pruefer_ray_check(t.resolving, "y", 0)


def test_window_and_slope_errors():
    d = weighted_line([2], homogeneous=["y"])
    with pytest.raises(ClassificationError):
        tilting_descriptor(BranchSheaf(), ["z"], d)
    with pytest.raises(ClassificationError):
        tilting_descriptor(BranchSheaf(), ["y"], d, RationalSlope(Fraction(1)))
    with pytest.raises(ClassificationError):
        tilting_descriptor(BranchSheaf(), [], weighted_line([2, 3, 7]))
    bad = BranchSheaf.from_summands([TubeCoord("x1", 0, 1, 2), TubeCoord("x1", 1, 1, 2)])
    with pytest.raises(ClassificationError):
        tilting_descriptor(bad, ["x1"], d)


def _hand_list():
    """(V, branch summands (offset, length), Pruefer offsets per point, extra, tag)."""
    S0, S1 = (0, 1), (1, 1)
    rows = [
        ((), (), {}, (), "Lukas"),
        ((), (S0,), {}, (S0,), "Lukas"),
        ((), (S1,), {}, (S1,), "Lukas"),
        (("x1",), (), {"x1": [0, 1]}, (), "LambdaV"),
        (("x1",), (S0,), {"x1": [0]}, (), "LambdaV"),
        (("x1",), (S1,), {"x1": [1]}, (), "LambdaV"),
        (("y",), (), {"y": [0]}, (), "LambdaV"),
        (("y",), (S0,), {"y": [0]}, (S0,), "LambdaV"),
        (("y",), (S1,), {"y": [0]}, (S1,), "LambdaV"),
        (("x1", "y"), (), {"x1": [0, 1], "y": [0]}, (), "LambdaV"),
        (("x1", "y"), (S0,), {"x1": [0], "y": [0]}, (), "LambdaV"),
        (("x1", "y"), (S1,), {"x1": [1], "y": [0]}, (), "LambdaV"),
    ]
    return rows


def _as_row(t):
    def pair(X):
        return (X.a, X.length)
    return (tuple(sorted(t.V.labels)),
            tuple(sorted(pair(X) for X in t.branch.summands)),
            {rx.point: sorted(rx.members) for rx in t.pruefer},
            tuple(sorted(pair(X) for X in t.resolving.extra)),
            t.torsionfree_tag.value)


def test_domestic_window_matches_hand_list():
    d = weighted_line([2], homogeneous=["y"])
    got = [_as_row(t) for t in enumerate_tilting(d)]
    assert got == _hand_list()


def test_elliptic_window_of_two_points():
    descs = enumerate_tilting(elliptic_curve())
    assert len(descs) == 4
    assert [t.torsionfree_tag.value for t in descs].count("Lw") == 1
    assert {t.V.labels for t in descs} == {frozenset(), frozenset({"y1"}), frozenset({"y2"}),
                                           frozenset({"y1", "y2"})}


def test_elliptic_irrational_slope_has_only_lw():
    mark = IrrationalMark("w", Fraction(1, 3), Fraction(1, 2))
    descs = enumerate_tilting(elliptic_curve(), slopes=(mark,))
    assert len(descs) == 1 and descs[0].torsionfree_tag is TorsionfreeTag.LW


def test_wild_enumeration_skips_empty_V():
    d = weighted_line([2, 3, 7])
    descs = enumerate_tilting(d, max_components=0)
    assert descs and all(not t.V.is_empty for t in descs)


def test_tubular_slopes_relabel_in_bijection():
    d = weighted_line([2, 2, 2, 2])
    a, b = RationalSlope(Fraction(0)), RationalSlope(Fraction(1, 2))
    at_a = enumerate_tilting(d, slopes=(a,), max_components=1)
    at_b = enumerate_tilting(d, slopes=(b,), max_components=1)
    assert len(at_a) == len(at_b)
    assert not ({t.key() for t in at_a} & {t.key() for t in at_b})
    assert [(t.branch, t.V) for t in at_a] == [(t.branch, t.V) for t in at_b]
    assert sum(t.V.is_empty and not t.branch for t in at_a) == 1


def test_tubular_irrational_slope():
    d = weighted_line([3, 3, 3])
    mark = IrrationalMark("w", Fraction(0), Fraction(1))
    descs = enumerate_tilting(d, slopes=(mark,))
    assert len(descs) == 1 and descs[0].torsionfree_tag is TorsionfreeTag.LW
    with pytest.raises(ClassificationError):
        tilting_descriptor(BranchSheaf(), ["x1"], d, mark)


@pytest.mark.parametrize("weights", [[2], [3], [2, 3], [4]])
def test_ray_check_and_closure(weights):
    d = weighted_line(weights, homogeneous=["y"])
    for t in enumerate_tilting(d):
        longest = max([X.length for X in t.branch.summands] + [0])
        for pt in d.points:
            rays = {rx.point: rx.members for rx in t.pruefer}
            for j in range(pt.p):
                assert pruefer_ray_check(t.resolving, pt.label, j) == (j in rays.get(pt.label, ()))
                for n in range(1, pt.p + longest + 1):
                    X = TubeCoord(pt.label, j, n, pt.p)
                    if t.resolving.contains(X) and j in rays.get(pt.label, ()):
                        assert all(t.resolving.contains(X.with_length(k)) for k in range(1, n))


def test_descriptors_pairwise_inequivalent():
    d = weighted_line([3], homogeneous=["y"])
    descs = enumerate_tilting(d)
    keys = [t.key() for t in descs]
    assert len(keys) == len(set(keys))
    assert sum(t.V.is_empty and not t.branch for t in descs) == 1


def test_cofinite_sets():
    d = weighted_line([2], homogeneous=["y"])
    V = PointSet(frozenset({"y"}), complement=True)
    assert "x1" in V and "y" not in V and "far" in V
    t = tilting_descriptor(BranchSheaf(), V, d)
    assert t.resolving.ray_offsets("far") == {0}
    assert len(enumerate_tilting(d, include_cofinite=True)) == 24


def test_slopes():
    assert parse_slope("inf") is INFINITY
    assert parse_slope("2/3") == RationalSlope(Fraction(2, 3))
    mark = parse_slope("irr:w:1/3:1/2")
    assert compare_slopes(RationalSlope(Fraction(0)), mark) == -1
    assert compare_slopes(mark, INFINITY) == -1
    with pytest.raises(ClassificationError):
        compare_slopes(RationalSlope(Fraction(2, 5)), mark)
    with pytest.raises(InputError):
        parse_slope("irr:w")
