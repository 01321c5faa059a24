from __future__ import annotations

import random
from importlib import resources

import pytest

from tiltsheaf.branch import BranchComponent, BranchSheaf, enumerate_branches
from tiltsheaf.copresent import (SESRecord, SummandTerm, TermKind, RenderContext,
                                 apply_branch_step, build_canonical, calibrate, check_balance, first_step_map,
                                 injective_resolution_LambdaV, lattice_defect, is_balanced,
                                 reduced_weight, render_record, render_result,
                                 run_copresentation, step1_records, step1_sequence)
from tiltsheaf.curve_model import weighted_line
from tiltsheaf.errors import CopresentationError
from tiltsheaf.symbolic import ONE
from tiltsheaf.tube import INF, TubeCoord

from conftest import elliptic_curve, example_branch, example_curve


def T(a, n, p=11, x="x"):
    return TubeCoord(x, a, n, p)


def golden(name):
    return resources.files("tiltsheaf").joinpath("data", name).read_text(encoding="utf-8").splitlines()


def test_canonical_configuration_sizes():
    assert build_canonical(example_curve()).size == 12
    assert len(build_canonical(example_curve()).summands) == 12
    assert build_canonical(weighted_line([2, 3])).size == 5
    with pytest.raises(CopresentationError):
        build_canonical(elliptic_curve())


def test_example_calibration(example):
    d, B = example
    cal = calibrate(build_canonical(d), B, ["x"])
    segments = sorted(cc.segment for cc in cal.at("x").components)
    assert segments == [(2, 3, 4, 5), (8, 9, 10)]
    assert cal.lambda_prime == [("L",), ("Lbar",), ("arm", "x", 1), ("arm", "x", 6), ("arm", "x", 7)]
    assert reduced_weight(cal, "x") == 4


def test_empty_branch_keeps_everything():
    d = example_curve()
    cal = calibrate(build_canonical(d), BranchSheaf(), ["x"])
    assert len(cal.lambda_prime) == 12 and not cal.at("x").components


def test_two_singletons_get_disjoint_segments():
    d = weighted_line([5])
    B = BranchSheaf.from_summands([T(0, 1, 5, "x1"), T(-2, 1, 5, "x1")])
    cal = calibrate(build_canonical(d), B, ["x1"])
    segs = [cc.segment for cc in cal.at("x1").components]
    assert all(len(s) == 1 for s in segs) and len(set(segs)) == 2


def _terms(rec, side):
    return [(t.kind.value, t.index, t.coord, t.mult.evaluate(example_curve()))
            for t in getattr(rec, side)]


def test_first_step_of_example(example):
    d, B = example
    cal = calibrate(build_canonical(d), B, ["x"])
    seq = step1_sequence(cal, ["x"], d)
    right = {(t.coord, t.mult.evaluate(d)) for t in seq.right}
    assert right == {(T(1, INF), 2), (T(0, INF), 1), (T(6, INF), 1), (T(5, INF), 1)}
    middle = {(t.index, t.mult.evaluate(d)) for t in seq.middle}
    assert middle == {(None, 2), (-1, 1), (4, 1), (5, 1)}


def test_first_step_without_exceptional_points():
    d = weighted_line([], homogeneous=["x"])
    cal = calibrate(build_canonical(d), BranchSheaf(), ["x"])
    recs = step1_records(cal, ["x"], d)
    assert [[t.coord for t in r.right] for r in recs] == [[TubeCoord("x", 0, INF, 1)]] * 2


def test_first_step_needs_V(example):
    d, B = example
    cal = calibrate(build_canonical(d), B, ["x"])
    with pytest.raises(CopresentationError):
        step1_sequence(cal, [], d)
    with pytest.raises(CopresentationError):
        run_copresentation(B, [], d)


def _ses6():
    G = SummandTerm(TermKind.G, ONE, point="x", index=-1, source=("arm", "x", 1))
    P = SummandTerm(TermKind.PRUEFER, ONE, coord=T(0, INF))
    return SESRecord((SummandTerm(TermKind.ARM, ONE, point="x", index=5),),
                     (G, SummandTerm(TermKind.BRANCH, ONE, coord=T(0, 4))), (P,))


def test_epi_then_mono_step():
    left3 = SummandTerm(TermKind.ARM, ONE, point="x", index=3)
    ses7 = apply_branch_step(_ses6(), T(-2, 2), "epi", left3)
    assert ses7.branch_terms("right") == [T(-2, 2)]
    assert ses7.branch_terms("middle") == [T(0, 4)]
    left4 = SummandTerm(TermKind.ARM, ONE, point="x", index=4)
    ses8 = apply_branch_step(ses7, T(-2, 1), "mono", left4)
    assert ses8.branch_terms("middle") == [T(0, 4), T(-2, 1)]
    assert ses8.branch_terms("right") == [T(-2, 2)]


def test_step_hypothesis_violation_reported():
    left = SummandTerm(TermKind.ARM, ONE, point="x", index=3)
    with pytest.raises(CopresentationError, match="Hom"):
        apply_branch_step(_ses6(), T(0, 1), "epi", left)
    with pytest.raises(CopresentationError):
        apply_branch_step(_ses6(), T(0, 1), "sideways", left)


def test_example_records_balance(example):
    d, B = example
    result = run_copresentation(B, ["x"], d)
    assert len(result.records) == 12
    assert result.ts3_plus and not result.diagnostics
    assert check_balance(result, d) == []


def test_displayed_form_of_last_two_records_does_not_balance(example):
    d, B = example
    result = run_copresentation(B, ["x"], d)
    step1 = first_step_map(result)
    for rec in result.records[-2:]:
        padded = SESRecord(rec.left, rec.middle + (SummandTerm(TermKind.BRANCH, ONE, coord=T(5, 3)),),
                           rec.right)
        assert not is_balanced(lattice_defect(padded, result.calibration, d, 11, step1), d)


def test_golden_renderings(example):
    d, B = example
    result = run_copresentation(B, ["x"], d)
    assert render_result(result, B, d) == golden("example_copresentation.txt")
    assert render_result(result, B, d, symbolic=True) == golden("example_copresentation_symbolic.txt")


def test_aggregate_first_step_symbolic(example):
    d, B = example
    result = run_copresentation(B, ["x"], d)
    ctx = RenderContext.build(d, B, result.V)
    assert render_record(result.step1, ctx, B, d, symbolic=True) == (
        "0→L⊕L̄⊕L(1)⊕L(6)⊕L(7)→G^{1+ε}⊕G_{-1}^{εf}⊕G_4^{εf}⊕G_5^{εf}"
        "→τS[∞]^{(1+ε)e}⊕S[∞]^{εd}⊕τ^{-5}S[∞]^{εd}⊕S'[∞]^{εd}→0")


def test_empty_branch_gives_first_step_only():
    d = example_curve()
    result = run_copresentation(BranchSheaf(), ["x"], d)
    assert all(r.provenance == "first step" for r in result.records)
    assert len(result.records) == 12 and result.ts3_plus


def test_exterior_root_uses_shifted_variant():
    d = weighted_line([5], homogeneous=["y"])
    B = BranchSheaf.from_summands([T(0, 2, 5, "x1"), T(0, 1, 5, "x1")])
    result = run_copresentation(B, ["y"], d)
    root = next(r for r in result.records if r.provenance.startswith("root"))
    assert "exterior" in root.provenance
    assert root.branch_terms("right") == [T(0, 2, 5, "x1")]
    assert result.ts3_plus and check_balance(result, d) == []
    assert result.derived_from_prose == ("x1",)


def test_interior_run_is_not_flagged(example):
    d, B = example
    assert run_copresentation(B, ["x"], d).derived_from_prose == ()


def test_injective_resolution():
    d = weighted_line([3], homogeneous=["y", "z"])
    cal = calibrate(build_canonical(d), BranchSheaf(), ["x1", "y"])
    rec = injective_resolution_LambdaV(cal, ["x1", "y"], d)
    assert {t.coord.point for t in rec.right} == {"z"}
    assert rec.middle[0].kind is TermKind.K
    # rank of L + Lbar + two arm bundles of rank eps*f
    assert rec.middle[0].mult.evaluate(d) == 4
    full = injective_resolution_LambdaV(cal, [], d, complement=True)
    assert full.right == ()


@pytest.mark.parametrize("weights", [[3, 4], [2, 2, 3], [5]])
def test_random_multi_point_runs(weights):
    rng = random.Random(sum(weights))
    d = weighted_line(weights, homogeneous=["y"])
    per_point = [enumerate_branches(pt.p, point=pt.label) for pt in d.exceptional_points]
    for _ in range(25):
        B = BranchSheaf(tuple(c for opts in per_point for c in rng.choice(opts).components))
        V = [lab for lab in d.labels if rng.random() < 0.5] or ["y"]
        result = run_copresentation(B, V, d)
        assert result.ts3_plus, result.diagnostics
        assert check_balance(result, d) == []


@pytest.mark.parametrize("invariants", [dict(epsilon=2), dict(f=2), dict(epsilon=2, f=3, e=2)])
def test_balance_at_other_invariants(invariants):
    d = weighted_line([4, 3], homogeneous=["y"], **invariants)
    for B in enumerate_branches(4, point="x1")[::3]:
        result = run_copresentation(B, ["x1", "y"], d)
        assert check_balance(result, d) == []


def test_anchor_override():
    d = example_curve()
    B = BranchSheaf.from_summands([T(0, 1)])
    assert calibrate(build_canonical(d), B, ["x"], anchors={"x": 5}).at("x").anchor == 5
    with pytest.raises(CopresentationError):
        calibrate(build_canonical(d), B, ["x"], anchors={"x": 0})
