"""Copresentation of the canonical configuration by summands of a large tilting sheaf.

Pipeline: build the canonical configuration, calibrate each branch component
to a segment of its arm, copresent the remaining summands by torsionfree
terms and Pruefer sheaves, then walk every connected branch with the two
rewriting rules (epi: the new wing object goes to the end term; mono: it goes
to the middle term).

Conventions.  Tube offsets are the offsets of the input coordinates; offset 0
is the reference simple S.  At each exceptional point the anchor c is the
offset of the simple with Hom(L, S) != 0.  The arm bundle L(j) maps onto the
simple at offset c - j; L and L-bar map onto offset c.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, replace
from enum import Enum
from fractions import Fraction
from typing import Any, Iterable, Mapping, Optional, Sequence

from .branch import (BranchComponent, BranchSheaf, Placement, rx_set, upper_neighbour,
                     subbranch, validate_branch)
from .curve_model import CurveDescriptor, validate_descriptor
from .errors import CopresentationError
from .symbolic import EPS_POLY, ONE, Poly, e_of, f_of
from .tube import INF, TubeCoord, Wing, hom_dim, is_quotient, segment


class TermKind(str, Enum):
    L = "L"
    LBAR = "Lbar"
    ARM = "arm"
    G = "G"
    BRANCH = "branch"
    PRUEFER = "pruefer"
    K = "K"
    LAMBDA_V = "LambdaV"


SourceKey = tuple  # ("L",), ("Lbar",) or ("arm", x, j)


@dataclass(frozen=True)
class SummandTerm:
    kind: TermKind
    mult: Poly = ONE
    point: Optional[str] = None
    index: Optional[int] = None
    coord: Optional[TubeCoord] = None
    source: Optional[SourceKey] = None

    def identity(self) -> tuple:
        return (self.kind, self.point, self.index, self.coord)

    def with_mult(self, mult: Poly) -> "SummandTerm":
        return replace(self, mult=mult)


@dataclass(frozen=True)
class SESRecord:
    left: tuple[SummandTerm, ...]
    middle: tuple[SummandTerm, ...]
    right: tuple[SummandTerm, ...]
    provenance: str = ""

    def branch_terms(self, side: str) -> list[TubeCoord]:
        return [t.coord for t in getattr(self, side) if t.kind is TermKind.BRANCH]


def merge_terms(terms: Iterable[SummandTerm]) -> tuple[SummandTerm, ...]:
    """Add multiplicities of like terms, keeping first-appearance order."""
    order: list[tuple] = []
    acc: dict[tuple, SummandTerm] = {}
    for t in terms:
        key = t.identity()
        if key in acc:
            acc[key] = acc[key].with_mult(acc[key].mult + t.mult)
        else:
            order.append(key)
            acc[key] = t
    return tuple(acc[k] for k in order)


def direct_sum(records: Sequence[SESRecord], provenance: str = "sum") -> SESRecord:
    return SESRecord(merge_terms(t for r in records for t in r.left),
                     merge_terms(t for r in records for t in r.middle),
                     merge_terms(t for r in records for t in r.right), provenance)


# ---------------------------------------------------------------- configuration

@dataclass(frozen=True)
class CanonicalConfiguration:
    arms: tuple[tuple[str, int], ...]

    @property
    def summands(self) -> list[SourceKey]:
        out: list[SourceKey] = [("L",)]
        for x, p in self.arms:
            out += [("arm", x, j) for j in range(1, p)]
        out.append(("Lbar",))
        return out

    @property
    def size(self) -> int:
        return 2 + sum(p - 1 for _, p in self.arms)


def build_canonical(d: CurveDescriptor) -> CanonicalConfiguration:
    validate_descriptor(d)
    if d.genus_nw != 0:
        raise CopresentationError("elliptic curves carry no tilting bundle")
    return CanonicalConfiguration(tuple((pt.label, pt.p) for pt in d.exceptional_points))


@dataclass(frozen=True)
class ComponentCalibration:
    component: BranchComponent
    kind: Placement
    known: int          # local index already copresented by the first step
    removed: tuple[int, ...]  # local indices to be produced by the walk
    base: int           # global arm index = base + local index

    @property
    def segment(self) -> tuple[int, ...]:
        return tuple(self.base + k for k in self.removed)

    def global_index(self, k: int) -> int:
        return self.base + k


@dataclass(frozen=True)
class PointCalibration:
    point: str
    p: int
    anchor: int
    components: tuple[ComponentCalibration, ...]
    kept: tuple[int, ...]  # arm indices j in 1..p-1 kept in the sub-configuration

    def top_of(self, j: int) -> int:
        return (self.anchor - j) % self.p


@dataclass(frozen=True)
class Calibration:
    config: CanonicalConfiguration
    points: tuple[PointCalibration, ...]

    def at(self, x: str) -> PointCalibration:
        for pc in self.points:
            if pc.point == x:
                return pc
        raise CopresentationError(f"no calibration at {x!r}")

    @property
    def lambda_prime(self) -> list[SourceKey]:
        out: list[SourceKey] = [("L",), ("Lbar",)]
        for pc in self.points:
            out += [("arm", pc.point, j) for j in pc.kept]
        return out

    def anchor(self, x: str) -> Optional[int]:
        for pc in self.points:
            if pc.point == x:
                return pc.anchor
        return None


def component_order(comps: Iterable[BranchComponent]) -> list[BranchComponent]:
    """Wing with socle 0 first, then by increasing distance below it."""
    return sorted(comps, key=lambda c: ((-c.root.a) % c.root.p, c.root.length))


def _removed_offsets(comp: BranchComponent, kind: Placement) -> set[int]:
    shift = 0 if kind is Placement.INTERIOR else 1
    return {(o + shift) % comp.root.p for o in segment(comp.root.a, comp.root.length, comp.root.p)}


def _choose_anchor(comps: list[BranchComponent], kinds: list[Placement], p: int,
                   removed: set[int]) -> int:
    if not comps:
        return 0
    first = comps[0]
    start = first.root.a + (0 if kinds[0] is Placement.INTERIOR else 1)
    for k in list(range(2, p + 2)) + [1]:
        c = (start + k) % p
        if c not in removed and (c - 1) % p not in removed:
            return c
    for k in range(p):
        c = (start + k) % p
        if c not in removed:
            return c
    raise CopresentationError("the wings cover the whole tube")


def calibrate(cfg: CanonicalConfiguration, B: BranchSheaf, V: Iterable[str],
              anchors: Optional[Mapping[str, int]] = None) -> Calibration:
    Vset = set(V)
    anchors = dict(anchors or {})
    points = []
    arm_points = {x for x, _ in cfg.arms}
    for x in B.points:
        if x not in arm_points:
            raise CopresentationError(f"branch at {x!r}, which is not an exceptional point")
    for x, p in cfg.arms:
        comps = component_order(B.at(x))
        kinds = [Placement.INTERIOR if x in Vset else Placement.EXTERIOR for _ in comps]
        removed: set[int] = set()
        for comp, kind in zip(comps, kinds):
            block = _removed_offsets(comp, kind)
            if block & removed:
                raise CopresentationError(f"segments collide on the arm at {x!r}")
            removed |= block
        if x in anchors:
            c = anchors[x] % p
            if c in removed:
                raise CopresentationError(f"anchor {c} at {x!r} lies on a removed segment")
        else:
            c = _choose_anchor(comps, kinds, p, removed)
        cals = []
        for comp, kind in zip(comps, kinds):
            R = comp.root.length
            base = (c - comp.root.a - 1) % p
            if kind is Placement.INTERIOR:
                known, todo = 0, tuple(range(1, R + 1))
            else:
                known, todo = R, tuple(range(0, R))
            cal = ComponentCalibration(comp, kind, known, todo, base)
            for k in todo:
                if not 1 <= cal.global_index(k) <= p - 1:
                    raise CopresentationError("segment leaves the arm interior")
            cals.append(cal)
        kept = tuple(j for j in range(1, p) if (c - j) % p not in removed)
        points.append(PointCalibration(x, p, c, tuple(cals), kept))
    return Calibration(cfg, tuple(points))


def reduced_weight(cal: Calibration, x: str) -> int:
    """Weight at x of the perpendicular curve: p(x) minus the interior root lengths at x."""
    pc = cal.at(x)
    return pc.p - sum(cc.component.root.length for cc in pc.components
                      if cc.kind is Placement.INTERIOR)


# ---------------------------------------------------------------- first step

def _rank_poly(src: SourceKey) -> Poly:
    if src[0] == "L":
        return ONE
    if src[0] == "Lbar":
        return EPS_POLY
    return EPS_POLY * f_of(src[1])


def _source_term(src: SourceKey, mult: Poly = ONE) -> SummandTerm:
    if src[0] == "L":
        return SummandTerm(TermKind.L, mult)
    if src[0] == "Lbar":
        return SummandTerm(TermKind.LBAR, mult)
    return SummandTerm(TermKind.ARM, mult, point=src[1], index=src[2])


def _g_term(src: SourceKey, cal: Calibration, mult: Poly) -> SummandTerm:
    if src[0] in ("L", "Lbar"):
        return SummandTerm(TermKind.G, mult, source=src)
    x, j = src[1], src[2]
    return SummandTerm(TermKind.G, mult, point=x, index=j - cal.at(x).anchor, source=src)


def _pruefer_terms(src: SourceKey, cal: Calibration, V: Sequence[str],
                   d: CurveDescriptor) -> list[SummandTerm]:
    out = []
    rk = _rank_poly(src)
    for y in V:
        pt = d.point(y)
        mult = rk * e_of(y)
        if pt.exceptional:
            pc = cal.at(y)
            top = pc.top_of(src[2]) if src[0] == "arm" and src[1] == y else pc.anchor
            coord = TubeCoord(y, top - 1, INF, pt.p)
        else:
            coord = TubeCoord(y, 0, INF, 1)
        out.append(SummandTerm(TermKind.PRUEFER, mult, coord=coord))
    return out


def _check_V(V: Iterable[str], d: CurveDescriptor) -> tuple[str, ...]:
    labels = list(dict.fromkeys(V))
    if not labels:
        raise CopresentationError("the first step needs a nonempty point set V")
    for y in labels:
        if not d.has_point(y):
            raise CopresentationError(f"V mentions {y!r}, which is outside the window")
    return tuple(y for y in d.labels if y in labels)


def step1_records(cal: Calibration, V: Iterable[str], d: CurveDescriptor) -> list[SESRecord]:
    Vt = _check_V(V, d)
    out = []
    for src in cal.lambda_prime:
        rk = _rank_poly(src)
        out.append(SESRecord((_source_term(src),), (_g_term(src, cal, rk),),
                             tuple(_pruefer_terms(src, cal, Vt, d)), "first step"))
    return out


def step1_sequence(cal: Calibration, V: Iterable[str], d: CurveDescriptor) -> SESRecord:
    return direct_sum(step1_records(cal, V, d), "first step")


def lambda_prime_rank(cal: Calibration) -> Poly:
    total = Poly()
    for src in cal.lambda_prime:
        total = total + _rank_poly(src)
    return total


def injective_resolution_LambdaV(cal: Calibration, V: Iterable[str], d: CurveDescriptor,
                                 complement: bool = False) -> SESRecord:
    """0 -> Lambda'_V -> K^n -> Pruefer sheaves at the points outside V -> 0.

    With ``complement`` the set V means every point except the listed ones, so
    the end term lives at the listed points; otherwise it lives at the window
    points outside V.
    """
    listed = set(V)
    for y in listed:
        if not d.has_point(y):
            raise CopresentationError(f"V mentions {y!r}, which is outside the window")
    outside = [y for y in d.labels if (y in listed) == complement]
    right = []
    for src in cal.lambda_prime:
        right += _pruefer_terms(src, cal, outside, d)
    n = lambda_prime_rank(cal)
    return SESRecord((SummandTerm(TermKind.LAMBDA_V),), (SummandTerm(TermKind.K, n),),
                     merge_terms(right), "injective resolution")


# ---------------------------------------------------------------- branch walk

def _scaled(rec: SESRecord, factor: Poly, left: SummandTerm) -> SESRecord:
    return SESRecord((left,), tuple(t.with_mult(t.mult * factor) for t in rec.middle),
                     tuple(t.with_mult(t.mult * factor) for t in rec.right), rec.provenance)


def _known_source(cc: ComponentCalibration, p: int, step1: Mapping[SourceKey, SESRecord],
                  x: str) -> SESRecord:
    j = cc.global_index(cc.known)
    if 1 <= j <= p - 1:
        return step1[("arm", x, j)]
    if j == 0:
        # L(0) = L^{eps f}
        return _scaled(step1[("L",)], EPS_POLY * f_of(x), SummandTerm(TermKind.L, EPS_POLY * f_of(x)))
    # L(p) = Lbar^{f}
    return _scaled(step1[("Lbar",)], f_of(x), SummandTerm(TermKind.LBAR, f_of(x)))


def _arm_left(x: str, j: int) -> SummandTerm:
    return SummandTerm(TermKind.ARM, ONE, point=x, index=j)


def _branch_term(X: TubeCoord) -> SummandTerm:
    return SummandTerm(TermKind.BRANCH, ONE, coord=X)


def _hom_pairs(A: Iterable[TubeCoord], B: Iterable[TubeCoord]) -> Optional[tuple[TubeCoord, TubeCoord]]:
    for U in A:
        for W in B:
            if U.point == W.point and hom_dim(U, W):
                return (U, W)
    return None


def apply_branch_step(seq: SESRecord, X: TubeCoord, direction: str, new_left: SummandTerm,
                      comp: Optional[BranchComponent] = None) -> SESRecord:
    """Rewrite a sequence by one wing object.

    ``epi``: X joins the end term.  ``mono``: X joins the middle term.  The
    Hom-vanishing hypotheses and conclusions are checked on tube data.
    """
    B0, B1 = seq.branch_terms("middle"), seq.branch_terms("right")
    if comp is not None:
        sub = subbranch(X, comp)
        clash = [Y for Y in B0 + B1 if Y in sub]
        if clash:
            raise CopresentationError(f"{clash[0]} lies in the subbranch rooted in {X}")
    bad = _hom_pairs(B1, B0)
    if bad:
        raise CopresentationError(f"hypothesis Hom(B1, B0) = 0 fails at {bad}")
    if direction == "epi":
        bad = _hom_pairs([X], B0)
        if bad:
            raise CopresentationError(f"conclusion Hom(W, B0) = 0 fails at {bad}")
        split = sum(1 for t in seq.right if t.kind is not TermKind.PRUEFER)
        right = seq.right[:split] + (_branch_term(X),) + seq.right[split:]
        return SESRecord((new_left,), seq.middle, right, "epi step")
    if direction == "mono":
        bad = _hom_pairs(B1, [X])
        if bad:
            raise CopresentationError(f"conclusion Hom(B1, W) = 0 fails at {bad}")
        return SESRecord((new_left,), seq.middle + (_branch_term(X),), seq.right, "mono step")
    raise CopresentationError(f"unknown direction {direction!r}")


def _walk_order(comp: BranchComponent) -> list[tuple[TubeCoord, Optional[TubeCoord]]]:
    """Depth-first from the root; at each node the epi child precedes the mono child."""
    children: dict[TubeCoord, list[TubeCoord]] = {X: [] for X in comp.summands}
    for X in comp.summands:
        if X != comp.root:
            Z = upper_neighbour(X, comp)
            children[Z].append(X)
    out: list[tuple[TubeCoord, Optional[TubeCoord]]] = []

    def visit(X: TubeCoord, parent: Optional[TubeCoord]) -> None:
        out.append((X, parent))
        kids = sorted(children[X], key=lambda Y: (0 if is_quotient(Y, X) else 1, -Y.length))
        for Y in kids:
            visit(Y, X)

    visit(comp.root, None)
    return out


def run_component(cc: ComponentCalibration, x: str, p: int,
                  step1: Mapping[SourceKey, SESRecord]) -> list[SESRecord]:
    comp = cc.component
    wing = Wing(comp.root)
    seqs: dict[int, SESRecord] = {cc.known: _known_source(cc, p, step1, x)}
    produced: list[int] = []
    out: list[SESRecord] = []
    for X, parent in _walk_order(comp):
        w = wing.label(X)
        if parent is None:
            if cc.kind is Placement.INTERIOR:
                src, dst, direction = w.colevel, w.level, "mono"
            else:
                src, dst, direction = w.level, w.colevel, "epi"
        elif is_quotient(X, parent):
            src, dst, direction = w.level, w.colevel, "epi"
        else:
            src, dst, direction = w.colevel, w.level, "mono"
        if src not in seqs:
            raise CopresentationError(f"no sequence for local index {src} when treating {X}")
        if dst in seqs:
            raise CopresentationError(f"local index {dst} produced twice (at {X})")
        rec = apply_branch_step(seqs[src], X, direction, _arm_left(x, cc.global_index(dst)), comp)
        tag = ("root " if parent is None else "") + direction + f" step ({cc.kind.value})"
        rec = replace(rec, provenance=tag)
        seqs[dst] = rec
        produced.append(dst)
        out.append(rec)
    if sorted(produced) != sorted(cc.removed):
        raise CopresentationError(
            f"coverage failure: produced {sorted(produced)}, expected {sorted(cc.removed)}")
    return out


@dataclass(frozen=True)
class CopresentationResult:
    calibration: Calibration
    V: tuple[str, ...]
    records: tuple[SESRecord, ...]
    step1: SESRecord
    aggregate: SESRecord
    coverage: tuple[tuple[str, int], ...]
    ts3_plus: bool
    diagnostics: tuple[str, ...] = ()
    # points whose exterior components used the index-shifted rewriting steps
    derived_from_prose: tuple[str, ...] = ()


def run_copresentation(B: BranchSheaf, V: Iterable[str], d: CurveDescriptor,
                       anchors: Optional[Mapping[str, int]] = None) -> CopresentationResult:
    validate_descriptor(d)
    Vt = _check_V(V, d)
    check = validate_branch(B, d)
    if not check:
        raise CopresentationError(f"invalid branch: {check.reason}")
    cfg = build_canonical(d)
    cal = calibrate(cfg, B, Vt, anchors)
    first = step1_records(cal, Vt, d)
    by_source = {_key_of(r.left[0]): r for r in first}
    records = list(first)
    coverage: list[tuple[str, int]] = []
    for pc in cal.points:
        for cc in pc.components:
            recs = run_component(cc, pc.point, pc.p, by_source)
            records += recs
            coverage += [(pc.point, r.left[0].index) for r in recs]
    covered = Counter(coverage)
    lambda_arms = Counter((s[1], s[2]) for s in cal.lambda_prime if s[0] == "arm")
    diagnostics = []
    if any(n > 1 for n in covered.values()) or set(covered) & set(lambda_arms):
        diagnostics.append("an arm index is copresented twice")
    all_arms = {(x, j) for x, p in cfg.arms for j in range(1, p)}
    if set(covered) | set(lambda_arms) != all_arms:
        diagnostics.append("some arm index has no copresentation")
    aggregate = direct_sum(records, "aggregate")
    diagnostics += ts3_plus_violations(aggregate, B, Vt, d)
    exterior = tuple(pc.point for pc in cal.points
                     if any(cc.kind is Placement.EXTERIOR for cc in pc.components))
    return CopresentationResult(cal, Vt, tuple(records), direct_sum(first, "first step"),
                                aggregate, tuple(coverage), not diagnostics, tuple(diagnostics),
                                exterior)


def _key_of(term: SummandTerm) -> SourceKey:
    if term.kind is TermKind.L:
        return ("L",)
    if term.kind is TermKind.LBAR:
        return ("Lbar",)
    return ("arm", term.point, term.index)


def ts3_plus_violations(aggregate: SESRecord, B: BranchSheaf, V: Sequence[str],
                        d: CurveDescriptor) -> list[str]:
    out = []
    B0, B1 = aggregate.branch_terms("middle"), aggregate.branch_terms("right")
    bad = _hom_pairs(B1, B0)
    if bad:
        out.append(f"Hom(B1, B0) != 0 at {bad}")
    if set(B0) | set(B1) != set(B.summands):
        out.append("branch summands of the copresentation differ from the branch")
    pruefers = {t.coord for t in aggregate.right if t.kind is TermKind.PRUEFER}
    for y in V:
        pt = d.point(y)
        if pt.exceptional:
            members = rx_set(B.at(y), pt.p, y).members
            expected = {TubeCoord(y, j, INF, pt.p) for j in members}
        else:
            expected = {TubeCoord(y, 0, INF, 1)}
        if not expected <= pruefers:
            out.append(f"missing Pruefer summands at {y!r}")
        extra = {P for P in pruefers if P.point == y} - expected
        if extra:
            out.append(f"unexpected Pruefer summands at {y!r}")
    return out


# ---------------------------------------------------------------- lattice balance

def _vec_add(acc: dict, key: Any, value: Fraction) -> None:
    acc[key] = acc.get(key, Fraction(0)) + value
    if not acc[key]:
        del acc[key]


REFERENCE_POINT = "x0"


def _class_of_source(src: SourceKey, cal: Calibration, d: CurveDescriptor,
                     x0: str) -> dict:
    vec: dict = {}
    if src[0] == "L":
        _vec_add(vec, "L", Fraction(1))
    elif src[0] == "Lbar":
        _vec_add(vec, "L", Fraction(d.epsilon))
        _vec_add(vec, (x0, 0), Fraction(1))
    else:
        x, j = src[1], src[2]
        pc = cal.at(x)
        _vec_add(vec, "L", Fraction(d.epsilon * d.point(x).f))
        for t in range(1, j + 1):
            _vec_add(vec, (x, (pc.anchor - t) % pc.p), Fraction(1))
    return vec


def _term_class(term: SummandTerm, cal: Calibration, d: CurveDescriptor, N: int,
                step1: Mapping[SourceKey, SESRecord], x0: str) -> dict:
    m = Fraction(term.mult.evaluate(d))
    vec: dict = {}
    if term.kind in (TermKind.L, TermKind.LBAR, TermKind.ARM):
        base = _class_of_source(_key_of(term), cal, d, x0)
    elif term.kind is TermKind.BRANCH:
        base = {}
        for o in term.coord.factors:
            _vec_add(base, (term.coord.point, o), Fraction(1))
    elif term.kind is TermKind.PRUEFER:
        P = term.coord
        turns, rest = divmod(N, P.p)
        base = {(P.point, (P.a - k) % P.p): Fraction(turns + (k < rest)) for k in range(min(N, P.p))}
    elif term.kind is TermKind.G:
        # surrogate: (the first-step source plus its end term) per unit of rank
        rec = step1[term.source]
        rk = Fraction(_rank_poly(term.source).evaluate(d))
        base = _class_of_source(term.source, cal, d, x0)
        for t in rec.right:
            for key, v in _term_class(t, cal, d, N, step1, x0).items():
                _vec_add(base, key, v)
        base = {k: v / rk for k, v in base.items()}
    else:
        raise CopresentationError(f"{term.kind.value} terms carry no lattice class")
    for key, v in base.items():
        _vec_add(vec, key, m * v)
    return vec


def lattice_defect(rec: SESRecord, cal: Calibration, d: CurveDescriptor, N: int,
                   step1: Mapping[SourceKey, SESRecord]) -> dict:
    """left + right - middle as a coordinate vector, Pruefer terms truncated at length N."""
    x0 = next((pt.label for pt in d.points if pt.p == 1 and pt.f == 1), REFERENCE_POINT)
    total: dict = {}
    for sign, side in ((1, rec.left), (1, rec.right), (-1, rec.middle)):
        for t in side:
            for key, v in _term_class(t, cal, d, N, step1, x0).items():
                _vec_add(total, key, sign * v)
    return total


def is_balanced(defect: Mapping, d: CurveDescriptor) -> bool:
    """Zero modulo the relations sum_j [tau^j S_x] = f(x) [S_x0] and [S_y] = f(y) [S_x0]."""
    if defect.get("L"):
        return False
    x0 = next((pt.label for pt in d.points if pt.p == 1 and pt.f == 1), REFERENCE_POINT)
    ref = Fraction(0)
    for pt in d.points:
        if pt.label == x0:
            continue
        coeffs = [defect.get((pt.label, j), Fraction(0)) for j in range(pt.p)]
        if len(set(coeffs)) != 1:
            return False
        ref += coeffs[0] * pt.f
    known = {"L", (x0, 0)} | {(pt.label, j) for pt in d.points for j in range(pt.p)}
    if any(key not in known for key in defect):
        return False
    return defect.get((x0, 0), Fraction(0)) + ref == 0


def first_step_map(result: CopresentationResult) -> dict[SourceKey, SESRecord]:
    """First-step record of each summand of the sub-configuration, keyed by source."""
    return {_key_of(r.left[0]): r for r in result.records if r.provenance == "first step"}


def check_balance(result: CopresentationResult, d: CurveDescriptor,
                  levels: Optional[Sequence[int]] = None) -> list[str]:
    """Indices of records whose lattice classes do not balance at some truncation level."""
    pb = d.p_bar
    levels = levels or sorted({1, pb, 2 * pb + 1, 3 * pb})
    step1 = first_step_map(result)
    failures = []
    for i, rec in enumerate(result.records):
        for N in levels:
            if not is_balanced(lattice_defect(rec, result.calibration, d, N, step1), d):
                failures.append(f"record {i} at truncation {N}")
                break
    return failures


# ---------------------------------------------------------------- rendering

@dataclass(frozen=True)
class RenderContext:
    single_point: bool
    socle_names: Mapping[tuple[str, int], str]

    @classmethod
    def build(cls, d: CurveDescriptor, B: BranchSheaf, V: Sequence[str]) -> "RenderContext":
        involved = set(V) | set(B.points)
        single = len(involved) <= 1
        names: dict[tuple[str, int], str] = {}
        for x in B.points:
            comps = component_order(B.at(x))
            names[(x, 0)] = "S"
            primes = 0
            for comp in comps:
                if comp.root.a == 0:
                    continue
                primes += 1
                names[(x, comp.root.a)] = "S" + "'" * primes
        return cls(single, names)

    def sub(self, x: Optional[str]) -> str:
        return "" if self.single_point or x is None else f"_{x}"


def _tau(q: int) -> str:
    if q == 0:
        return ""
    if q == 1:
        return "τ"
    if q == -1:
        return "τ^-"
    return f"τ^{{{q}}}"


def _symmetric(q: int, p: int) -> int:
    q %= p
    return q - p if q > p // 2 else q


def render_coord(X: TubeCoord, ctx: RenderContext, wing_socle: Optional[int] = None) -> str:
    """Name relative to the wing socle when given, else relative to a named socle or S."""
    sub = ctx.sub(X.point)
    length = "[∞]" if X.is_pruefer else ("" if X.length == 1 else f"[{X.length}]")
    if X.p == 1:
        return f"S{sub}{length}"
    if wing_socle is None and (X.point, X.a) in ctx.socle_names:
        wing_socle = X.a
    if wing_socle is not None:
        name = ctx.socle_names.get((X.point, wing_socle), "S")
        return f"{_tau(-((wing_socle - X.a) % X.p))}{name}{sub}{length}"
    return f"{_tau(_symmetric(X.a, X.p))}S{sub}{length}"


def _wing_socle_of(X: TubeCoord, B: BranchSheaf) -> Optional[int]:
    for comp in B.at(X.point):
        if X in comp.wing:
            return comp.root.a
    return None


def render_term(t: SummandTerm, ctx: RenderContext, B: BranchSheaf, symbolic: bool,
                d: CurveDescriptor) -> str:
    sub = ctx.sub(t.point)
    if t.kind is TermKind.L:
        name = "L"
    elif t.kind is TermKind.LBAR:
        name = "L̄"
    elif t.kind is TermKind.ARM:
        name = f"L{sub}({t.index})"
    elif t.kind is TermKind.G:
        if t.index is None:
            name = "G"
        elif ctx.single_point:
            name = f"G_{t.index}" if 0 <= t.index <= 9 else f"G_{{{t.index}}}"
        else:
            name = f"G_{{{t.point},{t.index}}}"
    elif t.kind is TermKind.BRANCH:
        name = render_coord(t.coord, ctx, _wing_socle_of(t.coord, B))
    elif t.kind is TermKind.PRUEFER:
        name = render_coord(t.coord, ctx)
    elif t.kind is TermKind.K:
        name = "K"
    else:
        name = "Λ'_V"
    return name + render_exponent(t.mult, symbolic, d, not ctx.single_point)


def render_exponent(mult: Poly, symbolic: bool, d: CurveDescriptor, subscripts: bool) -> str:
    if symbolic:
        if mult.is_one():
            return ""
        text = mult.render(subscripts)
    else:
        value = mult.evaluate(d)
        if value == 1:
            return ""
        text = str(value)
    return f"^{text}" if len(text) == 1 else f"^{{{text}}}"


def render_record(rec: SESRecord, ctx: RenderContext, B: BranchSheaf, d: CurveDescriptor,
                  symbolic: bool = False) -> str:
    def side(terms: Sequence[SummandTerm]) -> str:
        return "⊕".join(render_term(t, ctx, B, symbolic, d) for t in terms) or "0"
    return f"0→{side(rec.left)}→{side(rec.middle)}→{side(rec.right)}→0"


def render_result(result: CopresentationResult, B: BranchSheaf, d: CurveDescriptor,
                  symbolic: bool = False) -> list[str]:
    ctx = RenderContext.build(d, B, result.V)
    return [render_record(r, ctx, B, d, symbolic) for r in result.records]


def record_to_dict(rec: SESRecord, ctx: RenderContext, B: BranchSheaf, d: CurveDescriptor,
                   symbolic: bool = False) -> dict[str, Any]:
    def terms(ts: Sequence[SummandTerm]) -> list[dict[str, Any]]:
        out = []
        for t in ts:
            entry: dict[str, Any] = {"kind": t.kind.value,
                                     "name": render_term(t.with_mult(ONE), ctx, B, symbolic, d),
                                     "multiplicity": t.mult.evaluate(d),
                                     "symbolic": t.mult.render(not ctx.single_point)}
            if t.coord is not None:
                entry["coord"] = t.coord.to_dict()
            out.append(entry)
        return out
    return {"left": terms(rec.left), "middle": terms(rec.middle), "right": terms(rec.right),
            "provenance": rec.provenance,
            "text": render_record(rec, ctx, B, d, symbolic)}
