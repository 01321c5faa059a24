"""Classification descriptors of large tilting sheaves and their resolving classes."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from itertools import combinations, product
from typing import Any, Iterable, Optional, Sequence, Union

from .branch import (BranchSheaf, Placement, RxSet, enumerate_branches, rx_set, undercut,
                     validate_branch)
from .curve_model import CurveDescriptor, RepType, fraction_str, parse_fraction, representation_type
from .errors import ClassificationError, InputError
from .tube import TubeCoord


@dataclass(frozen=True)
class RationalSlope:
    value: Fraction

    def key(self) -> tuple:
        return (0, self.value)

    def __str__(self) -> str:
        return fraction_str(self.value)


@dataclass(frozen=True)
class InfiniteSlope:
    def key(self) -> tuple:
        return (1,)

    def __str__(self) -> str:
        return "inf"


@dataclass(frozen=True)
class IrrationalMark:
    """Opaque irrational slope bracketed by lo < w < hi."""

    name: str
    lo: Fraction
    hi: Fraction

    def __post_init__(self) -> None:
        if not self.lo < self.hi:
            raise ClassificationError("an irrational mark needs lo < hi")

    def key(self) -> tuple:
        return (2, self.name, self.lo, self.hi)

    def __str__(self) -> str:
        return f"irr:{self.name}:{fraction_str(self.lo)}:{fraction_str(self.hi)}"


SlopeValue = Union[RationalSlope, InfiniteSlope, IrrationalMark]
INFINITY = InfiniteSlope()


def parse_slope(text: str) -> SlopeValue:
    """Parse "a/b", "inf" or "irr:name:lo:hi"."""
    text = text.strip()
    if text in ("inf", "infinity", "∞"):
        return INFINITY
    if text.startswith("irr:"):
        parts = text.split(":")
        if len(parts) != 4:
            raise InputError("irrational marks are written irr:name:lo:hi")
        return IrrationalMark(parts[1], parse_fraction(parts[2]), parse_fraction(parts[3]))
    return RationalSlope(parse_fraction(text))


def compare_slopes(a: SlopeValue, b: SlopeValue) -> int:
    """-1, 0 or 1; raises when an irrational mark cannot be separated."""
    def bounds(s: SlopeValue) -> tuple[Optional[Fraction], Optional[Fraction], bool]:
        if isinstance(s, RationalSlope):
            return s.value, s.value, True
        if isinstance(s, IrrationalMark):
            return s.lo, s.hi, False
        return None, None, True

    if a == b:
        return 0
    if isinstance(a, InfiniteSlope) or isinstance(b, InfiniteSlope):
        return 1 if isinstance(a, InfiniteSlope) else -1
    alo, ahi, a_exact = bounds(a)
    blo, bhi, b_exact = bounds(b)
    if ahi < blo or (ahi == blo and not (a_exact and b_exact)):
        return -1
    if bhi < alo or (bhi == alo and not (a_exact and b_exact)):
        return 1
    raise ClassificationError(f"cannot order {a} and {b} from their intervals")


@dataclass(frozen=True)
class PointSet:
    """Either the listed points, or (complement=True) every point except the listed ones."""

    labels: frozenset[str] = frozenset()
    complement: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "labels", frozenset(self.labels))

    def __contains__(self, label: object) -> bool:
        return (label in self.labels) != self.complement

    @property
    def is_empty(self) -> bool:
        return not self.complement and not self.labels

    def within(self, window: Sequence[str]) -> tuple[str, ...]:
        return tuple(x for x in window if x in self)

    def to_dict(self) -> dict[str, Any]:
        return {"points": sorted(self.labels), "complement": self.complement}

    def __str__(self) -> str:
        inner = ",".join(sorted(self.labels))
        return f"X\\{{{inner}}}" if self.complement else f"{{{inner}}}"


class TorsionfreeTag(str, Enum):
    LAMBDA_V = "LambdaV"
    LUKAS = "Lukas"
    LW = "Lw"


@dataclass(frozen=True)
class ResolvingDescriptor:
    """add(base + extra + the rays {tau^j S_x[n] : j in R_x}) for x in V."""

    base: str
    slope: SlopeValue
    extra: frozenset[TubeCoord]
    rays: tuple[tuple[str, frozenset[int]], ...]
    other_points_full: bool = False

    def ray_offsets(self, x: str) -> frozenset[int]:
        for label, members in self.rays:
            if label == x:
                return members
        return frozenset({0}) if self.other_points_full else frozenset()

    def contains(self, X: TubeCoord) -> bool:
        """Membership of a finite-length tube object."""
        return X in self.extra or X.a in self.ray_offsets(X.point)

    def to_dict(self) -> dict[str, Any]:
        return {"base": self.base if self.base == "VectAll" else f"P_w({self.slope})",
                "extra": [X.to_dict() for X in sorted(self.extra, key=lambda c: c.sort_key())],
                "rays": [{"point": x, "R": sorted(r)} for x, r in self.rays],
                "undeclared_points_full_ray": self.other_points_full}


@dataclass(frozen=True)
class TiltingDescriptor:
    rep_type: RepType
    slope: SlopeValue
    branch: BranchSheaf
    V: PointSet
    pruefer: tuple[RxSet, ...]
    torsionfree_tag: TorsionfreeTag
    resolving: ResolvingDescriptor
    ranks: tuple[tuple[str, int], ...] = ()

    def key(self) -> tuple:
        return (self.slope.key(), self.branch, self.V)

    def equivalent(self, other: "TiltingDescriptor") -> bool:
        return self.key() == other.key()

    def torsion_part(self) -> list[TubeCoord]:
        out = sorted(self.branch.summands, key=lambda c: c.sort_key())
        for rx in self.pruefer:
            p = dict(self.ranks)[rx.point]
            out += [TubeCoord(rx.point, j, None, p) for j in sorted(rx.members)]
        return out

    def to_dict(self) -> dict[str, Any]:
        return {
            "rep_type": self.rep_type.value,
            "slope": str(self.slope),
            "branch": self.branch.to_list(),
            "V": self.V.to_dict(),
            "pruefer": [rx.to_dict() for rx in self.pruefer],
            "torsionfree_tag": self.torsionfree_tag.value,
            "resolving": self.resolving.to_dict(),
        }


def _point_set(V: PointSet | Iterable[str]) -> PointSet:
    return V if isinstance(V, PointSet) else PointSet(frozenset(V))


def tilting_descriptor(B: BranchSheaf, V: PointSet | Iterable[str], d: CurveDescriptor,
                       slope: Optional[SlopeValue] = None) -> TiltingDescriptor:
    rep = representation_type(d)
    V = _point_set(V)
    for x in V.labels:
        if not d.has_point(x):
            raise ClassificationError(f"V mentions {x!r}, which is outside the window")
    check = validate_branch(B, d)
    if not check:
        raise ClassificationError(f"invalid branch: {check.reason}")
    if rep is RepType.DOMESTIC:
        if slope is not None and slope != INFINITY:
            raise ClassificationError("domestic descriptors live at slope infinity")
        slope = INFINITY
    elif slope is None:
        slope = INFINITY
    if rep is RepType.WILD and V.is_empty:
        raise ClassificationError("torsionfree large tilting sheaves of wild curves are not classified")
    if rep is RepType.ELLIPTIC and B:
        raise ClassificationError("elliptic curves have no exceptional tubes")
    if isinstance(slope, IrrationalMark) and (B or not V.is_empty):
        raise ClassificationError("an irrational slope carries only the torsionfree sheaf")

    pruefer = []
    rays = []
    extra: set[TubeCoord] = set()
    for pt in d.points:
        comps = B.at(pt.label)
        if pt.label in V:
            rx = rx_set(comps, pt.p, pt.label)
            pruefer.append(rx)
            rays.append((pt.label, rx.members))
        kind = Placement.INTERIOR if pt.label in V else Placement.EXTERIOR
        for comp in comps:
            extra |= {U.tau(-1) for U in undercut(comp, kind)}

    if not V.is_empty:
        tag = TorsionfreeTag.LAMBDA_V
    elif rep in (RepType.TUBULAR, RepType.ELLIPTIC):
        tag = TorsionfreeTag.LW
    else:
        tag = TorsionfreeTag.LUKAS
    base = "VectAll" if rep in (RepType.DOMESTIC, RepType.WILD) else "P_w"
    resolving = ResolvingDescriptor(base, slope, frozenset(extra), tuple(rays), V.complement)
    ranks = tuple((pt.label, pt.p) for pt in d.points)
    return TiltingDescriptor(rep, slope, B, V, tuple(pruefer), tag, resolving, ranks)


def pruefer_ray_check(R: ResolvingDescriptor, x: str, j: int) -> bool:
    """True iff every tau^j S_x[n] lies in the resolving class."""
    return j in R.ray_offsets(x)


def _subsets(window: Sequence[str], include_cofinite: bool) -> list[PointSet]:
    out = []
    for k in range(len(window) + 1):
        out += [PointSet(frozenset(c)) for c in combinations(window, k)]
    if include_cofinite:
        for k in range(len(window) + 1):
            out += [PointSet(frozenset(c), complement=True) for c in combinations(window, k)]
    return out


def _branch_sheaves(d: CurveDescriptor, window: Sequence[str],
                    max_components: Optional[int]) -> list[BranchSheaf]:
    per_point = [enumerate_branches(d.point(x).p, max_components, point=x)
                 for x in window if d.point(x).exceptional]
    return [BranchSheaf(tuple(c for b in combo for c in b.components))
            for combo in product(*per_point)]


def enumerate_tilting(d: CurveDescriptor, window: Optional[Sequence[str]] = None,
                      slopes: Sequence[SlopeValue] = (INFINITY,),
                      include_cofinite: bool = False,
                      max_components: Optional[int] = None) -> list[TiltingDescriptor]:
    """All inequivalent descriptors within the given scope, in canonical order."""
    rep = representation_type(d)
    window = tuple(window) if window is not None else d.labels
    for x in window:
        d.point(x)
    missing = [pt.label for pt in d.exceptional_points if pt.label not in window]
    if missing:
        raise ClassificationError(f"the window must contain every exceptional point: {missing}")
    subsets = _subsets(window, include_cofinite)
    branches = _branch_sheaves(d, window, max_components)
    out: list[TiltingDescriptor] = []
    if rep is RepType.DOMESTIC:
        out = [tilting_descriptor(B, V, d) for V in subsets for B in branches]
    elif rep is RepType.WILD:
        out = [tilting_descriptor(B, V, d) for V in subsets if not V.is_empty for B in branches]
    elif rep is RepType.TUBULAR:
        for slope in slopes:
            if isinstance(slope, IrrationalMark):
                out.append(tilting_descriptor(BranchSheaf(), PointSet(), d, slope))
                continue
            out += [tilting_descriptor(B, V, d, slope) for V in subsets for B in branches]
    else:
        for slope in slopes:
            out.append(tilting_descriptor(BranchSheaf(), PointSet(), d, slope))
            if isinstance(slope, IrrationalMark):
                continue
            out += [tilting_descriptor(BranchSheaf(), V, d, slope)
                    for V in subsets if not V.is_empty]
    seen = set()
    for desc in out:
        if desc.key() in seen:
            raise ClassificationError("enumeration produced equivalent descriptors")
        seen.add(desc.key())
    return out
