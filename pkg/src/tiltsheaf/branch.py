"""Branch sheaves: enumeration, validation, undercuts and ray sets."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from itertools import product
from typing import Any, Callable, Iterable, Mapping, Optional, Sequence

from .curve_model import CurveDescriptor
from .errors import BranchError, InputError
from .tube import (TubeCoord, Wing, contains_segment, ext_dim, hom_dim, is_quotient,
                   is_subobject, nonadjacent_check, segment)


class Placement(str, Enum):
    INTERIOR = "interior"
    EXTERIOR = "exterior"


@dataclass(frozen=True)
class BranchComponent:
    """A connected branch inside the wing of its root."""

    root: TubeCoord
    summands: frozenset[TubeCoord]

    def __post_init__(self) -> None:
        object.__setattr__(self, "summands", frozenset(self.summands))

    @property
    def wing(self) -> Wing:
        return Wing(self.root)

    @property
    def point(self) -> str:
        return self.root.point

    @property
    def segment(self) -> tuple[int, int]:
        return (self.root.a, self.root.length)

    def ordered(self) -> list[TubeCoord]:
        return sorted(self.summands, key=lambda X: (-X.length, (self.root.a - X.a) % X.p))

    def to_dict(self) -> dict[str, Any]:
        return {"root": self.root.to_dict(),
                "summands": [X.to_dict() for X in self.ordered()]}

    def sort_key(self) -> tuple:
        return (self.point, self.root.a, self.root.length,
                tuple(X.sort_key() for X in self.ordered()))


@dataclass(frozen=True)
class BranchSheaf:
    components: tuple[BranchComponent, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "components",
                           tuple(sorted(self.components, key=lambda c: c.sort_key())))

    @property
    def summands(self) -> frozenset[TubeCoord]:
        return frozenset(X for c in self.components for X in c.summands)

    @property
    def points(self) -> tuple[str, ...]:
        return tuple(dict.fromkeys(c.point for c in self.components))

    def at(self, point: str) -> tuple[BranchComponent, ...]:
        return tuple(c for c in self.components if c.point == point)

    def __len__(self) -> int:
        return len(self.summands)

    def __bool__(self) -> bool:
        return bool(self.components)

    def to_list(self) -> list[dict[str, Any]]:
        return [c.to_dict() for c in self.components]

    @classmethod
    def from_list(cls, obj: Any, rank_of: Callable[[str], int]) -> "BranchSheaf":
        if not isinstance(obj, list):
            raise InputError("a branch sheaf is a JSON array of components")
        comps = []
        for entry in obj:
            if not isinstance(entry, Mapping) or "root" not in entry or "summands" not in entry:
                raise InputError("each component needs 'root' and 'summands'")
            root = TubeCoord.from_dict(entry["root"], rank_of)
            if not isinstance(entry["summands"], list):
                raise InputError("'summands' must be an array")
            summands = frozenset(TubeCoord.from_dict(s, rank_of) for s in entry["summands"])
            comps.append(BranchComponent(root, summands))
        return cls(tuple(comps))

    @classmethod
    def from_summands(cls, summands: Iterable[TubeCoord]) -> "BranchSheaf":
        """Group a set of tube objects into components by maximal wings."""
        objs = set(summands)
        roots = [X for X in objs
                 if not any(Y != X and contains_segment(Y, X) for Y in objs)]
        comps = []
        for R in roots:
            members = frozenset(X for X in objs if contains_segment(R, X))
            comps.append(BranchComponent(R, members))
        return cls(tuple(comps))


@dataclass(frozen=True)
class RxSet:
    point: str
    members: frozenset[int]

    def to_dict(self) -> dict[str, Any]:
        return {"point": self.point, "members": sorted(self.members)}


@dataclass(frozen=True)
class BranchValidation:
    ok: bool
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


@lru_cache(maxsize=None)
def _relative_branches(r: int) -> tuple[frozenset[tuple[int, int]], ...]:
    """Connected branches of a wing of size r in (shift, length) form.

    A branch with root of length r splits at a skipped simple k: a branch of
    the sub-wing of length k sharing the socle and one of the quotient-wing
    of length r-k-1 sharing the top.
    """
    if r == 0:
        return (frozenset(),)
    out = []
    for k in range(r):
        for left in _relative_branches(k):
            for right in _relative_branches(r - k - 1):
                shifted = frozenset((s + k + 1, n) for s, n in right)
                out.append(frozenset({(0, r)}) | left | shifted)
    return tuple(out)


def connected_branches(root: TubeCoord) -> list[BranchComponent]:
    Wing(root)
    out = []
    for rel in _relative_branches(root.length):
        summands = frozenset(TubeCoord(root.point, root.a - s, n, root.p) for s, n in rel)
        out.append(BranchComponent(root, summands))
    return sorted(out, key=lambda c: c.sort_key())


def _wing_configurations(p: int, max_components: Optional[int]) -> list[tuple[tuple[int, int], ...]]:
    candidates = [(a, r) for a in range(p) for r in range(1, p)]
    found: list[tuple[tuple[int, int], ...]] = []

    def extend(chosen: list[tuple[int, int]], start: int) -> None:
        found.append(tuple(chosen))
        if max_components is not None and len(chosen) >= max_components:
            return
        for idx in range(start, len(candidates)):
            seg = candidates[idx]
            if nonadjacent_check(chosen + [seg], p):
                chosen.append(seg)
                extend(chosen, idx + 1)
                chosen.pop()

    extend([], 0)
    return found


def enumerate_branches(p: int, max_components: Optional[int] = None,
                       point: str = "x") -> list[BranchSheaf]:
    """Every branch sheaf of the rank-p tube, the empty one first."""
    if p < 1:
        raise BranchError("tube rank must be positive")
    out = []
    for config in _wing_configurations(p, max_components):
        choices = [connected_branches(TubeCoord(point, a, r, p)) for a, r in config]
        for combo in product(*choices):
            out.append(BranchSheaf(tuple(combo)))
    return out


def enumerate_wing_branches(r: int, p: Optional[int] = None, point: str = "x",
                            socle: int = 0) -> list[BranchComponent]:
    """Connected branches of the single wing rooted in tau^socle S[r]."""
    p = r + 1 if p is None else p
    if r >= p:
        raise BranchError("wing root length must be below the tube rank")
    return connected_branches(TubeCoord(point, socle, r, p))


def upper_neighbour(X: TubeCoord, comp: BranchComponent) -> Optional[TubeCoord]:
    """Shortest summand whose wing strictly contains the wing of X."""
    above = [Y for Y in comp.summands if Y != X and contains_segment(Y, X)]
    return min(above, key=lambda Y: Y.length) if above else None


def subbranch(Z: TubeCoord, comp: BranchComponent) -> frozenset[TubeCoord]:
    return frozenset(X for X in comp.summands if contains_segment(Z, X))


def _validate_component(comp: BranchComponent) -> str:
    root = comp.root
    if root.is_pruefer or root.length >= root.p:
        return f"root {root} is not an exceptional object"
    if root not in comp.summands:
        return "root is not a summand"
    wing = comp.wing
    for X in comp.summands:
        if X.point != root.point or X not in wing:
            return f"summand {X} lies outside the wing of {root}"
    if len(comp.summands) != root.length:
        return f"component rooted in {root} has {len(comp.summands)} summands, expected {root.length}"
    for X in comp.summands:
        for Y in comp.summands:
            if ext_dim(X, Y):
                return f"rigidity fails: Ext({X}, {Y}) != 0"
    for X in comp.summands:
        inside = sum(1 for Y in comp.summands if contains_segment(X, Y))
        if inside != X.length:
            return f"wing of {X} contains {inside} summands, expected {X.length}"
    for Z in comp.summands:
        if Z == root:
            continue
        sub = subbranch(Z, comp)
        rest = comp.summands - sub
        epi = any(is_quotient(Z, X) for X in rest)
        mono = any(is_subobject(Z, Y) for Y in rest)
        if epi and not any(hom_dim(U, V) for U in sub for V in rest):
            continue
        if mono and not any(hom_dim(V, U) for U in sub for V in rest):
            continue
        return f"subbranch rooted in {Z} violates the Hom-vanishing dichotomy"
    return ""


def validate_branch(B: BranchSheaf, d: Optional[CurveDescriptor] = None) -> BranchValidation:
    """Check every branch-sheaf clause and report the first violated one."""
    if d is not None:
        for comp in B.components:
            if not d.has_point(comp.point):
                raise BranchError(f"unknown point {comp.point!r}")
            if d.point(comp.point).p != comp.root.p:
                return BranchValidation(False, f"tube rank mismatch at {comp.point!r}")
    summands = list(B.summands)
    for X in summands:
        if X.is_pruefer:
            return BranchValidation(False, f"{X} is not of finite length")
        for Y in summands:
            if X.point == Y.point and ext_dim(X, Y):
                return BranchValidation(False, f"rigidity fails: Ext({X}, {Y}) != 0")
    for comp in B.components:
        reason = _validate_component(comp)
        if reason:
            return BranchValidation(False, reason)
    for point in B.points:
        comps = B.at(point)
        if not nonadjacent_check([c.segment for c in comps], comps[0].root.p):
            return BranchValidation(False, f"wings at {point!r} are not pairwise non-adjacent")
    return BranchValidation(True)


def undercut(C: BranchComponent, kind: Placement | str) -> frozenset[TubeCoord]:
    kind = Placement(kind)
    region = C.wing.objects if kind is Placement.INTERIOR else C.wing.shifted(1)
    return frozenset(U for U in region if all(hom_dim(s, U) == 0 for s in C.summands))


def wing_simples(components: Iterable[BranchComponent]) -> frozenset[int]:
    return frozenset(o for c in components for o in segment(c.root.a, c.root.length, c.root.p))


def rx_set(components: Sequence[BranchComponent], p: int, point: str = "x") -> RxSet:
    """R_x = {j : tau^{j+1} S is not a simple of the wings}."""
    comps = list(components)
    if comps and not nonadjacent_check([c.segment for c in comps], p):
        raise BranchError("wings are adjacent")
    covered = wing_simples(comps)
    return RxSet(point, frozenset(j for j in range(p) if (j + 1) % p not in covered))


def rx_set_from_segments(segments: Sequence[tuple[int, int]], p: int, point: str = "x") -> RxSet:
    if segments and not nonadjacent_check(list(segments), p):
        raise BranchError("wings are adjacent")
    covered = {o for a, r in segments for o in segment(a, r, p)}
    return RxSet(point, frozenset(j for j in range(p) if (j + 1) % p not in covered))


def split_interior_exterior(B: BranchSheaf, V: Callable[[str], bool] | Iterable[str]
                            ) -> tuple[BranchSheaf, BranchSheaf]:
    inside = V if callable(V) else set(V).__contains__
    interior = tuple(c for c in B.components if inside(c.point))
    exterior = tuple(c for c in B.components if not inside(c.point))
    return BranchSheaf(interior), BranchSheaf(exterior)
