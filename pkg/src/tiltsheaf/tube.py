"""Hom/Ext combinatorics in a stable tube of rank p, wings and segments.

An object tau^a S[n] has socle at offset a and composition factors at
offsets a, a-1, ..., a-n+1 (from socle to top).  tau raises every offset by 1.
Dimensions are counted in units of End(S).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Any, Callable, Iterable, Mapping, Optional, Sequence

from .errors import InputError, TubeError

INF = None  # length marker of a Pruefer object


@dataclass(frozen=True)
class TubeCoord:
    """Indecomposable tau^a S_x[n] of a tube of rank p; n = INF for the Pruefer object."""

    point: str
    a: int
    n: Optional[int]
    p: int

    def __post_init__(self) -> None:
        if self.p < 1:
            raise TubeError("tube rank must be positive")
        if self.n is not INF and self.n < 1:
            raise TubeError("length must be positive or INF")
        object.__setattr__(self, "a", self.a % self.p)

    @property
    def is_pruefer(self) -> bool:
        return self.n is INF

    @property
    def length(self) -> int:
        if self.n is INF:
            raise TubeError("a Pruefer object has no finite length")
        return self.n

    @property
    def top(self) -> int:
        return (self.a - self.length + 1) % self.p

    @property
    def factors(self) -> tuple[int, ...]:
        """Composition-factor offsets from socle to top."""
        return tuple((self.a - k) % self.p for k in range(self.length))

    def tau(self, k: int = 1) -> "TubeCoord":
        return TubeCoord(self.point, self.a + k, self.n, self.p)

    def with_length(self, n: Optional[int]) -> "TubeCoord":
        return TubeCoord(self.point, self.a, n, self.p)

    def to_dict(self) -> dict[str, Any]:
        return {"point": self.point, "j": self.a, "n": "inf" if self.is_pruefer else self.n}

    @classmethod
    def from_dict(cls, obj: Mapping[str, Any], rank_of: Callable[[str], int]) -> "TubeCoord":
        try:
            point, a, n = str(obj["point"]), obj["j"], obj["n"]
        except (KeyError, TypeError) as exc:
            raise InputError(f"bad tube coordinate {obj!r}") from exc
        if isinstance(a, bool) or not isinstance(a, int):
            raise InputError(f"bad offset in {obj!r}")
        if n == "inf":
            n = INF
        elif isinstance(n, bool) or not isinstance(n, int):
            raise InputError(f"bad length in {obj!r}")
        return cls(point, a, n, rank_of(point))

    def sort_key(self) -> tuple:
        return (self.point, self.a, -1 if self.n is INF else self.n)


def simple(point: str, a: int, p: int) -> TubeCoord:
    return TubeCoord(point, a, 1, p)


def _rank(X: TubeCoord, Y: TubeCoord, p: Optional[int]) -> int:
    if X.point != Y.point:
        raise TubeError("objects lie in different tubes")
    if X.p != Y.p or (p is not None and p != X.p):
        raise TubeError("inconsistent tube ranks")
    return X.p


def count_congruent(lo: int, hi: int, r: int, p: int) -> int:
    """#{u : lo <= u <= hi, u = r mod p}."""
    if hi < lo:
        return 0
    first = lo + (r - lo) % p
    return 0 if first > hi else (hi - first) // p + 1


def hom_dim(X: TubeCoord, Y: TubeCoord, p: Optional[int] = None) -> int:
    p = _rank(X, Y, p)
    if X.is_pruefer:
        if Y.is_pruefer:
            raise TubeError("Hom between Pruefer objects is not finite-dimensional")
        return 0
    m = X.length
    lo = 0 if Y.is_pruefer else max(0, m - Y.length)
    return count_congruent(lo, m - 1, X.a - Y.a, p)


def ext_dim(X: TubeCoord, Y: TubeCoord, p: Optional[int] = None) -> int:
    p = _rank(X, Y, p)
    if Y.is_pruefer:
        return 0
    if X.is_pruefer:
        raise TubeError("Ext from a Pruefer object to a finite object is out of scope")
    return hom_dim(Y, X.tau(), p)


def segment(start: int, length: int, p: int) -> tuple[int, ...]:
    """Offsets start, start-1, ..., start-length+1 modulo p."""
    return tuple((start - k) % p for k in range(length))


def is_cyclic_segment(offsets: set[int], p: int) -> bool:
    if not offsets:
        return False
    if len(offsets) >= p:
        return True
    ends = [u for u in offsets if (u - 1) % p not in offsets]
    return len(ends) == 1


def nonadjacent_check(segments: Sequence[tuple[int, int]], p: int) -> bool:
    """True iff the segments are pairwise non-adjacent and leave a simple uncovered."""
    sets = []
    for start, length in segments:
        if length < 1:
            raise TubeError("segment length must be positive")
        if length >= p:
            return False
        sets.append(set(segment(start, length, p)))
    if sum(len(s) for s in sets) >= p:
        return False
    for i in range(len(sets)):
        for j in range(i + 1, len(sets)):
            a, b = sets[i], sets[j]
            if a & b:
                return False
            union = a | b
            if len(union) >= p or is_cyclic_segment(union, p):
                return False
    return True


@dataclass(frozen=True)
class WingObject:
    """W_{level, length} in a wing with socle offset s: tau^{-colevel} S[level - colevel]."""

    level: int
    colevel: int

    @property
    def length(self) -> int:
        return self.level - self.colevel


@dataclass(frozen=True)
class Wing:
    root: TubeCoord

    def __post_init__(self) -> None:
        if self.root.is_pruefer or self.root.length >= self.root.p:
            raise TubeError("a wing root must have length at most p-1")

    @property
    def size(self) -> int:
        return self.root.length

    @property
    def socle(self) -> int:
        return self.root.a

    @property
    def basis(self) -> tuple[int, ...]:
        return segment(self.root.a, self.root.length, self.root.p)

    def coord(self, w: WingObject) -> TubeCoord:
        if not (0 <= w.colevel < w.level <= self.size):
            raise TubeError(f"{w} is not in a wing of size {self.size}")
        return TubeCoord(self.root.point, self.socle - w.colevel, w.length, self.root.p)

    def label(self, X: TubeCoord) -> WingObject:
        if X not in self.objects:
            raise TubeError(f"{X} is not in the wing rooted in {self.root}")
        colevel = (self.socle - X.a) % X.p
        return WingObject(colevel + X.length, colevel)

    @cached_property
    def objects(self) -> frozenset[TubeCoord]:
        return frozenset(self.coord(WingObject(lv, cl))
                         for cl in range(self.size) for lv in range(cl + 1, self.size + 1))

    def __contains__(self, X: object) -> bool:
        return isinstance(X, TubeCoord) and X in self.objects

    def shifted(self, k: int = 1) -> frozenset[TubeCoord]:
        return frozenset(X.tau(k) for X in self.objects)


def wing_of(root: TubeCoord, p: Optional[int] = None) -> Wing:
    if p is not None and p != root.p:
        raise TubeError("inconsistent tube ranks")
    return Wing(root)


def is_subobject(Z: TubeCoord, Y: TubeCoord) -> bool:
    """Z embeds into Y (same socle, shorter or equal)."""
    return Z.point == Y.point and Z.a == Y.a and Z.length <= Y.length


def is_quotient(Z: TubeCoord, X: TubeCoord) -> bool:
    """Z is a quotient of X (same top, shorter or equal)."""
    return Z.point == X.point and Z.top == X.top and Z.length <= X.length


def contains_segment(outer: TubeCoord, inner: TubeCoord) -> bool:
    """The wing of ``inner`` sits inside the wing of ``outer``."""
    if outer.point != inner.point or inner.length > outer.length:
        return False
    shift = (outer.a - inner.a) % outer.p
    return shift + inner.length <= outer.length


def all_finite(point: str, p: int, max_length: int) -> Iterable[TubeCoord]:
    for a in range(p):
        for n in range(1, max_length + 1):
            yield TubeCoord(point, a, n, p)
