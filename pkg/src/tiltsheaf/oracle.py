"""Brute-force reference computations with nilpotent cyclic-quiver representations.

The tube of rank p is modelled by nilpotent representations of the cyclic
quiver with vertices Z/p and arrows v -> v+1.  tau^c S sits at vertex c mod p.
All linear algebra is exact over the rationals.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Optional

from sympy import QQ
from sympy.polys.matrices import DomainMatrix

from .errors import TubeError
from .tube import TubeCoord, Wing

# Sparse matrices are dicts {(row, col): value} with integer entries.
Sparse = dict[tuple[int, int], int]


def _matmul(A: Sparse, B: Sparse) -> Sparse:
    by_row: dict[int, list[tuple[int, int]]] = {}
    for (k, j), v in B.items():
        by_row.setdefault(k, []).append((j, v))
    out: Sparse = {}
    for (i, k), u in A.items():
        for j, v in by_row.get(k, ()):
            out[(i, j)] = out.get((i, j), 0) + u * v
    return {key: v for key, v in out.items() if v}


def _identity(n: int) -> Sparse:
    return {(i, i): 1 for i in range(n)}


def _rank(rows: list[dict[int, int]], ncols: int) -> int:
    rows = [r for r in rows if r]
    if not rows or not ncols:
        return 0
    data = {i: {j: QQ(v) for j, v in r.items()} for i, r in enumerate(rows)}
    return DomainMatrix(data, (len(rows), ncols), QQ).rank()


@dataclass(frozen=True)
class NilpotentRep:
    """Vertex dimensions and arrow matrices; arrows[v] maps vertex v to v+1."""

    p: int
    dims: tuple[int, ...]
    arrows: tuple[Sparse, ...]

    @classmethod
    def from_coord(cls, X: TubeCoord) -> "NilpotentRep":
        if X.is_pruefer:
            raise TubeError("the oracle only models finite-length objects")
        p, m = X.p, X.length
        top = X.a - m + 1
        local: list[list[int]] = [[] for _ in range(p)]
        index: list[tuple[int, int]] = []
        for k in range(m):
            v = (top + k) % p
            index.append((v, len(local[v])))
            local[v].append(k)
        arrows: list[Sparse] = [{} for _ in range(p)]
        for k in range(m - 1):
            v, i = index[k]
            _, j = index[k + 1]
            arrows[v][(j, i)] = 1
        return cls(p, tuple(len(b) for b in local), tuple(arrows))

    def path(self, v: int, length: int) -> Sparse:
        """Composite of ``length`` arrows starting at vertex v."""
        out = _identity(self.dims[v % self.p])
        for k in range(length):
            out = _matmul(self.arrows[(v + k) % self.p], out)
        return out

    def is_nilpotent(self) -> bool:
        return all(not self.path(v, sum(self.dims)) for v in range(self.p))


def _hom_blocks(X: NilpotentRep, Y: NilpotentRep) -> tuple[dict, dict]:
    """Coordinates of C0 = (+)Hom(X_v, Y_v) and C1 = (+)Hom(X_v, Y_{v+1})."""
    p = X.p
    c0, c1 = {}, {}
    for v in range(p):
        w = (v + 1) % p
        for i in range(Y.dims[v]):
            for j in range(X.dims[v]):
                c0[(v, i, j)] = len(c0)
        for i in range(Y.dims[w]):
            for j in range(X.dims[v]):
                c1[(v, i, j)] = len(c1)
    return c0, c1


def _delta_rows(X: NilpotentRep, Y: NilpotentRep, c0: dict, c1: dict) -> list[dict[int, int]]:
    """Rows of f -> (Y_a f_v - f_{v+1} X_a), one per coordinate of C1."""
    p = X.p
    rows: dict[int, dict[int, int]] = {idx: {} for idx in c1.values()}
    for v in range(p):
        w = (v + 1) % p
        for (i, k), y in Y.arrows[v].items():
            for j in range(X.dims[v]):
                row = rows[c1[(v, i, j)]]
                col = c0[(v, k, j)]
                row[col] = row.get(col, 0) + y
        for (k, j), x in X.arrows[v].items():
            for i in range(Y.dims[w]):
                row = rows[c1[(v, i, j)]]
                col = c0[(w, i, k)]
                row[col] = row.get(col, 0) - x
    return [{c: val for c, val in r.items() if val} for r in rows.values()]


def _cocycle_rows(X: NilpotentRep, Y: NilpotentRep, c1: dict, N: int) -> list[dict[int, int]]:
    """Linear conditions on arrow data d making every length-N path of the extension vanish.

    The off-diagonal block of a length-N path from v is
    sum_k Ypath(v+k+1, N-1-k) d_{v+k} Xpath(v, k).
    """
    p = X.p
    rows = []
    for v in range(p):
        end = (v + N) % p
        cond: dict[tuple[int, int], dict[int, int]] = {}
        for k in range(N):
            u = (v + k) % p
            left = Y.path(u + 1, N - 1 - k)
            if not left:
                continue
            right = X.path(v, k)
            if not right:
                continue
            for (i, a), lv in left.items():
                for (b, j), rv in right.items():
                    col = c1[(u, a, b)]
                    entry = cond.setdefault((i, j), {})
                    entry[col] = entry.get(col, 0) + lv * rv
        rows.extend(r for r in cond.values())
    return [{c: val for c, val in r.items() if val} for r in rows]


def oracle_hom_ext(X: TubeCoord, Y: TubeCoord, p: Optional[int] = None,
                   truncation: Optional[int] = None) -> tuple[int, int]:
    """Hom and Ext^1 dimensions computed from explicit representations.

    Ext is taken over the cyclic path algebra modulo paths of length N, as
    (cocycles whose extension kills length-N paths) / coboundaries.
    """
    if X.point != Y.point or X.p != Y.p or (p is not None and p != X.p):
        raise TubeError("objects must lie in the same tube")
    RX, RY = NilpotentRep.from_coord(X), NilpotentRep.from_coord(Y)
    N = truncation if truncation is not None else X.length + Y.length + X.p
    if N < max(X.length, Y.length):
        raise TubeError("truncation level below the Loewy length of the inputs")
    c0, c1 = _hom_blocks(RX, RY)
    rank_delta = _rank(_delta_rows(RX, RY, c0, c1), len(c0))
    hom = len(c0) - rank_delta
    cocycles = len(c1) - _rank(_cocycle_rows(RX, RY, c1, N), len(c1))
    return hom, cocycles - rank_delta


def oracle_tilting_Ar(r: int) -> list[frozenset[TubeCoord]]:
    """All rigid sets of r wing objects containing the root, by exhaustive search.

    The wing is rooted in S[r] inside a tube of rank r+1.
    """
    if not 1 <= r <= 8:
        raise TubeError("oracle_tilting_Ar supports 1 <= r <= 8")
    wing = Wing(TubeCoord("x", 0, r, r + 1))
    objs = sorted(wing.objects, key=lambda X: X.sort_key())
    ext = {(A, B): oracle_hom_ext(A, B)[1] for A in objs for B in objs}
    compatible = {A: {B for B in objs if B != A and ext[(A, B)] == 0 and ext[(B, A)] == 0}
                  for A in objs}
    root = wing.root
    others = [X for X in objs if X != root and X in compatible[root] and ext[(X, X)] == 0]
    found = []

    def extend(chosen: list[TubeCoord], start: int) -> None:
        if len(chosen) == r:
            found.append(frozenset(chosen))
            return
        for idx in range(start, len(others)):
            X = others[idx]
            if all(X in compatible[C] for C in chosen):
                chosen.append(X)
                extend(chosen, idx + 1)
                chosen.pop()

    extend([root], 0)
    return found


def brute_force_rigid_subsets(r: int) -> list[frozenset[TubeCoord]]:
    """Slow variant of oracle_tilting_Ar scanning every subset; for small r only."""
    wing = Wing(TubeCoord("x", 0, r, r + 1))
    objs = sorted(wing.objects - {wing.root}, key=lambda X: X.sort_key())
    out = []
    for subset in combinations(objs, r - 1):
        chosen = (wing.root,) + subset
        if all(oracle_hom_ext(A, B)[1] == 0 for A in chosen for B in chosen):
            out.append(frozenset(chosen))
    return out
