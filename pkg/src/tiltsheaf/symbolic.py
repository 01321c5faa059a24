"""Multiplicities as integer polynomials in epsilon and the point invariants e_x, f_x."""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import Iterable, Mapping

from .curve_model import CurveDescriptor

# A variable is "eps", or ("e", x) / ("f", x) for a point label x.
Var = tuple
Monomial = tuple[tuple[Var, int], ...]

EPS: Var = ("eps",)


def _mono(powers: Mapping[Var, int]) -> Monomial:
    return tuple(sorted((v, k) for v, k in powers.items() if k))


@dataclass(frozen=True)
class Poly:
    terms: tuple[tuple[Monomial, int], ...] = ()

    def __post_init__(self) -> None:
        merged: dict[Monomial, int] = {}
        for m, c in self.terms:
            merged[m] = merged.get(m, 0) + c
        object.__setattr__(self, "terms", tuple(sorted((m, c) for m, c in merged.items() if c)))

    @classmethod
    def const(cls, c: int) -> "Poly":
        return cls((((), c),))

    @classmethod
    def var(cls, v: Var) -> "Poly":
        return cls(((((v, 1),), 1),))

    def __add__(self, other: "Poly") -> "Poly":
        return Poly(self.terms + other.terms)

    def __mul__(self, other: "Poly | int") -> "Poly":
        if isinstance(other, int):
            other = Poly.const(other)
        out = []
        for m1, c1 in self.terms:
            for m2, c2 in other.terms:
                powers = dict(m1)
                for v, k in m2:
                    powers[v] = powers.get(v, 0) + k
                out.append((_mono(powers), c1 * c2))
        return Poly(tuple(out))

    __rmul__ = __mul__

    def is_one(self) -> bool:
        return self.terms == (((), 1),)

    def evaluate(self, d: CurveDescriptor) -> int:
        total = 0
        for m, c in self.terms:
            value = c
            for v, k in m:
                value *= _value(v, d) ** k
            total += value
        return total

    def render(self, subscripts: bool = True) -> str:
        if not self.terms:
            return "0"
        if len(self.terms) == 1:
            m, c = self.terms[0]
            return _render_term(m, c, subscripts)
        common = dict(self.terms[0][0])
        for m, _ in self.terms[1:]:
            powers = dict(m)
            common = {v: min(k, powers.get(v, 0)) for v, k in common.items()}
        common = {v: k for v, k in common.items() if k}
        content = 0
        for _, c in self.terms:
            content = gcd(content, c)
        quotient = []
        for m, c in self.terms:
            powers = dict(m)
            for v, k in common.items():
                powers[v] -= k
            quotient.append((_mono(powers), c // content))
        quotient.sort(key=lambda t: (sum(k for _, k in t[0]), t[0]))
        inner = "+".join(_render_term(m, c, subscripts) for m, c in quotient).replace("+-", "-")
        outer = _render_term(_mono(common), content, subscripts) if common or content != 1 else ""
        return f"({inner}){outer}" if outer else inner


ONE = Poly.const(1)
EPS_POLY = Poly.var(EPS)


def e_of(x: str) -> Poly:
    return Poly.var(("e", x))


def f_of(x: str) -> Poly:
    return Poly.var(("f", x))


def _value(v: Var, d: CurveDescriptor) -> int:
    if v == EPS:
        return d.epsilon
    kind, label = v
    pt = d.point(label)
    return pt.e if kind == "e" else pt.f


def _render_term(m: Monomial, c: int, subscripts: bool) -> str:
    powers = dict(m)
    parts = []
    if powers.get(EPS):
        parts.append(_power("ε", powers.pop(EPS)))
    labels = sorted({v[1] for v in powers})
    for x in labels:
        sub = f"_{x}" if subscripts else ""
        e, f = powers.get(("e", x), 0), powers.get(("f", x), 0)
        both = min(e, f)
        if both:
            parts.append(_power("d" + sub, both))
        if e - both:
            parts.append(_power("e" + sub, e - both))
        if f - both:
            parts.append(_power("f" + sub, f - both))
    body = "".join(parts)
    if not body:
        return str(c)
    if c == 1:
        return body
    if c == -1:
        return "-" + body
    return f"{c}{body}"


def _power(name: str, k: int) -> str:
    return name if k == 1 else f"{name}^{k}"


def poly_sum(polys: Iterable[Poly]) -> Poly:
    total = Poly()
    for p in polys:
        total = total + p
    return total
