"""Grothendieck-lattice arithmetic on the free lattice spanned by [L] and tube simples.

Offsets are calibrated so that j = 0 is the simple S_x with Hom(L, S_x) != 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Iterable, Mapping, Optional, Union

from .curve_model import (CurveDescriptor, dualizing_degree, fraction_str,
                          orbifold_euler_characteristic, validate_descriptor)
from .errors import InputError, LatticeError

SimpleKey = tuple[str, int]


@dataclass(frozen=True)
class KClass:
    """Integer combination coeff_L*[L] + sum c*[tau^j S_x]."""

    coeff_L: int = 0
    simples: tuple[tuple[SimpleKey, int], ...] = ()

    def __post_init__(self) -> None:
        merged: dict[SimpleKey, int] = {}
        for (label, j), c in self.simples:
            merged[(label, j)] = merged.get((label, j), 0) + c
        object.__setattr__(self, "simples",
                           tuple(sorted((k, c) for k, c in merged.items() if c)))

    @classmethod
    def line(cls, n: int = 1) -> "KClass":
        return cls(n)

    @classmethod
    def simple(cls, label: str, j: int, c: int = 1) -> "KClass":
        return cls(0, (((label, j), c),))

    @classmethod
    def from_mapping(cls, coeff_L: int, simples: Mapping[SimpleKey, int]) -> "KClass":
        return cls(coeff_L, tuple(simples.items()))

    @property
    def as_dict(self) -> dict[SimpleKey, int]:
        return dict(self.simples)

    @property
    def is_finite_length(self) -> bool:
        return self.coeff_L == 0

    @property
    def is_zero(self) -> bool:
        return self.coeff_L == 0 and not self.simples

    def __add__(self, other: "KClass") -> "KClass":
        return KClass(self.coeff_L + other.coeff_L, self.simples + other.simples)

    def __neg__(self) -> "KClass":
        return KClass(-self.coeff_L, tuple((k, -c) for k, c in self.simples))

    def __sub__(self, other: "KClass") -> "KClass":
        return self + (-other)

    def __mul__(self, n: int) -> "KClass":
        return KClass(n * self.coeff_L, tuple((k, n * c) for k, c in self.simples))

    __rmul__ = __mul__

    def finite_part(self) -> "KClass":
        return KClass(0, self.simples)

    def tau(self, k: int = 1) -> "KClass":
        """Shift every simple offset by k; only meaningful on finite-length classes."""
        return KClass(0, tuple(((lab, j + k), c) for (lab, j), c in self.simples))

    def normalized(self, d: CurveDescriptor) -> "KClass":
        out = []
        for (label, j), c in self.simples:
            if not d.has_point(label):
                raise LatticeError(f"unknown point {label!r}")
            out.append(((label, j % d.point(label).p), c))
        return KClass(self.coeff_L, tuple(out))

    def to_dict(self) -> dict[str, Any]:
        return {"L": self.coeff_L,
                "simples": [{"point": lab, "j": j, "c": c} for (lab, j), c in self.simples]}

    @classmethod
    def from_dict(cls, obj: Mapping[str, Any]) -> "KClass":
        if not isinstance(obj, Mapping):
            raise InputError("a class must be a JSON object")
        coeff = obj.get("L", 0)
        entries = obj.get("simples", [])
        if isinstance(coeff, bool) or not isinstance(coeff, int) or not isinstance(entries, list):
            raise InputError("class needs integer 'L' and a 'simples' array")
        simples = []
        for e in entries:
            try:
                label, j, c = str(e["point"]), e["j"], e.get("c", 1)
            except (KeyError, TypeError) as exc:
                raise InputError(f"bad simple entry {e!r}") from exc
            if not all(isinstance(v, int) and not isinstance(v, bool) for v in (j, c)):
                raise InputError(f"bad simple entry {e!r}")
            simples.append(((label, j), c))
        return cls(coeff, tuple(simples))


Slope = Union[Fraction, str]
INFINITE_SLOPE = "inf"


@dataclass(frozen=True)
class NumericalData:
    rank: int
    degree: Fraction
    slope: Optional[Slope]

    def to_dict(self) -> dict[str, Any]:
        slope = self.slope if isinstance(self.slope, str) or self.slope is None \
            else fraction_str(self.slope)
        return {"rank": self.rank, "degree": fraction_str(self.degree), "slope": slope}


def _check_points(c: KClass, d: CurveDescriptor) -> None:
    for (label, _), _ in c.simples:
        if not d.has_point(label):
            raise LatticeError(f"unknown point {label!r}")


def rank(c: KClass) -> int:
    return c.coeff_L


def degree(c: KClass, d: CurveDescriptor) -> Fraction:
    _check_points(c, d)
    total = Fraction(0)
    for (label, _), coeff in c.simples:
        pt = d.point(label)
        total += coeff * Fraction(d.p_bar, pt.p) * pt.f
    return total


def numerical_data(c: KClass, d: CurveDescriptor) -> NumericalData:
    validate_descriptor(d)
    rk, deg = rank(c), degree(c, d)
    if rk:
        slope: Optional[Slope] = Fraction(deg, rk)
    elif deg:
        slope = INFINITE_SLOPE
    else:
        if c.normalized(d).is_zero:
            raise LatticeError("slope of the zero class is undefined")
        slope = None
    return NumericalData(rk, deg, slope)


def _simple_pair(d: CurveDescriptor, x: str, a: int, y: str, b: int) -> int:
    if x != y:
        return 0
    p = d.point(x).p
    return d.d(x) * (int((a - b) % p == 0) - int((a + 1 - b) % p == 0))


def euler_form(a: KClass, b: KClass, d: CurveDescriptor) -> int:
    """Bilinear form <a, b> = dim Hom - dim Ext^1 extended from generators."""
    validate_descriptor(d)
    _check_points(a, d)
    _check_points(b, d)
    for lab in {k[0] for k, _ in a.simples + b.simples}:
        d.d(lab)
    total = a.coeff_L * b.coeff_L * d.kappa * (1 - d.genus_nw)
    for (lab, j), c in b.simples:
        pt = d.point(lab)
        if j % pt.p == 0:
            total += a.coeff_L * c * d.kappa * d.epsilon * pt.f
    for (lab, j), c in a.simples:
        pt = d.point(lab)
        if (j + 1) % pt.p == 0:
            total -= b.coeff_L * c * d.kappa * d.epsilon * pt.f
    for (x, i), ca in a.simples:
        for (y, j), cb in b.simples:
            total += ca * cb * _simple_pair(d, x, i, y, j)
    return total


def avg_euler_form(a: KClass, b: KClass, d: CurveDescriptor) -> int:
    """Average form sum_{j < p_bar} <tau^j a, b>.

    Finite-length parts are moved by tau directly.  The [L] parts use
    tau-equivariance (<tau^j L, y> = <L, tau^-j y>) for finite y, and
    <<L, L>> = s^2 p_bar^2 chi_orb; bilinearity covers mixed classes.
    """
    validate_descriptor(d)
    pb = d.p_bar
    a_fin, b_fin = a.finite_part(), b.finite_part()
    total = 0
    for j in range(pb):
        total += euler_form(a_fin.tau(j), b, d)
        total += a.coeff_L * euler_form(KClass.line(), b_fin.tau(-j), d)
    if a.coeff_L and b.coeff_L:
        ll = d.s ** 2 * pb ** 2 * orbifold_euler_characteristic(d)
        if ll.denominator != 1:
            raise LatticeError("s^2 p_bar^2 chi_orb is not an integer")
        total += a.coeff_L * b.coeff_L * int(ll)
    return total


@dataclass(frozen=True)
class RRCheck:
    lhs: Fraction
    rhs: Fraction

    @property
    def equal(self) -> bool:
        return self.lhs == self.rhs


def riemann_roch_check(a: KClass, b: KClass, d: CurveDescriptor) -> RRCheck:
    pb = d.p_bar
    lhs = Fraction(avg_euler_form(a, b, d), pb * d.kappa)
    delta = dualizing_degree(d)
    ra, rb = rank(a), rank(b)
    rhs = (-Fraction(d.epsilon, 2) * delta * ra * rb
           + Fraction(d.epsilon, pb) * (ra * degree(b, d) - rb * degree(a, d)))
    return RRCheck(lhs, rhs)


def tubular_shift_class(c: KClass, x: str, d: CurveDescriptor) -> tuple[KClass, list[int]]:
    """Class of sigma_x(E) and the multiplicities e(j, x, E) for a bundle class E."""
    validate_descriptor(d)
    if c.coeff_L <= 0:
        raise LatticeError("tubular shift needs a bundle class of positive rank")
    pt = d.point(x)
    dx = d.d(x)
    mults = []
    for j in range(pt.p):
        value = -euler_form(KClass.simple(x, j), c, d)
        if value % dx or value < 0:
            raise LatticeError(f"e({j},{x}) is not a nonnegative integer; not a bundle class")
        mults.append(value // dx)
    shifted = c + KClass(0, tuple(((x, j), m) for j, m in enumerate(mults)))
    return shifted, mults


def full_turn_defect(g: KClass, x: str, x0: str, d: CurveDescriptor) -> tuple[int, int]:
    """Both sides of the full-turn relation paired with the generator ``g``."""
    pt = d.point(x)
    rel = KClass(0, tuple(((x, j), 1) for j in range(pt.p))) - KClass.simple(x0, 0, pt.f)
    return euler_form(g, rel, d), euler_form(rel, g, d)


def generators(d: CurveDescriptor) -> Iterable[KClass]:
    yield KClass.line()
    for pt in d.points:
        for j in range(pt.p):
            yield KClass.simple(pt.label, j)
