"""Numerical model of a weighted curve and its global invariants."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import cached_property
from math import lcm
from typing import Any, Iterable, Mapping, Optional, Sequence

from .errors import CurveError, InputError


class RepType(str, Enum):
    DOMESTIC = "Domestic"
    TUBULAR = "Tubular"
    ELLIPTIC = "Elliptic"
    WILD = "Wild"


@dataclass(frozen=True)
class PointDescriptor:
    """Invariants attached to one point of the window."""

    label: str
    p: int = 1
    f: int = 1
    e: int = 1
    e_tau: int = 1
    res_deg: int = 1

    @property
    def exceptional(self) -> bool:
        return self.p > 1

    def to_dict(self) -> dict[str, Any]:
        return {"label": self.label, "p": self.p, "f": self.f, "e": self.e,
                "e_tau": self.e_tau, "res_deg": self.res_deg}

    @classmethod
    def from_dict(cls, obj: Mapping[str, Any]) -> "PointDescriptor":
        if not isinstance(obj, Mapping) or "label" not in obj or "p" not in obj:
            raise InputError("point entries need at least 'label' and 'p'")
        kwargs: dict[str, Any] = {"label": str(obj["label"])}
        for key in ("p", "f", "e", "e_tau", "res_deg"):
            if key in obj:
                kwargs[key] = _as_int(obj[key], key)
        return cls(**kwargs)


@dataclass(frozen=True)
class CurveDescriptor:
    """A finite window of points plus the global invariants of the curve.

    Points outside the window are homogeneous and unramified; they never
    influence the numerical invariants.
    """

    points: tuple[PointDescriptor, ...]
    epsilon: int = 1
    kappa: int = 1
    s: int = 1
    chi_centre: Fraction = Fraction(1)
    genus_nw: int = 0
    chi_orb_override: Optional[Fraction] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "points", tuple(self.points))
        object.__setattr__(self, "chi_centre", Fraction(self.chi_centre))
        if self.chi_orb_override is not None:
            object.__setattr__(self, "chi_orb_override", Fraction(self.chi_orb_override))

    @cached_property
    def _by_label(self) -> dict[str, PointDescriptor]:
        return {pt.label: pt for pt in self.points}

    def point(self, label: str) -> PointDescriptor:
        try:
            return self._by_label[label]
        except KeyError:
            raise CurveError(f"unknown point {label!r}") from None

    def has_point(self, label: str) -> bool:
        return label in self._by_label

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(pt.label for pt in self.points)

    @property
    def exceptional_points(self) -> tuple[PointDescriptor, ...]:
        return tuple(pt for pt in self.points if pt.exceptional)

    @property
    def p_bar(self) -> int:
        return lcm(*(pt.p for pt in self.points)) if self.points else 1

    def d(self, label: str) -> int:
        """dim_k End(S_x) in the units used by the Euler form."""
        pt = self.point(label)
        num = self.kappa * self.epsilon * pt.f
        if num % pt.e:
            raise CurveError(
                f"kappa*epsilon*f/e is not an integer at point {label!r}")
        return num // pt.e

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "points": [pt.to_dict() for pt in self.points],
            "epsilon": self.epsilon,
            "kappa": self.kappa,
            "s": self.s,
            "chi_centre": _fraction_str(self.chi_centre),
            "genus_nw": self.genus_nw,
        }
        if self.chi_orb_override is not None:
            out["chi_orb_override"] = _fraction_str(self.chi_orb_override)
        return out

    @classmethod
    def from_dict(cls, obj: Mapping[str, Any]) -> "CurveDescriptor":
        if not isinstance(obj, Mapping):
            raise InputError("curve descriptor must be a JSON object")
        if "points" not in obj or not isinstance(obj["points"], list):
            raise InputError("curve descriptor needs a 'points' array")
        kwargs: dict[str, Any] = {
            "points": tuple(PointDescriptor.from_dict(p) for p in obj["points"])}
        for key in ("epsilon", "kappa", "s", "genus_nw"):
            if key in obj:
                kwargs[key] = _as_int(obj[key], key)
        if "chi_centre" in obj:
            kwargs["chi_centre"] = parse_fraction(obj["chi_centre"])
        if obj.get("chi_orb_override") is not None:
            kwargs["chi_orb_override"] = parse_fraction(obj["chi_orb_override"])
        return cls(**kwargs)

    @classmethod
    def from_json(cls, text: str) -> "CurveDescriptor":
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputError(f"invalid JSON: {exc}") from exc
        return cls.from_dict(obj)


@dataclass(frozen=True)
class GlobalInvariants:
    p_bar: int
    chi_orb: Fraction
    delta_omega: Fraction
    rep_type: RepType

    def to_dict(self) -> dict[str, Any]:
        return {"p_bar": self.p_bar, "chi_orb": _fraction_str(self.chi_orb),
                "delta_omega": _fraction_str(self.delta_omega),
                "rep_type": self.rep_type.value}


def weighted_line(weights: Sequence[int], *, homogeneous: Iterable[str] = (),
                  epsilon: int = 1, kappa: int = 1, s: int = 1,
                  chi_centre: Fraction | int = 1, **point_invariants: int) -> CurveDescriptor:
    """Genus-zero descriptor with exceptional points x1, x2, ... of the given weights.

    ``point_invariants`` (f, e, e_tau, res_deg) apply to the exceptional points;
    extra homogeneous points get unit invariants.
    """
    pts = [PointDescriptor(f"x{i + 1}", p, **point_invariants) for i, p in enumerate(weights)]
    pts += [PointDescriptor(label, 1) for label in homogeneous]
    return validate_descriptor(CurveDescriptor(tuple(pts), epsilon=epsilon, kappa=kappa,
                                               s=s, chi_centre=Fraction(chi_centre)))


def validate_descriptor(d: CurveDescriptor) -> CurveDescriptor:
    """Check the invariants of ``d`` and return it unchanged."""
    if not isinstance(d, CurveDescriptor):
        raise InputError("expected a CurveDescriptor")
    if not d.points:
        raise CurveError("the point window is empty")
    labels = [pt.label for pt in d.points]
    if len(set(labels)) != len(labels):
        raise CurveError("point labels must be unique")
    for pt in d.points:
        for key in ("p", "f", "e", "e_tau", "res_deg"):
            value = getattr(pt, key)
            if not isinstance(value, int) or isinstance(value, bool) or value < 1:
                raise CurveError(f"{key} must be a positive integer at point {pt.label!r}")
    if d.epsilon not in (1, 2):
        raise CurveError("epsilon must be 1 or 2")
    for key in ("kappa", "s"):
        value = getattr(d, key)
        if not isinstance(value, int) or value < 1:
            raise CurveError(f"{key} must be a positive integer")
    if d.genus_nw not in (0, 1):
        raise CurveError("genus_nw must be 0 or 1")
    if d.genus_nw == 1 and any(pt.p > 1 for pt in d.points):
        raise CurveError("elliptic must be non-weighted")
    return d


def orbifold_euler_characteristic(d: CurveDescriptor) -> Fraction:
    validate_descriptor(d)
    if d.chi_orb_override is not None:
        return d.chi_orb_override
    total = d.chi_centre
    for pt in d.points:
        total -= Fraction(1, 2) * (1 - Fraction(1, pt.p * pt.e_tau)) * pt.res_deg
    return total


def dualizing_degree(d: CurveDescriptor) -> Fraction:
    chi = orbifold_euler_characteristic(d)
    return Fraction(-2 * d.p_bar * d.s ** 2, d.kappa * d.epsilon) * chi


def representation_type(d: CurveDescriptor) -> RepType:
    chi = orbifold_euler_characteristic(d)
    if chi > 0:
        return RepType.DOMESTIC
    if chi < 0:
        return RepType.WILD
    return RepType.TUBULAR if d.p_bar > 1 else RepType.ELLIPTIC


def global_invariants(d: CurveDescriptor) -> GlobalInvariants:
    return GlobalInvariants(d.p_bar, orbifold_euler_characteristic(d),
                            dualizing_degree(d), representation_type(d))


def parse_fraction(value: Any) -> Fraction:
    if isinstance(value, bool):
        raise InputError(f"not a rational number: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"not a rational number: {value!r}") from exc
    raise InputError(f"not a rational number: {value!r}")


def _as_int(value: Any, key: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise InputError(f"{key} must be an integer, got {value!r}")
    return value


def _fraction_str(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


fraction_str = _fraction_str
