"""Group law on Mordell curves ``y^2 = x^3 + d`` over Q."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional


class NotOnCurveError(ValueError):
    pass


@dataclass(frozen=True)
class MordellCurve:
    d: Fraction

    def __post_init__(self):
        d = Fraction(self.d)
        if d == 0:
            raise ValueError("d = 0 gives a singular curve")
        object.__setattr__(self, "d", d)

    @property
    def discriminant(self) -> Fraction:
        return -432 * self.d * self.d

    @property
    def infinity(self) -> "CurvePoint":
        return CurvePoint(self)

    def point(self, x, y) -> "CurvePoint":
        return CurvePoint(self, Fraction(x), Fraction(y))

    def on_curve(self, x, y) -> bool:
        return on_curve(self, x, y)

    def __str__(self):
        return f"y^2 = x^3 + {self.d}"


@dataclass(frozen=True)
class CurvePoint:
    """A rational point; ``x is None`` encodes the point at infinity."""

    curve: MordellCurve
    x: Optional[Fraction] = None
    y: Optional[Fraction] = None

    def __post_init__(self):
        if (self.x is None) != (self.y is None):
            raise ValueError("affine points need both coordinates")
        if self.x is not None and not on_curve(self.curve, self.x, self.y):
            raise NotOnCurveError(f"({self.x}, {self.y}) is not on {self.curve}")

    @property
    def is_infinity(self) -> bool:
        return self.x is None

    def __neg__(self):
        return negate(self.curve, self)

    def __add__(self, other: "CurvePoint"):
        return add(self.curve, self, other)

    def __sub__(self, other: "CurvePoint"):
        return add(self.curve, self, negate(self.curve, other))

    def __rmul__(self, k: int):
        return scalar_mul(self.curve, k, self)

    def __str__(self):
        if self.is_infinity:
            return "O"
        return f"({self.x}, {self.y})"


def on_curve(E: MordellCurve, x, y) -> bool:
    x, y = Fraction(x), Fraction(y)
    return y * y - x * x * x - E.d == 0


def _check(E: MordellCurve, P: CurvePoint):
    if P.curve != E:
        raise ValueError(f"{P} lies on {P.curve}, not on {E}")


def negate(E: MordellCurve, P: CurvePoint) -> CurvePoint:
    _check(E, P)
    if P.is_infinity:
        return P
    return CurvePoint(E, P.x, -P.y)


def add(E: MordellCurve, P: CurvePoint, Q: CurvePoint) -> CurvePoint:
    _check(E, P)
    _check(E, Q)
    if P.is_infinity:
        return Q
    if Q.is_infinity:
        return P
    if P.x == Q.x:
        if P.y != Q.y or P.y == 0:
            return E.infinity
        lam = 3 * P.x * P.x / (2 * P.y)
    else:
        lam = (Q.y - P.y) / (Q.x - P.x)
    x3 = lam * lam - P.x - Q.x
    y3 = lam * (P.x - x3) - P.y
    return CurvePoint(E, x3, y3)


def scalar_mul(E: MordellCurve, k: int, P: CurvePoint) -> CurvePoint:
    """``k * P`` by double-and-add; negative ``k`` negates."""
    _check(E, P)
    if k < 0:
        return negate(E, scalar_mul(E, -k, P))
    result = E.infinity
    addend = P
    while k:
        if k & 1:
            result = add(E, result, addend)
        k >>= 1
        if k:
            addend = add(E, addend, addend)
    return result
