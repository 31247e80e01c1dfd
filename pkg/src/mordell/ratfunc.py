"""Exact univariate polynomials and rational functions over Q.

Coefficients are :class:`fractions.Fraction`.  Both :class:`Poly` and
:class:`RatFunc` are immutable and always stored in canonical form, so
``==`` is structural equality.
"""
from __future__ import annotations

from fractions import Fraction
from math import isqrt
from typing import Iterable, Optional, Sequence, Union

Scalar = Union[int, Fraction]


class PoleError(ZeroDivisionError):
    """Raised when a rational function is evaluated at a zero of its denominator."""

    def __init__(self, point):
        super().__init__(f"pole at {point}: denominator vanishes")
        self.point = point


def _frac(c) -> Fraction:
    return c if isinstance(c, Fraction) else Fraction(c)


def rational_sqrt(q: Fraction) -> Optional[Fraction]:
    """Return the nonnegative square root of ``q`` if it is a rational square."""
    q = _frac(q)
    if q < 0:
        return None
    a, b = q.numerator, q.denominator
    ra, rb = isqrt(a), isqrt(b)
    if ra * ra == a and rb * rb == b:
        return Fraction(ra, rb)
    return None


class Poly:
    """Dense polynomial, ``coeffs[i]`` is the coefficient of ``x**i``."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[Scalar] = ()):
        cs = [_frac(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    def __setattr__(self, name, value):
        raise AttributeError("Poly is immutable")

    @classmethod
    def const(cls, c: Scalar) -> "Poly":
        return cls([c])

    @classmethod
    def x(cls) -> "Poly":
        return cls([0, 1])

    @property
    def degree(self) -> int:
        """Degree, with ``-1`` for the zero polynomial."""
        return len(self.coeffs) - 1

    @property
    def lc(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def is_zero(self) -> bool:
        return not self.coeffs

    def monic(self) -> "Poly":
        if self.is_zero():
            return self
        lc = self.lc
        return Poly(c / lc for c in self.coeffs)

    def content(self) -> Fraction:
        """Positive rational c with ``self / c`` primitive with integer coefficients."""
        from math import gcd, lcm

        if self.is_zero():
            return Fraction(0)
        num = 0
        den = 1
        for c in self.coeffs:
            num = gcd(num, c.numerator)
            den = lcm(den, c.denominator)
        return Fraction(num, den)

    def __call__(self, x0):
        acc = Fraction(0) if isinstance(x0, (int, Fraction)) else 0 * x0
        for c in reversed(self.coeffs):
            acc = acc * x0 + c
        return acc

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Poly.const(other)
        if not isinstance(other, Poly):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(("Poly", self.coeffs))

    def __add__(self, other):
        other = _as_poly(other)
        if other is None:
            return NotImplemented
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return Poly(out)

    __radd__ = __add__

    def __neg__(self):
        return Poly(-c for c in self.coeffs)

    def __sub__(self, other):
        other = _as_poly(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = _as_poly(other)
        if other is None:
            return NotImplemented
        if not self.coeffs or not other.coeffs:
            return Poly()
        # integer convolution on cleared denominators; Fraction ops are the bottleneck
        da, a = _clear(self.coeffs)
        db, b = _clear(other.coeffs)
        out = [0] * (len(a) + len(b) - 1)
        for i, ca in enumerate(a):
            if ca:
                for j, cb in enumerate(b):
                    out[i + j] += ca * cb
        den = da * db
        return Poly(Fraction(c, den) for c in out)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative exponent for Poly")
        result = Poly.const(1)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __divmod__(self, other):
        other = _as_poly(other)
        if other is None:
            return NotImplemented
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        db = other.degree
        if self.degree < db:
            return Poly(), self
        # pseudo-division on integer coefficients: lc^k * A = q * B + r
        sa, A = _clear(self.coeffs)
        sb, B = _clear(other.coeffs)
        lc = B[-1]
        k = len(A) - db
        rem = [c * lc ** k for c in A]
        quot = [0] * k
        for i in range(k - 1, -1, -1):
            q = rem[i + db] // lc
            quot[i] = q
            if q:
                for j, c in enumerate(B):
                    rem[i + j] -= q * c
        scale = lc ** k
        return (Poly(Fraction(c * sb, scale * sa) for c in quot),
                Poly(Fraction(c, scale * sa) for c in rem[:db]))

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def __truediv__(self, other):
        return RatFunc(self, other)

    def __rtruediv__(self, other):
        return RatFunc(other, self)

    def derivative(self) -> "Poly":
        return Poly(i * c for i, c in enumerate(self.coeffs) if i)

    def compose(self, g):
        """Substitute ``g`` (a Poly or RatFunc) for the variable."""
        if isinstance(g, RatFunc):
            # homogenize to stay polynomial until the final division
            d = self.degree
            if d < 0:
                return RatFunc(Poly())
            num_pows = [Poly.const(1)]
            den_pows = [Poly.const(1)]
            for _ in range(d):
                num_pows.append(num_pows[-1] * g.num)
                den_pows.append(den_pows[-1] * g.den)
            num = Poly()
            for i, c in enumerate(self.coeffs):
                if c:
                    num = num + c * num_pows[i] * den_pows[d - i]
            return RatFunc(num, den_pows[d])
        acc = Poly()
        for c in reversed(self.coeffs):
            acc = acc * g + c
        return acc

    def sqrt(self) -> Optional["Poly"]:
        """Exact square root with positive leading coefficient, or None."""
        if self.is_zero():
            return self
        if self.degree % 2:
            return None
        r = rational_sqrt(self.lc)
        if r is None:
            return None
        n = self.degree
        half = n // 2
        # root coefficients found top-down: coefficient of x^(n-j) fixes s[half-j]
        s = [Fraction(0)] * (half + 1)
        s[half] = r
        for j in range(1, half + 1):
            k = n - j
            acc = self.coeffs[k]
            for i in range(half - j + 1, half):
                acc -= s[i] * s[k - i]
            s[half - j] = acc / (2 * r)
        root = Poly(s)
        return root if root * root == self else None

    def __repr__(self):
        return f"Poly({[str(c) for c in self.coeffs]})"

    def __str__(self):
        return format_poly(self)


def _clear(coeffs) -> tuple[int, list[int]]:
    from math import lcm

    den = 1
    for c in coeffs:
        if c.denominator != 1:
            den = lcm(den, c.denominator)
    if den == 1:
        return 1, [c.numerator for c in coeffs]
    return den, [c.numerator * (den // c.denominator) for c in coeffs]


def _as_poly(v) -> Optional[Poly]:
    if isinstance(v, Poly):
        return v
    if isinstance(v, (int, Fraction)):
        return Poly.const(v)
    return None


def format_poly(p: Poly, var: str = "n") -> str:
    if p.is_zero():
        return "0"
    terms = []
    for i in range(p.degree, -1, -1):
        c = p.coeffs[i]
        if c == 0:
            continue
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        if i == 0:
            body = str(mag)
        else:
            mono = var if i == 1 else f"{var}^{i}"
            body = mono if mag == 1 else f"{mag}*{mono}"
        terms.append((sign, body))
    first_sign, first = terms[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, body in terms[1:]:
        out += f" {sign} {body}"
    return out


def _primitive(cs: list[int]) -> list[int]:
    from math import gcd

    g = 0
    for c in cs:
        g = gcd(g, c)
    if g > 1:
        cs = [c // g for c in cs]
    return cs


def _prem(A: list[int], B: list[int]) -> list[int]:
    db = len(B) - 1
    lc = B[-1]
    rem = list(A)
    while len(rem) - 1 >= db and rem:
        c = rem[-1]
        shift = len(rem) - 1 - db
        rem = [r * lc for r in rem]
        for j, bj in enumerate(B):
            rem[shift + j] -= c * bj
        while rem and rem[-1] == 0:
            rem.pop()
    return rem


def poly_gcd(a: Poly, b: Poly) -> Poly:
    """Monic gcd via the primitive remainder sequence over Z."""
    if a.is_zero() and b.is_zero():
        raise ValueError("gcd(0, 0) is undefined")
    A = _primitive(_clear(a.coeffs)[1]) if a.coeffs else []
    B = _primitive(_clear(b.coeffs)[1]) if b.coeffs else []
    if len(A) < len(B):
        A, B = B, A
    while B:
        if len(B) == 1:
            return Poly.const(1)
        A, B = B, _primitive(_prem(A, B))
    return Poly(A).monic()


class RatFunc:
    """Reduced quotient ``num/den`` with ``den`` monic."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None, *, _reduced: bool = False):
        num = _as_poly(num) if not isinstance(num, Poly) else num
        if den is None:
            den = Poly.const(1)
        else:
            den = _as_poly(den) if not isinstance(den, Poly) else den
        if num is None or den is None:
            raise TypeError("RatFunc needs Poly or scalar parts")
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if not _reduced:
            if num.is_zero():
                den = Poly.const(1)
            else:
                g = poly_gcd(num, den)
                if g.degree > 0:
                    num = num // g
                    den = den // g
                lc = den.lc
                if lc != 1:
                    num = Poly(c / lc for c in num.coeffs)
                    den = Poly(c / lc for c in den.coeffs)
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    def __setattr__(self, name, value):
        raise AttributeError("RatFunc is immutable")

    @classmethod
    def x(cls) -> "RatFunc":
        return cls(Poly.x())

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __eq__(self, other):
        other = _as_rf(other)
        if other is None:
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __add__(self, other):
        other = _as_rf(other)
        if other is None:
            return NotImplemented
        if self.den == other.den:
            return RatFunc(self.num + other.num, self.den)
        return RatFunc(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(-self.num, self.den, _reduced=True)

    def __sub__(self, other):
        other = _as_rf(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = _as_rf(other)
        if other is None:
            return NotImplemented
        return RatFunc(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _as_rf(other)
        if other is None:
            return NotImplemented
        if other.is_zero():
            raise ZeroDivisionError("division by the zero rational function")
        return RatFunc(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        return _as_rf(other) / self

    def __pow__(self, e: int):
        if e < 0:
            if self.is_zero():
                raise ZeroDivisionError("zero to a negative power")
            return RatFunc(self.den ** (-e), self.num ** (-e))
        return RatFunc(self.num ** e, self.den ** e, _reduced=True) if e else RatFunc(1)

    def __call__(self, x0):
        return rf_eval(self, x0)

    def compose(self, g: "RatFunc") -> "RatFunc":
        """Substitute the rational function ``g`` for the variable."""
        g = _as_rf(g)
        return self.num.compose(g) / self.den.compose(g)

    def sqrt(self) -> Optional["RatFunc"]:
        return rf_is_square(self)

    def __repr__(self):
        return f"RatFunc({self.num!r}, {self.den!r})"

    def __str__(self):
        return format_ratfunc(self)


def _as_rf(v) -> Optional[RatFunc]:
    if isinstance(v, RatFunc):
        return v
    if isinstance(v, Poly):
        return RatFunc(v, _reduced=True)
    if isinstance(v, (int, Fraction)):
        return RatFunc(Poly.const(v), _reduced=True)
    return None


def format_ratfunc(f: RatFunc, var: str = "n") -> str:
    num = format_poly(f.num, var)
    if f.den.degree == 0:
        return num
    return f"({num})/({format_poly(f.den, var)})"


def rf_eval(f: RatFunc, x0) -> Fraction:
    """Exact value of ``f`` at the rational ``x0``; :class:`PoleError` at a pole."""
    x0 = _frac(x0)
    d = f.den(x0)
    if d == 0:
        raise PoleError(x0)
    return f.num(x0) / d


def rf_is_square(f: RatFunc) -> Optional[RatFunc]:
    """Return ``g`` with ``g*g == f`` (positive leading numerator coefficient), or None."""
    if f.is_zero():
        return f
    lc = f.num.lc
    c = rational_sqrt(lc)
    if c is None:
        return None
    sn = f.num.monic().sqrt()
    if sn is None:
        return None
    sd = f.den.sqrt()
    if sd is None:
        return None
    return RatFunc(c * sn, sd)


def poly_from_factors(const: Scalar, factors: Sequence[tuple[Sequence[Scalar], int]]) -> Poly:
    """Expand ``const * prod(poly(coeffs)**e)``; coeffs are listed high degree first."""
    p = Poly.const(const)
    for coeffs, e in factors:
        p = p * Poly(reversed(list(coeffs))) ** e
    return p


def rational_roots(p: Poly) -> list[Fraction]:
    """All rational roots of ``p`` (rational root theorem on the primitive part)."""
    if p.is_zero():
        raise ValueError("zero polynomial has every root")
    roots: set[Fraction] = set()
    cs = list(p.coeffs)
    while cs and cs[0] == 0:
        roots.add(Fraction(0))
        cs.pop(0)
    q = Poly(cs)
    if q.degree <= 0:
        return sorted(roots)
    cont = q.content()
    ints = [int(c / cont) for c in q.coeffs]

    def divisors(m: int) -> list[int]:
        m = abs(m)
        small = [d for d in range(1, isqrt(m) + 1) if m % d == 0]
        return sorted(set(small + [m // d for d in small]))

    for a in divisors(ints[0]):
        for b in divisors(ints[-1]):
            for cand in (Fraction(a, b), Fraction(-a, b)):
                if q(cand) == 0:
                    roots.add(cand)
    return sorted(roots)
