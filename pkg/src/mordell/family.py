"""The three-stage parametric family of Mordell curves with three rational points.

Stage M: ``a = m^2 - 1`` on ``y^2 = x^3 + a^2`` gives ``P1 = (a, m*a)``.
Stage K: ``m(m+3)`` is made a square by ``m = (k-2)^2/((k-1)(k+1))`` so that
``x = m - 1`` is the abscissa of ``P2``.
Stage N: ``-(2k^2+4k-7)`` is made a square by a rational ``k(n)`` so that
``x = -(m + 1)`` is the abscissa of ``P3``.

The printed formulas are stored once, as literal coefficient data in
:data:`FORMULAS`, and every other object in this module is derived from
them.  :func:`verify_all_identities` proves the data correct in Q(m), Q(k)
and Q(n).
"""
from __future__ import annotations

import copy
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Optional

from .curve import CurvePoint, MordellCurve
from .ratfunc import Poly, PoleError, RatFunc, rational_roots, rf_eval, rf_is_square

# A factored expression is {"const": c, "num": [factor, ...], "den_const": c', "den": [...]}
# where each factor is (terms, exponent) and terms are (coefficient, power) pairs in
# the order they are printed.  Keeping the printed order lets mutation tests address
# "the 3rd printed coefficient of the 2nd factor" unambiguously.

_N2_4N_6 = ((1, 2), (4, 1), (6, 0))          # n^2+4n+6
_34_N2_8N = ((34, 0), (1, 2), (8, 1))        # 34+n^2+8n
_2_N2 = ((2, 0), (1, 2))                     # 2+n^2
_N2_M4N_22 = ((1, 2), (-4, 1), (22, 0))      # n^2-4n+22
_N2_2N_10 = ((1, 2), (2, 1), (10, 0))        # n^2+2n+10
_N2_M4N_M14 = ((1, 2), (-4, 1), (-14, 0))    # n^2-4n-14
_N2_8N_M2 = ((1, 2), (8, 1), (-2, 0))        # n^2+8n-2
_4_N = ((4, 0), (1, 1))                      # 4+n
_N_M2 = ((1, 1), (-2, 0))                    # n-2
_N_1 = ((1, 1), (1, 0))                      # n+1


def _den_n(e):
    return [(_4_N, e), (_N_M2, e), (_N_1, e)]


FORMULAS = {
    "M": {
        "a": {"const": 1, "num": [(((1, 2), (-1, 0)), 1)], "den_const": 1, "den": []},
        "P1.x": {"const": 1, "num": [(((1, 2), (-1, 0)), 1)], "den_const": 1, "den": []},
        "P1.y": {"const": 1, "num": [(((1, 1),), 1), (((1, 2), (-1, 0)), 1)],
                 "den_const": 1, "den": []},
    },
    "K": {
        # m - 1 = -(-5+4k)/((k-1)(k+1))
        "m-1": {"const": -1, "num": [(((-5, 0), (4, 1)), 1)],
                "den_const": 1, "den": [(((1, 1), (-1, 0)), 1), (((1, 1), (1, 0)), 1)]},
        "d": {"const": 1, "num": [(((-5, 0), (4, 1)), 2), (((2, 2), (-4, 1), (3, 0)), 2)],
              "den_const": 1, "den": [(((1, 1), (-1, 0)), 4), (((1, 1), (1, 0)), 4)]},
        "P2.x": {"const": -1, "num": [(((-5, 0), (4, 1)), 1)],
                 "den_const": 1, "den": [(((1, 1), (-1, 0)), 1), (((1, 1), (1, 0)), 1)]},
        "P2.y": {"const": 1,
                 "num": [(((-5, 0), (4, 1)), 1), (((1, 1), (-2, 0)), 1), (((2, 1), (-1, 0)), 1)],
                 "den_const": 1, "den": [(((1, 1), (-1, 0)), 2), (((1, 1), (1, 0)), 2)]},
        "P3.x": {"const": -1, "num": [(((2, 2), (-4, 1), (3, 0)), 1)],
                 "den_const": 1, "den": [(((1, 1), (-1, 0)), 1), (((1, 1), (1, 0)), 1)]},
        # -(2k^2+4k-7) must be a rational square for P3 to be rational
        "P3.cond": {"const": -1, "num": [(((2, 2), (4, 1), (-7, 0)), 1)],
                    "den_const": 1, "den": []},
    },
    "N": {
        "d": {"const": 1,
              "num": [(_N2_4N_6, 2), (_34_N2_8N, 2), (_2_N2, 2), (_N2_M4N_22, 2)],
              "den_const": 256, "den": _den_n(4)},
        "P1.x": {"const": 1, "num": [(_N2_4N_6, 1), (_34_N2_8N, 1), (_2_N2, 1), (_N2_M4N_22, 1)],
                 "den_const": 16, "den": _den_n(2)},
        "P1.y": {"const": 1,
                 "num": [(_N2_2N_10, 2), (_34_N2_8N, 1), (_N2_M4N_22, 1), (_2_N2, 1), (_N2_4N_6, 1)],
                 "den_const": 64, "den": _den_n(3)},
        "P2.x": {"const": -1, "num": [(_34_N2_8N, 1), (_2_N2, 1)],
                 "den_const": 4, "den": _den_n(1)},
        "P2.y": {"const": 1,
                 "num": [(_34_N2_8N, 1), (_N2_M4N_M14, 1), (_2_N2, 1), (_N2_2N_10, 1)],
                 "den_const": 16, "den": _den_n(2)},
        "P3.x": {"const": 1, "num": [(_N2_M4N_22, 1), (_N2_4N_6, 1)],
                 "den_const": 4, "den": _den_n(1)},
        "P3.y": {"const": 1,
                 "num": [(_N2_4N_6, 1), (_N2_8N_M2, 1), (_N2_M4N_22, 1), (_N2_2N_10, 1)],
                 "den_const": 16, "den": _den_n(2)},
    },
}


def _terms_poly(terms) -> Poly:
    deg = max(p for _, p in terms)
    cs = [0] * (deg + 1)
    for c, p in terms:
        cs[p] += c
    return Poly(cs)


def _freeze(expr) -> tuple:
    return (expr["const"], tuple((tuple(t), e) for t, e in expr["num"]),
            expr["den_const"], tuple((tuple(t), e) for t, e in expr["den"]))


def build(expr) -> RatFunc:
    """Expand a factored formula entry into a reduced RatFunc."""
    return _build(_freeze(expr))


# Mutation sweeps rebuild the same entries hundreds of times; both caches are
# keyed on immutable values so they cannot go stale.
@lru_cache(maxsize=1024)
def _build(key) -> RatFunc:
    expr = dict(zip(("const", "num", "den_const", "den"), key))
    num = Poly.const(expr["const"])
    for terms, e in expr["num"]:
        num = num * _terms_poly(terms) ** e
    den = Poly.const(expr["den_const"])
    for terms, e in expr["den"]:
        den = den * _terms_poly(terms) ** e
    return RatFunc(num, den)


@lru_cache(maxsize=1024)
def _compose(f: RatFunc, g: RatFunc) -> RatFunc:
    return f.compose(g)


def coefficient_sites(formulas=FORMULAS):
    """Yield addresses of every printed scalar coefficient, for mutation testing.

    An address is ``(stage, key, part, factor_index, term_index)`` where ``part``
    is ``"const"``, ``"den_const"``, ``"num"`` or ``"den"``.
    """
    for stage, exprs in formulas.items():
        for key, expr in exprs.items():
            yield (stage, key, "const", None, None)
            yield (stage, key, "den_const", None, None)
            for part in ("num", "den"):
                for fi, (terms, _) in enumerate(expr[part]):
                    for ti in range(len(terms)):
                        yield (stage, key, part, fi, ti)


def mutate(site, delta=1, formulas=FORMULAS, exponent: Optional[int] = None):
    """Return a deep copy of ``formulas`` with one printed number changed.

    With ``exponent`` given, the factor's exponent is replaced instead of a
    coefficient being shifted by ``delta``.
    """
    stage, key, part, fi, ti = site
    out = copy.deepcopy(formulas)
    expr = out[stage][key]
    if part in ("const", "den_const"):
        expr[part] = expr[part] + delta
        return out
    factors = list(expr[part])
    terms, e = factors[fi]
    if exponent is not None:
        factors[fi] = (terms, exponent)
    else:
        terms = list(terms)
        c, p = terms[ti]
        terms[ti] = (c + delta, p)
        factors[fi] = (tuple(terms), e)
    expr[part] = factors
    return out


@dataclass(frozen=True)
class FamilyStage:
    stage: str
    param: str
    curve_d: RatFunc
    points: tuple  # of (x, y) RatFunc pairs

    def residuals(self) -> list[RatFunc]:
        return [y * y - x ** 3 - self.curve_d for x, y in self.points]


def stage_m(formulas=FORMULAS) -> FamilyStage:
    f = formulas["M"]
    a = build(f["a"])
    return FamilyStage("M", "m", a * a, ((build(f["P1.x"]), build(f["P1.y"])),))


def m_of_k(formulas=FORMULAS) -> RatFunc:
    """``m(k) = 1 + (m - 1)(k)``, i.e. ``(k-2)^2/((k-1)(k+1))``."""
    return build(formulas["K"]["m-1"]) + 1


def stage_k(formulas=FORMULAS) -> FamilyStage:
    f = formulas["K"]
    m = m_of_k(formulas)
    sm = stage_m(formulas)
    (p1x, p1y), = sm.points
    p1 = (_compose(p1x, m), _compose(p1y, m))
    p2 = (build(f["P2.x"]), build(f["P2.y"]))
    return FamilyStage("K", "k", build(f["d"]), (p1, p2))


def stage_n(formulas=FORMULAS) -> FamilyStage:
    f = formulas["N"]
    pts = tuple((build(f[f"P{i}.x"]), build(f[f"P{i}.y"])) for i in (1, 2, 3))
    return FamilyStage("N", "n", build(f["d"]), pts)


class NoConsistentRootError(ValueError):
    pass


def k_candidates(formulas=FORMULAS) -> list[RatFunc]:
    """Both solutions k(n) of ``x_P2^K(k) = x_P2^N(n)``.

    With ``X = x_P2^N``, ``(5 - 4k)/(k^2 - 1) = X`` is the quadratic
    ``X k^2 + 4k - (X + 5) = 0`` whose discriminant is ``4 (X+1)(X+4)``.
    """
    X = build(formulas["N"]["P2.x"])
    if X.is_zero():
        raise NoConsistentRootError("P2 abscissa is identically zero")
    half_disc = rf_is_square((X + 1) * (X + 4))
    if half_disc is None:
        raise NoConsistentRootError("discriminant is not a square in Q(n)")
    return [(-2 + half_disc) / X, (-2 - half_disc) / X]


def _stage_matches(k: RatFunc, formulas) -> bool:
    fk, fn = formulas["K"], formulas["N"]
    if _compose(build(fk["d"]), k) != build(fn["d"]):
        return False
    if _compose(build(fk["P2.x"]), k) != build(fn["P2.x"]):
        return False
    y = _compose(build(fk["P2.y"]), k)
    yn = build(fn["P2.y"])
    return y == yn or y == -yn


def recover_k_of_n(formulas=FORMULAS) -> RatFunc:
    """The substitution k(n) carrying stage K onto the printed stage N.

    Both roots of the defining quadratic give the same m(k(n)) and so both
    reproduce the printed curve and points.  The returned branch is the one
    that coincides with the line of slope n through (1, 1) on the conic
    ``u^2 = -(2k^2+4k-7)``, i.e. ``k = (n^2-2n-6)/(n^2+2)``.
    """
    good = [k for k in k_candidates(formulas) if _stage_matches(k, formulas)]
    if not good:
        raise NoConsistentRootError("no root of the P2 abscissa equation reproduces stage N")
    conic = conic_parametrization()
    good.sort(key=lambda k: k != conic)
    return good[0]


def conic_parametrization() -> RatFunc:
    """Lines of slope s through (k, u) = (1, 1) on ``u^2 = -(2k^2+4k-7)``: k(s)."""
    s = RatFunc.x()
    return (s * s - 2 * s - 6) / (s * s + 2)


@dataclass
class IdentityResult:
    name: str
    anchor: str
    passed: bool
    residual: Optional[RatFunc] = None
    detail: str = ""


def _zero_check(name, anchor, residual: RatFunc) -> IdentityResult:
    ok = residual.is_zero()
    return IdentityResult(name, anchor, ok, None if ok else residual)


def _eq_check(name, anchor, lhs: RatFunc, rhs: RatFunc, up_to_sign=False) -> IdentityResult:
    if up_to_sign and lhs == -rhs:
        return IdentityResult(name, anchor, True, detail="equal up to sign of y")
    return _zero_check(name, anchor, lhs - rhs)


def _square_check(name, anchor, f: RatFunc, expect: Optional[RatFunc] = None) -> IdentityResult:
    root = rf_is_square(f) if not f.is_zero() else None
    if root is None:
        return IdentityResult(name, anchor, False, f, "not a square")
    if expect is not None and root != expect and root != -expect:
        return IdentityResult(name, anchor, False, root - expect, "unexpected square root")
    return IdentityResult(name, anchor, True, detail=f"sqrt = {root}")


def verify_all_identities(formulas=FORMULAS) -> list[IdentityResult]:
    """Run every symbolic check of the construction; each result carries its residual."""
    out: list[IdentityResult] = []
    fm, fk, fn = formulas["M"], formulas["K"], formulas["N"]
    m = RatFunc.x()

    sm = stage_m(formulas)
    a = build(fm["a"])
    (p1x, p1y), = sm.points
    out.append(_zero_check("M.P1 on curve", "first point P1 = (m^2-1, m(m^2-1))", sm.residuals()[0]))
    out.append(_eq_check("M.P1.x = a", "forcing a to be an x-coordinate", p1x, a))
    out.append(_square_check("M.a+1 square", "a+1 must be a square", a + 1, m))

    mk = m_of_k(formulas)
    sk = stage_k(formulas)
    out.append(_eq_check("K.d = d_M(m(k))", "stage coherence m -> m(k)",
                         _compose(sm.curve_d, mk), sk.curve_d))
    out.append(_zero_check("K.P1 on curve", "P1 carried to Q(k)", sk.residuals()[0]))
    out.append(_zero_check("K.P2 on curve", "the point P2 on the k-curve", sk.residuals()[1]))
    out.append(_eq_check("K.P2.x = m-1", "second point forced to x = m-1",
                         sk.points[1][0], mk - 1))
    out.append(_square_check("K.m(m+3) square", "m(m+3) = u^2", mk * (mk + 3)))
    # P3 at x = -(m+1): y^2 = (m+1)^2 m (m-3), and m(m-3) = (k-2)^2 * cond / ((k-1)(k+1))^2
    p3x_k = build(fk["P3.x"])
    cond = build(fk["P3.cond"])
    out.append(_eq_check("K.P3.x = -(m+1)", "third point forced to x = -(2k^2-4k+3)/((k-1)(k+1))",
                         p3x_k, -(mk + 1)))
    k = RatFunc.x()
    lhs = p3x_k ** 3 + sk.curve_d
    rhs = (mk + 1) ** 2 * (k - 2) ** 2 / ((k - 1) * (k + 1)) ** 2 * cond
    out.append(_eq_check("K.P3 needs -(2k^2+4k-7) square", "-(2k^2+4k-7) is a perfect square",
                         lhs, rhs))

    try:
        kn = recover_k_of_n(formulas)
    except (NoConsistentRootError, ZeroDivisionError) as exc:
        out.append(IdentityResult("N.k(n) recovered", "k -> n substitution", False, detail=str(exc)))
        kn = None
    if kn is not None:
        out.append(IdentityResult("N.k(n) recovered", "k -> n substitution", True, detail=f"k = {kn}"))
        out.append(_square_check("N.-(2k^2+4k-7) square at k(n)", "-(2k^2+4k-7) is a perfect square",
                                 _compose(cond, kn)))
        out.append(_eq_check("N.d = d_K(k(n))", "stage coherence k -> k(n)",
                             _compose(sk.curve_d, kn), build(fn["d"])))
        out.append(_eq_check("N.P1 = P1_K(k(n))", "stage coherence for P1",
                             _compose(sk.points[0][0], kn), build(fn["P1.x"])))
        out.append(_eq_check("N.P1.y = P1_K.y(k(n))", "stage coherence for P1",
                             _compose(sk.points[0][1], kn), build(fn["P1.y"]), up_to_sign=True))
        out.append(_eq_check("N.P2 = P2_K(k(n))", "stage coherence for P2",
                             _compose(sk.points[1][0], kn), build(fn["P2.x"])))
        out.append(_eq_check("N.P3.x = P3_K.x(k(n))", "x = (n^2-4n+22)(n^2+4n+6)/(4(4+n)(n-2)(n+1))",
                             _compose(p3x_k, kn), build(fn["P3.x"])))

    sn = stage_n(formulas)
    for i, res in enumerate(sn.residuals(), start=1):
        out.append(_zero_check(f"N.P{i} on curve", "the n-curve contains P1, P2, P3", res))
    out.append(_eq_check("N.P1.x^2 = d", "P1.x is a with d = a^2", sn.points[0][0] ** 2, sn.curve_d))
    return out


@dataclass
class Specialization:
    n0: Fraction
    curve: Optional[MordellCurve]
    points: list = field(default_factory=list)
    degenerate: bool = False
    coincident_points: list = field(default_factory=list)
    torsion_hits: list = field(default_factory=list)
    reason: str = ""


@lru_cache(maxsize=1)
def _stage_n_cached() -> FamilyStage:
    return stage_n()


@lru_cache(maxsize=1)
def degenerate_parameters() -> tuple:
    """Rational n where some denominator of the stage-N formulas vanishes, or d(n) = 0."""
    sn = _stage_n_cached()
    bad: set[Fraction] = set()
    funcs = [sn.curve_d] + [c for pt in sn.points for c in pt]
    for f in funcs:
        bad.update(rational_roots(f.den))
    bad.update(rational_roots(sn.curve_d.num))
    return tuple(sorted(bad))


def specialize(n0, stage: Optional[FamilyStage] = None) -> Specialization:
    """Evaluate the stage-N curve and points at ``n0``; bad parameters are flagged."""
    n0 = Fraction(n0)
    sn = stage if stage is not None else _stage_n_cached()
    try:
        d = rf_eval(sn.curve_d, n0)
        coords = [(rf_eval(x, n0), rf_eval(y, n0)) for x, y in sn.points]
    except PoleError:
        return Specialization(n0, None, degenerate=True, reason="degenerate parameter: pole")
    if d == 0:
        return Specialization(n0, None, degenerate=True, reason="degenerate parameter: d = 0")
    E = MordellCurve(d)
    pts = [CurvePoint(E, x, y) for x, y in coords]
    coincident = [(i, j) for i in range(3) for j in range(i + 1, 3) if pts[i].x == pts[j].x]
    torsion = [i for i in range(3) if pts[i].x == 0]
    return Specialization(n0, E, pts, False, coincident, torsion)
