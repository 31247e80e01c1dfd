"""Canonical (Neron-Tate) heights, height pairings and regulators on Mordell curves.

Normalization.  Local heights follow the model-independent convention fixed
by the duplication law::

    lambda_v(2P) = 4 lambda_v(P) - 2 log|psi_2(P)|_v + (1/2) log|Delta|_v

so ``h_hat(P) = sum_v lambda_v(P)`` is asymptotic to ``log max(|num x|, |den x|)``.
This is the ``"doubled"`` normalization; ``"halved"`` divides
every height by two.

Archimedean part: Tate's series on the real model ``y^2 = x^3 + sign(D)``
shifted so that every real point has ``x >= 1``.  Non-archimedean part:
closed forms for nonsingular reduction and for additive reduction on a model
minimal at ``p``; at a prime where the integral model is not minimal the
height is pulled back from a multiple ``mP`` of nonsingular reduction via the
division polynomial ``psi_m``.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional

import mpmath

from .curve import CurvePoint, MordellCurve, add, scalar_mul
from .factor import RHO_BUDGET, factorize
from .linalg import jacobi_eigenvalues, lu_det

NORMALIZATIONS = ("doubled", "halved")
DEFAULT_NORMALIZATION = "doubled"
INDEPENDENCE_THRESHOLD = Fraction(1, 10**4)
GUARD_DIGITS = 15
MAX_TATE_ITERATIONS = 10_000
MAX_MULTIPLIER = 72


class NonConvergenceError(ArithmeticError):
    pass


class HeightContext:
    """Working precision, normalization flag and a shared factorization memo."""

    def __init__(self, precision: int = 50, normalization: str = DEFAULT_NORMALIZATION,
                 rho_budget: int = RHO_BUDGET):
        if precision < 20:
            raise ValueError("precision must be at least 20 digits")
        if normalization not in NORMALIZATIONS:
            raise ValueError(f"unknown normalization {normalization!r}")
        self.precision = precision
        self.normalization = normalization
        self.rho_budget = rho_budget
        self.factor_cache: dict[int, tuple] = {}
        self._lock = threading.Lock()
        self.mp = mpmath.MPContext()
        self.mp.dps = precision + GUARD_DIGITS

    def factor(self, n: int) -> tuple:
        n = abs(n)
        cached = self.factor_cache.get(n)
        if cached is not None:
            return cached
        fac = tuple(factorize(n, self.rho_budget))
        with self._lock:
            self.factor_cache[n] = fac
        return fac

    def clone(self) -> "HeightContext":
        other = HeightContext(self.precision, self.normalization, self.rho_budget)
        other.factor_cache = dict(self.factor_cache)
        return other

    def __getstate__(self):
        return {"precision": self.precision, "normalization": self.normalization,
                "rho_budget": self.rho_budget, "factor_cache": dict(self.factor_cache)}

    def __setstate__(self, state):
        self.__init__(state["precision"], state["normalization"], state["rho_budget"])
        self.factor_cache = state["factor_cache"]


# -- integral model -------------------------------------------------------------

@dataclass(frozen=True)
class IntegralModel:
    """``Y^2 = X^3 + D`` with ``x = X/u^2``, ``y = Y/u^3``; D sixth-power free."""

    D: int
    u: Fraction
    prime_factors_of_disc: tuple  # ((p, v_p(Delta)), ...) with Delta = -432 D^2

    @property
    def curve(self) -> MordellCurve:
        return MordellCurve(Fraction(self.D))

    @property
    def discriminant(self) -> int:
        return -432 * self.D * self.D

    @property
    def bad_primes(self) -> tuple:
        return tuple(p for p, _ in self.prime_factors_of_disc)

    def to_model(self, P: CurvePoint) -> CurvePoint:
        E = self.curve
        if P.is_infinity:
            return E.infinity
        return CurvePoint(E, P.x * self.u ** 2, P.y * self.u ** 3)

    def from_model(self, Q: CurvePoint, E: MordellCurve) -> CurvePoint:
        if Q.is_infinity:
            return E.infinity
        return CurvePoint(E, Q.x / self.u ** 2, Q.y / self.u ** 3)


def integralize(E: MordellCurve, ctx: Optional[HeightContext] = None) -> IntegralModel:
    """Scale ``E`` to the unique integral model with sixth-power-free D."""
    factor = ctx.factor if ctx is not None else (lambda n: tuple(factorize(n)))
    d = E.d
    exps: dict[int, int] = {}
    for p, e in factor(d.numerator):
        exps[p] = exps.get(p, 0) + e
    for p, e in factor(d.denominator):
        exps[p] = exps.get(p, 0) - e
    u = Fraction(1)
    D = 1 if d > 0 else -1
    for p, e in exps.items():
        u *= Fraction(p) ** (-(e // 6))
        D *= p ** (e % 6)
    disc: dict[int, int] = {2: 4, 3: 3}
    for p, e in exps.items():
        r = e % 6
        if r:
            disc[p] = disc.get(p, 0) + 2 * r
    return IntegralModel(D, u, tuple(sorted(disc.items())))


# -- naive height ---------------------------------------------------------------

def naive_height(P: CurvePoint, ctx: Optional[HeightContext] = None):
    """``log max(|num x|, |den x|)``."""
    if P.is_infinity:
        raise ValueError("naive height of the point at infinity")
    mp = ctx.mp if ctx is not None else mpmath.mp
    return mp.log(max(abs(P.x.numerator), P.x.denominator))


# -- archimedean local height -----------------------------------------------------

def local_height_arch(M: IntegralModel, P: CurvePoint, ctx: HeightContext):
    """Archimedean local height of an affine point on the integral model.

    Uses the real model ``y^2 = (x - r)^3 + s`` with ``s = sign(D)``, reached
    by ``x = X/|D|^(1/3) + r``; local heights do not depend on the model.
    """
    if P.is_infinity:
        raise ValueError("local height at infinity is undefined")
    mp = ctx.mp
    s = 1 if M.D > 0 else -1
    r = 2 if s > 0 else 0  # real points then have x >= 1
    scale = mp.cbrt(abs(M.D))
    x = mp.mpf(P.x.numerator) / P.x.denominator / scale + r
    b2 = -12 * r
    b4 = 6 * r * r
    b6 = 4 * (s - r ** 3)
    b8 = 3 * r ** 4 - 12 * r * s
    log_delta = mp.log(432)

    t = 1 / x
    total = mp.mpf(0)
    weight = mp.mpf(1)
    cutoff = mp.mpf(10) ** (-ctx.precision - 10)
    bound = mp.mpf(1)
    for _ in range(MAX_TATE_ITERATIONS):
        t2 = t * t
        w = 4 * t + b2 * t2 + 2 * b4 * t2 * t + b6 * t2 * t2
        z = 1 - b4 * t2 - 2 * b6 * t2 * t - b8 * t2 * t2
        lz = mp.log(abs(z))
        total += weight * lz
        bound = max(bound, abs(lz))
        weight /= 4
        if weight * bound * 4 < cutoff:
            break
        t = w / z
    else:
        raise NonConvergenceError("Tate series did not converge; check precision settings")
    return mp.log(abs(x)) + total / 4 - log_delta / 6


# -- non-archimedean local heights ------------------------------------------------

def _val(q: Fraction, p: int) -> int:
    if q == 0:
        raise ValueError("valuation of zero")
    v = 0
    a, b = q.numerator, q.denominator
    while a % p == 0:
        a //= p
        v += 1
    while b % p == 0:
        b //= p
        v -= 1
    return v


def _pole_order(x: Fraction, p: int) -> int:
    """``max(0, -v_p(x))``, with ``x = 0`` counted as integral."""
    return max(0, -_val(x, p)) if x else 0


def _nonsingular_reduction(D: int, P: CurvePoint, p: int) -> bool:
    if _pole_order(P.x, p):
        return True
    dx = 3 * P.x * P.x
    dy = 2 * P.y
    return (dx != 0 and _val(dx, p) <= 0) or (dy != 0 and _val(dy, p) <= 0)


@lru_cache(maxsize=4096)
def is_minimal_at(D: int, p: int) -> bool:
    """Whether ``y^2 = x^3 + D`` (D sixth-power free) is minimal at ``p``.

    Only 2 and 3 can fail; there we search for an integral change of
    variables with ``u = p`` (``r mod p^2``, ``s mod p``, ``t mod p^3`` suffice).
    """
    if p >= 5:
        return True
    p2, p3, p4, p6 = p ** 2, p ** 3, p ** 4, p ** 6
    for s in range(p):
        if (2 * s) % p:
            continue
        for r in range(p2):
            if (3 * r - s * s) % p2:
                continue
            for t in range(p3):
                if (2 * t) % p3:
                    continue
                if (3 * r * r - 2 * s * t) % p4:
                    continue
                if (D + r ** 3 - t * t) % p6 == 0:
                    return False
    return True


def psi_values(D: int, P: CurvePoint, m: int) -> dict:
    """Division polynomials ``psi_k`` of ``y^2 = x^3 + D`` evaluated at P, ``0 <= k <= m``."""
    x, y = P.x, P.y
    psi = {0: Fraction(0), 1: Fraction(1), 2: 2 * y,
           3: 3 * x ** 4 + 12 * D * x,
           4: 4 * y * (x ** 6 + 20 * D * x ** 3 - 8 * D * D)}

    def get(k):
        if k in psi:
            return psi[k]
        j = k // 2
        if k % 2:
            val = get(j + 2) * get(j) ** 3 - get(j - 1) * get(j + 1) ** 3
        else:
            val = get(j) * (get(j + 2) * get(j - 1) ** 2 - get(j - 2) * get(j + 1) ** 2) / (2 * y)
        psi[k] = val
        return val

    for k in range(5, m + 1):
        get(k)
    return {k: psi[k] for k in range(m + 1)}


def local_height_nonarch(M: IntegralModel, P: CurvePoint, p: int, ctx: Optional[HeightContext] = None) -> Fraction:
    """``lambda_p(P) / log p`` as an exact rational, for P affine on the integral model."""
    if P.is_infinity:
        raise ValueError("local height at infinity is undefined")
    D = M.D
    vdisc = _val(Fraction(M.discriminant), p)
    if _nonsingular_reduction(D, P, p):
        return Fraction(_pole_order(P.x, p)) + Fraction(vdisc, 6)
    if is_minimal_at(D, p):
        # additive reduction (c4 = 0 for every Mordell curve)
        B = _val(2 * P.y, p) if P.y else None
        psi3 = 3 * P.x ** 4 + 12 * D * P.x
        C = _val(psi3, p) if psi3 else None
        if B is None:
            return -Fraction(C, 4) + Fraction(vdisc, 6)
        if C is None or C >= 3 * B:
            return -Fraction(2 * B, 3) + Fraction(vdisc, 6)
        return -Fraction(C, 4) + Fraction(vdisc, 6)
    return local_height_nonarch_by_multiple(M, P, p)


def local_height_nonarch_by_multiple(M: IntegralModel, P: CurvePoint, p: int) -> Fraction:
    """``lambda_p(P) / log p`` from the first multiple ``mP`` with nonsingular reduction.

    ``lambda(mP) = m^2 lambda(P) - 2 log|psi_m(P)|_p + (m^2 - 1)/6 log|Delta|_p``.
    Valid on any integral model, minimal or not.
    """
    D = M.D
    E = M.curve
    vdisc = _val(Fraction(M.discriminant), p)
    Q = P
    psi = None
    for m in range(2, MAX_MULTIPLIER + 1):
        Q = add(E, Q, P)
        if Q.is_infinity:
            continue
        if _nonsingular_reduction(D, Q, p):
            if psi is None or m not in psi:
                psi = psi_values(D, P, max(m, 2 * MAX_MULTIPLIER // 3))
            lam_mq = Fraction(_pole_order(Q.x, p)) + Fraction(vdisc, 6)
            return (lam_mq - 2 * _val(psi[m], p) + Fraction((m * m - 1) * vdisc, 6)) / (m * m)
    raise NonConvergenceError(f"no multiple mP with m <= {MAX_MULTIPLIER} has nonsingular reduction at {p}")


# -- canonical height --------------------------------------------------------------

def is_torsion(E: MordellCurve, P: CurvePoint) -> bool:
    """Torsion on a Mordell curve over Q has order dividing 6."""
    return scalar_mul(E, 6, P).is_infinity


def _model_for(E: MordellCurve, ctx: HeightContext) -> IntegralModel:
    key = ("model", E.d)
    cached = ctx.factor_cache.get(key)
    if cached is None:
        cached = integralize(E, ctx)
        with ctx._lock:
            ctx.factor_cache[key] = cached
    return cached


def height_on_model(M: IntegralModel, Q: CurvePoint, ctx: HeightContext):
    """Sum of local heights of Q on the integral model, doubled convention."""
    mp = ctx.mp
    total = local_height_arch(M, Q, ctx)
    den = Q.x.denominator
    for p in M.bad_primes:
        total += local_height_nonarch(M, Q, p, ctx) * mp.log(p)
        while den % p == 0:
            den //= p
    # at primes of good reduction only the denominator of x contributes
    return total + mp.log(den)


def canonical_height(E: MordellCurve, P: CurvePoint, ctx: HeightContext, detect_torsion: bool = True):
    mp = ctx.mp
    if P.is_infinity:
        return mp.mpf(0)
    if detect_torsion and is_torsion(E, P):
        return mp.mpf(0)
    M = _model_for(E, ctx)
    h = height_on_model(M, M.to_model(P), ctx)
    if ctx.normalization == "halved":
        h /= 2
    return h


def doubling_limit_height(E: MordellCurve, P: CurvePoint, N: int = 5, ctx: Optional[HeightContext] = None):
    """Coarse independent estimate ``h(x(2^N P)) / 4^N`` (doubled normalization)."""
    mp = ctx.mp if ctx is not None else mpmath.mp
    Q = P
    for _ in range(N):
        Q = add(E, Q, Q)
        if Q.is_infinity:
            return mp.mpf(0)
    h = naive_height(Q, ctx) / mp.mpf(4) ** N
    if ctx is not None and ctx.normalization == "halved":
        h /= 2
    return h


def nt_pairing(E: MordellCurve, P: CurvePoint, Q: CurvePoint, ctx: HeightContext, heights: Optional[dict] = None):
    """``<P, Q> = (h(P+Q) - h(P) - h(Q)) / 2``."""
    def h(R):
        if heights is not None:
            if R not in heights:
                heights[R] = canonical_height(E, R, ctx)
            return heights[R]
        return canonical_height(E, R, ctx)

    return (h(add(E, P, Q)) - h(P) - h(Q)) / 2


@dataclass
class GramReport:
    matrix: list
    regulator: object
    eigenvalues: list
    min_eigenvalue: object
    rank_lower_bound: int
    threshold: Fraction = INDEPENDENCE_THRESHOLD


def gram_matrix(E: MordellCurve, points, ctx: HeightContext, heights: Optional[dict] = None) -> list:
    heights = {} if heights is None else heights
    r = len(points)
    G = [[None] * r for _ in range(r)]
    for i in range(r):
        for j in range(i, r):
            if i == j:
                if points[i] not in heights:
                    heights[points[i]] = canonical_height(E, points[i], ctx)
                G[i][i] = heights[points[i]]
            else:
                G[i][j] = G[j][i] = nt_pairing(E, points[i], points[j], ctx, heights)
    return G


def gram_report(G, ctx: HeightContext) -> GramReport:
    mp = ctx.mp
    eig = jacobi_eigenvalues(G, mp)
    thr = mp.mpf(INDEPENDENCE_THRESHOLD.numerator) / INDEPENDENCE_THRESHOLD.denominator
    return GramReport(G, lu_det(G, mp), eig, eig[0], sum(1 for e in eig if e > thr))


def gram_regulator(E: MordellCurve, points, ctx: HeightContext, heights: Optional[dict] = None) -> GramReport:
    if not points:
        raise ValueError("need at least one point")
    return gram_report(gram_matrix(E, list(points), ctx, heights), ctx)
