"""Point search on specialized curves and certified rank lower bounds."""
from __future__ import annotations

import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from math import isqrt
from typing import Optional

import mpmath
import numpy as np

from .curve import CurvePoint, MordellCurve
from .family import specialize
from .heights import (
    GramReport,
    HeightContext,
    IntegralModel,
    _model_for,
    gram_matrix,
    gram_report,
)

log = logging.getLogger(__name__)

# A is enumerated only in residue classes mod WHEEL where A^3 + D b^6 is a square
# modulo every factor of WHEEL; survivors are then filtered by FILTER_PRIMES.
WHEEL_MODULI = (64, 63, 65, 11)
WHEEL = 64 * 63 * 65 * 11
FILTER_PRIMES = (17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71)
CHUNK = 1 << 20


def _square_table(q: int) -> np.ndarray:
    t = np.zeros(q, dtype=bool)
    t[(np.arange(q, dtype=np.int64) ** 2) % q] = True
    return t


_SQUARES = {q: _square_table(q) for q in WHEEL_MODULI + FILTER_PRIMES}


def _admissible(q: int, c: int) -> np.ndarray:
    """Mask over residues a mod q with a^3 + c a square mod q."""
    a = np.arange(q, dtype=np.int64)
    return _SQUARES[q][(a * a % q * a + c % q) % q]


def _wheel_residues(c: int) -> np.ndarray:
    r = np.arange(WHEEL, dtype=np.int64)
    keep = np.ones(WHEEL, dtype=bool)
    for q in WHEEL_MODULI:
        keep &= _admissible(q, c)[r % q]
    return r[keep]


class DegenerateParameterError(ValueError):
    pass


@dataclass(frozen=True)
class SearchConfig:
    denom_bound: int = 30
    numer_bound: int = 10**6
    time_budget: float = 600.0

    def __post_init__(self):
        if self.denom_bound < 1 or self.numer_bound < 1:
            raise ValueError("search bounds must be >= 1")
        if self.time_budget <= 0:
            raise ValueError("time budget must be positive")


class PointList(list):
    """List of points found by :func:`search_points`; ``truncated`` marks a budget stop."""

    truncated: bool = False


def _candidates(lo: int, hi: int, b: int, Db6: int):
    """Yield arrays of A in [lo, hi] surviving the residue sieve for this b."""
    res = _wheel_residues(Db6)
    if res.size == 0:
        return
    filters = [(q, _admissible(q, Db6)) for q in FILTER_PRIMES]
    per_block = max(1, CHUNK // res.size)
    k = lo // WHEEL
    k_end = hi // WHEEL
    while k <= k_end:
        ks = np.arange(k, min(k + per_block, k_end + 1), dtype=np.int64)
        A = (ks[:, None] * WHEEL + res[None, :]).ravel()
        A = A[(A >= lo) & (A <= hi)]
        for q, mask in filters:
            A = A[mask[A % q]]
        if b > 1:
            A = A[np.gcd(A, b) == 1]
        if A.size:
            yield A
        k += per_block


def search_points(M: IntegralModel, cfg: SearchConfig) -> PointList:
    """Rational points ``(A/b^2, B/b^3)`` on ``Y^2 = X^3 + D`` with ``b <= denom_bound``, ``|A| <= numer_bound``.

    One point per ``{P, -P}`` pair (the one with ``B >= 0``), in order of
    increasing ``b`` then ``A``.
    """
    D = M.D
    E = M.curve
    out = PointList()
    start = time.monotonic()
    cbrt_neg_d = -mpmath.cbrt(D) if D > 0 else mpmath.cbrt(-D)
    for b in range(1, cfg.denom_bound + 1):
        b2 = b * b
        b6 = b2 ** 3
        # A^3 + D b^6 >= 0  =>  A >= cbrt(-D) b^2
        lo = max(-cfg.numer_bound, int(mpmath.floor(cbrt_neg_d * b2)) - 1)
        if lo > cfg.numer_bound:
            continue
        Db6 = D * b6
        for A in _candidates(lo, cfg.numer_bound, b, Db6):
            if time.monotonic() - start > cfg.time_budget:
                out.truncated = True
                log.warning("point search stopped at b=%d: time budget exhausted", b)
                return out
            for a in A.tolist():
                v = a ** 3 + Db6
                if v < 0:
                    continue
                r = isqrt(v)
                if r * r == v:
                    out.append(CurvePoint(E, Fraction(a, b2), Fraction(r, b2 * b)))
    return out


@dataclass
class RankCertificate:
    n0: Fraction
    curve: MordellCurve
    points: list
    gram: GramReport
    rank_lower_bound: int
    candidates_tried: int = 0
    search_truncated: bool = False


def certify_points(E: MordellCurve, start: list, candidates: list, ctx: HeightContext) -> tuple:
    """Greedy independent subset of ``start + candidates``; returns ``(basis, report, tried)``."""
    heights: dict = {}
    basis: list = []
    report: Optional[GramReport] = None
    tried = 0
    seen_x = set()
    for P in list(start) + list(candidates):
        if P.is_infinity or P.x == 0:
            continue  # (0, +-sqrt(d)) is 3-torsion
        if P.x in seen_x:
            continue
        seen_x.add(P.x)
        tried += 1
        trial = basis + [P]
        rep = gram_report(gram_matrix(E, trial, ctx, heights), ctx)
        if rep.rank_lower_bound == len(trial):
            basis, report = trial, rep
    if report is None:
        report = gram_report([[ctx.mp.mpf(0)]], ctx) if not basis else report
    return basis, report, tried


def certify_rank(n0, cfg: SearchConfig, ctx: HeightContext) -> RankCertificate:
    sp = specialize(n0)
    if sp.degenerate:
        raise DegenerateParameterError(f"degenerate parameter n = {sp.n0}: {sp.reason}")
    E = sp.curve
    M = _model_for(E, ctx)
    found = search_points(M, cfg)
    candidates = [M.from_model(Q, E) for Q in found]
    basis, report, tried = certify_points(E, sp.points, candidates, ctx)
    return RankCertificate(sp.n0, E, basis, report, report.rank_lower_bound if basis else 0,
                           tried, found.truncated)


@dataclass
class ScanEntry:
    n0: Fraction
    certificate: Optional[RankCertificate] = None
    error: str = ""
    elapsed: float = 0.0


def _scan_one(args) -> ScanEntry:
    n0, cfg, ctx = args
    t0 = time.monotonic()
    try:
        cert = certify_rank(n0, cfg, ctx)
        return ScanEntry(Fraction(n0), cert, "", time.monotonic() - t0)
    except DegenerateParameterError:
        log.info("skipping n = %s: degenerate parameter", n0)
        return ScanEntry(Fraction(n0), None, "degenerate parameter", time.monotonic() - t0)
    except Exception as exc:  # per-item failures must not abort the scan
        log.exception("scan failed at n = %s", n0)
        return ScanEntry(Fraction(n0), None, f"{type(exc).__name__}: {exc}", time.monotonic() - t0)


# Reals from a private MPContext do not pickle; workers ship raw mpf tuples.
def _pack_gram(g: GramReport) -> GramReport:
    raw = lambda v: v._mpf_
    return GramReport([[raw(v) for v in row] for row in g.matrix], raw(g.regulator),
                      [raw(v) for v in g.eigenvalues], raw(g.min_eigenvalue), g.rank_lower_bound, g.threshold)


def _unpack_gram(g: GramReport, mp) -> GramReport:
    real = mp.make_mpf
    return GramReport([[real(v) for v in row] for row in g.matrix], real(g.regulator),
                      [real(v) for v in g.eigenvalues], real(g.min_eigenvalue), g.rank_lower_bound, g.threshold)


def _scan_one_packed(args) -> ScanEntry:
    entry = _scan_one(args)
    if entry.certificate is not None:
        entry.certificate.gram = _pack_gram(entry.certificate.gram)
    return entry


def scan(n_list, cfg: SearchConfig, ctx: HeightContext, jobs: int = 1) -> list[ScanEntry]:
    """Certify every n in ``n_list``; results come back in input order."""
    items = [(Fraction(n), cfg, ctx.clone()) for n in n_list]
    if jobs <= 1 or len(items) <= 1:
        return [_scan_one(it) for it in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        entries = list(pool.map(_scan_one_packed, items))
    for e in entries:
        if e.certificate is not None:
            e.certificate.gram = _unpack_gram(e.certificate.gram, ctx.mp)
    return entries
