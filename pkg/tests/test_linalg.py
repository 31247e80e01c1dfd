from fractions import Fraction

import mpmath
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from mordell.linalg import jacobi_eigenvalues, lu_det

mp = mpmath.MPContext()
mp.dps = 50

entries = st.integers(-10**6, 10**6).map(lambda v: Fraction(v, 1000))


@st.composite
def symmetric(draw, size=st.integers(1, 7)):
    n = draw(size)
    a = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            a[i][j] = a[j][i] = draw(entries)
    return a


def test_small_examples():
    assert lu_det([[2, 1], [1, 3]], mp) == 5
    assert lu_det([[0, 1], [1, 0]], mp) == -1
    assert lu_det([[1, 2], [2, 4]], mp) == 0
    ev = jacobi_eigenvalues([[2, 1], [1, 2]], mp)
    assert abs(ev[0] - 1) < mp.mpf(10) ** -45 and abs(ev[1] - 3) < mp.mpf(10) ** -45


def test_diagonal_and_empty():
    assert jacobi_eigenvalues([[3, 0], [0, -1]], mp) == [-1, 3]
    assert lu_det([], mp) == 1


@settings(max_examples=80, deadline=None)
@given(symmetric())
def test_against_mpmath(a):
    M = mp.matrix([[mp.mpf(v.numerator) / v.denominator for v in row] for row in a])
    ref_ev = sorted(mp.eigh(M, eigvals_only=True))
    ev = jacobi_eigenvalues(a, mp)
    scale = max(1, max(abs(v) for v in ref_ev))
    assert all(abs(x - y) <= mp.mpf(10) ** -40 * scale for x, y in zip(ev, ref_ev))
    exact = sympy.Matrix([[sympy.Rational(v.numerator, v.denominator) for v in row] for row in a]).det()
    ref_det = mp.mpf(exact.p) / exact.q
    assert abs(lu_det(a, mp) - ref_det) <= mp.mpf(10) ** -40 * max(1, abs(ref_det), scale ** len(a))


@settings(max_examples=40, deadline=None)
@given(symmetric())
def test_det_is_product_of_eigenvalues(a):
    ev = jacobi_eigenvalues(a, mp)
    prod = mp.fprod(ev)
    scale = max([1] + [abs(v) for v in ev]) ** len(a)
    assert abs(prod - lu_det(a, mp)) <= mp.mpf(10) ** -40 * scale
