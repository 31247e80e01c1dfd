"""Determinant and symmetric eigenvalues for small matrices in mpmath precision."""
from __future__ import annotations

from fractions import Fraction

import mpmath


def _to_mp(v, mp):
    if isinstance(v, Fraction):
        return mp.mpf(v.numerator) / v.denominator
    return mp.mpf(v)


def lu_det(matrix, mp=mpmath.mp):
    """Determinant by Gaussian elimination with partial pivoting."""
    a = [[_to_mp(v, mp) for v in row] for row in matrix]
    n = len(a)
    det = mp.mpf(1)
    for col in range(n):
        piv = max(range(col, n), key=lambda r: abs(a[r][col]))
        if a[piv][col] == 0:
            return mp.mpf(0)
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            det = -det
        det *= a[col][col]
        for r in range(col + 1, n):
            f = a[r][col] / a[col][col]
            if f:
                for c in range(col, n):
                    a[r][c] -= f * a[col][c]
    return det


def jacobi_eigenvalues(matrix, mp=mpmath.mp, max_sweeps: int = 100):
    """Eigenvalues of a real symmetric matrix by cyclic Jacobi rotations, ascending."""
    a = [[_to_mp(v, mp) for v in row] for row in matrix]
    n = len(a)
    tol = mp.mpf(10) ** (-(mp.dps - 3))
    for _ in range(max_sweeps):
        off = mp.fsum(a[i][j] ** 2 for i in range(n) for j in range(n) if i != j)
        scale = mp.fsum(a[i][i] ** 2 for i in range(n)) + off
        if off <= tol * tol * (scale if scale else 1):
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                if a[p][q] == 0:
                    continue
                theta = (a[q][q] - a[p][p]) / (2 * a[p][q])
                t = mp.sign(theta) / (abs(theta) + mp.sqrt(theta * theta + 1)) if theta else mp.mpf(1)
                c = 1 / mp.sqrt(t * t + 1)
                s = t * c
                for k in range(n):
                    akp, akq = a[k][p], a[k][q]
                    a[k][p] = c * akp - s * akq
                    a[k][q] = s * akp + c * akq
                for k in range(n):
                    apk, aqk = a[p][k], a[q][k]
                    a[p][k] = c * apk - s * aqk
                    a[q][k] = s * apk + c * aqk
    else:
        raise ArithmeticError("Jacobi iteration did not converge")
    return sorted(a[i][i] for i in range(n))
