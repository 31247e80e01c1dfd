"""Integer factorization: trial division, Miller-Rabin and Pollard rho (Brent)."""
from __future__ import annotations

import random
from functools import lru_cache
from math import gcd, isqrt

TRIAL_LIMIT = 10**6
RHO_BUDGET = 10**8

# Deterministic Miller-Rabin witnesses for n < 3.3e24.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


class FactorizationTimeout(RuntimeError):
    def __init__(self, composite: int, budget: int):
        super().__init__(f"Pollard rho exceeded {budget} iterations on composite {composite}")
        self.composite = composite
        self.budget = budget


@lru_cache(maxsize=1)
def _small_primes() -> tuple:
    sieve = bytearray([1]) * (TRIAL_LIMIT + 1)
    sieve[0] = sieve[1] = 0
    for i in range(2, isqrt(TRIAL_LIMIT) + 1):
        if sieve[i]:
            sieve[i * i :: i] = bytearray(len(range(i * i, TRIAL_LIMIT + 1, i)))
    return tuple(i for i, flag in enumerate(sieve) if flag)


def is_probable_prime(n: int) -> bool:
    """Strong probable-prime test; deterministic below 3.3e24."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    bases = _MR_BASES
    if n >= 3317044064679887385961981:
        rng = random.Random(n)
        bases = _MR_BASES + tuple(rng.randrange(2, n - 1) for _ in range(20))
    for a in bases:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def pollard_brent(n: int, budget: int = RHO_BUDGET, seed: int = 0) -> int:
    """A nontrivial factor of the odd composite ``n``.

    Brent's cycle detection with batched gcds.  Deterministic for a given
    ``seed``; a failed run restarts with the next polynomial constant.
    """
    if n % 2 == 0:
        return 2
    rng = random.Random(seed ^ n)
    used = 0
    batch = 128
    while used < budget:
        y = rng.randrange(1, n)
        c = rng.randrange(1, n)
        g = r = q = 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(batch, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = gcd(q, n)
                k += batch
            used += r
            r *= 2
            if used >= budget:
                break
        if g == n:
            # backtrack one step at a time from the last saved position
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = gcd(abs(x - ys), n)
        if 1 < g < n:
            return g
    raise FactorizationTimeout(n, budget)


def factorize(n: int, budget: int = RHO_BUDGET) -> list[tuple[int, int]]:
    """Prime factorization of ``|n|`` as sorted ``(prime, exponent)`` pairs."""
    if n == 0:
        raise ValueError("cannot factor 0")
    n = abs(n)
    found: dict[int, int] = {}
    for p in _small_primes():
        if p * p > n:
            break
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            found[p] = e
    stack = [n] if n > 1 else []
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_probable_prime(m):
            found[m] = found.get(m, 0) + 1
            continue
        r = isqrt(m)
        if r * r == m:
            stack.extend((r, r))
            continue
        f = pollard_brent(m, budget)
        stack.extend((f, m // f))
    return sorted(found.items())


def valuation(n: int, p: int) -> int:
    """p-adic valuation of a nonzero integer."""
    if n == 0:
        raise ValueError("valuation of 0 is infinite")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v
