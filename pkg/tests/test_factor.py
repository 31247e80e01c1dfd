import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from mordell.factor import FactorizationTimeout, factorize, is_probable_prime, pollard_brent, valuation


def test_known_factorizations():
    assert factorize(157351936) == [(2, 16), (7, 4)]
    assert factorize(378081) == [(3, 3), (11, 1), (19, 1), (67, 1)]
    assert factorize(-12) == [(2, 2), (3, 1)]
    assert factorize(1) == []
    with pytest.raises(ValueError):
        factorize(0)


def test_large_semiprime_needs_rho():
    p, q = 1000000007, 998244353
    assert factorize(p * q) == [(q, 1), (p, 1)]
    p, q = 2**61 - 1, 10**12 + 39
    assert factorize(p * q * q) == sorted([(p, 1), (q, 2)])


def test_pollard_brent_is_deterministic():
    n = 1000000007 * 998244353
    assert pollard_brent(n, seed=3) == pollard_brent(n, seed=3)


def test_budget_exhaustion():
    n = (2**61 - 1) * (2**89 - 1)
    with pytest.raises(FactorizationTimeout) as exc:
        factorize(n, budget=1000)
    assert exc.value.composite == n


def test_primality():
    assert is_probable_prime(2**127 - 1)
    assert not is_probable_prime(3215031751)  # strong pseudoprime to bases 2, 3, 5, 7
    assert not is_probable_prime(1) and is_probable_prime(2)


def test_valuation():
    assert valuation(157351936, 2) == 16
    assert valuation(157351936, 7) == 4
    with pytest.raises(ValueError):
        valuation(0, 2)


@settings(max_examples=200, deadline=None)
@given(st.integers(min_value=1, max_value=10**24))
def test_matches_sympy(n):
    assert factorize(n) == sorted(sympy.factorint(n).items())


@settings(max_examples=300, deadline=None)
@given(st.integers(min_value=0, max_value=10**18))
def test_primality_matches_sympy(n):
    assert is_probable_prime(n) == sympy.isprime(n)
