import json
from fractions import Fraction
from pathlib import Path

import pytest
import sympy
from hypothesis import strategies as st

from mordell.ratfunc import Poly, RatFunc

FIXTURES = Path(__file__).parent / "fixtures"
N = sympy.Symbol("n")

# Exact values at n = 3, as printed alongside the family.
N3_D = Fraction(142945242561, 157351936)
N3_POINTS = [
    (Fraction(378081, 12544), Fraction(236300625, 1404928)),
    (Fraction(-737, 112), Fraction(-313225, 12544)),
    (Fraction(513, 112), Fraction(397575, 12544)),
]
N3_REGULATOR = "83.3621963770719"


def to_sympy(f) -> sympy.Expr:
    if isinstance(f, Poly):
        return sum((sympy.Rational(c.numerator, c.denominator) * N**i for i, c in enumerate(f.coeffs)),
                   sympy.Integer(0))
    return to_sympy(f.num) / to_sympy(f.den)


def from_sympy(expr) -> RatFunc:
    num, den = sympy.fraction(sympy.cancel(sympy.together(expr)))
    conv = lambda e: Poly(Fraction(int(c.p), int(c.q)) for c in reversed(sympy.Poly(e, N).all_coeffs()))
    return RatFunc(conv(num), conv(den))


small_fractions = st.fractions(min_value=-10**6, max_value=10**6, max_denominator=10**6)
polys = st.lists(small_fractions, min_size=0, max_size=6).map(Poly)
nonzero_polys = polys.filter(lambda p: not p.is_zero())
ratfuncs = st.builds(RatFunc, polys, nonzero_polys)


@pytest.fixture(scope="session")
def group_law_fixture():
    return json.loads((FIXTURES / "group_law_n3.json").read_text())


# One line per acceptance criterion, printed at the end of the run.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
