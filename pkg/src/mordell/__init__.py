"""A rank-3 family of Mordell curves y^2 = x^3 + d(n) over Q(n).

Exact rational-function algebra proves the family's identities; canonical
heights and regulators certify independence after specialization, and a
sieved point search pushes rank lower bounds further.
"""
from .curve import CurvePoint, MordellCurve, NotOnCurveError
from .family import specialize, verify_all_identities
from .heights import HeightContext, canonical_height, gram_regulator
from .ratfunc import Poly, RatFunc
from .search import SearchConfig, certify_rank, scan

__all__ = [
    "CurvePoint", "MordellCurve", "NotOnCurveError", "specialize", "verify_all_identities",
    "HeightContext", "canonical_height", "gram_regulator", "Poly", "RatFunc",
    "SearchConfig", "certify_rank", "scan",
]
__version__ = "0.1.0"
