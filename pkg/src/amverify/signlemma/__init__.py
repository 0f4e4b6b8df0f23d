"""Sign assignments on the 56 lines and exhaustive verification of the
conic-bundle sign lemma."""

from .encoding import SignAssignment, canonicalize, orbit, orbit_size
from .kernels import BACKEND
from .search import (
    STRATEGIES,
    StrategyDisagreement,
    VerificationReport,
    case_m2_to_5,
    case_m6,
    case_m7,
    conclusion_holds,
    cross_check,
    is_hypothesis_satisfying,
    mixed_profile,
    verify_lemma,
)

__all__ = [
    "BACKEND",
    "STRATEGIES",
    "SignAssignment",
    "StrategyDisagreement",
    "VerificationReport",
    "canonicalize",
    "case_m2_to_5",
    "case_m6",
    "case_m7",
    "conclusion_holds",
    "cross_check",
    "is_hypothesis_satisfying",
    "mixed_profile",
    "orbit",
    "orbit_size",
    "verify_lemma",
]
