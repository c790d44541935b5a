"""Minimum k-assignments of exponential random matrices: solvers, exact
expectations, closed-form formulas, Monte Carlo estimates and identity checks."""

from .arith import DEFAULT_PRIME, Dual, DualRational, ModScalar, Rational, binomial
from .assignment import Flag, min_k_bruteforce, min_k_incremental, participates
from .errors import (
    ContractViolation,
    DomainError,
    EnumerationCapError,
    KAssignError,
    UncoveredPatternError,
    UnluckyPointError,
)
from .expectation import expected_min_exact, find_S
from .formulas import FORMS, contribution, cs_formula, f_main, parisi
from .reduction import k_reduce, lambda_mu, vij_decompose

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_PRIME", "Dual", "DualRational", "ModScalar", "Rational", "binomial",
    "Flag", "min_k_bruteforce", "min_k_incremental", "participates",
    "ContractViolation", "DomainError", "EnumerationCapError", "KAssignError",
    "UncoveredPatternError", "UnluckyPointError",
    "expected_min_exact", "find_S",
    "FORMS", "contribution", "cs_formula", "f_main", "parisi",
    "k_reduce", "lambda_mu", "vij_decompose",
]
