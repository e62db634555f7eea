"""Exception types shared across the package."""

from __future__ import annotations

import math


class DicksonError(Exception):
    """Base class for every error raised by this package."""

    code = "error"


class NonCoprimeModuli(DicksonError, ValueError):
    code = "non-coprime-moduli"

    def __init__(self, first: int, second: int):
        self.pair = (first, second)
        super().__init__(f"moduli {first} and {second} share the factor "
                         f"{math.gcd(first, second)}")


class NonCoprime(DicksonError, ValueError):
    code = "non-coprime"


class FactorizationTooHard(DicksonError):
    code = "factorization-too-hard"


class ParseError(DicksonError, ValueError):
    code = "parse"

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)


class ValidationError(DicksonError, ValueError):
    code = "validation"


class ArityMismatch(DicksonError, ValueError):
    code = "arity-mismatch"


class DomainViolation(DicksonError, ValueError):
    code = "domain-violation"


class NotAdmissible(DicksonError):
    code = "not-admissible"

    def __init__(self, report):
        self.report = report
        super().__init__(f"system has fixed prime divisor {report.obstruction_prime}")


class Inconclusive(DicksonError):
    """Witness search hit its cap without deciding the modulus."""

    code = "inconclusive"

    def __init__(self, m: int, cap: int):
        self.m = m
        self.cap = cap
        super().__init__(f"no witness for m={m} within coordinate cap {cap}; "
                         "search region is unbounded")


class BudgetExceeded(DicksonError):
    code = "budget"

    def __init__(self, message: str, partial=None):
        self.partial = partial
        super().__init__(message)


class UnderivableBox(DicksonError, ValueError):
    code = "underivable-box"


class CounterexampleFound(DicksonError):
    code = "counterexample"

    def __init__(self, m: int, unconstrained_witness=None):
        self.m = m
        self.unconstrained_witness = unconstrained_witness
        if unconstrained_witness is None:
            detail = "no witness exists at all for this modulus"
        else:
            detail = ("a witness exists without the congruence, at point "
                      f"{unconstrained_witness.point}")
        super().__init__(f"m={m} has no congruence-constrained witness ({detail})")


class PreconditionViolated(DicksonError, ValueError):
    code = "precondition"

    def __init__(self, message: str, row: int | None = None):
        self.row = row
        super().__init__(message)


class ResidueSearchFailed(DicksonError):
    code = "residue-search-failed"

    def __init__(self, p: int):
        self.p = p
        super().__init__(f"no admissible residue modulo {p}")

