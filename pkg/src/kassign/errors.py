"""Exception hierarchy shared by every kassign module."""


class KAssignError(Exception):
    """Base class for all library errors."""


class DomainError(KAssignError, ValueError):
    """An argument is outside the domain of the operation."""


class EnumerationCapError(DomainError):
    """Brute-force enumeration would exceed the configured cap."""


class ContractViolation(KAssignError, ValueError):
    """An input fails a structural precondition (e.g. not k-reduced)."""


class UnluckyPointError(KAssignError, ZeroDivisionError):
    """A modular evaluation hit a zero denominator; retry with a new point or prime."""


class UncoveredPatternError(KAssignError):
    """No admissible S-set exists for a zero pattern in the exact recursion."""

    def __init__(self, zeros, k):
        self.zeros = tuple(sorted(zeros))
        self.k = k
        super().__init__(f"no S-set case applies to zero pattern {self.zeros} (k={k})")
