"""Exception hierarchy.

Every error carries a short machine-readable ``code`` used in CLI reports.
Subclasses of :class:`Inconclusive` signal exhausted budgets: the question
was not answered, and nothing may be concluded from the failure.
"""


class SelfAffineError(Exception):
    code = "error"


class ValidationError(SelfAffineError, ValueError):
    code = "validation_error"


class NotInvertible(ValidationError):
    code = "not_invertible"


class DeterminantTooSmall(ValidationError):
    code = "determinant_too_small"


class WrongDigitCount(ValidationError):
    code = "wrong_digit_count"


class ParseError(SelfAffineError, ValueError):
    code = "parse_error"


class Inconclusive(SelfAffineError):
    code = "inconclusive"


class NotCertifiedExpanding(Inconclusive, ValidationError):
    code = "not_certified_expanding"


class BudgetExceeded(Inconclusive):
    code = "budget_exceeded"


class StateBudgetExceeded(BudgetExceeded):
    code = "state_budget_exceeded"

    def __init__(self, message, state_bound=None, explored=None):
        super().__init__(message)
        self.state_bound = state_bound
        self.explored = explored


class DenominatorOverflow(Inconclusive):
    code = "denominator_overflow"


class SearchExhausted(Inconclusive):
    code = "search_exhausted"

    def __init__(self, message, scanned=0):
        super().__init__(message)
        self.scanned = scanned


class InsufficientScales(SelfAffineError, ValueError):
    code = "insufficient_scales"
