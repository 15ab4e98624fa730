"""Exception hierarchy.

Two families matter to callers (and to the CLI exit codes): validation
errors, raised when an input is malformed or violates a precondition, and
budget errors, raised when a computation ran out of precision, extension
degree, truncation or search depth.
"""


class TmodError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(TmodError):
    pass


class BudgetError(TmodError):
    pass


# localfield
class FlavorMismatch(ValidationError):
    pass


class InexactZero(ValidationError):
    pass


class InexactZeroInverse(InexactZero, ZeroDivisionError):
    pass


class PrecisionExhausted(BudgetError):
    pass


# twisted
class DimensionMismatch(ValidationError):
    pass


# tmodule
class NotNilpotent(ValidationError):
    pass


class BadConstantTerm(ValidationError):
    pass


class NoSuchRoot(ValidationError):
    pass


class JSearchExhausted(ValidationError):
    pass


class DependentBasis(ValidationError):
    pass


class Inseparable(ValidationError):
    pass


class ExtensionBudgetExceeded(BudgetError):
    pass


class LiftDivergence(BudgetError):
    pass


# expmap
class SylvesterSingular(ValidationError):
    pass


class ExpDivergence(BudgetError):
    pass


class TruncationInsufficient(BudgetError):
    pass


class ConstantPolynomial(ValidationError):
    pass


class HypothesisFailed(ValidationError):
    pass


# hensel
class EvaluationDivergence(BudgetError):
    pass


class SingularJacobian(ValidationError):
    pass


class HenselConditionFailed(BudgetError):
    def __init__(self, residual_valuation, det_valuation):
        self.residual_valuation = residual_valuation
        self.det_valuation = det_valuation
        super().__init__(
            f"Hensel guard v(F) > 2 v(det J) fails: v(F) = {residual_valuation}, "
            f"v(det J) = {det_valuation}"
        )


class SingularBlock(ValidationError):
    pass


# counting
class BudgetExceeded(BudgetError):
    pass


class KernelEmpty(ValidationError):
    pass


class InsufficientData(ValidationError):
    pass


class ParseError(ValidationError):
    def __init__(self, message, line=None, column=None, source=None):
        self.line = line
        self.column = column
        self.source = source
        where = ""
        if source:
            where += f"{source}:"
        if line is not None:
            where += f"{line}:{column if column is not None else 0}: "
        super().__init__(where + message)
