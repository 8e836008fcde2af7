from __future__ import annotations


class PgmError(Exception):
    exit_code = 1


class ValidationError(PgmError):
    exit_code = 2


class CertificateFailure(PgmError):
    exit_code = 3


class BudgetExceeded(PgmError):
    exit_code = 4


class MalformedInput(PgmError):
    exit_code = 5


# Coefficient algebras
class NotLocal(ValidationError):
    pass


class NotAssociative(ValidationError):
    pass


class NotCommutative(ValidationError):
    pass


class NonUnit(ValidationError):
    pass


class ZeroInput(ValidationError):
    pass


class UnsupportedCoefficients(MalformedInput):
    pass


# Series arithmetic
class InsufficientPrecision(BudgetExceeded):
    pass


class InsufficientPadicPrecision(InsufficientPrecision):
    pass


class EmptyWindow(InsufficientPrecision):
    pass


class NonUnitLeading(ValidationError):
    pass


class BadInnerValuation(ValidationError):
    pass


# Modules
class NotEtale(ValidationError):
    pass


class CommutationFailure(ValidationError):
    pass


class DeltaOrderFailure(ValidationError):
    pass


class NotContinuous(ValidationError):
    pass


class BoundExceeded(BudgetExceeded):
    pass


# Cohomology
class NotACocycle(ValidationError):
    pass


class NotBlockTriangular(ValidationError):
    pass


class NotALift(ValidationError):
    pass


class StabilizationBudgetExceeded(BudgetExceeded):
    pass


# Rank one
class NoMatch(ValidationError):
    pass


class NotMaximallyNonsplit(ValidationError):
    pass
