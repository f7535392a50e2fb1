"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: ``BudgetError`` subclasses exit with 2,
``PreconditionError`` subclasses with 3.
"""

from __future__ import annotations


class GspSieveError(Exception):
    """Base class for every error raised by this package."""


class BudgetError(GspSieveError):
    """A configured cap (element budget, field size, prime limit) was hit."""


class PreconditionError(GspSieveError):
    """A mathematical precondition of an operation does not hold."""


# modarith
class NonCoprimeModuli(PreconditionError):
    pass


class ZeroPolynomial(PreconditionError):
    pass


class ConstantPolynomial(PreconditionError):
    pass


# symplectic
class NotSymplectic(PreconditionError):
    pass


class NotADivisor(PreconditionError):
    pass


class NotInvertible(PreconditionError):
    pass


class UnsupportedModulus(PreconditionError):
    pass


# grouplab
class CapExceeded(BudgetError):
    def __init__(self, cap: int, partial: int):
        super().__init__(f"closure exceeded cap {cap} (at least {partial} elements)")
        self.cap = cap
        self.partial = partial


class UnsupportedSize(PreconditionError):
    pass


# curves
class BadReduction(PreconditionError):
    pass


class FieldTooLarge(BudgetError):
    pass


# galois
class Reducible(PreconditionError):
    pass


class PrecisionFailure(PreconditionError):
    pass


class NotReciprocal(PreconditionError):
    pass


class WitnessNotFound(PreconditionError):
    def __init__(self, pattern: tuple[int, ...], bound: int):
        super().__init__(f"no prime <= {bound} realizes pattern {'+'.join(map(str, pattern))}")
        self.pattern = pattern
        self.bound = bound


# certify
class NoD4PrimeFound(PreconditionError):
    def __init__(self, limit: int):
        super().__init__(f"no good prime <= {limit} with D4 Frobenius polynomial")
        self.limit = limit


class ZeroPoint(PreconditionError):
    pass


# sieve
class EmptyFamily(PreconditionError):
    pass


class SingularModel(PreconditionError):
    """The model y^2 = f(x) has deg f < 3 or disc(f) = 0."""


class NotD4(PreconditionError):
    """The Frobenius quartic does not have Galois group D4."""
