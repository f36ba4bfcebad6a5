class DomainError(ValueError):
    """Input outside the domain of an operation (unknown element, mismatch, ...)."""


class CapacityError(RuntimeError):
    """A configured size cap would be exceeded."""


class NumericError(ArithmeticError):
    """A numerical evaluation produced a non-finite value."""
