"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class CapabilityError(ValueError):
    """The request is valid but exceeds a documented support limit."""


class NumericalIntegrityError(ArithmeticError):
    """A computed quantity violates an invariant it must satisfy analytically."""


class DegenerateLikelihoodError(RuntimeError):
    """The likelihood carries no information about the phase in the bracket."""
