"""Exception types shared across the pricing modules."""


class ParameterError(ValueError):
    """A parameter block violates its model invariants."""


class DomainError(ValueError):
    """An argument lies outside the convergence region of a transform."""


class ContourError(ValueError):
    """No admissible integration contour exists for a model/payoff pair."""
