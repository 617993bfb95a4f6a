"""Exception hierarchy shared by every module."""


class GeometryError(ValueError):
    """Base class for all geometric precondition failures."""


class DomainError(GeometryError):
    """Point or argument outside the domain of an operation."""


class NonUniqueGeodesicError(GeometryError):
    """Endpoints too far apart for the geodesic to be unique."""


class InfeasibleError(GeometryError):
    """No comparison configuration exists for the given side lengths."""


class OutOfRangeError(GeometryError):
    """Query point too far from a set for its projection to be single valued."""


class DegenerateError(GeometryError):
    """Coincident points where distinct ones are required."""


class ConfigError(ValueError):
    """An experiment configuration violates a stated hypothesis.

    ``hypothesis`` names the violated condition (for example ``"k-bound"``),
    ``pointer`` is a JSON pointer into the offending config when known.
    """

    def __init__(self, message, hypothesis=None, pointer=None):
        super().__init__(message)
        self.hypothesis = hypothesis
        self.pointer = pointer


class InvariantError(RuntimeError):
    """A runtime invariant broke during an iteration run."""

    def __init__(self, message, step=None):
        super().__init__(message)
        self.step = step


class DivergenceError(RuntimeError):
    """A fixed-point oracle failed to contract."""
