"""Exception types shared across the solver."""

from .autodiff.engine import NonFiniteLoss  # noqa: F401  (re-export)


class DomainError(ValueError):
    """Argument outside the physically meaningful range."""


class IncompressibleLimit(ValueError):
    """Poisson ratio at or beyond 0.5: Lame parameter diverges."""


class InvertedElement(RuntimeError):
    """det F <= 0 at a collocation point."""

    def __init__(self, point_index=None, location=None, det=None):
        self.point_index = point_index
        self.location = location
        self.det = det
        where = f" at point {point_index} {location}" if location is not None else ""
        super().__init__(f"non-positive deformation Jacobian{where}: det F = {det}")


class ConfigError(ValueError):
    """Scenario configuration failed validation; carries all messages."""

    def __init__(self, messages):
        self.messages = list(messages)
        super().__init__("invalid configuration:\n  " + "\n  ".join(self.messages))
