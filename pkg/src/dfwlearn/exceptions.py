"""Exception types raised across the package."""


class DimensionError(ValueError):
    """Shapes of atoms, targets or iterates do not agree."""


class NumericalError(ArithmeticError):
    """A solver produced a non-finite objective or gap."""


class ProtocolError(RuntimeError):
    """The simulated distributed protocol reached an inconsistent state."""
