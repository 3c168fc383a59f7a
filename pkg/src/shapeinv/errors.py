"""Exception types shared across the package."""


class ShapeInvError(Exception):
    """Base class for all library errors."""


class PoleError(ShapeInvError):
    """A closed form was evaluated at (or a grid contains) a singular point."""

    def __init__(self, message, locations=None):
        super().__init__(message)
        self.locations = list(locations) if locations is not None else []


class FamilyError(ShapeInvError):
    """Invalid family parameters or an evaluation outside the parameter domain."""


class OrbitError(ShapeInvError):
    """A ladder step is inadmissible (wrong R sign, or the parameter orbit hits m = 0)."""


class NormalizationError(ShapeInvError):
    """A requested state is not square integrable.

    divergent_end is 'left', 'right', or None when unknown.
    """

    def __init__(self, message, divergent_end=None):
        super().__init__(message)
        self.divergent_end = divergent_end


class GridTooCoarseError(ShapeInvError):
    """The grid cannot resolve the superpotential (h * max|W| too large)."""

    def __init__(self, message, h=None, w_max=None):
        super().__init__(message)
        self.h = h
        self.w_max = w_max


class VerificationError(ShapeInvError):
    """An internal cross-check failed (e.g. node count of a ladder-built state)."""


class BoundaryConditionError(ShapeInvError):
    """A precondition on boundary values was violated."""
