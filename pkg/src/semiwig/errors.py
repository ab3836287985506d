"""Exception hierarchy shared by every module."""


class SemiwigError(Exception):
    """Base class for all package errors."""


class GridError(SemiwigError, ValueError):
    """Invalid grid parameters or mismatched grids."""


class ResolutionError(SemiwigError):
    """A grid does not resolve the field it is asked to carry.

    ``required_points`` holds the smallest power-of-two point count that
    would pass the check (``None`` when the domain itself is too small).
    """

    def __init__(self, message, required_points=None, required_half_width=None):
        super().__init__(message)
        self.required_points = required_points
        self.required_half_width = required_half_width


class MarginError(SemiwigError):
    """Field mass leaked into the outer margin of the periodic box."""


class SolverError(SemiwigError):
    """Time stepping failed its conservation gates or produced NaNs."""


class ConfigError(SemiwigError, ValueError):
    """Malformed or inconsistent experiment configuration."""
