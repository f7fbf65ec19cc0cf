"""Exception types raised across the package."""


class FormatError(ValueError):
    """A text input (curve, density, map, or spec file) is malformed."""


class ValidationError(ValueError):
    """A value violates a structural invariant of its type."""


class GenericityError(ValueError):
    """An operation requiring a certified-generic curve got something else."""


class InconsistencyError(RuntimeError):
    """An internal cross-check failed; indicates a construction bug."""


class RealizationError(ValueError):
    """A requested area vector cannot be realized with the given base form."""
