"""Exception types shared across the canonicalization modules."""


class DegenerateInputError(ValueError):
    """The canonical element is not unique on this input.

    Raised instead of silently picking an orientation: the invariance
    guarantee of an orbit map only holds off the degenerate set.
    """


class DegenerateOrientationError(DegenerateInputError):
    """Gradient integral too small to select a rotation."""


class DegenerateSpectrumError(DegenerateInputError):
    """Singular-value gap too small to identify principal axes."""


class AmbiguousSignError(DegenerateInputError):
    """Sign-fixing entry too small to orient a principal axis."""


class DegenerateScaleError(DegenerateInputError):
    """Average point radius too small to normalize scale."""
