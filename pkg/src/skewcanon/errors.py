"""Exception hierarchy.

Input problems derive from :class:`InputError` (CLI exit code 1); numerical
ambiguity in float mode raises :class:`NumericalFailure` (exit code 2).
"""


class SkewCanonError(Exception):
    """Base class for every error raised by this package."""


class InputError(SkewCanonError, ValueError):
    """The input violates a stated invariant."""


class NotSymmetric(InputError):
    pass


class DegenerateForm(InputError):
    pass


class NotSkewadjoint(InputError):
    pass


class NotInvariant(InputError):
    pass


class DegenerateRestriction(InputError):
    pass


class SingularMatrix(InputError):
    pass


class NoSolution(InputError):
    pass


class UnsupportedField(InputError):
    """Exact mode needs every spectral parameter to be rational."""


class NotSkewSpectrum(InputError):
    """The minimal polynomial lacks the +/- pairing of a skewadjoint operator."""


class FormatError(InputError):
    """A pair, report or spec file does not follow its schema."""


class NumericalFailure(SkewCanonError, ArithmeticError):
    """A float-mode rank or clustering decision could not be made safely."""
