"""Exception hierarchy.

The CLI maps :class:`InputError` subclasses to exit status 2 and
:class:`InvariantFailure` to exit status 3.
"""


class DiffnError(Exception):
    pass


class InputError(DiffnError, ValueError):
    """Malformed or inconsistent input supplied by the caller."""


class DimensionError(InputError):
    pass


class FieldMismatch(InputError):
    pass


class DegreeMismatch(InputError):
    pass


class NotContained(InputError):
    pass


class NilpotencyError(InputError):
    pass


class NotAMorphism(InputError):
    pass


class NotExact(InputError):
    pass


class NotAugmented(InputError):
    pass


class NotIdempotent(InputError):
    pass


class OutOfRange(InputError):
    pass


class FormatError(InputError):
    """A DFN-1 file that cannot be parsed."""


class InvariantFailure(DiffnError, AssertionError):
    """A mathematically guaranteed identity failed at runtime."""
