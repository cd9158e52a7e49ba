"""Exception hierarchy.

Every error raised by the library derives from :class:`HyperCSFError`.  The two
intermediate classes decide the CLI exit code: :class:`InputError` maps to 2,
:class:`NumericalError` to 3.
"""


class HyperCSFError(Exception):
    pass


class InputError(HyperCSFError, ValueError):
    pass


class NumericalError(HyperCSFError, ArithmeticError):
    pass


class ZeroVector(InputError):
    pass


class NonPositiveRate(InputError):
    pass


class NotOnHyperboloid(InputError):
    pass


class NotOnInvariantSet(InputError):
    pass


class InvalidSheet(InputError):
    pass


class IncompatiblePair(InputError):
    pass


class KindMismatch(InputError):
    pass


class StepTooLarge(InputError):
    pass


class TooFewPoints(InputError):
    pass


class TooFewSamples(InputError):
    pass


class WindowTooShort(InputError):
    pass


class OutsideDisk(InputError):
    pass


class BoundaryPole(InputError):
    pass


class ToleranceNotMet(NumericalError):
    pass


class InvariantBlowup(NumericalError):
    pass


class DegenerateConstruction(NumericalError):
    pass


class MultipleCriticalPoints(NumericalError):
    pass
