"""Exception hierarchy.

Every error carries a ``code`` used as the process exit status by the CLI:
2 for bad input, 3 for numerical failure.
"""


class EyebandError(Exception):
    code = 1


class InputError(EyebandError, ValueError):
    code = 2


class NumericalError(EyebandError, ArithmeticError):
    code = 3


class EmptyInput(InputError):
    pass


class NonUniformSampling(InputError):
    pass


class OutOfBounds(InputError, IndexError):
    pass


class SpecDoesNotFit(InputError):
    pass


class InvalidCutoff(InputError):
    pass


class InvalidOrder(InputError):
    pass


class InvalidWindow(InputError):
    pass


class OutOfBand(InputError):
    pass


class SeriesTooShort(InputError):
    pass


class ContainsGaps(InputError):
    pass


class SnippetOutOfBounds(OutOfBounds):
    pass


class DegenerateEvent(InputError):
    pass


class LengthMismatch(InputError):
    pass


class NonPositiveData(InputError):
    pass


class NonPositiveFrequency(InputError):
    pass


class SubNyquist(InputError):
    pass


class EmptyGrid(InputError):
    pass


class MixedModels(InputError):
    pass


class MalformedHeader(InputError):
    pass


class EmptyFile(EmptyInput):
    pass


class OffsetBeforeOnset(InputError):
    pass


class RankDeficient(NumericalError):
    pass


class NoConvergence(NumericalError):
    def __init__(self, message, iterations=None, grad_norm=None):
        super().__init__(message)
        self.iterations = iterations
        self.grad_norm = grad_norm


class ZeroVariance(NumericalError):
    pass


class RankDeficientWarning(UserWarning):
    """Collinear regressors; values come from the minimum-norm solution."""
