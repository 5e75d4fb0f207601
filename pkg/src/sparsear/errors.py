"""Exception hierarchy.

Every error carries an ``exit_code`` so the command line front end can map
it to a distinct process status without a lookup table.
"""


class SparseARError(Exception):
    """Base class for all toolkit errors."""

    exit_code = 1


class InvalidFraction(SparseARError, ValueError):
    exit_code = 10


class UnstableModel(SparseARError, ValueError):
    exit_code = 11


class DegenerateSignal(SparseARError, ValueError):
    exit_code = 12


class InvalidOrder(SparseARError, ValueError):
    exit_code = 13


class OrderTooLarge(SparseARError, ValueError):
    exit_code = 14


class SingularSystem(SparseARError, ArithmeticError):
    exit_code = 15


class TooLarge(SparseARError, ValueError):
    exit_code = 16


class OutOfRange(SparseARError, ValueError):
    exit_code = 17


class InvalidSigma(SparseARError, ValueError):
    exit_code = 18


class InvalidConfig(SparseARError, ValueError):
    exit_code = 19


class ParseError(SparseARError, ValueError):
    exit_code = 20

    def __init__(self, message, line=None):
        super().__init__(message)
        self.line = line


class UnsupportedFormat(SparseARError, ValueError):
    exit_code = 21


class SeriesIOError(SparseARError, OSError):
    exit_code = 22


class NonConvergence(UserWarning):
    """Emitted when an IRLS loop exhausts ``max_iter``.

    The fit still returns its best iterate; inspect ``ARModel.converged``.
    """
