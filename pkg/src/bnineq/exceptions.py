"""Error types shared across the package.

The CLI maps these onto its exit codes: :class:`InputError` becomes exit
code 2, :class:`NumericalError` becomes exit code 3.
"""


class InputError(ValueError):
    """Invalid argument, malformed file, or violated precondition."""


class NumericalError(RuntimeError):
    """Numerical failure: solver non-convergence, or a spectrum so far out
    of range that it signals a bug upstream rather than roundoff."""
