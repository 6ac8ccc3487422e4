"""Exception hierarchy.

Every error raised by the package derives from :class:`ChanqueryError` so
callers (and the CLI) can map failures to exit codes without catching
unrelated exceptions.
"""


class ChanqueryError(Exception):
    """Base class for all package errors."""


class ValidationError(ChanqueryError, ValueError):
    """An input violated a structural invariant.

    The message always names the invariant, e.g. ``"not Hermitian"`` or
    ``"Kraus completeness"``.
    """

    def __init__(self, invariant: str, detail: str = ""):
        self.invariant = invariant
        msg = invariant if not detail else f"{invariant}: {detail}"
        super().__init__(msg)


class DomainError(ChanqueryError, ValueError):
    """A parameter lies outside the region where a formula is valid."""


class CapacityError(ChanqueryError, MemoryError):
    """A requested computation exceeds a configured size budget."""


class SingularSupportError(ChanqueryError, ValueError):
    """An operation needed a positive definite argument."""


class NumericalLimitError(ChanqueryError, ArithmeticError):
    """A limiting procedure did not converge to the requested tolerance."""


class SolverError(ChanqueryError, RuntimeError):
    """A numerical solver failed to certify its answer."""
