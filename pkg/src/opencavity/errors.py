"""Exception types shared across the package."""


class DimensionError(ValueError):
    """Operand shapes are invalid or do not match."""


class PreconditionError(ValueError):
    """An input violates a documented precondition."""


class NoSteadyStateError(ValueError):
    """The cavity has net gain (gamma_prime <= kappa), so no stationary state exists."""


class GridAlignmentError(ValueError):
    """A shift time does not fall on the dilation grid."""


class IntegrationDiverged(RuntimeError):
    """A density-matrix snapshot broke one of the state invariants.

    Attributes
    ----------
    time : float
        First recorded time at which the violation was seen.
    invariant : str
        Which check failed (``"hermiticity"``, ``"trace"`` or ``"positivity"``).
    """

    def __init__(self, time, invariant, value):
        self.time = time
        self.invariant = invariant
        self.value = value
        super().__init__(
            f"integration diverged at t={time:.6g}: {invariant} violated (value {value:.3e})"
        )


class TruncationWarning(UserWarning):
    """The Fock truncation is probably too small for the requested amplitude."""
