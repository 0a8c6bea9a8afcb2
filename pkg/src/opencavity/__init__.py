"""Damped single-mode cavity as an open quantum system.

Master-equation integration in truncated Fock space, the equivalent
Ornstein-Uhlenbeck process for the P-function, a discretized Sz.-Nagy
dilation of the damping contraction, and the Weyl-operator transition
semigroup, each usable as a numerical check on the others.
"""

__version__ = "0.1.0"

from .fock import CavityParams, REFERENCE  # noqa: E402

__all__ = ["CavityParams", "REFERENCE", "__version__"]
