"""Single-mode truncated Fock space.

Operators are dense ``complex128`` arrays on the basis ``|0>, ..., |dim-1>``.
Units default to hbar = m = 1; every rate shares the inverse-time unit of
``omega``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DimensionError, PreconditionError, TruncationWarning

__all__ = [
    "CavityParams",
    "annihilation",
    "creation",
    "number",
    "coherent_state",
    "matrix_exp",
    "expectation",
    "check_truncation",
    "resolved_norm",
    "resolved_size",
]


@dataclass(frozen=True)
class CavityParams:
    """Physical constants of the single-mode damped cavity.

    Parameters
    ----------
    omega : float
        Mode angular frequency.
    gamma_prime : float
        Loss rate through the partially transparent mirror.
    kappa : float
        Gain (pumping) rate.
    hbar, mass : float
        Default to 1.
    undamped_ok : bool
        Diagnostic switch that lifts the ``gamma_prime > kappa`` requirement,
        e.g. for the closed-system limit ``gamma_prime = kappa = 0``.
    """

    omega: float
    gamma_prime: float
    kappa: float
    hbar: float = 1.0
    mass: float = 1.0
    undamped_ok: bool = False

    def __post_init__(self):
        if not self.omega > 0:
            raise PreconditionError(f"omega must be positive, got {self.omega}")
        if self.kappa < 0 or self.gamma_prime < 0:
            raise PreconditionError("rates must be non-negative")
        if self.hbar <= 0 or self.mass <= 0:
            raise PreconditionError("hbar and mass must be positive")
        if not self.undamped_ok and not self.gamma_prime > self.kappa:
            raise PreconditionError(
                f"need gamma_prime > kappa for a damped cavity "
                f"(got gamma_prime={self.gamma_prime}, kappa={self.kappa})"
            )

    @property
    def g(self) -> float:
        """Net amplitude damping rate (gamma_prime - kappa) / 2."""
        return 0.5 * (self.gamma_prime - self.kappa)

    @property
    def decay(self) -> complex:
        """Complex rate ``g + i*omega`` of the mean amplitude."""
        return complex(self.g, self.omega)


REFERENCE = CavityParams(omega=1.0, gamma_prime=0.5, kappa=0.1)


def _check_dim(dim) -> int:
    if isinstance(dim, bool) or int(dim) != dim or dim < 2:
        raise DimensionError(f"Fock dimension must be an integer >= 2, got {dim!r}")
    return int(dim)


def annihilation(dim: int) -> np.ndarray:
    """Lowering operator with ``a|n> = sqrt(n)|n-1>``."""
    dim = _check_dim(dim)
    return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), 1).astype(complex)


def creation(dim: int) -> np.ndarray:
    return annihilation(dim).conj().T


def number(dim: int) -> np.ndarray:
    dim = _check_dim(dim)
    return np.diag(np.arange(dim, dtype=float)).astype(complex)


def check_truncation(alpha: complex, dim: int) -> bool:
    """Warn when ``|alpha|^2 > dim/4``; returns True if the truncation looks adequate."""
    if abs(alpha) ** 2 > dim / 4:
        warnings.warn(
            f"|alpha|^2 = {abs(alpha) ** 2:.3g} exceeds dim/4 = {dim / 4:.3g}; "
            "truncation error may be significant",
            TruncationWarning,
            stacklevel=3,
        )
        return False
    return True


def coherent_state(alpha: complex, dim: int) -> np.ndarray:
    """Truncated coherent state, renormalized to unit norm.

    Amplitudes are ``exp(-|alpha|^2/2) alpha^n / sqrt(n!)``, built by the
    recurrence ``c_n = c_{n-1} alpha / sqrt(n)`` so no factorial overflows.
    A :class:`TruncationWarning` is emitted when the pre-renormalization norm
    drops below 0.999 or ``|alpha|^2 > dim/4``.
    """
    dim = _check_dim(dim)
    check_truncation(alpha, dim)
    c = np.empty(dim, dtype=complex)
    c[0] = math.exp(-0.5 * abs(alpha) ** 2)
    for n in range(1, dim):
        c[n] = c[n - 1] * alpha / math.sqrt(n)
    norm = np.linalg.norm(c)
    if norm < 0.999:
        warnings.warn(
            f"coherent state norm before renormalization is {norm:.6f}",
            TruncationWarning,
            stacklevel=2,
        )
    return c / norm


def coherent_norm(alpha: complex, dim: int) -> float:
    """Norm of the truncated coherent state before renormalization."""
    dim = _check_dim(dim)
    c = math.exp(-0.5 * abs(alpha) ** 2)
    total = c * c
    for n in range(1, dim):
        c *= abs(alpha) / math.sqrt(n)
        total += c * c
    return math.sqrt(total)


def _check_square(m: np.ndarray, name: str = "matrix") -> np.ndarray:
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {m.shape}")
    return m


def matrix_exp(m: np.ndarray) -> np.ndarray:
    """Matrix exponential (Pade scaling-and-squaring via :func:`scipy.linalg.expm`)."""
    m = _check_square(m)
    if m.shape[0] == 0:
        return m.astype(complex)
    return scipy.linalg.expm(m.astype(complex))


def expectation(op: np.ndarray, rho) -> complex:
    """``tr(rho @ op)``. ``rho`` may be a plain array or a ``DensityOperator``."""
    rho = np.asarray(getattr(rho, "matrix", rho))
    op = _check_square(op, "operator")
    _check_square(rho, "rho")
    if op.shape != rho.shape:
        raise DimensionError(f"operator shape {op.shape} does not match state {rho.shape}")
    # tr(AB) without forming the product
    return complex(np.einsum("ij,ji->", rho, op))


def resolved_size(dim: int) -> int:
    """Number of low Fock levels trusted in truncated-operator comparisons.

    The truncated ladder operators misbehave on the top of the ladder (the
    truncated commutator is ``-(dim-1)`` there), so operator identities such
    as the Weyl composition law fail at O(1) on those levels for every
    ``dim``. Comparisons are made on the lowest ``dim - dim // 4`` levels.
    """
    dim = _check_dim(dim)
    return dim - dim // 4


def resolved_norm(m: np.ndarray, size: int | None = None) -> float:
    """Spectral norm of ``m`` compressed onto the lowest ``size`` Fock levels."""
    m = _check_square(m)
    k = resolved_size(m.shape[0]) if size is None else int(size)
    return float(np.linalg.norm(m[:k, :k], 2))
