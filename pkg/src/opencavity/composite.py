"""System + bath composites at finite dimension.

Tensor ordering is system-slow, bath-fast everywhere: the composite index
is ``i_s * dim_b + i_b``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, PreconditionError
from .fock import _check_square

__all__ = [
    "CompositeDims",
    "DensityOperator",
    "tensor",
    "partial_trace_bath",
    "heisenberg_transition",
    "idempotence_defect",
]

HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-10
POSITIVITY_TOL = -1e-8
UNITARY_TOL = 1e-10


@dataclass(frozen=True)
class CompositeDims:
    dim_s: int
    dim_b: int

    def __post_init__(self):
        if self.dim_s < 2 or self.dim_b < 2:
            raise DimensionError(f"both factors need dimension >= 2, got {self}")

    @property
    def total(self) -> int:
        return self.dim_s * self.dim_b


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """Validated density matrix: Hermitian, unit trace, positive semidefinite.

    ``trace_tol`` is exposed because integrators report trace drift at a
    looser level (1e-8) than freshly prepared states.
    """

    matrix: np.ndarray
    trace_tol: float = TRACE_TOL

    def __post_init__(self):
        m = np.array(_check_square(self.matrix, "density matrix"), dtype=complex)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        if np.max(np.abs(m - m.conj().T), initial=0.0) > HERMITIAN_TOL:
            raise PreconditionError("density matrix is not Hermitian")
        if abs(np.trace(m) - 1) > self.trace_tol:
            raise PreconditionError(f"density matrix has trace {np.trace(m).real:.12g}")
        if min_eigenvalue(m) < POSITIVITY_TOL:
            raise PreconditionError("density matrix has a negative eigenvalue")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def pure(cls, psi) -> "DensityOperator":
        psi = np.asarray(psi, dtype=complex)
        return cls(np.outer(psi, psi.conj()))

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)


def min_eigenvalue(m: np.ndarray) -> float:
    h = 0.5 * (m + m.conj().T)
    return float(np.linalg.eigvalsh(h)[0])


def tensor(a, b) -> np.ndarray:
    a = _check_square(a, "A")
    b = _check_square(b, "B")
    return np.kron(a, b)


def _as_matrix(rho) -> np.ndarray:
    return np.asarray(getattr(rho, "matrix", rho))


def partial_trace_bath(rho, dims: CompositeDims):
    """Trace out the bath factor.

    Returns a :class:`DensityOperator` when given one; a plain array input
    (e.g. an arbitrary operator) gives a plain array back.
    """
    m = _as_matrix(rho)
    if m.shape != (dims.total, dims.total):
        raise DimensionError(f"operator shape {m.shape} does not match {dims}")
    out = np.einsum("ajbj->ab", m.reshape(dims.dim_s, dims.dim_b, dims.dim_s, dims.dim_b))
    if isinstance(rho, DensityOperator):
        return DensityOperator(out)
    return out


def heisenberg_transition(E, U, rho_b, dims: CompositeDims) -> np.ndarray:
    """Reduced Heisenberg image ``Tr_b(U^dag (E x 1) U (1 x rho_b))``.

    This is the adjoint of the Schrodinger-picture map
    ``rho_s -> Tr_b(U (rho_s x rho_b) U^dag)``; the output depends on the
    initial bath state.
    """
    E = _check_square(E, "E")
    U = _check_square(U, "U")
    rb = _as_matrix(rho_b)
    if E.shape[0] != dims.dim_s or rb.shape != (dims.dim_b, dims.dim_b):
        raise DimensionError("E / rho_b do not match the composite dimensions")
    if U.shape[0] != dims.total:
        raise DimensionError(f"U has shape {U.shape}, expected {dims.total}")
    if np.linalg.norm(U.conj().T @ U - np.eye(dims.total), 2) > UNITARY_TOL:
        raise PreconditionError("U is not unitary within 1e-10")
    heis = U.conj().T @ np.kron(E, np.eye(dims.dim_b)) @ U
    return partial_trace_bath(heis @ np.kron(np.eye(dims.dim_s), rb), dims)


def idempotence_defect(F) -> float:
    """Spectral norm of ``F @ F - F``; zero exactly for projectors."""
    F = _check_square(F, "F")
    return float(np.linalg.norm(F @ F - F, 2))
