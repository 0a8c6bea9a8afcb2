"""Discretized Sz.-Nagy dilation of the cavity contraction.

The dilation space is ``L^2(R, 2g dx)`` with the shift group
``(U_t u)(x) = u(x + t)``, cyclic vector ``v(x) = exp(-(g + i omega) x)`` on
``x >= 0`` (zero on ``x < 0``), ``J(z) = z v`` and ``Pi(u) = <v, u>``. The
commuting diagram is ``Pi(U_t J(z)) = exp(-(g + i omega) t) z``.

Everything the diagram touches lives on the half-line, so vectors are
sampled at ``x_i = i * dx`` for ``i = 0 .. nx-1`` and are taken to vanish
outside ``[0, x_max)``. The inner product is the trapezoid rule over the
full line: the zero sample at ``x = -dx`` and the jump of ``v`` at 0 make
it equal to ``dx * sum(...)``, so the quadrature error is first order
(about ``g dx`` for ``<v, v>``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import GridAlignmentError, PreconditionError
from .fock import CavityParams

__all__ = [
    "DilationGrid",
    "contraction_apply",
    "cyclic_vector",
    "inner_product",
    "embed_J",
    "shift_U",
    "project_Pi",
    "diagram_residual",
    "default_grid",
]


@dataclass(frozen=True)
class DilationGrid:
    x_max: float
    nx: int
    g: float

    def __post_init__(self):
        if not (self.nx >= 2 and self.x_max > 0 and self.g > 0):
            raise PreconditionError(f"invalid grid {self}")
        if self.x_max < 10.0 / (2.0 * self.g):
            raise PreconditionError(
                f"x_max={self.x_max} < 10/(2g)={10 / (2 * self.g):.4g}: tail mass too large"
            )

    @classmethod
    def from_spacing(cls, dx: float, x_max: float, params: CavityParams) -> "DilationGrid":
        return cls(x_max=x_max, nx=int(round(x_max / dx)), g=params.g)

    @property
    def dx(self) -> float:
        return self.x_max / self.nx

    @property
    def weight(self) -> float:
        return 2.0 * self.g

    @property
    def x(self) -> np.ndarray:
        return np.arange(self.nx) * self.dx

    def steps(self, t: float) -> int:
        """Number of grid points in a shift by ``t``; raises if ``t`` is off-grid."""
        if t < 0:
            raise PreconditionError("shift time must be >= 0")
        k = round(t / self.dx)
        if abs(k * self.dx - t) > 1e-9 * max(self.dx, t):
            raise GridAlignmentError(
                f"t={t} is not a multiple of dx={self.dx}; shifts are restricted to grid points"
            )
        return int(k)


def default_grid(params: CavityParams, dx: float = 1e-3) -> DilationGrid:
    return DilationGrid.from_spacing(dx, 20.0 / (2.0 * params.g), params)


def contraction_apply(z: complex, t: float, params: CavityParams) -> complex:
    if t < 0:
        raise PreconditionError("t must be >= 0")
    return complex(z) * math.exp(-params.g * t) * complex(math.cos(params.omega * t), -math.sin(params.omega * t))


def cyclic_vector(grid: DilationGrid, params: CavityParams) -> np.ndarray:
    return np.exp(-(params.g + 1j * params.omega) * grid.x)


def inner_product(u: np.ndarray, w: np.ndarray, grid: DilationGrid) -> complex:
    """``int conj(u) w 2g dx`` by the full-line trapezoid rule (conjugate-linear in ``u``)."""
    u = np.asarray(u)
    w = np.asarray(w)
    if u.shape != (grid.nx,) or w.shape != (grid.nx,):
        raise PreconditionError(f"vectors of shape {u.shape}, {w.shape} do not fit a grid of {grid.nx}")
    return complex(grid.weight * grid.dx * np.vdot(u, w))


def embed_J(z: complex, grid: DilationGrid, params: CavityParams) -> np.ndarray:
    return z * cyclic_vector(grid, params)


def shift_U(u: np.ndarray, t: float, grid: DilationGrid) -> np.ndarray:
    """``u(x + t)``; samples shifted in from beyond ``x_max`` are zero."""
    k = grid.steps(t)
    u = np.asarray(u)
    out = np.zeros_like(u)
    if k < grid.nx:
        out[: grid.nx - k] = u[k:]
    return out


def project_Pi(u: np.ndarray, grid: DilationGrid, params: CavityParams) -> complex:
    return inner_product(cyclic_vector(grid, params), u, grid)


def diagram_residual(z: complex, t: float, grid: DilationGrid, params: CavityParams) -> float:
    """``|Pi(U_t J(z)) - C_t z|``; zero in the continuum limit."""
    lhs = project_Pi(shift_U(embed_J(z, grid, params), t, grid), grid, params)
    return abs(lhs - contraction_apply(z, t, params))
