"""Weyl operators and the quasi-free transition semigroup of the cavity.

Convention: ``W(z) = exp(z a - conj(z) a^dag)``. Under this convention the
composition law reads ``W(f) W(h) = exp(-i Im<f, h>) W(f + h)`` with the
pairing ``<f, h> = f * conj(h)`` on K = C (linear in the first slot).

The semigroup acts on labels as ``T_t W(z) = c_t(z) W(C_t z)`` with
``C_t z = exp(-(g + i omega) t) z`` and
``c_t(z) = exp((exp(-2gt) - 1) |z|^2 / 2)``.

Truncated Weyl matrices are only trustworthy on the low part of the Fock
ladder, so operator distances use :func:`opencavity.fock.resolved_norm`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError
from .fock import (
    CavityParams,
    annihilation,
    check_truncation,
    creation,
    matrix_exp,
    resolved_norm,
)
from .lindblad import LindbladModel, integrate_adjoint

__all__ = [
    "SemigroupImage",
    "weyl_operator",
    "ccr_phase",
    "ccr_residual",
    "semigroup_on_label",
    "semigroup_image_matrix",
    "semigroup_law_residual",
    "lindblad_channel_crosscheck",
    "recover_ladder",
    "ladder_errors",
]


@dataclass(frozen=True)
class SemigroupImage:
    coefficient: float
    label: complex


def weyl_operator(z: complex, dim: int) -> np.ndarray:
    check_truncation(z, dim)
    a = annihilation(dim)
    return matrix_exp(z * a - np.conj(z) * creation(dim))


def ccr_phase(f: complex, h: complex) -> complex:
    """``exp(-i Im(f conj(h)))``, the scalar in ``W(f) W(h) = phase * W(f + h)``."""
    return complex(np.exp(-1j * (f * np.conj(h)).imag))


def ccr_residual(f: complex, h: complex, dim: int, size: int | None = None) -> float:
    """Distance between ``W(f) W(h)`` and ``phase * W(f + h)`` on the resolved levels."""
    lhs = weyl_operator(f, dim) @ weyl_operator(h, dim)
    rhs = ccr_phase(f, h) * weyl_operator(f + h, dim)
    return resolved_norm(lhs - rhs, size)


def _contract(z: complex, t: float, params: CavityParams) -> complex:
    return complex(np.exp(-(params.g + 1j * params.omega) * t) * z)


def semigroup_on_label(z: complex, t: float, params: CavityParams) -> SemigroupImage:
    if t < 0:
        raise PreconditionError("t must be >= 0")
    coef = math.exp(0.5 * math.expm1(-2.0 * params.g * t) * abs(z) ** 2)
    return SemigroupImage(coef, _contract(z, t, params))


def semigroup_image_matrix(z: complex, t: float, dim: int, params: CavityParams) -> np.ndarray:
    img = semigroup_on_label(z, t, params)
    return img.coefficient * weyl_operator(img.label, dim)


def semigroup_law_residual(t: float, s: float, z: complex, params: CavityParams) -> float:
    """Mismatch between ``T_{t+s}`` and ``T_s`` after ``T_t`` on a label."""
    direct = semigroup_on_label(z, t + s, params)
    first = semigroup_on_label(z, t, params)
    second = semigroup_on_label(first.label, s, params)
    return abs(direct.coefficient - first.coefficient * second.coefficient) + abs(direct.label - second.label)


def lindblad_channel_crosscheck(
    z: complex,
    t: float,
    dim: int,
    params: CavityParams,
    dt: float = 1e-3,
    size: int | None = None,
) -> float:
    """Distance between the RK4-evolved Heisenberg image of ``W(z)`` and the closed form.

    Only the noiseless cavity (``kappa = 0``) has a closed-form Weyl image.
    """
    if params.kappa != 0:
        raise PreconditionError("the Weyl closed form needs kappa = 0")
    model = LindbladModel(params, dim)
    evolved = integrate_adjoint(model, weyl_operator(z, dim), t, dt)
    return resolved_norm(evolved - semigroup_image_matrix(z, t, dim, params), size)


def recover_ladder(t: float, dim: int, params: CavityParams, h: float = 1e-3):
    """Ladder operators at time ``t`` from Wirtinger derivatives of ``T_t W(z)`` at 0.

    With ``W(z) = exp(z a - conj(z) a^dag)`` the annihilator is the
    ``d/dz`` derivative and the creator is ``-d/d conj(z)``. Both are taken
    by central differences along the real and imaginary axes, so the error
    is O(h^2).
    """
    if t < 0:
        raise PreconditionError("t must be >= 0")
    if not 1e-4 <= h <= 1e-2:
        raise PreconditionError("h must lie in [1e-4, 1e-2]")

    def F(z):
        return semigroup_image_matrix(z, t, dim, params)

    dx = (F(h) - F(-h)) / (2 * h)
    dy = (F(1j * h) - F(-1j * h)) / (2 * h)
    d_z = 0.5 * (dx - 1j * dy)
    d_zbar = 0.5 * (dx + 1j * dy)
    return d_z, -d_zbar


def ladder_errors(t: float, dim: int, params: CavityParams, h: float = 1e-3, size: int | None = None):
    """Distances of :func:`recover_ladder` output from the closed-form ``a(t)``, ``a^dag(t)``."""
    a_t, ad_t = recover_ladder(t, dim, params, h)
    c = complex(np.exp(-(params.g + 1j * params.omega) * t))
    return (
        resolved_norm(a_t - c * annihilation(dim), size),
        resolved_norm(ad_t - np.conj(c) * creation(dim), size),
    )
