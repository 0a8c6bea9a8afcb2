"""Heisenberg-picture field and quadratures, represented by their moments.

The operator-valued noise is handled in the weak sense only: mean and
variance. With ``d eta = (d eta_1 + i d eta_2) / 2`` and the complex Wiener
covariances, the Hermitian components have ``<d eta_j^2> = 2 dt``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError
from .fock import CavityParams

__all__ = [
    "QuadratureMoments",
    "quadrature_mean",
    "quadrature_noise_variance",
    "quadrature_moments",
    "field_mean",
    "noise_variance_monte_carlo",
]


@dataclass(frozen=True)
class QuadratureMoments:
    t: float
    q_mean: float
    p_mean: float
    q_var: float
    p_var: float

    def __post_init__(self):
        if self.q_var < 0 or self.p_var < 0:
            raise PreconditionError("variances must be non-negative")


def _check_t(t):
    if t < 0:
        raise PreconditionError("t must be >= 0")


def quadrature_mean(t: float, q0: float, p0: float, params: CavityParams) -> tuple[float, float]:
    """Damped harmonic rotation of the quadrature means."""
    _check_t(t)
    g, w, m = params.g, params.omega, params.mass
    damp = math.exp(-g * t)
    c, s = math.cos(w * t), math.sin(w * t)
    q = damp * (q0 * c + p0 / (m * w) * s)
    p = damp * (p0 * c - m * w * q0 * s)
    return q, p


def quadrature_noise_variance(t: float, params: CavityParams) -> tuple[float, float]:
    """Variance of the noise integrals in Q(t) and P(t).

    Each is ``kappa exp(-2gt) int_0^t exp(2g s) 2 (cos^2 + sin^2) ds``,
    i.e. ``(kappa / g)(1 - exp(-2gt))``. The noise bracket is read as already
    in Q units, so hbar, m and omega do not enter.
    """
    _check_t(t)
    g, k = params.g, params.kappa
    var = 2.0 * k * t if g == 0 else k / g * -math.expm1(-2.0 * g * t)
    return var, var


def quadrature_moments(t: float, q0: float, p0: float, params: CavityParams) -> QuadratureMoments:
    q, p = quadrature_mean(t, q0, p0, params)
    qv, pv = quadrature_noise_variance(t, params)
    return QuadratureMoments(t, q, p, qv, pv)


def field_mean(t: float, a0_mean: complex, params: CavityParams) -> complex:
    """Mean of the Heisenberg field: the noise integrals average to zero."""
    _check_t(t)
    return complex(a0_mean) * complex(np.exp(-(params.g + 1j * params.omega) * t))


def noise_variance_monte_carlo(
    t: float,
    params: CavityParams,
    n_paths: int = 100_000,
    dt: float = 1e-2,
    seed: int = 0,
    chunk: int = 10_000,
):
    """Sample the discretized noise integrals with classical Gaussians.

    ``d eta_1, d eta_2 ~ N(0, 2 dt)`` independently; the deterministic
    weights are evaluated at step midpoints. Returns
    ``(q_var, p_var, q_se, p_se)`` where the standard errors are those of the
    sample variances.
    """
    _check_t(t)
    n = max(1, int(round(t / dt)))
    h = t / n
    s = (np.arange(n) + 0.5) * h
    g, w = params.g, params.omega
    env = math.sqrt(params.kappa) * np.exp(g * (s - t))
    cw, sw = env * np.cos(w * (t - s)), env * np.sin(w * (t - s))
    rng = np.random.default_rng(seed)
    q_parts, p_parts = [], []
    done = 0
    while done < n_paths:
        m = min(chunk, n_paths - done)
        e1 = rng.normal(0.0, math.sqrt(2 * h), (m, n))
        e2 = rng.normal(0.0, math.sqrt(2 * h), (m, n))
        q_parts.append(e1 @ cw + e2 @ sw)
        p_parts.append(e2 @ cw - e1 @ sw)
        done += m
    q = np.concatenate(q_parts)
    p = np.concatenate(p_parts)
    out = []
    for x in (q, p):
        d2 = (x - x.mean()) ** 2
        out.append((d2.sum() / (len(x) - 1), d2.std(ddof=1) / math.sqrt(len(x))))
    (qv, qse), (pv, pse) = out
    return qv, pv, qse, pse
