"""Complex Ornstein-Uhlenbeck process for the cavity P-function.

The SDE is ``d alpha = -(g + i omega) alpha dt + sqrt(kappa) d eta`` with a
complex Wiener increment satisfying ``<d eta* d eta> = dt`` and
``<d eta d eta> = 0``.

Random numbers
--------------
Trajectory ``k`` of a run seeded with ``master_seed`` draws from
``Generator(PCG64(SeedSequence(master_seed, spawn_key=(k,))))``. Gaussians
come from numpy's ``standard_normal`` (ziggurat). A trajectory draws its
increments in consecutive ``(CHUNK, 2)`` tables of ``[Re, Im]`` pairs,
scaled by ``sqrt(dt/2)``. Trajectories are processed in
fixed blocks of :data:`BLOCK` so the arithmetic does not depend on how many
worker threads are used (``OPENCAVITY_THREADS``).
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import integrate as _quad

from .errors import PreconditionError
from .fock import CavityParams
from .lindblad import IntegratorConfig

__all__ = [
    "Trajectory",
    "Ensemble",
    "EnsembleStats",
    "MomentState",
    "trajectory_rng",
    "wiener_increment",
    "wiener_increments",
    "em_step",
    "exact_sample",
    "analytic_mean",
    "analytic_variance",
    "printed_variance",
    "variance_by_quadrature",
    "simulate_ensemble",
    "ensemble_stats",
    "moment_ode_evolve",
    "moment_ode_rhs",
    "thread_count",
]

BLOCK = 512
CHUNK = 1024
THREADS_ENV = "OPENCAVITY_THREADS"


def trajectory_rng(master_seed: int, index: int) -> np.random.Generator:
    """Independent stream for one trajectory, fixed by ``(master_seed, index)``."""
    if not 0 <= master_seed < 2**64:
        raise PreconditionError("master_seed must be a 64-bit unsigned integer")
    ss = np.random.SeedSequence(int(master_seed), spawn_key=(int(index),))
    return np.random.Generator(np.random.PCG64(ss))


def thread_count() -> int:
    raw = os.environ.get(THREADS_ENV, "")
    try:
        n = int(raw)
    except ValueError:
        n = os.cpu_count() or 1
    return max(1, n)


def wiener_increment(rng: np.random.Generator, dt: float) -> complex:
    """One complex increment: Re and Im i.i.d. N(0, dt/2)."""
    return complex(wiener_increments(rng, dt, 1)[0])


def wiener_increments(rng: np.random.Generator, dt: float, n: int) -> np.ndarray:
    if not dt > 0:
        raise PreconditionError(f"dt must be positive, got {dt}")
    z = rng.standard_normal((n, 2))
    return math.sqrt(0.5 * dt) * (z[:, 0] + 1j * z[:, 1])


def em_step(alpha, dt: float, deta, params: CavityParams):
    """One Euler-Maruyama step. Works elementwise on arrays."""
    if not dt > 0:
        raise PreconditionError(f"dt must be positive, got {dt}")
    return alpha - params.decay * alpha * dt + math.sqrt(params.kappa) * deta


def analytic_mean(alpha0: complex, t, params: CavityParams):
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise PreconditionError("t must be >= 0")
    g, w = params.g, params.omega
    out = alpha0 * np.exp(-g * t) * (np.cos(w * t) - 1j * np.sin(w * t))
    return complex(out) if out.ndim == 0 else out


def analytic_variance(t, params: CavityParams):
    """``(kappa / 2g)(1 - exp(-2 g t))``, the variance ``<|alpha - <alpha>|^2>``.

    For ``g = 0`` (undamped diagnostic mode) this degrades to ``kappa * t``.
    """
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise PreconditionError("t must be >= 0")
    g, k = params.g, params.kappa
    if g == 0:
        out = k * t
    else:
        out = k * (-np.expm1(-2.0 * g * t)) / (2.0 * g)
    return float(out) if out.ndim == 0 else out


def printed_variance(t, params: CavityParams):
    """``(kappa / g)(1 - exp(-g t))``, the closed form as typeset in the source derivation.

    Kept only for comparison tables; it disagrees with the integral it is
    meant to evaluate.
    """
    t = np.asarray(t, dtype=float)
    out = params.kappa / params.g * (-np.expm1(-params.g * t))
    return float(out) if out.ndim == 0 else out


def variance_by_quadrature(t: float, params: CavityParams) -> float:
    """``kappa exp(-2gt) int_0^t exp(2g s) ds`` evaluated by adaptive quadrature."""
    g = params.g
    val, _ = _quad.quad(lambda s: math.exp(2.0 * g * (s - t)), 0.0, t, epsabs=1e-14, epsrel=1e-13)
    return params.kappa * val


def exact_sample(alpha0, t: float, rng: np.random.Generator, params: CavityParams):
    """Draw ``alpha(t)`` given ``alpha(0) = alpha0`` exactly in distribution.

    The stochastic integral is a circular complex Gaussian with variance
    :func:`analytic_variance`; it is drawn in one shot. ``alpha0`` may be an
    array, in which case one sample is drawn per element.
    """
    if t < 0:
        raise PreconditionError("t must be >= 0")
    a0 = np.asarray(alpha0, dtype=complex)
    mean = a0 * np.exp(-params.decay * t)
    if t == 0:
        return complex(a0) if a0.ndim == 0 else a0.copy()
    sd = math.sqrt(0.5 * analytic_variance(t, params))
    z = rng.standard_normal(a0.shape + (2,))
    out = mean + sd * (z[..., 0] + 1j * z[..., 1])
    return complex(out) if out.ndim == 0 else out


@dataclass(frozen=True, eq=False)
class Trajectory:
    times: np.ndarray
    values: np.ndarray
    master_seed: int
    index: int


@dataclass(frozen=True, eq=False)
class Ensemble:
    """Trajectories on a shared grid, stored as a ``(n_traj, n_times)`` array."""

    times: np.ndarray
    values: np.ndarray
    params: CavityParams
    master_seed: int
    method: str

    def __len__(self):
        return self.values.shape[0]

    def __getitem__(self, k) -> Trajectory:
        return Trajectory(self.times, self.values[k], self.master_seed, int(k))

    def __iter__(self):
        return (self[k] for k in range(len(self)))


def _run_block(alpha0, indices, master_seed, dt, n_steps, record, params, method):
    """Simulate trajectories ``indices`` and return values at the ``record`` step indices."""
    nb = len(indices)
    out = np.empty((nb, len(record)), dtype=complex)
    alpha = np.full(nb, alpha0, dtype=complex)
    if method == "exact":
        phase = np.exp(-params.decay * dt)
        sd = math.sqrt(0.5 * analytic_variance(dt, params))
    else:
        lam = params.decay
        sk = math.sqrt(params.kappa)
    scale = sd if method == "exact" else math.sqrt(0.5 * dt)
    rngs = [trajectory_rng(master_seed, k) for k in indices]
    r = 0
    if record[0] == 0:
        out[:, 0] = alpha
        r = 1
    for start in range(0, n_steps, CHUNK):
        m = min(CHUNK, n_steps - start)
        noise = np.stack([g.standard_normal((m, 2)) for g in rngs]) * scale
        deta = noise[..., 0] + 1j * noise[..., 1]
        for j in range(m):
            if method == "exact":
                alpha = phase * alpha + deta[:, j]
            else:
                # same operation order as em_step
                alpha = alpha - lam * alpha * dt + sk * deta[:, j]
            if r < len(record) and record[r] == start + j + 1:
                out[:, r] = alpha
                r += 1
    return out


def simulate_ensemble(
    alpha0: complex,
    cfg: IntegratorConfig,
    n_traj: int,
    seed: int,
    params: CavityParams,
    method: str = "euler-maruyama",
    threads: int | None = None,
) -> Ensemble:
    """Sample ``n_traj`` paths on the grid of ``cfg``.

    ``method`` is ``"euler-maruyama"`` or ``"exact"`` (exact Gaussian
    transitions between grid points). Output is bitwise reproducible for a
    given ``(seed, cfg, method, params)`` and independent of ``threads``.
    """
    if method not in ("euler-maruyama", "exact"):
        raise PreconditionError(f"unknown method {method!r}")
    if n_traj < 1:
        raise PreconditionError("n_traj must be >= 1")
    times = cfg.times()
    record = np.rint(times / cfg.dt).astype(int)
    n_steps = cfg.n_steps
    blocks = [range(s, min(s + BLOCK, n_traj)) for s in range(0, n_traj, BLOCK)]
    args = (seed, cfg.dt, n_steps, record, params, method)
    workers = thread_count() if threads is None else max(1, int(threads))
    if workers == 1 or len(blocks) == 1:
        parts = [_run_block(alpha0, b, *args) for b in blocks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda b: _run_block(alpha0, b, *args), blocks))
    values = np.concatenate(parts, axis=0)
    return Ensemble(times=times, values=values, params=params, master_seed=seed, method=method)


@dataclass(frozen=True)
class EnsembleStats:
    times: np.ndarray
    mean: np.ndarray
    variance: np.ndarray
    mean_se: np.ndarray
    variance_se: np.ndarray


def ensemble_stats(ens) -> EnsembleStats:
    """Per-time sample mean and variance of ``|alpha - mean|^2`` with standard errors.

    The variance uses the 1/(N-1) estimator; its standard error is the
    sample standard deviation of ``|alpha - mean|^2`` over ``sqrt(N)``. The
    mean's standard error is ``sqrt(variance / N)``. A single trajectory
    reports zero variance and zero errors.
    """
    values = np.asarray(getattr(ens, "values", ens))
    times = getattr(ens, "times", np.arange(values.shape[-1]))
    if values.ndim == 1:
        values = values[None, :]
    n = values.shape[0]
    if n == 0:
        raise PreconditionError("empty ensemble")
    # sequential sum over trajectories in index order
    mean = values.sum(axis=0) / n
    if n == 1:
        zeros = np.zeros(values.shape[1])
        return EnsembleStats(times, mean, zeros, zeros.copy(), zeros.copy())
    dev2 = np.abs(values - mean) ** 2
    var = dev2.sum(axis=0) / (n - 1)
    var_se = dev2.std(axis=0, ddof=1) / math.sqrt(n)
    return EnsembleStats(times, mean, var, np.sqrt(var / n), var_se)


@dataclass(frozen=True)
class MomentState:
    """First moment ``<alpha>`` and raw second moment ``<|alpha|^2>`` of the P-function."""

    m1: complex
    m2: float

    def __post_init__(self):
        if self.m2 < abs(self.m1) ** 2 - 1e-12:
            raise PreconditionError("m2 must be >= |m1|^2")

    @property
    def variance(self) -> float:
        return self.m2 - abs(self.m1) ** 2


def moment_ode_rhs(m1: complex, m2: float, params: CavityParams) -> tuple[complex, float]:
    """Moment equations implied by the Fokker-Planck generator.

    Integrating the drift and diffusion terms by parts gives
    ``d<alpha>/dt = -(g + i omega)<alpha>`` and
    ``d<|alpha|^2>/dt = -2g <|alpha|^2> + kappa``.
    """
    return -params.decay * m1, -2.0 * params.g * m2 + params.kappa


def moment_ode_evolve(m0: MomentState, t: float, params: CavityParams) -> MomentState:
    if t < 0:
        raise PreconditionError("t must be >= 0")
    if t == 0:
        return m0
    decay = math.exp(-2.0 * params.g * t)
    m1 = m0.m1 * complex(np.exp(-params.decay * t))
    m2 = decay * m0.m2 + analytic_variance(t, params)
    return MomentState(m1, m2)
