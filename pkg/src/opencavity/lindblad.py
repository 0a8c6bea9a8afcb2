"""Master equation of the damped single-mode cavity.

The generator is ``-(i/hbar)[H, rho] + D[c1] rho + D[c2] rho`` with
``H = hbar*omega*a^dag a``, ``c1 = sqrt(gamma') a`` (loss) and
``c2 = sqrt(kappa) a^dag`` (gain). Time stepping is classical fixed-step RK4.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .composite import DensityOperator, HERMITIAN_TOL, POSITIVITY_TOL, min_eigenvalue
from .errors import DimensionError, IntegrationDiverged, NoSteadyStateError, PreconditionError
from .fock import CavityParams, _check_dim, annihilation, creation

__all__ = [
    "LindbladModel",
    "IntegratorConfig",
    "Evolution",
    "dissipator",
    "rhs",
    "adjoint_rhs",
    "integrate",
    "integrate_adjoint",
    "rk4_step",
    "steady_photon_number",
    "default_dim",
]

TRACE_DRIFT_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class LindbladModel:
    params: CavityParams
    dim: int
    H: np.ndarray = field(init=False, repr=False)
    c1: np.ndarray = field(init=False, repr=False)
    c2: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        dim = _check_dim(self.dim)
        a, ad = annihilation(dim), creation(dim)
        p = self.params
        object.__setattr__(self, "H", p.hbar * p.omega * (ad @ a))
        object.__setattr__(self, "c1", math.sqrt(p.gamma_prime) * a)
        object.__setattr__(self, "c2", math.sqrt(p.kappa) * ad)
        for m in (self.H, self.c1, self.c2):
            m.setflags(write=False)

    @property
    def jump_ops(self) -> tuple[np.ndarray, ...]:
        return (self.c1, self.c2)


@dataclass(frozen=True)
class IntegratorConfig:
    """Fixed-step schedule. ``record_every`` is a stride in steps.

    ``t_final`` is rounded to the nearest whole number of steps.
    """

    dt: float
    t_final: float
    record_every: int = 1

    def __post_init__(self):
        if not self.dt > 0:
            raise PreconditionError(f"dt must be positive, got {self.dt}")
        if self.t_final < 0:
            raise PreconditionError(f"t_final must be >= 0, got {self.t_final}")
        if int(self.record_every) != self.record_every or self.record_every < 1:
            raise PreconditionError("record_every must be a positive integer")

    @property
    def n_steps(self) -> int:
        return int(round(self.t_final / self.dt))

    def times(self) -> np.ndarray:
        """Recorded times, always including t=0 and the last step."""
        idx = np.arange(0, self.n_steps + 1, self.record_every)
        if idx[-1] != self.n_steps:
            idx = np.append(idx, self.n_steps)
        return idx * self.dt


def _commutator(a, b):
    return a @ b - b @ a


def dissipator(c: np.ndarray, rho: np.ndarray) -> np.ndarray:
    """``c rho c^dag - (c^dag c rho + rho c^dag c) / 2``."""
    c = np.asarray(c)
    rho = np.asarray(getattr(rho, "matrix", rho))
    if c.shape != rho.shape:
        raise DimensionError(f"jump operator {c.shape} vs state {rho.shape}")
    cd = c.conj().T
    cdc = cd @ c
    return c @ rho @ cd - 0.5 * (cdc @ rho + rho @ cdc)


def rhs(model: LindbladModel, rho) -> np.ndarray:
    rho = np.asarray(getattr(rho, "matrix", rho))
    if rho.shape != (model.dim, model.dim):
        raise DimensionError(f"state shape {rho.shape}, model dim {model.dim}")
    out = (-1j / model.params.hbar) * _commutator(model.H, rho)
    for c in model.jump_ops:
        out = out + dissipator(c, rho)
    return out


def adjoint_rhs(model: LindbladModel, x: np.ndarray) -> np.ndarray:
    """Heisenberg-picture generator ``(i/hbar)[H, X] + sum c^dag X c - {c^dag c, X}/2``."""
    x = np.asarray(x)
    if x.shape != (model.dim, model.dim):
        raise DimensionError(f"operator shape {x.shape}, model dim {model.dim}")
    out = (1j / model.params.hbar) * _commutator(model.H, x)
    for c in model.jump_ops:
        cd = c.conj().T
        cdc = cd @ c
        out = out + cd @ x @ c - 0.5 * (cdc @ x + x @ cdc)
    return out


def rk4_step(f, y, dt):
    k1 = f(y)
    k2 = f(y + (0.5 * dt) * k1)
    k3 = f(y + (0.5 * dt) * k2)
    k4 = f(y + dt * k3)
    return y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


@dataclass(frozen=True, eq=False)
class Evolution:
    """Recorded snapshots of an integration run."""

    times: np.ndarray
    states: list

    def __len__(self):
        return len(self.states)

    def __iter__(self):
        return iter(zip(self.times, self.states))

    def expect(self, op: np.ndarray) -> np.ndarray:
        stack = np.stack([s.matrix for s in self.states])
        return np.einsum("kij,ji->k", stack, op)


def _snapshot(rho: np.ndarray, t: float) -> DensityOperator:
    herm = float(np.max(np.abs(rho - rho.conj().T)))
    if herm > HERMITIAN_TOL:
        raise IntegrationDiverged(t, "hermiticity", herm)
    drift = abs(np.trace(rho) - 1)
    if drift > TRACE_DRIFT_TOL:
        raise IntegrationDiverged(t, "trace", drift)
    lam = min_eigenvalue(rho)
    if lam < POSITIVITY_TOL:
        raise IntegrationDiverged(t, "positivity", lam)
    return DensityOperator(rho, trace_tol=TRACE_DRIFT_TOL)


def integrate(
    model: LindbladModel,
    rho0,
    cfg: IntegratorConfig,
    renormalize: bool = False,
) -> Evolution:
    """Fixed-step RK4 evolution of the master equation.

    Every recorded snapshot is validated; the first failure raises
    :class:`IntegrationDiverged` naming the time and the broken invariant.
    ``renormalize`` rescales the trace after each step (off by default so
    trace drift stays visible).
    """
    if not isinstance(rho0, DensityOperator):
        rho0 = DensityOperator(rho0)
    if rho0.dim != model.dim:
        raise DimensionError(f"initial state dim {rho0.dim}, model dim {model.dim}")
    rho = np.array(rho0.matrix)
    times = cfg.times()
    record_steps = set(np.rint(times / cfg.dt).astype(int).tolist())
    states = [rho0]

    def f(r):
        return rhs(model, r)

    for step in range(1, cfg.n_steps + 1):
        rho = rk4_step(f, rho, cfg.dt)
        if renormalize:
            rho = rho / np.trace(rho)
        if step in record_steps:
            states.append(_snapshot(rho, step * cfg.dt))
    return Evolution(times=times, states=states)


def integrate_adjoint(model: LindbladModel, x0: np.ndarray, t: float, dt: float) -> np.ndarray:
    """Evolve an observable under the Heisenberg-picture generator up to time ``t``."""
    n = int(round(t / dt))
    if n and abs(n * dt - t) > 1e-9 * max(1.0, t):
        raise PreconditionError("t must be a whole number of steps dt")
    x = np.array(x0, dtype=complex)
    for _ in range(n):
        x = rk4_step(lambda y: adjoint_rhs(model, y), x, dt)
    return x


def steady_photon_number(params: CavityParams) -> float:
    """Stationary ``<a^dag a> = kappa / (gamma' - kappa)``."""
    if params.gamma_prime <= params.kappa:
        raise NoSteadyStateError(
            f"gamma_prime={params.gamma_prime} <= kappa={params.kappa}: photon number grows without bound"
        )
    return params.kappa / (params.gamma_prime - params.kappa)


def default_dim(params: CavityParams, alpha0: complex) -> int:
    """``max(20, ceil(8 (|alpha0|^2 + n_ss)))``, covering the initial support plus gain heating."""
    n_ss = steady_photon_number(params)
    return max(20, math.ceil(8 * (abs(alpha0) ** 2 + n_ss)))
