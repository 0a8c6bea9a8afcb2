import math

import numpy as np
import pytest

from opencavity.composite import DensityOperator
from opencavity.fock import CavityParams, annihilation, coherent_state
from opencavity.heisenberg import (
    field_mean,
    noise_variance_monte_carlo,
    quadrature_mean,
    quadrature_moments,
    quadrature_noise_variance,
)
from opencavity.lindblad import IntegratorConfig, LindbladModel, integrate
from opencavity.ou import analytic_mean, analytic_variance


def test_quadrature_mean_examples(ref, closed):
    assert quadrature_mean(0.0, 0.3, -0.7, ref) == (0.3, -0.7)
    q, p = quadrature_mean(math.pi, 0.3, -0.7, closed)
    assert q == pytest.approx(-0.3, abs=1e-15) and p == pytest.approx(0.7, abs=1e-15)
    q, _ = quadrature_mean(5.0, 1.0, 0.0, ref)
    assert q == pytest.approx(0.10435, abs=1e-5)


def test_energy_conserved_without_damping():
    p = CavityParams(omega=1.7, gamma_prime=0.0, kappa=0.0, mass=2.3, undamped_ok=True)
    m, w = p.mass, p.omega

    def energy(q, pp):
        return 0.5 * (m * w**2 * q**2 + pp**2 / m)

    e0 = energy(0.4, -1.1)
    for t in np.linspace(0, 2 * math.pi / w, 50):
        assert abs(energy(*quadrature_mean(t, 0.4, -1.1, p)) - e0) < 1e-10


def test_amplitude_decay_over_full_periods(ref):
    q0, p0 = 0.8, 0.3
    r0 = q0**2 + (p0 / (ref.mass * ref.omega)) ** 2
    for k in range(1, 5):
        t = 2 * math.pi * k / ref.omega
        q, p = quadrature_mean(t, q0, p0, ref)
        r = q**2 + (p / (ref.mass * ref.omega)) ** 2
        assert r == pytest.approx(math.exp(-2 * ref.g * t) * r0, rel=1e-12)


def test_noise_variance_closed_form(ref):
    assert quadrature_noise_variance(0.0, ref) == (0.0, 0.0)
    qv, pv = quadrature_noise_variance(200.0, ref)
    assert qv == pytest.approx(0.5, abs=1e-15) and pv == qv
    assert quadrature_noise_variance(2.0, ref)[0] == pytest.approx(0.27534, abs=1e-5)
    for t in (0.1, 1.0, 3.3):
        assert abs(quadrature_noise_variance(t, ref)[0] - 2 * analytic_variance(t, ref)) < 1e-12


@pytest.mark.parametrize("t", [0.5, 1.0, 2.0, 5.0])
def test_noise_variance_monte_carlo(ref, t):
    qv, pv, qse, pse = noise_variance_monte_carlo(t, ref, n_paths=100_000, seed=int(10 * t))
    exact = quadrature_noise_variance(t, ref)[0]
    assert abs(qv - exact) < 3 * qse
    assert abs(pv - exact) < 3 * pse


def test_field_mean(ref):
    assert field_mean(0.0, 0.2 - 0.1j, ref) == 0.2 - 0.1j
    for t in (0.0, 0.7, 3.0, 11.0):
        assert field_mean(t, 0.5 + 0.2j, ref) == pytest.approx(analytic_mean(0.5 + 0.2j, t, ref), abs=1e-15)


def test_field_mean_vs_master_equation(ref):
    dim = 20
    ev = integrate(
        LindbladModel(ref, dim),
        DensityOperator.pure(coherent_state(0.5, dim)),
        IntegratorConfig(1e-3, 5.0, 250),
    )
    lind = ev.expect(annihilation(dim))
    heis = np.array([field_mean(t, 0.5, ref) for t in ev.times])
    assert np.max(np.abs(lind - heis)) < 1e-6


def test_moments_bundle(ref):
    m = quadrature_moments(1.0, 1.0, 0.0, ref)
    assert m.q_var == m.p_var > 0
    assert (m.q_mean, m.p_mean) == quadrature_mean(1.0, 1.0, 0.0, ref)
