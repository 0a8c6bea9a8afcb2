import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from opencavity.errors import DimensionError, PreconditionError, TruncationWarning
from opencavity.fock import (
    CavityParams,
    annihilation,
    coherent_norm,
    coherent_state,
    creation,
    expectation,
    matrix_exp,
    number,
    resolved_norm,
    resolved_size,
)


def test_annihilation_small():
    np.testing.assert_array_equal(annihilation(2), [[0, 1], [0, 0]])
    assert annihilation(3)[1, 2] == pytest.approx(math.sqrt(2), abs=0)
    np.testing.assert_array_equal(creation(2), [[0, 0], [1, 0]])


@pytest.mark.parametrize("bad", [0, 1, -3, 2.5])
def test_invalid_dimension(bad):
    with pytest.raises(DimensionError):
        annihilation(bad)


@pytest.mark.parametrize("d", [2, 3, 7, 20])
def test_truncated_ccr_and_number(d):
    a, ad = annihilation(d), creation(d)
    assert np.array_equal(ad, a.conj().T)
    comm = a @ ad - ad @ a
    expected = np.eye(d)
    expected[-1, -1] = -(d - 1)
    np.testing.assert_allclose(comm, expected, atol=1e-12)
    np.testing.assert_allclose(ad @ a, np.diag(np.arange(d)), atol=1e-12)
    np.testing.assert_array_equal(number(d), np.diag(np.arange(d)))


def test_coherent_vacuum():
    np.testing.assert_array_equal(coherent_state(0, 5), [1, 0, 0, 0, 0])


def test_coherent_eigenvalue():
    psi = coherent_state(1.0, 30)
    assert abs(np.vdot(psi, annihilation(30) @ psi) - 1.0) < 1e-10


def test_coherent_pre_norm_matches_partial_sum():
    # independent route: exp(-|a|^2) * sum |a|^(2n)/n!
    x = 0.25
    series = math.exp(-x) * sum(x**n / math.factorial(n) for n in range(20))
    assert abs(coherent_norm(0.5, 20) ** 2 - series) < 1e-15
    assert abs(coherent_norm(0.5, 20) - 1) < 1e-12


def test_coherent_warns_when_truncated():
    with pytest.warns(TruncationWarning):
        coherent_state(3.0, 10)


@settings(max_examples=50, deadline=None)
@given(
    r=st.floats(0, 2.0),
    phi=st.floats(0, 2 * math.pi),
    d=st.integers(2, 40),
)
def test_coherent_unit_norm(r, phi, d):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TruncationWarning)
        psi = coherent_state(r * np.exp(1j * phi), d)
    assert abs(np.linalg.norm(psi) - 1) < 1e-12


def test_matrix_exp_examples():
    np.testing.assert_allclose(matrix_exp(np.zeros((3, 3))), np.eye(3), atol=0)
    m = 1j * math.pi * np.diag([0.0, 1.0])
    np.testing.assert_allclose(matrix_exp(m), np.diag([1.0, -1.0]), atol=1e-14)
    with pytest.raises(DimensionError):
        matrix_exp(np.zeros((2, 3)))


@pytest.mark.parametrize("d", [2, 10, 40])
def test_matrix_exp_skew_hermitian(d):
    rng = np.random.default_rng(d)
    x = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    A = x - x.conj().T
    E = matrix_exp(A)
    assert np.linalg.norm(E @ matrix_exp(-A) - np.eye(d), 2) < 1e-10
    # eigendecomposition oracle: A = V diag(i lam) V^dag with V unitary
    lam, V = np.linalg.eigh(-1j * A)
    oracle = V @ np.diag(np.exp(1j * lam)) @ V.conj().T
    assert np.linalg.norm(E - oracle, 2) < 1e-12 * max(1.0, np.linalg.norm(oracle, 2)) * d


def test_expectation():
    d = 20
    rho = np.outer(coherent_state(0.5, d), coherent_state(0.5, d).conj())
    assert expectation(np.eye(d), rho) == pytest.approx(1, abs=1e-14)
    vac = np.zeros((d, d))
    vac[0, 0] = 1
    assert expectation(number(d), vac) == 0
    assert abs(expectation(annihilation(d), rho) - 0.5) < 1e-8
    with pytest.raises(DimensionError):
        expectation(np.eye(3), vac)


def test_params_validation():
    p = CavityParams(1.0, 0.5, 0.1)
    assert p.g == pytest.approx(0.2)
    assert p.decay == complex(0.2, 1.0)
    with pytest.raises(PreconditionError):
        CavityParams(1.0, 0.1, 0.5)
    with pytest.raises(PreconditionError):
        CavityParams(0.0, 0.5, 0.1)
    with pytest.raises(PreconditionError):
        CavityParams(1.0, 0.0, 0.0)
    assert CavityParams(1.0, 0.0, 0.0, undamped_ok=True).g == 0


def test_resolved_norm():
    assert resolved_size(40) == 30
    m = np.zeros((8, 8))
    m[7, 7] = 5.0
    m[0, 1] = 2.0
    assert resolved_norm(m) == pytest.approx(2.0)
    assert resolved_norm(m, 8) == pytest.approx(5.0)
