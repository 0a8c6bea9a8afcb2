import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from opencavity.errors import PreconditionError, TruncationWarning
from opencavity.fock import CavityParams, annihilation, creation
from opencavity.weyl import (
    ccr_phase,
    ccr_residual,
    ladder_errors,
    lindblad_channel_crosscheck,
    recover_ladder,
    semigroup_image_matrix,
    semigroup_law_residual,
    semigroup_on_label,
    weyl_operator,
)


def test_weyl_basics():
    np.testing.assert_allclose(weyl_operator(0, 10), np.eye(10), atol=0)
    for z in (0.5, 0.3 - 0.4j, -0.2j):
        W = weyl_operator(z, 40)
        assert np.linalg.norm(W @ weyl_operator(-z, 40) - np.eye(40), 2) < 1e-8
        assert np.linalg.norm(W.conj().T - weyl_operator(-z, 40), 2) < 1e-12
        assert np.linalg.norm(W.conj().T @ W - np.eye(40), 2) < 1e-8
    assert abs(weyl_operator(0.3, 40)[0, 0] - math.exp(-0.045)) < 1e-8


def test_vacuum_column_is_coherent_state():
    # W(z)|0> = |-conj(z)> under exp(z a - conj(z) a^dag); compare against the series
    z = 0.3 + 0.2j
    beta = -np.conj(z)
    col = weyl_operator(z, 40)[:, 0]
    n = np.arange(12)
    series = np.exp(-abs(beta) ** 2 / 2) * beta**n / np.sqrt([math.factorial(k) for k in n])
    np.testing.assert_allclose(col[:12], series, atol=1e-12)


def test_weyl_warns_on_small_dim():
    with pytest.warns(TruncationWarning):
        weyl_operator(2.0, 8)


def test_ccr_phase_convention():
    # BCH with [z a - z* a^dag, w a - w* a^dag] = 2i Im(z* w)
    f, h = 0.3, 0.3j
    assert ccr_phase(f, h) == pytest.approx(np.exp(1j * 0.09))
    assert ccr_phase(0.4, 0.2) == 1


def test_ccr_residual_examples():
    assert ccr_residual(0.4 - 0.1j, 0, 40) < 1e-12
    assert ccr_residual(0.5, -0.3, 40) < 1e-8
    r = [ccr_residual(0.3, 0.3j, d) for d in (20, 40, 60)]
    assert r[-1] < 1e-6
    assert r[0] > r[1] > r[2]
    assert ccr_residual(0.5, 0.5j, 10) > ccr_residual(0.5, 0.5j, 40)


def test_semigroup_label(ref):
    img = semigroup_on_label(0.3 + 0.1j, 0.0, ref)
    assert img.coefficient == 1 and img.label == 0.3 + 0.1j
    img = semigroup_on_label(0, 4.0, ref)
    assert img.coefficient == 1 and img.label == 0
    img = semigroup_on_label(0.6, 500.0, ref)
    assert img.coefficient == pytest.approx(math.exp(-0.18), rel=1e-14)
    assert abs(img.label) < 1e-40


@settings(max_examples=200, deadline=None)
@given(t=st.floats(0, 30), re=st.floats(-3, 3), im=st.floats(-3, 3))
def test_coefficient_bounds(t, re, im):
    p = CavityParams(1.0, 0.5, 0.1)
    c = semigroup_on_label(complex(re, im), t, p).coefficient
    assert 0 < c <= 1
    if t > 1e-3 and abs(complex(re, im)) > 1e-3:
        assert c < 1


def test_semigroup_law_examples(ref):
    assert semigroup_law_residual(1.3, 0.0, 0.5 - 0.2j, ref) == 0
    assert semigroup_law_residual(1.0, 1.0, 0.7, ref) < 1e-14


@settings(max_examples=300, deadline=None)
@given(t=st.floats(0, 10), s=st.floats(0, 10), re=st.floats(-2, 2), im=st.floats(-2, 2))
def test_semigroup_law_fuzz(t, s, re, im):
    assert semigroup_law_residual(t, s, complex(re, im), CavityParams(1.0, 0.5, 0.1)) < 1e-12


def test_semigroup_matrix_is_vacuum_expectation_at_long_times(ref):
    z = 0.4 + 0.3j
    m = semigroup_image_matrix(z, 200.0, 30, ref)
    np.testing.assert_allclose(m, math.exp(-abs(z) ** 2 / 2) * np.eye(30), atol=1e-12)


def test_crosscheck_trivial(ref_k0):
    assert lindblad_channel_crosscheck(0.4, 0.0, 20, ref_k0) < 1e-14
    assert lindblad_channel_crosscheck(0.0, 1.0, 20, ref_k0) < 1e-12


def test_crosscheck_reference(ref_k0):
    assert lindblad_channel_crosscheck(0.4, 1.0, 40, ref_k0, dt=1e-3) < 1e-4


def test_crosscheck_requires_noiseless(ref):
    with pytest.raises(PreconditionError):
        lindblad_channel_crosscheck(0.4, 1.0, 20, ref)


def test_recover_ladder_t0(ref_k0):
    a_t, ad_t = recover_ladder(0.0, 20, ref_k0, h=1e-3)
    # O(h^2) on the resolved levels
    assert np.linalg.norm(a_t[:15, :15] - annihilation(20)[:15, :15], 2) < 1e-4
    assert np.linalg.norm(ad_t[:15, :15] - creation(20)[:15, :15], 2) < 1e-4


def test_recover_ladder_second_order(ref_k0):
    e1, _ = ladder_errors(1.0, 40, ref_k0, h=2e-3)
    e2, _ = ladder_errors(1.0, 40, ref_k0, h=1e-3)
    e3, _ = ladder_errors(1.0, 40, ref_k0, h=5e-4)
    assert 3.5 < e1 / e2 < 4.5 and 3.5 < e2 / e3 < 4.5


def test_recover_ladder_low_levels(ref_k0):
    # the h^2 constant grows with Fock level; on the lowest few levels it is small
    a_t, ad_t = recover_ladder(1.0, 40, ref_k0, h=1e-3)
    c = np.exp(-(0.2 + 1j))
    assert np.linalg.norm((a_t - c * annihilation(40))[:5, :5], 2) < 1e-5
    assert np.linalg.norm((ad_t - np.conj(c) * creation(40))[:5, :5], 2) < 1e-5


def test_recover_ladder_step_range(ref_k0):
    with pytest.raises(PreconditionError):
        recover_ladder(1.0, 10, ref_k0, h=0.1)
