import cmath

import numpy as np
import pytest

from uhdbell.core.ordering import integrate_phase_space
from uhdbell.core.states import StateKind, state_find_by, state_keys
from uhdbell.core.validators import DomainError
from uhdbell.states import (
    SinglePhotonSplit,
    TwoModeSqueezedVacuum,
    q_function_tmsv,
    q_marginal_function_tmsv,
    quasidistribution_single_photon,
    quasidistribution_tmsv,
    w_joint_single_photon,
    w_joint_tmsv,
    w_marginal_single_photon,
    w_marginal_tmsv,
)

rng = np.random.default_rng(20)


def _random_amplitudes(n, radius):
    return radius * rng.uniform(-1.0, 1.0, n) \
        + 1j * radius * rng.uniform(-1.0, 1.0, n)


def test_registry():
    assert set(state_keys()) >= {"single-photon", "tmsv"}
    assert state_find_by("single-photon") is SinglePhotonSplit
    assert state_find_by("tmsv") is TwoModeSqueezedVacuum
    assert state_find_by("laser") is None


def test_create_state():
    state = StateKind.create("tmsv")
    assert state.r == 0.5
    assert state.has_squeezing

    state = StateKind.create({"state": "tmsv", "r": 1.2})
    assert state.r == 1.2
    assert state.to_dict() == {"state": "tmsv", "r": 1.2}
    assert state.with_params(r=0.3) == StateKind.create("tmsv", r=0.3)

    photon = StateKind.create("single-photon", r=None)
    assert not photon.has_squeezing
    assert photon.r is None


def test_create_state_errors():
    with pytest.raises(ValueError):
        StateKind.create("laser")

    with pytest.raises(ValueError):
        StateKind.create("single-photon", r=0.5)

    # r is limited to [0, 10]
    with pytest.raises(DomainError):
        StateKind.create("tmsv", r=10.5)

    with pytest.raises(DomainError):
        StateKind.create("tmsv", r=-0.1)


def test_single_photon_perfect_detection():
    # The photon is always in one of the two modes.
    assert float(w_joint_single_photon(0, 0, 1.0)) == 0.0
    assert float(w_marginal_single_photon(0, 1.0)) == pytest.approx(
        0.5 / np.pi)


@pytest.mark.parametrize("eta", [0.3, 0.6, 0.9, 1.0])
def test_single_photon_origin(eta):
    assert float(w_joint_single_photon(0, 0, eta)) == pytest.approx(
        (eta / np.pi) ** 2 * (1.0 - eta), abs=1e-15)
    assert float(w_marginal_single_photon(0, eta)) == pytest.approx(
        eta / np.pi * (1.0 - eta / 2.0))


def test_single_photon_wigner_negative():
    state = StateKind.create("single-photon")
    assert float(state.wigner(0, 0)) < 0.0
    assert float(quasidistribution_single_photon(0, 0, 0.0)) == \
        pytest.approx(-4.0 / np.pi ** 2)


def test_tmsv_vacuum_limit():
    # r = 0 is the two-mode vacuum: a product of Gaussians.
    alpha, beta = 0.4 - 0.2j, -0.7 + 0.1j
    for eta in (0.5, 1.0):
        expected = (eta / np.pi) ** 2 * np.exp(
            -eta * (abs(alpha) ** 2 + abs(beta) ** 2))
        assert float(w_joint_tmsv(alpha, beta, eta, 0.0)) == \
            pytest.approx(expected, rel=1e-14)


def test_tmsv_origin_closed_form():
    eta, r = 0.7, 0.6
    sh2 = np.sinh(r) ** 2
    assert float(w_joint_tmsv(0, 0, eta, r)) == pytest.approx(
        (eta / np.pi) ** 2 / (1.0 + eta * (2.0 - eta) * sh2))
    assert float(w_marginal_tmsv(0, eta, r)) == pytest.approx(
        eta / (np.pi * (1.0 + eta * sh2)))


def test_tmsv_wigner_positive():
    alpha = _random_amplitudes(200, 3.0)
    beta = _random_amplitudes(200, 3.0)
    assert np.all(quasidistribution_tmsv(alpha, beta, 0.0, 0.8) > 0.0)


@pytest.mark.parametrize("eta", [0.05, 0.4, 0.8, 1.0])
def test_nonnegative(eta):
    alpha = _random_amplitudes(500, 4.0)
    beta = _random_amplitudes(500, 4.0)
    assert np.all(w_joint_single_photon(alpha, beta, eta) >= 0.0)
    assert np.all(w_marginal_single_photon(alpha, eta) >= 0.0)
    assert np.all(w_joint_tmsv(alpha, beta, eta, 1.3) >= 0.0)
    assert np.all(w_marginal_tmsv(alpha, eta, 1.3) >= 0.0)


@pytest.mark.parametrize("eta", [0.2, 0.7, 1.0])
def test_marginal_normalization(eta):
    norm = integrate_phase_space(
        lambda z: w_marginal_single_photon(z, eta),
        scale=np.sqrt(1.0 / eta))
    assert abs(norm - 1.0) < 1e-6

    r = 0.9
    norm = integrate_phase_space(
        lambda z: w_marginal_tmsv(z, eta, r),
        scale=np.sqrt(1.0 / eta + np.sinh(r) ** 2))
    assert abs(norm - 1.0) < 1e-6


def test_joint_normalization():
    # The two-mode function integrates to 1 and marginalizes correctly.
    eta = 0.8
    norm = integrate_phase_space(
        lambda a, b: w_joint_single_photon(a, b, eta), modes=2,
        scale=np.sqrt(1.0 / eta), order=32)
    assert abs(norm - 1.0) < 1e-6


def test_symmetry():
    alpha = _random_amplitudes(50, 2.0)
    beta = _random_amplitudes(50, 2.0)
    np.testing.assert_allclose(
        w_joint_single_photon(alpha, beta, 0.8),
        w_joint_single_photon(beta, alpha, 0.8), rtol=1e-14)

    phase = cmath.exp(0.9j)
    np.testing.assert_allclose(
        w_joint_tmsv(alpha * phase, beta / phase, 0.8, 0.7),
        w_joint_tmsv(alpha, beta, 0.8, 0.7), rtol=1e-12)


def test_state_methods_match_functions():
    state = StateKind.create("tmsv", r=0.4)
    alpha, beta = 0.3 + 0.2j, -0.1 + 0.5j
    assert float(state.w_joint(alpha, beta, 0.9)) == \
        float(w_joint_tmsv(alpha, beta, 0.9, 0.4))
    assert float(state.joint_kernel(0.9)(alpha, beta)) == \
        pytest.approx(float(w_joint_tmsv(alpha, beta, 0.9, 0.4)))
    assert float(state.w_marginal(alpha, 0.9, arm="B")) == \
        float(w_marginal_tmsv(alpha, 0.9, 0.4))

    with pytest.raises(ValueError):
        state.w_marginal(alpha, 0.9, arm="C")


def test_q_function_is_measured_at_full_efficiency():
    # At eta = 1 the sampled ordering is s = -1, the Q function.
    alpha = _random_amplitudes(20, 1.5)
    beta = _random_amplitudes(20, 1.5)
    np.testing.assert_allclose(
        q_function_tmsv(alpha, beta, 0.8),
        w_joint_tmsv(alpha, beta, 1.0, 0.8), rtol=1e-12)
    np.testing.assert_allclose(
        q_marginal_function_tmsv(alpha, 0.8),
        w_marginal_tmsv(alpha, 1.0, 0.8), rtol=1e-12)


def test_invalid_arguments():
    with pytest.raises(DomainError):
        w_joint_single_photon(0, 0, 0.0)

    with pytest.raises(DomainError):
        w_joint_tmsv(0, 0, 1.2, 0.5)

    with pytest.raises(DomainError):
        w_joint_tmsv(np.nan, 0, 0.5, 0.5)

    # orderings must lie below 1
    with pytest.raises(DomainError):
        quasidistribution_single_photon(0, 0, 1.0)
