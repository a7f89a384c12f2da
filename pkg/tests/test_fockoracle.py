import numpy as np
import pytest

from uhdbell.core.bell import SetupParams, q_joint, q_marginal
from uhdbell.core.detection import CountDistribution, pi_s
from uhdbell.core.fockoracle import (
    TruncatedState,
    TruncationError,
    binomial_error,
    displacement_matrix,
    loss_no_click,
    oracle_count_distribution,
    oracle_detector_counts,
    oracle_q_joint,
    oracle_q_marginal,
    required_dim,
    sample_clicks,
)
from uhdbell.core.states import StateKind
from uhdbell.core.validators import DomainError


def test_truncated_state():
    photon = TruncatedState.from_state("single-photon", dim=4)
    assert photon.norm == pytest.approx(1.0)
    assert photon.tail_mass == 0.0

    tmsv = TruncatedState.from_state(StateKind.create("tmsv", r=0.5), dim=5)
    assert tmsv.norm + tmsv.tail_mass == pytest.approx(1.0, abs=1e-15)
    assert tmsv.tail_mass == pytest.approx(np.tanh(0.5) ** 10)

    with pytest.raises(TruncationError):
        TruncatedState.from_state("single-photon", dim=1)


def test_required_dim():
    assert required_dim("single-photon") == 2
    assert required_dim(StateKind.create("tmsv", r=0.0)) == 1
    dim = required_dim(StateKind.create("tmsv", r=1.5))
    assert np.tanh(1.5) ** (2 * dim) < 1e-16
    assert np.tanh(1.5) ** (2 * (dim - 1)) >= 1e-16


def test_truncation_error():
    state = StateKind.create("tmsv", r=1.0)
    with pytest.raises(TruncationError) as e:
        oracle_q_joint(state, 0, 0, SetupParams(), dim=10)
    assert e.value.suggested_dim == required_dim(state)

    # the suggested truncation is accepted
    assert 0.0 <= oracle_q_joint(
        state, 0, 0, SetupParams(), dim=e.value.suggested_dim) <= 1.0


def test_displacement_matrix_unitary_columns():
    m, tail = displacement_matrix(1.2 - 0.4j, 6)
    np.testing.assert_allclose(m.conj().T @ m, np.eye(6), atol=1e-12)
    assert np.all(tail < 1e-12)


def test_loss_no_click_coherent_state():
    gamma, eta = 0.9 + 0.3j, 0.65
    m, _ = displacement_matrix(gamma, 1)
    assert loss_no_click(m[:, 0], eta) == pytest.approx(
        np.exp(-eta * abs(gamma) ** 2), abs=1e-12)


def test_vacuum_is_coherent():
    # r = 0: both probes see a coherent state
    vacuum = StateKind.create("tmsv", r=0.0)
    alpha, beta, eta = 0.7, -0.2 + 0.5j, 0.8
    p = SetupParams(eta, 0.9, 0.95)
    rate = p.mismatch_rate
    expected = 0.95 ** 2 * np.exp(
        -(eta + rate) * (abs(alpha) ** 2 + abs(beta) ** 2))
    assert oracle_q_joint(vacuum, alpha, beta, p) == pytest.approx(
        expected, abs=1e-12)


def test_single_photon_origin():
    assert oracle_q_joint("single-photon", 0, 0, SetupParams(0.6)) == \
        pytest.approx(0.4, abs=1e-14)
    assert oracle_q_marginal("single-photon", 0, SetupParams(0.6)) == \
        pytest.approx(0.7, abs=1e-14)


def test_tmsv_matches_closed_form():
    state = StateKind.create("tmsv", r=0.6)
    p = SetupParams(0.7, 1.0, 1.0)
    assert abs(oracle_q_joint(state, 0.5, 0.5, p)
               - q_joint(state, 0.5, 0.5, p)) < 1e-10


@pytest.mark.parametrize("state", [
    "single-photon", StateKind.create("tmsv", r=0.3),
    StateKind.create("tmsv", r=1.2)], ids=str)
def test_oracle_agrees_with_closed_forms(state):
    rng = np.random.default_rng(2)
    p = SetupParams(0.75, 0.9, 0.97)
    dim = max(60, required_dim(state))
    for _ in range(5):
        alpha, beta = rng.uniform(-1.5, 1.5, 2) \
            + 1j * rng.uniform(-1.5, 1.5, 2)
        assert abs(oracle_q_joint(state, alpha, beta, p, dim)
                   - q_joint(state, alpha, beta, p)) < 1e-8
        assert abs(oracle_q_marginal(state, beta, p, dim, arm="B")
                   - q_marginal(state, beta, p, arm="B")) < 1e-8


def test_doubling_the_truncation():
    state = StateKind.create("tmsv", r=0.6)
    p = SetupParams(0.8)
    assert oracle_q_joint(state, 0.3, -0.4j, p, dim=60) == pytest.approx(
        oracle_q_joint(state, 0.3, -0.4j, p, dim=120), abs=1e-12)


def test_detector_counts_marginalize():
    state = StateKind.create("tmsv", r=0.5)
    p = SetupParams(0.7, 0.95, 0.98)
    alpha, beta = 0.4, -0.3 + 0.2j
    counts = oracle_detector_counts(state, alpha, beta, p, n_max=30)
    assert counts.shape == (31, 31)
    assert counts[0, 0] == pytest.approx(
        q_joint(state, alpha, beta, p), abs=1e-10)
    assert counts.sum(axis=1)[0] == pytest.approx(
        q_marginal(state, alpha, p), abs=1e-9)

    with pytest.raises(DomainError):
        oracle_detector_counts(state, alpha, beta, p, n_max=-1)


def test_count_distribution_zero_count():
    p = SetupParams(0.9, 0.95, 0.9)
    dist = oracle_count_distribution("single-photon", 0.5, 0.5j, p)
    assert pi_s(dist, -1.0) == pytest.approx(
        oracle_q_joint("single-photon", 0.5, 0.5j, p), abs=1e-14)

    dist = oracle_count_distribution(
        "single-photon", 0, 0, SetupParams(), n_max=3)
    assert dist.probs[1] == pytest.approx(1.0)


def test_sample_clicks():
    dist = CountDistribution([0.5, 0.5])
    sampled = sample_clicks(dist, 10 ** 6, seed=42)
    assert abs(sampled.p0 - 0.5) < 3.0 * binomial_error(0.5, 10 ** 6)
    assert sample_clicks(dist, 1000, seed=1) == sample_clicks(
        dist, 1000, seed=1)
    assert sample_clicks([0.0, 1.0], 10, seed=3).probs.tolist() == [0.0, 1.0]

    with pytest.raises(DomainError):
        sample_clicks(dist, 0)


def test_binomial_error():
    assert binomial_error(0.0, 100) == 0.0
    assert binomial_error(0.5, 100) == pytest.approx(0.05)

    with pytest.raises(DomainError):
        binomial_error(1.5, 100)
