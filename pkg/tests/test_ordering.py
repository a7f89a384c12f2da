import numpy as np
import pytest

from uhdbell.core.ordering import (
    QuadratureError,
    effective_ordering,
    gauss_hermite_nodes,
    gaussian_quasidistribution,
    gaussian_transform_covariance,
    integrate_phase_space,
    ordering_transform,
    ordering_weight,
)
from uhdbell.core.validators import DomainError
from uhdbell.states import (
    marginal_quasidistribution_single_photon,
    marginal_quasidistribution_tmsv,
    q_function_tmsv,
    tmsv_q_covariance,
    w_joint_tmsv,
)


def vacuum(s):
    return lambda b: 2.0 / (np.pi * (1.0 - s)) \
        * np.exp(-2.0 * np.abs(b) ** 2 / (1.0 - s))


@pytest.mark.parametrize("eta", [0.05, 0.3, 0.5, 0.9])
def test_effective_ordering_below_q(eta):
    assert effective_ordering(-1.0, eta) < -1.0
    assert effective_ordering(-1.0, eta) == pytest.approx(
        -(2.0 - eta) / eta)


def test_effective_ordering_perfect():
    assert effective_ordering(-1.0, 1.0) == -1.0
    assert effective_ordering(0.0, 1.0) == 0.0
    assert effective_ordering(-0.5, 0.5) == -2.0


def test_effective_ordering_errors():
    with pytest.raises(DomainError):
        effective_ordering(-1.0, 0.0)

    with pytest.raises(DomainError):
        effective_ordering(0.5, 1.0)


def test_ordering_weight():
    assert ordering_weight(-1.0) == 0.0
    assert ordering_weight(0.0) == -1.0
    assert abs(ordering_weight(-3.0)) < 1.0


def test_gauss_hermite_nodes():
    nodes, weights = gauss_hermite_nodes(16)
    assert nodes.size == 256
    assert weights.sum() == pytest.approx(1.0)
    # second moment of exp(-|x|^2) / pi
    assert np.dot(weights, np.abs(nodes) ** 2) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        weights[0] = 0.0


def test_vacuum_transform():
    value = ordering_transform(vacuum(0.0), 0.0, -1.0, [0.3 + 0.4j])
    assert value == pytest.approx(vacuum(-1.0)(0.3 + 0.4j), abs=1e-12)


def test_semigroup():
    # 0 -> -0.5 -> -2 equals 0 -> -2.
    point = [0.5 - 0.2j]
    direct = ordering_transform(
        lambda b: marginal_quasidistribution_single_photon(b, 0.0),
        0.0, -2.0, point)
    first = ordering_transform(
        lambda b: marginal_quasidistribution_single_photon(b, 0.0),
        0.0, -0.5, point)
    assert first == pytest.approx(float(
        marginal_quasidistribution_single_photon(point[0], -0.5)), abs=1e-6)
    second = ordering_transform(
        lambda b: marginal_quasidistribution_single_photon(b, -0.5),
        -0.5, -2.0, point)
    assert abs(second - direct) < 1e-6


@pytest.mark.parametrize("s_prime", [-1.0, -2.5])
def test_mass_preservation(s_prime):
    r = 0.6
    norm = integrate_phase_space(
        lambda z: marginal_quasidistribution_tmsv(z, s_prime, r),
        scale=np.sqrt((1.0 - s_prime) / 2.0 + np.sinh(r) ** 2))
    assert abs(norm - 1.0) < 1e-6


@pytest.mark.parametrize("eta", [0.6, 0.8])
def test_two_mode_transform_of_q_function(eta):
    r = 0.8
    s_prime = effective_ordering(-1.0, eta)
    for alpha, beta in ((0.0, 0.0), (0.4 + 0.1j, -0.3 + 0.2j)):
        value = ordering_transform(
            lambda g, d: q_function_tmsv(g, d, r), -1.0, s_prime,
            [alpha, beta], order=32)
        assert abs(value - float(w_joint_tmsv(alpha, beta, eta, r))) < 1e-6


def test_gaussian_path():
    r, eta = 0.9, 0.7
    s_prime = effective_ordering(-1.0, eta)
    cov = gaussian_transform_covariance(tmsv_q_covariance(r), -1.0, s_prime)
    alpha, beta = 0.2 - 0.5j, 0.6 + 0.1j
    assert gaussian_quasidistribution([alpha, beta], cov) == pytest.approx(
        float(w_joint_tmsv(alpha, beta, eta, r)), rel=1e-12)

    # the vacuum Q function at the origin
    assert gaussian_quasidistribution([0j], 0.5 * np.eye(2)) == \
        pytest.approx(1.0 / np.pi)


def test_insufficient_order():
    # Re(b)^4 is integrated exactly at order 4 but not at order 2.
    with pytest.raises(QuadratureError):
        ordering_transform(
            lambda b: np.real(b) ** 4, 0.0, -1.0, [0j], order=4)


def test_transform_errors():
    with pytest.raises(DomainError):
        ordering_transform(vacuum(0.0), -1.0, -0.5, [0j])

    with pytest.raises(DomainError):
        ordering_transform(vacuum(0.0), 0.0, -1.0, [])

    with pytest.raises(DomainError):
        ordering_transform(vacuum(0.0), 0.0, -1.0, [np.inf])

    with pytest.raises(DomainError):
        integrate_phase_space(vacuum(0.0), modes=3)
