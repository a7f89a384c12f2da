"""
Numerical self-checks of the closed forms against independent
computations. Each suite returns a ``SuiteResult`` holding the largest
deviation of every check next to its tolerance.

Suites
------
oracle
    Closed-form no-click probabilities against the truncated Fock
    computation, and the Monte-Carlo count pipeline.
factorization
    Dark-count factorization of the ordering-weighted count sum.
transform
    Quadrature ordering transform of the TMSV Q function against the
    closed-form quasidistribution.
lhv
    The no-click kernel of the Wigner representation and its maximum.
properties
    Probability bounds, phase gauge invariances, contraction of the
    count sum, visibility round trips and normalization.
"""
from dataclasses import dataclass, field
from logging import getLogger
import math
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .bell import DisplacementSettings, SetupParams, ch_combination, \
    lhv_kernel, lhv_kernel_max, lhv_q_joint, q_joint, q_marginal
from .detection import CountDistribution, convolve_dark, pi_s, \
    visibility_to_xi, xi_to_visibility
from .fockoracle import DEFAULT_DIM, binomial_error, \
    oracle_count_distribution, oracle_q_joint, oracle_q_marginal, \
    required_dim, sample_clicks
from .ordering import effective_ordering, gaussian_quasidistribution, \
    gaussian_transform_covariance, integrate_phase_space, ordering_transform
from .states import StateKind
from .validators import DomainError

logger = getLogger(__name__)

ORACLE_TOL = 1e-8
FACTORIZATION_TOL = 1e-12
TRANSFORM_TOL = 1e-6
TRANSFORM_ORDER = 32
LHV_ORDER = 40
GAUGE_TOL = 1e-12
NORMALIZATION_TOL = 1e-6
MONTE_CARLO_SIGMAS = 3.0


@dataclass(frozen=True)
class CheckResult:
    """
    Outcome of one check: the largest deviation over ``count`` sample
    points, and the tolerance it is compared with.
    """
    name: str
    max_deviation: float
    tolerance: float
    count: int

    @property
    def passed(self) -> bool:
        return bool(self.max_deviation <= self.tolerance)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "max_deviation": self.max_deviation,
            "tolerance": self.tolerance,
            "count": self.count,
            "passed": self.passed,
        }


@dataclass(frozen=True)
class SuiteResult:
    name: str
    checks: Tuple[CheckResult, ...] = field(default_factory=tuple)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def max_deviation(self) -> float:
        return max((c.max_deviation for c in self.checks), default=0.0)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "suite": self.name,
            "passed": self.passed,
            "checks": [c.to_dict() for c in self.checks],
        }


class _Tracker(object):
    """
    Accumulates the largest deviation of a named check.
    """

    def __init__(self, name: str, tolerance: float):
        self.name = name
        self.tolerance = tolerance
        self.worst = 0.0
        self.count = 0

    def add(self, deviation: float):
        deviation = float(deviation)
        if not math.isfinite(deviation):
            deviation = math.inf
        self.worst = max(self.worst, deviation)
        self.count += 1

    def result(self) -> CheckResult:
        logger.debug("{}: max deviation {:.3e} over {} points".format(
            self.name, self.worst, self.count))
        return CheckResult(self.name, self.worst, self.tolerance, self.count)


def _amplitude_grid(n: int = 5, radius: float = 2.0, phase: float = 0.0):
    return [m * complex(math.cos(phase), math.sin(phase))
            for m in np.linspace(0.0, radius, n)]


def _random_distribution(rng, max_len: int = 12) -> CountDistribution:
    size = int(rng.integers(1, max_len + 1))
    return CountDistribution(rng.dirichlet(np.ones(size)))


def sampled_click_deviation(
        state, alpha, beta, p: SetupParams, n_samples: int,
        seed: int = 0) -> float:
    """
    Samples ``n_samples`` count events from the oracle distribution and
    returns ``|pi_s(sample, -1) - q_joint|`` in binomial standard
    errors (floored at ``1 / n_samples``).
    """
    dist = oracle_count_distribution(
        state, alpha, beta, p,
        dim=max(DEFAULT_DIM, required_dim(state)), n_max=30)
    sample = sample_clicks(dist, n_samples, seed=seed)
    exact = q_joint(state, alpha, beta, p)
    sigma = max(binomial_error(exact, n_samples), 1.0 / n_samples)
    return abs(pi_s(sample, -1.0) - exact) / sigma


def suite_oracle(seed: int = 0, n_samples: int = 10 ** 6) -> SuiteResult:
    """
    Compares ``q_joint`` and ``q_marginal`` with the Fock-basis oracle
    over a 5 x 5 amplitude grid for the single photon and for the TMSV
    at r = 0, 0.6 and 1.5, then samples clicks from the oracle count
    distribution for random configurations.
    """
    p = SetupParams(eta_tilde=0.7, xi=0.9, p_dark=0.95)
    joint = _Tracker("closed form vs oracle, joint", ORACLE_TOL)
    marginal = _Tracker("closed form vs oracle, marginal", ORACLE_TOL)

    states = [StateKind.create("single-photon")] + [
        StateKind.create("tmsv", r=r) for r in (0.0, 0.6, 1.5)]
    alphas = _amplitude_grid(phase=0.7)
    betas = _amplitude_grid(phase=-0.4)
    for state in states:
        dim = max(DEFAULT_DIM, required_dim(state))
        for alpha in alphas:
            marginal.add(abs(oracle_q_marginal(state, alpha, p, dim)
                             - q_marginal(state, alpha, p)))
            for beta in betas:
                joint.add(abs(oracle_q_joint(state, alpha, beta, p, dim)
                              - q_joint(state, alpha, beta, p)))

    pipeline = _Tracker(
        "sampled p_0 vs q_joint, in binomial sigmas", MONTE_CARLO_SIGMAS)
    rng = np.random.default_rng(seed)
    for k in range(10):
        state = StateKind.create("tmsv", r=float(rng.uniform(0.0, 1.0))) \
            if k % 2 else StateKind.create("single-photon")
        setup = SetupParams(
            eta_tilde=float(rng.uniform(0.5, 1.0)),
            xi=float(rng.uniform(0.8, 1.0)),
            p_dark=float(rng.uniform(0.9, 1.0)))
        alpha, beta = (complex(*rng.uniform(-1.0, 1.0, 2)) for _ in "ab")
        pipeline.add(sampled_click_deviation(
            state, alpha, beta, setup, n_samples, seed=seed + k))

    return SuiteResult("oracle", (
        joint.result(), marginal.result(), pipeline.result()))


def suite_factorization(seed: int = 0, pairs: int = 100) -> SuiteResult:
    """
    ``pi_s`` of a dark-count convolution against the product of the
    two factors at s = -1, -0.5 and just below 0.
    """
    rng = np.random.default_rng(seed)
    tracker = _Tracker("pi_s(field * dark) - pi_s(field) pi_s(dark)",
                       FACTORIZATION_TOL)
    for _ in range(pairs):
        field_counts = _random_distribution(rng)
        dark = _random_distribution(rng)
        combined = convolve_dark(field_counts, dark)
        for s in (-1.0, -0.5, -1e-9):
            tracker.add(abs(pi_s(combined, s)
                            - pi_s(field_counts, s) * pi_s(dark, s)))
    return SuiteResult("factorization", (tracker.result(),))


def _transform_points(rng, n: int = 10):
    return [(complex(*rng.uniform(-1.0, 1.0, 2)),
             complex(*rng.uniform(-1.0, 1.0, 2))) for _ in range(n)]


def suite_transform(
        seed: int = 0, order: int = TRANSFORM_ORDER) -> SuiteResult:
    """
    Smooths the TMSV Q function to the ordering measured with detector
    efficiency 0.6, 0.8 and 1 and compares with ``w_joint``, both by
    quadrature and by the exact Gaussian covariance path.
    """
    from ..states.tmsv import q_function_tmsv, tmsv_q_covariance

    rng = np.random.default_rng(seed)
    points = _transform_points(rng)
    quadrature = _Tracker("quadrature transform vs closed form",
                          TRANSFORM_TOL)
    gaussian = _Tracker("Gaussian transform vs closed form", TRANSFORM_TOL)
    for r in (0.4, 1.0):
        state = StateKind.create("tmsv", r=r)
        cov = tmsv_q_covariance(r)
        for eta in (0.6, 0.8, 1.0):
            s_prime = effective_ordering(-1.0, eta)
            target_cov = cov if s_prime == -1.0 else \
                gaussian_transform_covariance(cov, -1.0, s_prime)
            for alpha, beta in points:
                expected = float(state.w_joint(alpha, beta, eta))
                if s_prime < -1.0:
                    value = ordering_transform(
                        lambda g, d: q_function_tmsv(g, d, r),
                        -1.0, s_prime, [alpha, beta], order=order)
                else:
                    value = float(q_function_tmsv(alpha, beta, r))
                quadrature.add(abs(value - expected))
                gaussian.add(abs(gaussian_quasidistribution(
                    [alpha, beta], target_cov) - expected))

    return SuiteResult("transform", (quadrature.result(), gaussian.result()))


def suite_lhv(seed: int = 0, order: int = LHV_ORDER) -> SuiteResult:
    """
    The kernel maximum equals 2 at perfect parameters, matches the
    closed-form maximum elsewhere, and the Wigner-average form of the
    joint no-click probability equals ``q_joint``.
    """
    rng = np.random.default_rng(seed)
    perfect = _Tracker("kernel maximum - 2 at perfect parameters", 1e-15)
    for alpha in _amplitude_grid(phase=0.3):
        perfect.add(abs(lhv_kernel(alpha, alpha, SetupParams()) - 2.0))

    closed = _Tracker("kernel at lam = alpha vs maximum", 1e-14)
    average = _Tracker("Wigner average vs q_joint", TRANSFORM_TOL)
    for _ in range(5):
        p = SetupParams(
            eta_tilde=float(rng.uniform(0.8, 1.0)),
            xi=float(rng.uniform(0.7, 1.0)),
            p_dark=float(rng.uniform(0.9, 1.0)))
        alpha, beta = (complex(*rng.uniform(-1.0, 1.0, 2)) for _ in "ab")
        closed.add(abs(lhv_kernel(alpha, alpha, p) - lhv_kernel_max(alpha, p)))
        for state in (StateKind.create("single-photon"),
                      StateKind.create("tmsv", r=0.3)):
            value = lhv_q_joint(
                state, alpha, beta, p, order=order, check_tol=None)
            average.add(abs(value - q_joint(state, alpha, beta, p)))

    return SuiteResult("lhv", (
        perfect.result(), closed.result(), average.result()))


def suite_properties(seed: int = 0, samples: int = 2000) -> SuiteResult:
    """
    Sampled probability bounds, gauge invariances of the CH combination,
    contraction of ``pi_s`` for s <= 0, the visibility round trip and the
    normalization of the marginal quasidistributions.
    """
    rng = np.random.default_rng(seed)
    bounds = _Tracker(
        "distance of q_joint, q_marginal outside [0, 1]", 1e-14)
    gauge = _Tracker("CH change under the phase gauge", GAUGE_TOL)
    for _ in range(samples):
        r = float(rng.uniform(0.0, 2.0))
        state = StateKind.create("tmsv", r=r) if rng.random() < 0.5 \
            else StateKind.create("single-photon")
        p = SetupParams(
            eta_tilde=float(rng.uniform(0.01, 1.0)),
            xi=float(rng.uniform(0.01, 1.0)),
            p_dark=float(rng.uniform(0.01, 1.0)))
        a = rng.uniform(-3.0, 3.0, 8) / math.sqrt(2.0)
        alpha, beta = complex(a[0], a[1]), complex(a[2], a[3])
        for value in (q_joint(state, alpha, beta, p),
                      q_marginal(state, alpha, p),
                      q_marginal(state, beta, p, arm="B")):
            bounds.add(max(0.0, -value, value - 1.0))

        d = DisplacementSettings(alpha, complex(a[4], a[5]),
                                 beta, complex(a[6], a[7]))
        phi = float(rng.uniform(0.0, 2.0 * math.pi))
        turned = d.rotated(phi, opposite=state.opposite_phase)
        gauge.add(abs(ch_combination(state, turned, p)
                      - ch_combination(state, d, p)))

    contraction = _Tracker("|pi_s| beyond 1 for s <= 0", 1e-14)
    for _ in range(200):
        dist = _random_distribution(rng)
        for s in (-3.0, -1.0, -0.5, 0.0):
            contraction.add(max(0.0, abs(pi_s(dist, s)) - 1.0))

    roundtrip = _Tracker("visibility round trip", 1e-12)
    for xi in np.linspace(0.01, 1.0, 100):
        roundtrip.add(abs(visibility_to_xi(xi_to_visibility(xi)) - xi))

    normalization = _Tracker("marginal quasidistribution norm",
                             NORMALIZATION_TOL)
    for state in (StateKind.create("single-photon"),
                  StateKind.create("tmsv", r=0.5)):
        for eta in (0.3, 0.7, 1.0):
            # Gaussian width of the marginal
            scale = math.sqrt(1.0 / eta + math.sinh(state.r or 0.0) ** 2)
            normalization.add(abs(integrate_phase_space(
                lambda z: state.w_marginal(z, eta), scale=scale) - 1.0))

    return SuiteResult("properties", (
        bounds.result(), gauge.result(), contraction.result(),
        roundtrip.result(), normalization.result()))


SUITES: Dict[str, Callable[..., SuiteResult]] = {
    "oracle": suite_oracle,
    "factorization": suite_factorization,
    "transform": suite_transform,
    "lhv": suite_lhv,
    "properties": suite_properties,
}


def run_suites(
        names: Optional[Sequence[str]] = None,
        seed: int = 0) -> List[SuiteResult]:
    """
    Runs the named suites (all of them by default) in the order given.

    Examples
    --------
    >>> [s.passed for s in run_suites(["factorization"])]
    [True]
    """
    names = list(SUITES.keys()) if not names else list(names)
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise DomainError("Unknown suite(s): {}; choose from {}.".format(
            ", ".join(unknown), ", ".join(SUITES.keys())))

    results = []
    for name in names:
        logger.info("Running suite '{}'.".format(name))
        result = SUITES[name](seed=seed)
        for check in result.checks:
            log = logger.info if check.passed else logger.warning
            log("{}: {} (max deviation {:.3e}, tolerance {:.1e})".format(
                name, "pass" if check.passed else "FAIL",
                check.max_deviation, check.tolerance))
        results.append(result)

    return results
