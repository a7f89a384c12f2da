"""
Truncated Fock-space computation of the click statistics.

The no-click probabilities are evaluated as expectation values of
``D(alpha) (1 - eta)^n D(alpha)^dagger`` in the photon-number basis,
with displacement matrix elements from the column recursion

    <m|D(a)|n+1> = (sqrt(m) <m-1|D(a)|n> - conj(a) <m|D(a)|n>) / sqrt(n+1)

This shares no code with the closed-form quasidistributions and serves
as their reference.
"""
from logging import getLogger
import math
from typing import Optional, Tuple

import numpy as np
from scipy import linalg, stats

from .bell import as_setup, as_state
from .detection import CountDistribution, poisson_counts
from .states import State, check_arm
from .validators import DomainError, check_amplitude, check_number, \
    unit_interval

logger = getLogger(__name__)

DEFAULT_DIM = 60
SQUEEZING_TAIL = 1e-16
DISPLACEMENT_TAIL = 1e-12


class TruncationError(RuntimeError):
    """
    The Fock truncation is too small; ``suggested_dim`` is large enough.
    """

    def __init__(self, message, suggested_dim: int):
        super(TruncationError, self).__init__(message)
        self.suggested_dim = suggested_dim


class TruncatedState(object):
    """
    Two-mode pure state ``sum c_nm |n>_A |m>_B`` with ``n, m < dim``.

    Attributes
    ----------
    dim: int
        Truncation.
    amplitudes: numpy.ndarray
        The ``dim x dim`` coefficient matrix.
    tail_mass: float
        Norm discarded by the truncation.
    """

    def __init__(self, amplitudes, tail_mass: float = 0.0):
        self.amplitudes = np.asarray(amplitudes, dtype=complex)
        self.dim = self.amplitudes.shape[0]
        self.tail_mass = tail_mass

    @property
    def norm(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2))

    @classmethod
    def from_state(cls, state: State, dim: int = DEFAULT_DIM):
        """
        Examples
        --------
        >>> from uhdbell.core.states import StateKind
        >>> s = TruncatedState.from_state(StateKind.create("tmsv", r=0.3))
        >>> abs(s.norm + s.tail_mass - 1.0) < 1e-12
        True
        """
        state = as_state(state)
        dim = _check_dim(dim)
        c = np.zeros((dim, dim), dtype=complex)
        if state.key() == "single-photon":
            if dim < 2:
                raise TruncationError(
                    "The single photon needs dim >= 2.", suggested_dim=2)
            c[1, 0] = c[0, 1] = 1.0 / math.sqrt(2.0)
            return cls(c)

        if state.key() == "tmsv":
            t = math.tanh(state.r)
            n = np.arange(dim)
            c[n, n] = t ** n / math.cosh(state.r)
            return cls(c, tail_mass=t ** (2 * dim))

        raise DomainError(
            "No Fock representation for state '{}'.".format(state.key()))


def _check_dim(dim) -> int:
    if isinstance(dim, bool) or int(dim) != dim or dim < 1:
        raise DomainError("'dim' must be a positive integer.")
    return int(dim)


def required_dim(state, tol: float = SQUEEZING_TAIL) -> int:
    """
    Smallest truncation with ``tanh(r)^(2 dim) < tol``.

    Examples
    --------
    >>> required_dim("single-photon")
    2
    >>> from uhdbell.core.states import StateKind
    >>> required_dim(StateKind.create("tmsv", r=0.6)) <= 60
    True
    """
    state = as_state(state)
    tol = check_number("tol", tol, min=0.0, max=1.0, min_inclusive=False)
    if not state.has_squeezing:
        return 2

    t = math.tanh(state.r)
    if t == 0.0:
        return 1

    dim = max(1, int(math.floor(math.log(tol) / (2.0 * math.log(t)))))
    while t ** (2 * dim) >= tol:
        dim += 1
    return dim


def output_dim(dim: int, alpha: complex) -> int:
    """
    Size of the photon-number basis that holds the displaced states
    ``D(alpha)|n>``, ``n < dim``, up to a negligible tail.
    """
    return int(math.ceil((math.sqrt(dim) + abs(alpha) + 8.0) ** 2)) + 10


def displacement_matrix(
        alpha, dim: int, out_dim: Optional[int] = None) -> Tuple[
            np.ndarray, np.ndarray]:
    """
    Matrix elements ``<m|D(alpha)|n>`` for ``m < out_dim``, ``n < dim``.

    Returns
    -------
    (matrix, tail): (numpy.ndarray, numpy.ndarray)
        The ``out_dim x dim`` matrix and, per column, the norm of
        ``D(alpha)|n>`` outside the first ``out_dim`` number states.

    Examples
    --------
    >>> m, tail = displacement_matrix(0.5, 3)
    >>> bool(abs(m[0, 0] - np.exp(-0.125)) < 1e-15)
    True
    >>> bool(np.all(tail < 1e-12))
    True
    """
    alpha = check_amplitude("alpha", alpha)
    dim = _check_dim(dim)
    out_dim = output_dim(dim, alpha) if out_dim is None else int(out_dim)

    matrix = np.zeros((out_dim, dim), dtype=complex)
    column = np.empty(out_dim, dtype=complex)
    column[0] = math.exp(-0.5 * abs(alpha) ** 2)
    for m in range(1, out_dim):
        column[m] = column[m - 1] * alpha / math.sqrt(m)
    matrix[:, 0] = column

    sqrt_m = np.sqrt(np.arange(out_dim))
    for n in range(dim - 1):
        prev = matrix[:, n]
        nxt = -alpha.conjugate() * prev
        nxt[1:] += sqrt_m[1:] * prev[:-1]
        matrix[:, n + 1] = nxt / math.sqrt(n + 1)

    tail = np.clip(1.0 - np.sum(np.abs(matrix) ** 2, axis=0), 0.0, None)
    return matrix, tail


def loss_no_click(amplitudes, eta_tilde: float) -> float:
    """
    ``sum_k (1 - eta)^k |amplitudes_k|^2``: probability that a detector
    of efficiency ``eta_tilde`` registers nothing from a pure
    single-mode state.

    Examples
    --------
    >>> loss_no_click([0.0, 1.0], 0.25)
    0.75
    """
    eta_tilde = unit_interval("eta_tilde", eta_tilde)
    amplitudes = np.asarray(amplitudes, dtype=complex)
    weights = (1.0 - eta_tilde) ** np.arange(amplitudes.size)
    return float(np.dot(weights, np.abs(amplitudes) ** 2))


def _displaced_amplitudes(state: State, alpha, beta, dim):
    """
    Coefficients of ``D(-alpha) x D(-beta)`` applied to the state, with
    the largest column tail of the two displacement matrices.
    """
    truncated = TruncatedState.from_state(state, dim)
    ua, tail_a = displacement_matrix(-alpha, truncated.dim)
    ub, tail_b = displacement_matrix(-beta, truncated.dim)
    used = np.any(truncated.amplitudes != 0, axis=1) | \
        np.any(truncated.amplitudes != 0, axis=0)
    worst = max(float(np.max(tail_a[used])), float(np.max(tail_b[used])))
    if worst > DISPLACEMENT_TAIL:
        raise TruncationError(
            "Displaced number states leak {:.3e} beyond the output "
            "basis.".format(worst), suggested_dim=truncated.dim)

    size = max(ua.shape[0], ub.shape[0])
    ua = np.pad(ua, ((0, size - ua.shape[0]), (0, 0)))
    ub = np.pad(ub, ((0, size - ub.shape[0]), (0, 0)))
    logger.debug("Fock oracle: dim={} output dim={}".format(
        truncated.dim, size))
    return ua @ truncated.amplitudes @ ub.T


def _check_truncation(state: State, dim: int):
    dim = _check_dim(dim)
    needed = required_dim(state)
    if needed > dim:
        raise TruncationError(
            "dim={} truncates {}: tanh(r)^(2 dim) >= {}; use dim >= {}."
            .format(dim, state, SQUEEZING_TAIL, needed),
            suggested_dim=needed)
    return dim


def oracle_q_joint(state, alpha, beta, p, dim: int = DEFAULT_DIM) -> float:
    """
    Joint no-click probability computed in the photon-number basis.

    Parameters
    ----------
    state: State or str
        ``single-photon`` or ``tmsv``.
    alpha, beta: complex
        Rescaled displacements.
    p: SetupParams
        Imperfections.
    dim: int
        Fock truncation per mode.

    Raises
    ------
    TruncationError
        If ``dim`` is too small for the state.

    Examples
    --------
    >>> from uhdbell.core.bell import SetupParams
    >>> oracle_q_joint("single-photon", 0, 0, SetupParams())
    0.0
    """
    state = as_state(state)
    p = as_setup(p)
    alpha = check_amplitude("alpha", alpha)
    beta = check_amplitude("beta", beta)
    dim = _check_truncation(state, dim)

    m = _displaced_amplitudes(state, alpha, beta, dim)
    weights = (1.0 - p.eta_tilde) ** np.arange(m.shape[0])
    value = float(weights @ (np.abs(m) ** 2) @ weights)
    return value * p.p_dark ** 2 * math.exp(
        -p.mismatch_rate * (abs(alpha) ** 2 + abs(beta) ** 2))


def oracle_q_marginal(
        state, alpha, p, dim: int = DEFAULT_DIM, arm: str = "A") -> float:
    """
    Single-detector no-click probability in the photon-number basis.
    """
    state = as_state(state)
    p = as_setup(p)
    check_arm(arm)
    alpha = check_amplitude("alpha", alpha)
    dim = _check_truncation(state, dim)

    if arm == "A":
        m = _displaced_amplitudes(state, alpha, 0j, dim)
        probs = np.sum(np.abs(m) ** 2, axis=1)
    else:
        m = _displaced_amplitudes(state, 0j, alpha, dim)
        probs = np.sum(np.abs(m) ** 2, axis=0)

    weights = (1.0 - p.eta_tilde) ** np.arange(probs.size)
    return float(weights @ probs) * p.p_dark * math.exp(
        -p.mismatch_rate * abs(alpha) ** 2)


def oracle_detector_counts(
        state, alpha, beta, p, dim: int = DEFAULT_DIM,
        n_max: int = 20) -> np.ndarray:
    """
    Joint distribution of the counts of detectors A and B (indices up
    to ``n_max``): binomial loss of the displaced photons, plus
    Poissonian counts from the unmatched probe part and dark counts.
    """
    state = as_state(state)
    p = as_setup(p)
    alpha = check_amplitude("alpha", alpha)
    beta = check_amplitude("beta", beta)
    dim = _check_truncation(state, dim)
    if isinstance(n_max, bool) or int(n_max) != n_max or n_max < 0:
        raise DomainError("'n_max' must be a nonnegative integer.")
    n_max = int(n_max)

    m = _displaced_amplitudes(state, alpha, beta, dim)
    photons = np.abs(m) ** 2
    k = np.arange(photons.shape[0])
    j = np.arange(n_max + 1)
    loss = stats.binom.pmf(j[:, None], k[None, :], p.eta_tilde)
    detected = loss @ photons @ loss.T

    dark_mean = -math.log(p.p_dark)
    noise_a = poisson_counts(
        p.mismatch_rate * abs(alpha) ** 2 + dark_mean, n_max).probs
    noise_b = poisson_counts(
        p.mismatch_rate * abs(beta) ** 2 + dark_mean, n_max).probs
    conv_a = linalg.toeplitz(noise_a, np.zeros(n_max + 1))
    conv_b = linalg.toeplitz(noise_b, np.zeros(n_max + 1))
    return conv_a @ detected @ conv_b.T


def oracle_count_distribution(
        state, alpha, beta, p, dim: int = DEFAULT_DIM,
        n_max: int = 20) -> CountDistribution:
    """
    Distribution of the total number of counts registered by both
    detectors, ``n <= n_max``; the remainder is the tail mass.

    Examples
    --------
    >>> from uhdbell.core.bell import SetupParams
    >>> dist = oracle_count_distribution(
    ...     "single-photon", 0, 0, SetupParams(), n_max=3)
    >>> round(float(dist.probs[1]), 12)
    1.0
    """
    joint = oracle_detector_counts(state, alpha, beta, p, dim, n_max)
    flipped = joint[:, ::-1]
    size = joint.shape[0]
    total = np.array([np.trace(flipped, offset=size - 1 - n)
                      for n in range(size)])
    tail = max(0.0, 1.0 - float(np.sum(total)))
    return CountDistribution(total, tail_mass=tail)


def sample_clicks(
        dist: CountDistribution, n_samples: int,
        seed: Optional[int] = None) -> CountDistribution:
    """
    Empirical distribution of ``n_samples`` draws from ``dist`` by
    inverse-CDF sampling with ``numpy.random.default_rng(seed)``.

    Examples
    --------
    >>> sample_clicks(CountDistribution([1.0]), 10, seed=1).probs
    array([1.])
    """
    if not isinstance(dist, CountDistribution):
        dist = CountDistribution(dist)
    if isinstance(n_samples, bool) or int(n_samples) != n_samples \
            or n_samples < 1:
        raise DomainError("'n_samples' must be a positive integer.")
    n_samples = int(n_samples)

    rng = np.random.default_rng(seed)
    cdf = np.cumsum(dist.probs)
    cdf /= cdf[-1]
    draws = np.searchsorted(cdf, rng.random(n_samples), side="right")
    draws = np.minimum(draws, len(dist) - 1)
    counts = np.bincount(draws, minlength=len(dist))
    return CountDistribution(counts / n_samples)


def binomial_error(p: float, n: int) -> float:
    """
    One standard deviation of an empirical frequency of ``n`` trials.

    Examples
    --------
    >>> round(binomial_error(0.5, 10 ** 6), 12)
    0.0005
    """
    p = check_number("p", p, min=0.0, max=1.0)
    if n < 1:
        raise DomainError("'n' must be positive.")
    return math.sqrt(p * (1.0 - p) / n)
