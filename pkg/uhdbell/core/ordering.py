"""
s-ordering machinery.

Losses turn a photocount measurement evaluated at ordering ``s`` into
a quasidistribution of lower ordering (``effective_ordering``); any
ordering can be reached from a higher one by Gaussian smoothing
(``ordering_transform``), which is evaluated here by tensor-product
Gauss-Hermite quadrature.
"""
from functools import lru_cache
from logging import getLogger
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from .validators import DomainError, check_amplitude, check_number, \
    unit_interval

logger = getLogger(__name__)

DEFAULT_ORDER = 64
CHUNK_SIZE = 1 << 20


class QuadratureError(RuntimeError):
    """
    The quadrature order is too low for the integrand.
    """


def check_ordering(s, name: str = "s") -> float:
    """
    Returns ``s`` as float after checking it is an admissible
    (nonpositive) ordering.
    """
    return check_number(name, s, max=0.0)


def effective_ordering(s: float, eta_tilde: float) -> float:
    """
    Ordering of the quasidistribution actually sampled by a detector
    with overall efficiency ``eta_tilde`` when the count statistics
    are summed at ordering ``s``.

    Parameters
    ----------
    s: float
        Ordering used in the photocount sum, s <= 0.
    eta_tilde: float
        Overall efficiency (detector efficiency times beam splitter
        transmission), in (0, 1].

    Returns
    -------
    float
        ``-(1 - s - eta_tilde) / eta_tilde``.

    Examples
    --------
    >>> effective_ordering(0.0, 1.0)
    0.0
    >>> effective_ordering(-1.0, 1.0)
    -1.0
    >>> effective_ordering(-1.0, 0.5)
    -3.0
    """
    s = check_ordering(s)
    eta_tilde = unit_interval("eta_tilde", eta_tilde)
    return (s + eta_tilde - 1.0) / eta_tilde


def ordering_weight(s: float) -> float:
    """
    The ratio ``(s + 1) / (s - 1)`` raised to the photon number in
    the photocount sum; its modulus is at most 1 for s <= 0.
    """
    return (s + 1.0) / (s - 1.0)


@lru_cache(maxsize=16)
def gauss_hermite_nodes(order: int = DEFAULT_ORDER) -> Tuple[
        np.ndarray, np.ndarray]:
    """
    Complex nodes and weights for integrating ``exp(-|z|^2) f(z)``
    over the complex plane, normalized so that the weights sum to 1.

    The arrays are cached and flagged read-only.

    Returns
    -------
    (nodes, weights): (numpy.ndarray, numpy.ndarray)
        ``order**2`` complex nodes ``x_i + i y_j`` and the matching
        weights ``w_i w_j / pi``.
    """
    if order < 2:
        raise DomainError("Quadrature order must be at least 2.")

    x, w = np.polynomial.hermite.hermgauss(order)
    nodes = (x[:, None] + 1j * x[None, :]).ravel()
    weights = (w[:, None] * w[None, :]).ravel() / np.pi
    nodes.setflags(write=False)
    weights.setflags(write=False)
    logger.debug("Gauss-Hermite nodes of order {} computed.".format(order))
    return nodes, weights


def _smoothing_quadrature(
        w_src: Callable, points: Sequence[complex], scale: float,
        order: int, chunk_size: int = CHUNK_SIZE) -> float:
    nodes, weights = gauss_hermite_nodes(order)
    n_modes = len(points)
    n_nodes = nodes.size
    total = n_nodes ** n_modes
    shape = (n_nodes,) * n_modes

    acc = 0.0
    for start in range(0, total, chunk_size):
        idx = np.arange(start, min(start + chunk_size, total))
        ids = np.unravel_index(idx, shape)
        args = [points[m] + scale * nodes[ids[m]] for m in range(n_modes)]
        weight = weights[ids[0]].copy()
        for m in range(1, n_modes):
            weight *= weights[ids[m]]

        values = np.asarray(w_src(*args), dtype=float)
        acc += float(np.sum(weight * values))

    return acc


def ordering_transform(
        w_src: Callable,
        s: float,
        s_prime: float,
        points: Sequence[complex],
        order: int = DEFAULT_ORDER,
        check_tol: Optional[float] = 1e-6) -> float:
    r"""
    Evaluates the ``s_prime``-ordered quasidistribution at ``points``
    from the ``s``-ordered one by Gaussian smoothing,

    .. math::

        W(\alpha; s') = \left(\frac{2}{\pi(s-s')}\right)^M
        \int d^{2M}\beta\,
        e^{-\frac{2}{s-s'}\sum_i |\alpha_i-\beta_i|^2} W(\beta; s).

    Parameters
    ----------
    w_src: callable
        ``w_src(beta_1, ..., beta_M)`` returning the source function;
        it is called with numpy arrays of complex amplitudes and must
        broadcast over them.
    s: float
        Ordering of ``w_src``.
    s_prime: float
        Target ordering, ``s_prime < s``.
    points: list of complex
        The M amplitudes at which to evaluate the result.
    order: int
        Gauss-Hermite order per real dimension.
    check_tol: float, optional
        If set, the result is recomputed at half the order and a
        ``QuadratureError`` is raised when the two differ by more
        than ``check_tol * max(1, |result|)``.

    Returns
    -------
    float
        The transformed value.

    Examples
    --------
    >>> import numpy as np
    >>> vacuum_wigner = lambda b: 2.0 / np.pi * np.exp(-2.0 * abs(b) ** 2)
    >>> value = ordering_transform(vacuum_wigner, 0.0, -1.0, [0j])
    >>> abs(value - 1.0 / np.pi) < 1e-12
    True
    """
    s = check_number("s", s)
    s_prime = check_number("s_prime", s_prime)
    if not s_prime < s:
        raise DomainError(
            "The target ordering s'={} must be lower than s={}.".format(
                s_prime, s))

    points = [check_amplitude("points[{}]".format(i), p)
              for i, p in enumerate(points)]
    if len(points) == 0:
        raise DomainError("At least one mode is required.")

    scale = np.sqrt((s - s_prime) / 2.0)
    value = _smoothing_quadrature(w_src, points, scale, order)

    if check_tol is not None:
        coarse_order = max(order // 2, 2)
        coarse = _smoothing_quadrature(w_src, points, scale, coarse_order)
        deviation = abs(value - coarse)
        logger.debug(
            "ordering_transform: order {} vs {} deviation {:.3e}".format(
                order, coarse_order, deviation))
        if deviation > check_tol * max(1.0, abs(value)):
            raise QuadratureError((
                "Gauss-Hermite order {} is insufficient: "
                "half-order estimate differs by {:.3e}.").format(
                    order, deviation))

    return value


def integrate_phase_space(
        w: Callable, modes: int = 1, scale: float = 1.0,
        order: int = DEFAULT_ORDER) -> float:
    """
    Integrates ``w`` over the whole M-mode phase space.

    The integrand is sampled at ``scale`` times the Gauss-Hermite nodes,
    so the outermost node lies at ``scale * max(x)`` (about 10.5 *
    ``scale`` for order 64). Choosing ``scale`` close to the width of
    ``w`` makes the quadrature exact for Gaussians times polynomials.
    """
    if scale <= 0:
        raise DomainError("'scale' must be positive.")

    nodes, weights = gauss_hermite_nodes(order)
    factor = weights * np.pi * np.exp(np.abs(nodes) ** 2) * scale ** 2
    if modes == 1:
        return float(np.sum(factor * np.asarray(w(scale * nodes))))

    if modes == 2:
        acc = 0.0
        for k in range(nodes.size):
            values = np.asarray(w(scale * nodes[k], scale * nodes))
            acc += factor[k] * float(np.sum(factor * values))
        return acc

    raise DomainError("Only one- and two-mode integrals are supported.")


def gaussian_transform_covariance(
        cov: np.ndarray, s: float, s_prime: float) -> np.ndarray:
    """
    Exact ordering transform for Gaussian quasidistributions: the
    covariance in real quadratures ``(Re a_1, Im a_1, Re a_2, ...)``
    grows by ``(s - s') / 4`` on the diagonal.
    """
    if not s_prime < s:
        raise DomainError(
            "The target ordering s'={} must be lower than s={}.".format(
                s_prime, s))

    cov = np.asarray(cov, dtype=float)
    return cov + (s - s_prime) / 4.0 * np.eye(cov.shape[0])


def gaussian_quasidistribution(
        points: Sequence[complex], cov: np.ndarray,
        mean: Optional[Sequence[complex]] = None) -> float:
    """
    Value of a Gaussian quasidistribution with covariance ``cov`` (in
    real quadratures) and complex mean ``mean`` at ``points``.
    """
    cov = np.asarray(cov, dtype=float)
    z = np.asarray(points, dtype=complex)
    if mean is not None:
        z = z - np.asarray(mean, dtype=complex)

    x = np.column_stack([z.real, z.imag]).ravel()
    if cov.shape != (x.size, x.size):
        raise DomainError(
            "Covariance shape {} does not match {} modes.".format(
                cov.shape, z.size))

    _, logdet = np.linalg.slogdet(cov)
    quad = x @ np.linalg.solve(cov, x)
    return float(np.exp(-0.5 * quad - 0.5 * logdet
                        - 0.5 * x.size * np.log(2.0 * np.pi)))
