from logging import getLogger

import numpy as np

from uhdbell.core import params, states
from uhdbell.core.validators import check_number, unit_interval

logger = getLogger(__name__)


def _joint(alpha, beta, k, r):
    sh2 = np.sinh(r) ** 2
    denom = 1.0 + k * (2.0 - k) * sh2
    return k ** 2 / (np.pi ** 2 * denom) * np.exp(
        -(k + k ** 2 * sh2) / denom
        * (np.abs(alpha) ** 2 + np.abs(beta) ** 2)
        + k ** 2 * np.sinh(r) * np.cosh(r) / denom
        * 2.0 * np.real(alpha * beta))


def _marginal(alpha, k, r):
    width = 1.0 + k * np.sinh(r) ** 2
    return k / (np.pi * width) * np.exp(-k * np.abs(alpha) ** 2 / width)


def _ordering_scale(s) -> float:
    s = check_number("s", s, max=1.0, max_inclusive=False)
    return 2.0 / (1.0 - s)


def quasidistribution_tmsv(alpha, beta, s, r):
    r"""
    s-ordered two-mode quasidistribution of the two-mode squeezed
    vacuum ``sum_n tanh(r)^n |n, n> / cosh(r)``.

    With ``k = 2 / (1 - s)`` and ``D = 1 + k (2 - k) sinh(r)^2``

    .. math::

        W = \frac{k^2}{\pi^2 D}\exp\left(
        -\frac{k + k^2\sinh^2 r}{D}(|\alpha|^2 + |\beta|^2)
        + \frac{k^2\sinh r\cosh r}{D}(\alpha\beta + \alpha^*\beta^*)
        \right)

    Examples
    --------
    >>> import numpy as np
    >>> bool(np.isclose(quasidistribution_tmsv(0, 0, 0.0, 0.0),
    ...                 4 / np.pi ** 2))
    True
    """
    r = states.check_squeezing(r)
    alpha, beta = states.as_amplitudes(alpha, beta)
    return _joint(alpha, beta, _ordering_scale(s), r)


def marginal_quasidistribution_tmsv(alpha, s, r):
    """
    Single-mode marginal: a thermal state with mean photon number
    ``sinh(r)^2``.
    """
    r = states.check_squeezing(r)
    alpha, = states.as_amplitudes(alpha)
    return _marginal(alpha, _ordering_scale(s), r)


def w_joint_tmsv(alpha, beta, eta_tilde, r):
    """
    Two-mode squeezed vacuum quasidistribution at the ordering
    ``-(2 - eta_tilde) / eta_tilde`` sampled by lossy detectors.

    Parameters
    ----------
    alpha, beta: complex or numpy.ndarray
        Rescaled displacements.
    eta_tilde: float
        Overall efficiency in (0, 1].
    r: float
        Squeezing, 0 <= r <= 10.

    Examples
    --------
    >>> import numpy as np
    >>> bool(np.isclose(w_joint_tmsv(0, 0, 1.0, 0.0), 1 / np.pi ** 2))
    True
    >>> bool(np.isclose(w_joint_tmsv(0, 0, 1.0, 0.7),
    ...                 1 / np.pi ** 2 / (1 + np.sinh(0.7) ** 2)))
    True
    """
    eta_tilde = unit_interval("eta_tilde", eta_tilde)
    r = states.check_squeezing(r)
    alpha, beta = states.as_amplitudes(alpha, beta)
    return _joint(alpha, beta, eta_tilde, r)


def w_marginal_tmsv(alpha, eta_tilde, r):
    """
    Examples
    --------
    >>> import numpy as np
    >>> bool(np.isclose(w_marginal_tmsv(0, 1.0, 0.0), 1 / np.pi))
    True
    """
    eta_tilde = unit_interval("eta_tilde", eta_tilde)
    r = states.check_squeezing(r)
    alpha, = states.as_amplitudes(alpha)
    return _marginal(alpha, eta_tilde, r)


def q_function_tmsv(gamma, delta, r):
    """
    Two-mode Q function ``|<gamma, delta|psi>|^2 / pi^2`` of the two-mode
    squeezed vacuum, summed directly from its photon-number expansion:
    ``exp(-|gamma|^2 - |delta|^2 + tanh(r) (gamma delta + c.c.))
    / (pi cosh(r))^2``.
    """
    r = states.check_squeezing(r)
    gamma, delta = states.as_amplitudes(gamma, delta)
    return np.exp(
        -np.abs(gamma) ** 2 - np.abs(delta) ** 2
        + 2.0 * np.tanh(r) * np.real(gamma * delta)) \
        / (np.pi * np.cosh(r)) ** 2


def q_marginal_function_tmsv(gamma, r):
    r = states.check_squeezing(r)
    gamma, = states.as_amplitudes(gamma)
    c2 = np.cosh(r) ** 2
    return np.exp(-np.abs(gamma) ** 2 / c2) / (np.pi * c2)


def tmsv_q_covariance(r) -> np.ndarray:
    """
    Covariance of ``q_function_tmsv`` read as a Gaussian density in the
    real coordinates ``(Re gamma, Im gamma, Re delta, Im delta)``.

    Examples
    --------
    >>> import numpy as np
    >>> bool(np.allclose(tmsv_q_covariance(0.0), 0.5 * np.eye(4)))
    True
    """
    t = np.tanh(states.check_squeezing(r))
    quadratic = np.array([
        [1.0, 0.0, -t, 0.0],
        [0.0, 1.0, 0.0, t],
        [-t, 0.0, 1.0, 0.0],
        [0.0, t, 0.0, 1.0],
    ])
    return np.linalg.inv(2.0 * quadratic)


class TwoModeSqueezedVacuum(states.State):
    r"""
    Summary
        Two-mode squeezed vacuum produced by nondegenerate parametric
        down-conversion. ``r = 0`` is the two-mode vacuum.

    Key
        "tmsv"

    Parameters
        * "r": squeezing parameter, 0 <= r <= 10. [0.5]

    Notes
        - Every s-ordered quasidistribution is a positive Gaussian.
        - The joint functions are invariant under
          ``(alpha, beta) -> (alpha e^{i phi}, beta e^{-i phi})``.

    Examples
        .. code-block:: python

            >>> from uhdbell.core.states import StateKind
            >>> state = StateKind.create("tmsv", r=0.0)
            >>> import numpy as np
            >>> bool(np.isclose(state.w_marginal(0, 0.3), 0.3 / np.pi))
            True
    """

    class Meta:
        key = "tmsv"
        name = "Two-mode squeezed vacuum"
        description = "Nondegenerate parametric down-conversion output"
        params = params.ParamSet(states.squeezing_param())

    opposite_phase = True

    def quasidistribution(self, alpha, beta, s):
        return quasidistribution_tmsv(alpha, beta, s, self.r)

    def marginal_quasidistribution(self, alpha, s, arm="A"):
        states.check_arm(arm)
        return marginal_quasidistribution_tmsv(alpha, s, self.r)

    def w_joint(self, alpha, beta, eta_tilde):
        return w_joint_tmsv(alpha, beta, eta_tilde, self.r)

    def w_marginal(self, alpha, eta_tilde, arm="A"):
        states.check_arm(arm)
        return w_marginal_tmsv(alpha, eta_tilde, self.r)

    def joint_kernel(self, eta_tilde):
        r = self.r
        return lambda a, b: _joint(a, b, eta_tilde, r)

    def marginal_kernel(self, eta_tilde):
        r = self.r
        return lambda a: _marginal(a, eta_tilde, r)
