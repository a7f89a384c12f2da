from logging import getLogger

import numpy as np

from uhdbell.core import params, states
from uhdbell.core.validators import check_number, unit_interval

logger = getLogger(__name__)


def _joint(alpha, beta, k):
    # k = 2 / (1 - s); k = eta_tilde at the loss-induced ordering.
    return (k / np.pi) ** 2 \
        * (1.0 - k + 0.5 * k ** 2 * np.abs(alpha + beta) ** 2) \
        * np.exp(-k * (np.abs(alpha) ** 2 + np.abs(beta) ** 2))


def _marginal(alpha, k):
    return (k / np.pi) \
        * (1.0 - 0.5 * k + 0.5 * k ** 2 * np.abs(alpha) ** 2) \
        * np.exp(-k * np.abs(alpha) ** 2)


def _ordering_scale(s) -> float:
    s = check_number("s", s, max=1.0, max_inclusive=False)
    return 2.0 / (1.0 - s)


def quasidistribution_single_photon(alpha, beta, s):
    """
    s-ordered two-mode quasidistribution of a single photon split on a
    50:50 beam splitter, ``(|1,0> + |0,1>) / sqrt(2)``.

    Parameters
    ----------
    alpha, beta: complex or numpy.ndarray
        Phase-space amplitudes of modes A and B.
    s: float
        Ordering, s < 1. ``s = 0`` is the Wigner function,
        ``s = -1`` the Q function.

    Returns
    -------
    float or numpy.ndarray

    Examples
    --------
    >>> import numpy as np
    >>> bool(quasidistribution_single_photon(0, 0, 0.0) < 0)
    True
    >>> bool(abs(quasidistribution_single_photon(0, 0, -1.0)) < 1e-300)
    True
    """
    alpha, beta = states.as_amplitudes(alpha, beta)
    return _joint(alpha, beta, _ordering_scale(s))


def marginal_quasidistribution_single_photon(alpha, s):
    """
    Single-mode marginal of ``quasidistribution_single_photon``; the
    mode is an equal mixture of vacuum and one photon.
    """
    alpha, = states.as_amplitudes(alpha)
    return _marginal(alpha, _ordering_scale(s))


def w_joint_single_photon(alpha, beta, eta_tilde):
    """
    Two-mode quasidistribution seen through photon-silence events of
    two detectors with overall efficiency ``eta_tilde``.

    ``(eta/pi)^2 (1 - eta + eta^2 |alpha + beta|^2 / 2)
    exp(-eta (|alpha|^2 + |beta|^2))``

    Examples
    --------
    >>> float(w_joint_single_photon(0, 0, 1.0))
    0.0
    >>> round(float(w_joint_single_photon(0, 0, 0.5)), 6)
    0.012665
    """
    eta_tilde = unit_interval("eta_tilde", eta_tilde)
    alpha, beta = states.as_amplitudes(alpha, beta)
    return _joint(alpha, beta, eta_tilde)


def w_marginal_single_photon(alpha, eta_tilde):
    """
    Single-mode counterpart of ``w_joint_single_photon``.

    Examples
    --------
    >>> import numpy as np
    >>> bool(np.isclose(w_marginal_single_photon(0, 1.0), 0.5 / np.pi))
    True
    """
    eta_tilde = unit_interval("eta_tilde", eta_tilde)
    alpha, = states.as_amplitudes(alpha)
    return _marginal(alpha, eta_tilde)


class SinglePhotonSplit(states.State):
    r"""
    Summary
        A single photon incident on a 50:50 beam splitter, which leaves
        one photon entangled with vacuum across modes A and B.

    Key
        "single-photon"

    Parameters
        None.

    Notes
        - The Wigner function is negative around the origin, while
          every quasidistribution at ordering s <= -1 is nonnegative.
        - The marginals of both modes coincide, so ``arm`` only
          selects the mode for symmetry with other states.

    Examples
        .. code-block:: python

            >>> from uhdbell.core.states import StateKind
            >>> state = StateKind.create("single-photon")
            >>> float(state.w_joint(0, 0, 1.0))
            0.0
    """

    class Meta:
        key = "single-photon"
        name = "Single photon on a beam splitter"
        description = "One photon split between two modes"
        params = params.ParamSet()

    def quasidistribution(self, alpha, beta, s):
        return quasidistribution_single_photon(alpha, beta, s)

    def marginal_quasidistribution(self, alpha, s, arm="A"):
        states.check_arm(arm)
        return marginal_quasidistribution_single_photon(alpha, s)

    def w_joint(self, alpha, beta, eta_tilde):
        return w_joint_single_photon(alpha, beta, eta_tilde)

    def w_marginal(self, alpha, eta_tilde, arm="A"):
        states.check_arm(arm)
        return w_marginal_single_photon(alpha, eta_tilde)

    def joint_kernel(self, eta_tilde):
        """
        Unchecked vectorized ``(alpha, beta) -> w_joint`` for hot loops.
        """
        return lambda a, b: _joint(a, b, eta_tilde)

    def marginal_kernel(self, eta_tilde):
        return lambda a: _marginal(a, eta_tilde)

