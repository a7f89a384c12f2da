"""
Photon-silence probabilities of a Bell test with unbalanced homodyne
detection, the Clauser-Horne combination and the Wigner-function
hidden-variable kernel.

A no-click event is assigned the value 1 and a click the value 0, so
every probability below is a zero-count probability, evaluated at
ordering s = -1 of the count sum.
"""
import cmath
from dataclasses import dataclass, field
from logging import getLogger
from typing import Any, Dict, Optional, Union

import numpy as np

from .detection import mismatch_envelope
from .ordering import DEFAULT_ORDER, effective_ordering, ordering_transform
from .states import State, StateKind, check_arm, check_squeezing
from .validators import DomainError, check_amplitude, unit_interval

logger = getLogger(__name__)

COMPLEX_TOL = 1e-3


@dataclass(frozen=True)
class SetupParams:
    """
    Imperfections shared by both arms.

    Attributes
    ----------
    eta_tilde: float
        Overall efficiency, detector efficiency times beam splitter
        transmission, in (0, 1].
    xi: float
        Mode matching in (0, 1].
    p_dark: float
        Probability of no dark count in a detection window, in (0, 1].
    """
    eta_tilde: float = 1.0
    xi: float = 1.0
    p_dark: float = 1.0

    def __post_init__(self):
        object.__setattr__(
            self, "eta_tilde", unit_interval("eta_tilde", self.eta_tilde))
        object.__setattr__(self, "xi", unit_interval("xi", self.xi))
        object.__setattr__(
            self, "p_dark", unit_interval("p_dark", self.p_dark))

    @property
    def mismatch_rate(self) -> float:
        """
        ``eta_tilde (1 - xi) / xi``, the decay rate of the mismatch
        envelope at s = -1.
        """
        return self.eta_tilde * (1.0 - self.xi) / self.xi

    def replace(self, **kwargs) -> "SetupParams":
        values = self.to_dict()
        values.update(kwargs)
        return SetupParams(**values)

    def to_dict(self) -> Dict[str, float]:
        return {
            "eta_tilde": self.eta_tilde,
            "xi": self.xi,
            "p_dark": self.p_dark,
        }


@dataclass(frozen=True)
class DisplacementSettings:
    """
    The two settings per arm of the CH test, as rescaled coherent
    displacements, plus the squeezing for states that have one.
    """
    a1: complex
    a2: complex
    b1: complex
    b2: complex
    r: Optional[float] = None

    def __post_init__(self):
        for name in ("a1", "a2", "b1", "b2"):
            object.__setattr__(
                self, name, check_amplitude(name, getattr(self, name)))
        if self.r is not None:
            object.__setattr__(self, "r", check_squeezing(self.r))

    def amplitudes(self):
        return (self.a1, self.a2, self.b1, self.b2)

    def rotated(self, phi: float, opposite: bool = False):
        """
        Multiplies the A amplitudes by ``e^{i phi}`` and the B
        amplitudes by ``e^{i phi}`` (or ``e^{-i phi}`` if ``opposite``).
        """
        pa = cmath.exp(1j * phi)
        pb = pa.conjugate() if opposite else pa
        return DisplacementSettings(
            self.a1 * pa, self.a2 * pa, self.b1 * pb, self.b2 * pb, self.r)

    def canonical(self, opposite: bool = False) -> "DisplacementSettings":
        """
        Fixes the global phase freedom: ``Im a1 = 0`` exactly and
        ``Re a1 >= 0``.

        Examples
        --------
        >>> d = DisplacementSettings(1j, 1.0, 1j, 0.5).canonical()
        >>> d.a1
        (1+0j)
        >>> abs(d.b1 - 1) < 1e-15
        True
        """
        if self.a1 == 0:
            return self

        phi = -cmath.phase(self.a1)
        rotated = self.rotated(phi, opposite=opposite)
        return DisplacementSettings(
            complex(abs(self.a1), 0.0), rotated.a2, rotated.b1, rotated.b2,
            self.r)

    def to_dict(self) -> Dict[str, Any]:
        result = {}
        for name, amp in zip(("a1", "a2", "b1", "b2"), self.amplitudes()):
            result["re_" + name] = amp.real
            result["im_" + name] = amp.imag
        if self.r is not None:
            result["r"] = self.r
        return result

    @classmethod
    def from_dict(cls, values: Dict[str, Any]) -> "DisplacementSettings":
        amps = [complex(values.get("re_" + n, 0.0),
                        values.get("im_" + n, 0.0))
                for n in ("a1", "a2", "b1", "b2")]
        return cls(*amps, r=values.get("r"))


@dataclass(frozen=True)
class CHResult:
    """
    Outcome of a CH maximization.

    ``value`` is the maximized violation ``ch_violation(ch)``, positive
    exactly when the inequality is violated; ``ch`` is the CH
    combination at the returned settings.
    """
    value: float
    settings: DisplacementSettings
    converged: bool
    restarts_used: int
    n_evaluations: int = 0
    state: Optional[Dict[str, Any]] = None
    setup: Optional[SetupParams] = field(default=None)
    ch: Optional[float] = None

    @property
    def violation(self) -> bool:
        return self.value > 0.0

    @property
    def complex_optimum(self) -> bool:
        """
        True when some optimal amplitude has an imaginary part above
        1e-3 in the canonical gauge.
        """
        return any(abs(a.imag) > COMPLEX_TOL
                   for a in self.settings.amplitudes())

    def to_dict(self) -> Dict[str, Any]:
        result = {
            "value": self.value,
            "ch": self.ch,
            "violation": self.violation,
            "converged": self.converged,
            "restarts_used": self.restarts_used,
            "n_evaluations": self.n_evaluations,
            "complex_optimum": self.complex_optimum,
            "settings": self.settings.to_dict(),
        }
        if self.state is not None:
            result["state"] = self.state
        if self.setup is not None:
            result["setup"] = self.setup.to_dict()
        return result


def as_state(state: Union[State, str, dict]) -> State:
    if isinstance(state, State):
        return state
    return StateKind.create(state)


def as_setup(p) -> SetupParams:
    if isinstance(p, SetupParams):
        return p
    if isinstance(p, dict):
        return SetupParams(**p)
    return SetupParams(*p)


def q_joint(state, alpha, beta, p) -> float:
    """
    Probability that neither detector clicks when the arms are displaced
    by ``alpha`` and ``beta``:

    ``(pi p_D / eta)^2 W_AB(alpha, beta; -(2 - eta) / eta)
    exp(-eta (1 - xi) / xi (|alpha|^2 + |beta|^2))``

    Parameters
    ----------
    state: State or str
        The two-mode state, or its registered key.
    alpha, beta: complex
        Rescaled displacements.
    p: SetupParams
        Efficiency, mode matching and dark-count parameters.

    Examples
    --------
    >>> p = SetupParams(eta_tilde=0.5)
    >>> round(q_joint("single-photon", 0, 0, p), 12)
    0.5
    """
    state = as_state(state)
    p = as_setup(p)
    alpha = check_amplitude("alpha", alpha)
    beta = check_amplitude("beta", beta)
    w = state.w_joint(alpha, beta, p.eta_tilde)
    return float(
        (np.pi * p.p_dark / p.eta_tilde) ** 2 * w
        * mismatch_envelope(alpha, p.eta_tilde, p.xi, -1.0)
        * mismatch_envelope(beta, p.eta_tilde, p.xi, -1.0))


def q_marginal(state, alpha, p, arm: str = "A") -> float:
    """
    Probability that the detector of one arm does not click.

    Examples
    --------
    >>> round(q_marginal("single-photon", 0, SetupParams()), 12)
    0.5
    """
    state = as_state(state)
    p = as_setup(p)
    check_arm(arm)
    alpha = check_amplitude("alpha", alpha)
    w = state.w_marginal(alpha, p.eta_tilde, arm=arm)
    return float(
        np.pi * p.p_dark / p.eta_tilde * w
        * mismatch_envelope(alpha, p.eta_tilde, p.xi, -1.0))


def ch_combination(state, d: DisplacementSettings, p) -> float:
    """
    ``Q(a1, b1) + Q(a1, b2) + Q(a2, b1) - Q(a2, b2) - Q(a1) - Q(b1)``.

    Local realism bounds it to [-1, 0].

    Examples
    --------
    >>> d = DisplacementSettings(0, 0, 0, 0)
    >>> round(ch_combination("single-photon", d, SetupParams()), 12)
    -1.0
    """
    state = as_state(state)
    if d.r is not None and state.has_squeezing and d.r != state.r:
        state = state.with_params(r=d.r)
    p = as_setup(p)
    return ch_evaluator(state, p)(d.a1, d.a2, d.b1, d.b2)


def ch_violation(ch: float) -> float:
    """
    Distance of a CH value beyond the local-realistic band [-1, 0],
    negative inside it.

    Relabelling the outcomes of one detector maps CH to ``-1 - CH``, so
    a value below -1 is as much a violation as a positive one.

    Examples
    --------
    >>> ch_violation(0.1), ch_violation(-1.25), ch_violation(-0.5)
    (0.1, 0.25, -0.5)
    """
    return max(ch, -1.0 - ch)


def ch_evaluator(state: State, p: SetupParams):
    """
    Returns ``f(a1, a2, b1, b2) -> CH`` for a fixed state and setup. The
    returned function skips argument checks; the six probabilities are
    evaluated in two vectorized calls.
    """
    joint = state.joint_kernel(p.eta_tilde)
    marginal = state.marginal_kernel(p.eta_tilde)
    rate = p.mismatch_rate
    c_joint = (np.pi * p.p_dark / p.eta_tilde) ** 2
    c_marginal = np.pi * p.p_dark / p.eta_tilde

    def evaluate(a1, a2, b1, b2) -> float:
        a = np.array([a1, a1, a2, a2], dtype=complex)
        b = np.array([b1, b2, b1, b2], dtype=complex)
        m = np.array([a1, b1], dtype=complex)
        qj = c_joint * joint(a, b) \
            * np.exp(-rate * (np.abs(a) ** 2 + np.abs(b) ** 2))
        qm = c_marginal * marginal(m) * np.exp(-rate * np.abs(m) ** 2)
        return float(qj[0] + qj[1] + qj[2] - qj[3] - qm[0] - qm[1])

    return evaluate


def lhv_kernel(alpha, lam, p):
    """
    Conditional probability of a no-click event at setting ``alpha``
    given the Wigner-function variable ``lam``:

    ``2 p_D / (2 - eta) exp(-2 eta / (2 - eta) |lam - alpha|^2
    - eta (1 - xi) / xi |alpha|^2)``

    It exceeds 1 close to ``lam = alpha`` for good detectors, so the
    Wigner function does not act as a hidden-variable distribution.

    Examples
    --------
    >>> lhv_kernel(0.3, 0.3, SetupParams())
    2.0
    """
    p = as_setup(p)
    alpha = check_amplitude("alpha", alpha)
    lam = np.asarray(lam, dtype=complex)
    if not np.all(np.isfinite(lam)):
        raise DomainError("'lam' must have finite components.")

    eta = p.eta_tilde
    value = 2.0 * p.p_dark / (2.0 - eta) * np.exp(
        -2.0 * eta / (2.0 - eta) * np.abs(lam - alpha) ** 2
        - p.mismatch_rate * abs(alpha) ** 2)
    return float(value) if value.ndim == 0 else value


def lhv_kernel_max(alpha, p) -> float:
    """
    Maximum of ``lhv_kernel`` over ``lam``, attained at ``lam = alpha``.
    """
    p = as_setup(p)
    alpha = check_amplitude("alpha", alpha)
    return 2.0 * p.p_dark / (2.0 - p.eta_tilde) \
        * float(np.exp(-p.mismatch_rate * abs(alpha) ** 2))


def lhv_q_joint(
        state, alpha, beta, p, order: int = DEFAULT_ORDER,
        check_tol: Optional[float] = 1e-6) -> float:
    """
    The joint no-click probability written as an average of
    ``lhv_kernel(alpha; lam) lhv_kernel(beta; mu)`` over the Wigner
    function ``W(lam, mu)``, evaluated by Gauss-Hermite quadrature.

    Agrees with ``q_joint`` up to quadrature error.
    """
    state = as_state(state)
    p = as_setup(p)
    alpha = check_amplitude("alpha", alpha)
    beta = check_amplitude("beta", beta)
    s_prime = effective_ordering(-1.0, p.eta_tilde)

    # The smoothing kernel from s = 0 to s' is the lam-dependent part
    # of lhv_kernel up to the constant absorbed below.
    smoothed = ordering_transform(
        state.wigner, 0.0, s_prime, [alpha, beta],
        order=order, check_tol=check_tol)
    value = (np.pi * p.p_dark / p.eta_tilde) ** 2 * smoothed \
        * np.exp(-p.mismatch_rate * (abs(alpha) ** 2 + abs(beta) ** 2))
    logger.debug("lhv_q_joint({}, {}) = {!r}".format(alpha, beta, value))
    return float(value)
