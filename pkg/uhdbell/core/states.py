from abc import ABC, abstractmethod
from logging import getLogger
from typing import Any, Dict, List, Optional

import numpy as np

from . import params
from .ordering import effective_ordering
from .validators import DomainError, Errors, RangeValidator, \
    ValidationError, check_number

logger = getLogger(__name__)

R_MAX = 10.0


class StateMeta(object):
    """
    Metadata of a state model.

    Attributes
    ----------
    key: str
        Name used to select the state (CLI ``--state``, config ``state``).
    name: str
        Display name.
    description: str
        Short description.
    params: params.ParamSet
        Parameters the state accepts (for example the squeezing ``r``).
    """

    def __init__(self, meta):
        self.key = meta.key
        self.name = meta.name
        self.description = meta.description
        self.params = meta.params


class State(ABC):
    """
    Base class of the two-mode states whose photon-silence statistics
    are analysed.

    Subclasses provide the s-ordered two-mode quasidistribution and its
    single-mode marginal in closed form. Everything else (loss-induced
    ordering, probabilities, CH combination) is built on top of these
    two methods.
    """

    # True when the joint functions are invariant under
    # (alpha, beta) -> (alpha e^{i phi}, beta e^{-i phi}) instead of a
    # common phase.
    opposite_phase = False

    def __init__(self, **kwargs):
        errors = Errors()
        meta = self.meta()
        for key in kwargs:
            if key not in meta.params:
                raise ValueError(
                    "State '{}' does not accept parameter '{}'.".format(
                        meta.key, key))

        if not meta.params.validate(kwargs, errors):
            raise DomainError(str(errors))

        self.values = meta.params.parse(kwargs)

    def __repr__(self):
        args = ", ".join(
            "{}={!r}".format(k, v) for k, v in self.values.items())
        return "{}({})".format(self.key(), args)

    def __eq__(self, other):
        return isinstance(other, State) and \
            self.key() == other.key() and self.values == other.values

    def __hash__(self):
        return hash((self.key(), tuple(sorted(self.values.items()))))

    @classmethod
    def meta(cls) -> StateMeta:
        return StateMeta(cls.Meta)

    @classmethod
    def key(cls) -> str:
        return cls.meta().key

    @property
    def has_squeezing(self) -> bool:
        return "r" in self.meta().params

    @property
    def r(self) -> Optional[float]:
        return self.values.get("r")

    def with_params(self, **kwargs) -> "State":
        """
        Returns a copy of this state with some parameters replaced.
        """
        values = dict(self.values)
        values.update(kwargs)
        return self.__class__(**values)

    def to_dict(self) -> Dict[str, Any]:
        result = {"state": self.key()}
        result.update(self.values)
        return result

    @abstractmethod
    def quasidistribution(self, alpha, beta, s):
        """
        Two-mode s-ordered quasidistribution W_AB(alpha, beta; s), s < 1.
        Accepts scalars or broadcastable numpy arrays.
        """

    @abstractmethod
    def marginal_quasidistribution(self, alpha, s, arm="A"):
        """
        Single-mode marginal W_A(alpha; s) (or W_B for ``arm="B"``).
        """

    def wigner(self, alpha, beta):
        return self.quasidistribution(alpha, beta, 0.0)

    def w_joint(self, alpha, beta, eta_tilde):
        """
        The two-mode quasidistribution sampled by no-click events of two
        detectors with overall efficiency ``eta_tilde``, that is at
        ordering ``-(2 - eta_tilde) / eta_tilde``.
        """
        return self.quasidistribution(
            alpha, beta, effective_ordering(-1.0, eta_tilde))

    def w_marginal(self, alpha, eta_tilde, arm="A"):
        return self.marginal_quasidistribution(
            alpha, effective_ordering(-1.0, eta_tilde), arm=arm)

    def joint_kernel(self, eta_tilde):
        """
        Returns a vectorized ``(alpha, beta) -> w_joint`` with the
        efficiency bound in. Subclasses skip argument checks in it.
        """
        return lambda a, b: self.w_joint(a, b, eta_tilde)

    def marginal_kernel(self, eta_tilde):
        return lambda a: self.w_marginal(a, eta_tilde)


class StateKind(object):
    """
    Factory for registered states.

    Examples
    --------
    >>> from uhdbell.core.states import StateKind
    >>> StateKind.create("tmsv", r=0.5)
    tmsv(r=0.5)
    >>> StateKind.create({"state": "single-photon"})
    single-photon()
    """

    @classmethod
    def create(cls, kind, **kwargs) -> State:
        if isinstance(kind, State):
            return kind.with_params(**kwargs) if kwargs else kind

        if isinstance(kind, dict):
            values = dict(kind)
            key = values.pop("state", None)
            if key is None:
                raise ValidationError("Key 'state' is required.", Errors())
            values.update(kwargs)
            return cls.create(key, **values)

        state_class = state_find_by(kind)
        if state_class is None:
            raise ValueError(
                "State '{}' is not registered. Choose one of: {}".format(
                    kind, ", ".join(state_keys())))

        if "r" not in state_class.meta().params:
            kwargs = {k: v for k, v in kwargs.items()
                      if not (k == "r" and v is None)}

        return state_class(**kwargs)


def as_amplitudes(*values):
    """
    Converts amplitudes (scalars or arrays) to complex numpy arrays and
    rejects non-finite components.
    """
    result = []
    for value in values:
        amp = np.asarray(value, dtype=complex)
        if not np.all(np.isfinite(amp)):
            raise DomainError("Amplitudes must have finite components.")
        result.append(amp)

    return result


def check_arm(arm) -> str:
    if arm not in ("A", "B"):
        raise ValueError("arm must be 'A' or 'B', not {!r}.".format(arm))

    return arm


def check_squeezing(r) -> float:
    """
    Returns ``r`` as float after checking 0 <= r <= R_MAX.
    """
    return check_number("r", r, min=0.0, max=R_MAX)


def squeezing_param(default_value=0.5):
    return params.FloatParam(
        "r",
        label="squeezing parameter r",
        description="Dimensionless squeezing of the two-mode state.",
        default_value=default_value,
        validators=(RangeValidator(min=0.0, max=R_MAX),),
    )


STATES = []
STATE_DICT = {}


def register_state(state):
    """
    Registers a state class under its ``Meta.key``.
    """
    if state.key() not in STATE_DICT:
        STATES.append(state)
    STATE_DICT[state.key()] = state


def state_find_by(name) -> Optional[type]:
    """
    Returns the registered state class, or None.
    """
    state = STATE_DICT.get(name)
    if state is None:
        from uhdbell.states import register
        register()

    return STATE_DICT.get(name)


def state_all() -> List[type]:
    return [s for s in STATES]


def state_keys() -> List[str]:
    if len(STATES) == 0:
        from uhdbell.states import register
        register()

    return [s.Meta.key for s in STATES]
