import json
from logging import getLogger
import os
from typing import Any, Dict, Optional, Union

from . import params
from .bell import SetupParams
from .optimize import SimplexConfig
from .states import State, StateKind, state_keys
from .validators import Errors, RangeValidator, RequiredValidator, \
    ValidationError

logger = getLogger(__name__)

WORKERS_ENV = "UHDBELL_WORKERS"

_UNIT = dict(min=0.0, max=1.0, min_inclusive=False)


def _run_params() -> params.ParamSet:
    # Built on demand so that plug-in states are registered first.
    return params.ParamSet(
        params.EnumsParam(
            "state", enums=state_keys(),
            description="Registered key of the two-mode state."),
        params.FloatParam(
            "r", description="Squeezing parameter of the TMSV.",
            validators=(RangeValidator(min=0.0, max=10.0),)),
        params.FloatParam(
            "eta", default_value=1.0, description="Overall efficiency.",
            validators=(RangeValidator(**_UNIT),)),
        params.FloatParam(
            "xi", default_value=1.0, description="Mode matching.",
            validators=(RangeValidator(**_UNIT),)),
        params.FloatParam(
            "pdark", default_value=1.0,
            description="Probability of no dark count.",
            validators=(RangeValidator(**_UNIT),)),
        params.FloatParam(
            "reflection", default_value=1.0,
            validators=(RangeValidator(min=0.0, min_inclusive=False),)),
        params.FloatParam(
            "expansion", default_value=2.0,
            validators=(RangeValidator(min=1.0, min_inclusive=False),)),
        params.FloatParam(
            "contraction", default_value=0.5,
            validators=(RangeValidator(
                min=0.0, max=1.0, min_inclusive=False,
                max_inclusive=False),)),
        params.FloatParam(
            "shrink", default_value=0.5,
            validators=(RangeValidator(
                min=0.0, max=1.0, min_inclusive=False,
                max_inclusive=False),)),
        params.FloatParam(
            "f_tol", default_value=1e-10,
            validators=(RangeValidator(min=0.0, min_inclusive=False),)),
        params.IntParam(
            "max_iters", default_value=5000,
            validators=(RangeValidator(min=1),)),
        params.IntParam(
            "restarts", default_value=32,
            description="Random starts of the simplex search.",
            validators=(RangeValidator(min=1),)),
        params.FloatParam(
            "init_box", default_value=1.0,
            description="Half-width of the box of random starts.",
            validators=(RangeValidator(min=0.0, min_inclusive=False),)),
        params.FloatParam(
            "max_amplitude", default_value=4.0,
            description="Largest displacement the simplex may visit.",
            validators=(RangeValidator(min=0.0, min_inclusive=False),)),
        params.FloatParam(
            "initial_step", default_value=0.5,
            validators=(RangeValidator(min=0.0, min_inclusive=False),)),
        params.IntParam(
            "seed", default_value=0, validators=(RangeValidator(min=0),)),
        params.FloatPairParam("eta_range", default_value=(0.02, 1.0)),
        params.FloatPairParam("xi_range", default_value=(0.02, 1.0)),
        params.IntParam(
            "resolution", default_value=50,
            validators=(RangeValidator(min=2),)),
        params.FloatParam(
            "tol", default_value=1e-3,
            description="Bisection tolerance of the threshold search.",
            validators=(RangeValidator(min=0.0, min_inclusive=False),)),
        params.FloatParam(
            "contour_offset", default_value=1e-3,
            validators=(RangeValidator(min=0.0),)),
        params.EnumsParam(
            "format", default_value="csv", enums=("csv", "json")),
        params.StringParam("output"),
        params.IntParam("workers", validators=(RangeValidator(min=1),)),
        params.BooleanParam("warm_start", default_value=False),
        params.ListParam(
            "suites",
            enums=("oracle", "factorization", "transform", "lhv",
                   "properties")),
        params.FloatParam(
            "s", default_value=-1.0, description="Ordering of pi-s.",
            validators=(RangeValidator(max=0.0),)),
    )


def default_workers() -> int:
    """
    Worker count from the ``UHDBELL_WORKERS`` environment variable, or 1.
    """
    value = os.environ.get(WORKERS_ENV)
    if value is None or value.strip() == "":
        return 1

    try:
        workers = int(value)
    except ValueError:
        workers = 0

    if workers < 1:
        errors = Errors()
        errors.append("{}={!r} is not a positive integer.".format(
            WORKERS_ENV, value))
        raise ValidationError(str(errors), errors)

    return workers


class RunConfig(object):
    """
    Fully resolved settings of one command run.

    Every key has a typed value after ``create``; a run is reproduced
    from ``to_dict()`` alone.

    Parameters
    ----------
    values: dict
        Parsed values for every key of the parameter set.

    Examples
    --------
    >>> config = RunConfig.create({"state": "tmsv", "eta": "0.8"})
    >>> config["eta"]
    0.8
    >>> config.setup()
    SetupParams(eta_tilde=0.8, xi=1.0, p_dark=1.0)
    """

    def __init__(self, values: Dict[str, Any]):
        self._values = dict(values)

    def __repr__(self):
        return "RunConfig({})".format(self._values.get("state"))

    def __getitem__(self, key):
        return self._values[key]

    def __eq__(self, other):
        return isinstance(other, RunConfig) and \
            self.to_dict() == other.to_dict()

    def get(self, key, default=None):
        return self._values.get(key, default)

    @classmethod
    def create(
            cls, values: Optional[Dict[str, Any]] = None,
            strict: bool = True) -> "RunConfig":
        """
        Validates a dict of raw values (strings from the command line or
        JSON values) and fills in defaults.

        Parameters
        ----------
        values: dict, optional
            Raw values; keys that are None are treated as unset.
        strict: bool
            If True, unknown keys are an error; otherwise they are
            logged and ignored.

        Raises
        ------
        ValidationError
            If a key is unknown (strict) or a value is invalid.

        Examples
        --------
        >>> RunConfig.create({"state": "laser"})
        Traceback (most recent call last):
        uhdbell.core.validators.ValidationError: 'state' must be one of ...
        >>> RunConfig.create({"stat": "tmsv"})
        Traceback (most recent call last):
        uhdbell.core.validators.ValidationError: Unknown key(s): stat.
        """
        values = {} if values is None else values
        if not isinstance(values, dict):
            errors = Errors()
            errors.append("A run configuration must be a JSON object.")
            raise ValidationError(str(errors), errors)

        param_set = _run_params()
        unknown = sorted(k for k in values if k not in param_set)
        if unknown:
            message = "Unknown key(s): {}.".format(", ".join(unknown))
            if strict:
                errors = Errors()
                errors.append(message)
                raise ValidationError(message, errors)
            logger.warning(message + " They are ignored.")

        raw = {k: v for k, v in values.items()
               if k in param_set and v is not None}
        errors = Errors()
        if not param_set.validate(raw, errors):
            raise ValidationError(str(errors), errors)

        parsed = param_set.parse(raw)
        if parsed["workers"] is None:
            parsed["workers"] = default_workers()

        return cls(parsed)

    @classmethod
    def from_file(cls, path: Union[str, os.PathLike]) -> "RunConfig":
        """
        Reads a JSON run configuration. Unknown keys are ignored with a
        warning.

        Examples
        --------
        >>> config = RunConfig.from_file("tmsv_threshold.json")
        >>> config.state(), config["tol"]
        (tmsv(r=0.5), 0.001)
        """
        with open(path, "r") as jsonf:
            logger.debug("Reading run configuration from '{}'.".format(
                path))
            try:
                values = json.load(jsonf)
            except json.decoder.JSONDecodeError as e:
                errors = Errors()
                errors.append("Invalid JSON in '{}'. ({})".format(path, e))
                raise ValidationError(str(errors), errors)

        return cls.create(values, strict=False)

    def merge(self, overrides: Dict[str, Any]) -> "RunConfig":
        """
        Returns a new configuration where every key of ``overrides``
        that is not None replaces the current value.

        Examples
        --------
        >>> base = RunConfig.create({"state": "tmsv", "xi": 0.9})
        >>> base.merge({"xi": "0.5", "eta": None})["xi"]
        0.5
        """
        values = dict(self._values)
        values.update({k: v for k, v in overrides.items() if v is not None})
        return RunConfig.create(values)

    def require(self, *keys):
        """
        Raises ValidationError if any of ``keys`` is unset.
        """
        param_set = _run_params()
        required = RequiredValidator()
        errors = Errors()
        for key in keys:
            required.valid(self._values.get(key), errors, param_set[key])
        if errors.has_error():
            raise ValidationError(str(errors), errors)

    def to_dict(self) -> Dict[str, Any]:
        """
        JSON-serializable form of every setting that affects results.
        ``output`` and ``workers`` are left out: they never change what
        is computed.
        """
        result = {}
        for key, value in self._values.items():
            if key in ("output", "workers"):
                continue
            result[key] = list(value) if isinstance(value, tuple) else value
        return result

    def state(self) -> State:
        self.require("state")
        kwargs = {} if self._values["r"] is None \
            else {"r": self._values["r"]}
        return StateKind.create(self._values["state"], **kwargs)

    def setup(self) -> SetupParams:
        return SetupParams(
            eta_tilde=self._values["eta"],
            xi=self._values["xi"],
            p_dark=self._values["pdark"])

    def simplex(self) -> SimplexConfig:
        v = self._values
        return SimplexConfig(
            reflection=v["reflection"], expansion=v["expansion"],
            contraction=v["contraction"], shrink=v["shrink"],
            f_tol=v["f_tol"], max_iters=v["max_iters"],
            restarts=v["restarts"], init_box=v["init_box"],
            max_amplitude=v["max_amplitude"], rng_seed=v["seed"],
            initial_step=v["initial_step"])
