from abc import ABC
from logging import getLogger
from typing import Any, Dict, Optional

from .validators import (
    BooleanValidator, ChoiceValidator, Errors, FloatValidator,
    IntValidator)

logger = getLogger(__name__)


class ParamSet(object):
    """
    An ordered collection of declared parameters.

    Parameters are looked up by name; ``validate`` runs every
    parameter's validators against a dict of raw values and
    ``parse`` turns the raw values into typed ones, filling in
    defaults.
    """

    def __init__(self, *args):
        self._list = []
        self._dist = {}
        if len(args) == 1 and type(args[0]) is list:
            self.add(args[0])
        else:
            self.add(args)

    def __len__(self):
        return len(self._list)

    def __contains__(self, item):
        return item in self._dist

    def __getitem__(self, item):
        return self._dist.get(item)

    def __iter__(self):
        return self.params().__iter__()

    def add(self, other):
        for o in other:
            self.append(o)

    def keys(self):
        return [param.key for param in self._list]

    def params(self):
        return [param for param in self._list]

    def append(self, param):
        if param is None:
            return
        if param.name in self._dist:
            raise ValueError("Duplicate parameter '{}'.".format(param.name))

        self._list.append(param)
        self._dist[param.name] = param

    def validate(self, param_values: Dict[str, Any], errors: Errors) -> bool:
        for param in self._list:
            value = param_values.get(param.key)
            param.validate(value, errors)
        return not errors.has_error()

    def parse(self, param_values: Dict[str, Any]) -> Dict[str, Any]:
        return {
            param.key: param.get_value(param_values.get(param.key))
            for param in self._list
        }


class Param(ABC):
    def __init__(
        self,
        name,
        description=None,
        default_value=None,
        label=None,
        validators=None,
    ):
        self.name = name
        self.description = description
        self.label = label if label is not None else self.name
        self.default_value = default_value

        self.validators = self.default_validators() + tuple(validators) \
            if validators is not None \
            else self.default_validators()

    def __repr__(self):
        return "{}({})".format(self.__class__.__name__, self.name)

    @property
    def key(self):
        """
        The key that identifies the parameter in a dict of values.
        """
        return self.name

    @property
    def type(self):
        return self.Meta.type

    def default_validators(self):
        return ()

    def validate(self, value, errors):
        result = True
        for validator in self.validators:
            r = validator.valid(value, errors, self)
            if r is False:
                result = False
                if validator.stop_when_error():
                    break

        return result

    def parse_value(self, value):
        """
        Converts a raw (JSON or command line) value to the parameter type.
        """
        return value

    def get_value(self, value):
        if value is None:
            return self.default_value

        return self.parse_value(value)


class StringParam(Param):
    class Meta:
        type = "string"

    def parse_value(self, value):
        return str(value)


class IntParam(Param):
    class Meta:
        type = "integer"

    def default_validators(self):
        return (IntValidator(),)

    def parse_value(self, value):
        return int(float(value))


class FloatParam(Param):
    class Meta:
        type = "float"

    def default_validators(self):
        return (FloatValidator(),)

    def parse_value(self, value):
        return float(value)


class BooleanParam(Param):
    class Meta:
        type = "boolean"

    def default_validators(self):
        return (BooleanValidator(),)

    def parse_value(self, value):
        if isinstance(value, bool):
            return value

        return str(value).lower() == "true"


class EnumsParam(Param):
    """
    A parameter restricted to a fixed list of string values.
    """

    class Meta:
        type = "enums"

    def __init__(self, *args, enums=(), **kwargs):
        self.enums = tuple(enums)
        super(EnumsParam, self).__init__(*args, **kwargs)

    def default_validators(self):
        return (ChoiceValidator(self.enums),)


class ListParam(Param):
    """
    A parameter holding a list of strings. A comma separated string
    is accepted as well.
    """

    class Meta:
        type = "list"

    def __init__(self, *args, enums: Optional[tuple] = None, **kwargs):
        self.enums = enums
        super(ListParam, self).__init__(*args, **kwargs)

    def validate(self, value, errors):
        if value is None:
            return super().validate(value, errors)

        result = True
        for item in self.parse_value(value):
            if self.enums is not None and item not in self.enums:
                errors.append(
                    ChoiceValidator.CHOICE_MESSAGE.format(
                        choices=", ".join(self.enums)), self)
                result = False

        return result

    def parse_value(self, value):
        if isinstance(value, str):
            return [v.strip() for v in value.split(",") if v.strip()]

        return [str(v) for v in value]


class FloatPairParam(Param):
    """
    A closed interval ``(lo, hi)`` given either as a two element list
    or as a string ``"lo,hi"``.
    """

    class Meta:
        type = "float-pair"

    PAIR_MESSAGE = "must be two numbers 'lo,hi' with lo < hi."

    def validate(self, value, errors):
        if value is None:
            return super().validate(value, errors)

        try:
            lo, hi = self.parse_value(value)
        except (TypeError, ValueError):
            errors.append(self.PAIR_MESSAGE, self)
            return False

        if not lo < hi:
            errors.append(self.PAIR_MESSAGE, self)
            return False

        return super().validate(value, errors)

    def parse_value(self, value):
        if isinstance(value, str):
            value = value.split(",")

        lo, hi = value
        return (float(lo), float(hi))
