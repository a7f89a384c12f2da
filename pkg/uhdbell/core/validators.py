import math
from numbers import Number


class ValidationError(Exception):
    def __init__(self, message, errors):
        super(ValidationError, self).__init__(message)
        self.errors = errors


class DomainError(ValueError):
    """
    A physical or numerical argument lies outside its admissible range.
    """


class Errors(object):
    def __init__(self):
        self._has_error = False
        self.error_messages = {}

    def __str__(self):
        return "; ".join(
            "; ".join(messages) for messages in self.error_messages.values())

    def append(self, message, param=None):
        key = "none" if param is None else param.key

        if key not in self.error_messages:
            self.error_messages[key] = []

        if param is None:
            formated_message = message
        else:
            formated_message = "'{}' {}".format(param.label, message)

        self.error_messages[key].append(formated_message)

        self._has_error = True

    def has_error(self):
        return self._has_error


class Validator(object):
    def valid(self, value, errors, param=None):
        pass

    def stop_when_error(self):
        return False


class RequiredValidator(Validator):
    REQUIRED_MESSAGE = "is required."

    def valid(self, value, errors, param=None):
        _valid = True
        if value is None or value == "":
            errors.append(self.REQUIRED_MESSAGE, param)
            _valid = False
        return _valid

    def stop_when_error(self):
        return True


class IntValidator(Validator):
    INT_MESSAGE = "must be an integer."

    def valid(self, value, errors, param=None):
        if value is None:
            return True

        if isinstance(value, bool):
            errors.append(self.INT_MESSAGE, param)
            return False

        try:
            if int(value) != float(value):
                raise ValueError(value)
        except (TypeError, ValueError):
            errors.append(self.INT_MESSAGE, param)
            return False

        return True

    def stop_when_error(self):
        return True


class FloatValidator(Validator):
    FLOAT_MESSAGE = "must be a finite real number."

    def valid(self, value, errors, param=None):
        if value is None:
            return True

        try:
            parsed = float(value)
        except (TypeError, ValueError):
            errors.append(self.FLOAT_MESSAGE, param)
            return False

        if not math.isfinite(parsed):
            errors.append(self.FLOAT_MESSAGE, param)
            return False

        return True

    def stop_when_error(self):
        return True


class BooleanValidator(Validator):
    BOOLEAN_MESSAGE = "must be true or false."

    def valid(self, value, errors, param=None):
        if value is None:
            return True
        if value not in (True, False, "true", "false"):
            errors.append("{} ({})".format(
                self.BOOLEAN_MESSAGE, str(value)), param)
            return False

        return True

    def stop_when_error(self):
        return True


class RangeValidator(Validator):
    """
    Checks that a number lies in an interval.

    Parameters
    ----------
    min: float, optional
        Lower bound.
    max: float, optional
        Upper bound.
    min_inclusive: bool
        Whether ``min`` itself is admissible. Default True.
    max_inclusive: bool
        Whether ``max`` itself is admissible. Default True.

    Examples
    --------
    >>> errors = Errors()
    >>> RangeValidator(min=0.0, max=1.0, min_inclusive=False).valid(
    ...     0.0, errors)
    False
    >>> str(errors)
    'must be greater than 0.0.'
    """
    MAX_MESSAGE = "must be less than or equal to {max}."
    MAX_EXCLUSIVE_MESSAGE = "must be less than {max}."
    MIN_MESSAGE = "must be greater than or equal to {min}."
    MIN_EXCLUSIVE_MESSAGE = "must be greater than {min}."

    def __init__(
            self, min=None, max=None,
            min_inclusive=True, max_inclusive=True):
        self.min = min
        self.max = max
        self.min_inclusive = min_inclusive
        self.max_inclusive = max_inclusive

    def _parse(self, value):
        return float(value)

    def valid(self, value, errors, param=None):
        if value is None:
            return True

        try:
            parsed = self._parse(value)
        except (TypeError, ValueError):
            return False

        _valid = True
        if self.max is not None:
            if self.max_inclusive and parsed > self.max:
                errors.append(self.MAX_MESSAGE.format(max=self.max), param)
                _valid = False
            elif not self.max_inclusive and parsed >= self.max:
                errors.append(
                    self.MAX_EXCLUSIVE_MESSAGE.format(max=self.max), param)
                _valid = False

        if self.min is not None:
            if self.min_inclusive and parsed < self.min:
                errors.append(self.MIN_MESSAGE.format(min=self.min), param)
                _valid = False
            elif not self.min_inclusive and parsed <= self.min:
                errors.append(
                    self.MIN_EXCLUSIVE_MESSAGE.format(min=self.min), param)
                _valid = False

        return _valid


class ChoiceValidator(Validator):
    CHOICE_MESSAGE = "must be one of {choices}."

    def __init__(self, choices):
        self.choices = tuple(choices)

    def valid(self, value, errors, param=None):
        if value is None:
            return True

        if value not in self.choices:
            errors.append(self.CHOICE_MESSAGE.format(
                choices=", ".join(str(c) for c in self.choices)), param)
            return False

        return True


def unit_interval(name: str, value, include_zero: bool = False) -> float:
    """
    Returns ``value`` as float after checking it lies in (0, 1]
    (or [0, 1] when ``include_zero``).

    Raises
    ------
    DomainError
        If the value is not a finite number in the interval.

    Examples
    --------
    >>> unit_interval("eta_tilde", 0.5)
    0.5
    >>> unit_interval("eta_tilde", 0.0)
    Traceback (most recent call last):
    uhdbell.core.validators.DomainError: 'eta_tilde' must be greater than 0.0.
    """
    return check_number(
        name, value, min=0.0, max=1.0, min_inclusive=include_zero)


def check_number(
        name: str, value, min=None, max=None,
        min_inclusive: bool = True, max_inclusive: bool = True) -> float:
    """
    Validates a scalar with ``FloatValidator`` and ``RangeValidator``
    and raises ``DomainError`` with the collected messages.
    """
    errors = Errors()
    label = _Label(name)
    if not isinstance(value, Number) and not _is_numeric_string(value):
        errors.append(FloatValidator.FLOAT_MESSAGE, label)
        raise DomainError(str(errors))

    for validator in (
            FloatValidator(),
            RangeValidator(
                min=min, max=max,
                min_inclusive=min_inclusive,
                max_inclusive=max_inclusive)):
        if validator.valid(value, errors, label) is False \
                and validator.stop_when_error():
            break

    if errors.has_error():
        raise DomainError(str(errors))

    return float(value)


def check_amplitude(name: str, value) -> complex:
    """
    Returns ``value`` as a complex amplitude after checking that both
    components are finite.
    """
    try:
        amp = complex(value)
    except (TypeError, ValueError):
        raise DomainError(
            "'{}' must be a complex amplitude.".format(name))

    if not (math.isfinite(amp.real) and math.isfinite(amp.imag)):
        raise DomainError(
            "'{}' must have finite components.".format(name))

    return amp


def _is_numeric_string(value) -> bool:
    if not isinstance(value, str):
        return False

    try:
        float(value)
    except ValueError:
        return False

    return True


class _Label(object):
    """
    Minimal stand-in for a Param so that messages carry the argument name.
    """

    def __init__(self, name):
        self.key = name
        self.label = name
