# Copyright IBM Inc. All Rights Reserved.
# SPDX-License-Identifier: Apache-2.0


from __future__ import annotations

from typing import Any
from typing import Dict
from typing import List
from typing import Optional
from typing import TYPE_CHECKING

if TYPE_CHECKING:
    import pydantic


def make_pydantic_errors_jsonable(exc: pydantic.ValidationError) -> List[Dict[str, Any]]:
    errors = exc.errors()

    for err in errors:
        if 'ctx' in err:
            del err['ctx']
        if 'url' in err:
            del err['url']
        if 'input' in err:
            err['input'] = repr(err['input'])

        try:
            message = err.pop('msg')
        except KeyError:
            pass
        else:
            err['message'] = message

        try:
            location = err.pop('loc')
        except KeyError:
            pass
        else:
            err['location'] = location

    return errors


class LabError(Exception):
    def __init__(self, msg: str):
        self.message = msg

    def __repr__(self):
        return str(self)

    def __str__(self):
        return self.message


class InvalidModelError(LabError):
    def __init__(self, msg: str, problems: List[Dict[str, Any]]):
        super().__init__(msg=msg)
        self.problems = problems

    @classmethod
    def from_pydantic(cls, msg: str, exc: pydantic.ValidationError):
        return cls(msg=msg, problems=make_pydantic_errors_jsonable(exc))

    def __str__(self):
        if not self.problems:
            return self.message
        return f"{self.message}. Underlying problems:\n" + "\n".join([str(e) for e in self.problems])


class ConfigError(InvalidModelError):
    def __init__(self, msg: str, problems: List[Dict[str, Any]] | None = None):
        super().__init__(msg=msg, problems=problems or [])


# Parameters and exponents


class ParameterError(LabError):
    pass


class DegenerateBError(ParameterError):
    def __init__(self, n: int, p: float, gamma: float, reason: Optional[str] = None):
        self.n = n
        self.p = p
        self.gamma = gamma
        self.reason = reason or "b = gamma - 1/(p-1) vanishes"

        super().__init__(f"{self.reason} for n={n}, p={p}, gamma={gamma}")


class BadExponentError(ParameterError):
    def __init__(self, name: str, value: float, reason: str):
        self.name = name
        self.value = value
        self.reason = reason

        super().__init__(f"Invalid exponent {name}={value}: {reason}")


class OutOfRangeRegimeError(ParameterError):
    def __init__(self, regime: str, b: float, what: str):
        self.regime = regime
        self.b = b
        self.what = what

        super().__init__(f"{what} is undefined for b={b} (regime {regime})")


class RangeMismatchError(ParameterError):
    def __init__(self, s: float, expected: float | None, reason: str):
        self.s = s
        self.expected = expected
        self.reason = reason

        super().__init__(f"Gagliardo-Nirenberg parameter s={s} rejected: {reason}")


class NonPositiveArgumentError(ParameterError):
    def __init__(self, function: str, value: float):
        self.function = function
        self.value = value

        super().__init__(f"{function} requires a positive argument, got {value}")


class NonPositiveTimeError(ParameterError):
    def __init__(self, t: float):
        self.t = t

        super().__init__(f"The source-type solution is defined for t > 0, got t={t}")


class OutsideSupportError(ParameterError):
    def __init__(self, radius: float, support: float):
        self.radius = radius
        self.support = support

        super().__init__(f"Pressure requested at |x|={radius} outside the support radius {support}")


# Meshes and arrays


class MeshError(LabError):
    pass


class BadMeshError(MeshError):
    def __init__(self, reason: str):
        self.reason = reason

        super().__init__(f"Invalid radial mesh: {reason}")


class LengthMismatchError(MeshError):
    def __init__(self, expected: int, actual: int, what: str = "cell values"):
        self.expected = expected
        self.actual = actual
        self.what = what

        super().__init__(f"Expected {expected} {what}, got {actual}")


class EmptyDensityError(MeshError):
    def __init__(self, what: str = "density"):
        self.what = what

        super().__init__(f"The {what} has zero total mass")


class BadOptionError(ParameterError):
    def __init__(self, option: str, value: Any, reason: str):
        self.option = option
        self.value = value
        self.reason = reason

        super().__init__(f"Invalid option {option}={value!r}: {reason}")


# Time stepping


class NumericalAbortError(LabError):
    pass


class StagnantStateError(NumericalAbortError):
    def __init__(self, t: float):
        self.t = t

        super().__init__(f"Zero diffusivity everywhere at t={t}, the state cannot evolve")


class NonFiniteStateError(NumericalAbortError):
    def __init__(self, t: float, step: int):
        self.t = t
        self.step = step

        super().__init__(f"Non-finite values after step {step} at t={t}")


class StepBudgetExceededError(NumericalAbortError):
    def __init__(self, max_steps: int, t: float, t_end: float):
        self.max_steps = max_steps
        self.t = t
        self.t_end = t_end

        super().__init__(f"Reached {max_steps} steps at t={t} before t_end={t_end}")


# Diagnostics


class DiagnosticsError(LabError):
    pass


class MismatchedStatesError(DiagnosticsError):
    def __init__(self, reason: str):
        self.reason = reason

        super().__init__(f"States cannot be compared: {reason}")


class TooFewRecordsError(DiagnosticsError):
    def __init__(self, needed: int, actual: int):
        self.needed = needed
        self.actual = actual

        super().__init__(f"Need at least {needed} records, got {actual}")


class UnknownSuiteError(ConfigError):
    def __init__(self, name: str, known: List[str]):
        self.name = name
        self.known = known

        super().__init__(f"Unknown suite {name}, known suites are {', '.join(known)}")


class DBError(LabError):
    pass
