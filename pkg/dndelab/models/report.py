# Copyright IBM Inc. All Rights Reserved.
# SPDX-License-Identifier: Apache-2.0


from __future__ import annotations

import math
from typing import Any
from typing import Dict
from typing import List
from typing import Optional
from typing import Union

import pydantic
from pydantic import ConfigDict

import dndelab.models.constants
import dndelab.models.params


class DiagRecord(pydantic.BaseModel):
    """One row of the time series written to series.csv"""
    model_config = ConfigDict(frozen=True, extra="forbid")

    t: float
    dt: float
    mass: float
    E_b: float
    R_b: float
    N_b: float
    I_b: float
    Q_b: float
    W_b: float
    err_exact_l1: Optional[float] = None

    def to_row(self) -> List[Any]:
        data = self.model_dump()
        return [data[k] if data[k] is not None else "" for k in dndelab.models.constants.CSV_HEADER]


def _finite(*values: float) -> bool:
    return all(math.isfinite(x) for x in values)


class Check(pydantic.BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    name: str
    value: float
    expected: float
    tolerance: float
    passed: bool = pydantic.Field(alias="pass")
    anchor: str = pydantic.Field(alias="paper_anchor", description="The identity or inequality this check verifies")

    @classmethod
    def relative(cls, name: str, value: float, expected: float, tolerance: float, anchor: str) -> Check:
        ok = _finite(value, expected) and abs(value - expected) <= tolerance * abs(expected)
        return cls(name=name, value=value, expected=expected, tolerance=tolerance, passed=ok, anchor=anchor)

    @classmethod
    def absolute(cls, name: str, value: float, expected: float, tolerance: float, anchor: str) -> Check:
        ok = _finite(value, expected) and abs(value - expected) <= tolerance
        return cls(name=name, value=value, expected=expected, tolerance=tolerance, passed=ok, anchor=anchor)

    @classmethod
    def at_most(cls, name: str, value: float, bound: float, anchor: str) -> Check:
        ok = _finite(value, bound) and value <= bound
        return cls(name=name, value=value, expected=bound, tolerance=0.0, passed=ok, anchor=anchor)

    @classmethod
    def at_least(cls, name: str, value: float, bound: float, anchor: str) -> Check:
        ok = _finite(value, bound) and value >= bound
        return cls(name=name, value=value, expected=bound, tolerance=0.0, passed=ok, anchor=anchor)

    @classmethod
    def flag(cls, name: str, ok: bool, anchor: str) -> Check:
        return cls(name=name, value=1.0 if ok else 0.0, expected=1.0, tolerance=0.0, passed=bool(ok), anchor=anchor)


class Report(pydantic.BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    suite: str
    params_echo: Union[dndelab.models.params.Params, dndelab.models.params.Triple] = pydantic.Field(alias="params")
    checks: List[Check] = []
    series_file: Optional[str] = None
    wallclock_s: float = 0.0

    @property
    def passed(self) -> bool:
        return len(self.checks) > 0 and all(c.passed for c in self.checks)

    def failed_checks(self) -> List[Check]:
        return [c for c in self.checks if not c.passed]

    def to_dict(self) -> Dict[str, Any]:
        return self.model_dump(mode="json", by_alias=True)

    def to_json(self) -> str:
        return self.model_dump_json(by_alias=True, indent=2)
