# Copyright IBM Inc. All Rights Reserved.
# SPDX-License-Identifier: Apache-2.0

"""Experiment configuration; every tolerance used by the verification suites lives in ToleranceConfig"""

from __future__ import annotations

from typing import Any
from typing import Dict
from typing import Literal
from typing import Optional
from typing import Union

import pydantic
from pydantic import ConfigDict, model_validator

import dndelab.models.common
import dndelab.models.constants
import dndelab.models.errors
import dndelab.models.params

InitKind = Literal["barenblatt", "perturbed_barenblatt", "gaussian_bump", "double_bump"]


class GridConfig(dndelab.models.common.Digestable):
    r_max: Union[Literal["auto"], pydantic.PositiveFloat] = pydantic.Field(
        "auto", description="Domain radius, auto picks it from the Barenblatt solution at t_end")
    cells: int = pydantic.Field(400, ge=dndelab.models.constants.MIN_CELLS, description="Cells of evolution runs")
    static_cells: int = pydantic.Field(
        4000, ge=dndelab.models.constants.MIN_CELLS, description="Cells of quadratures that need no time stepping")


class TimeConfig(dndelab.models.common.Digestable):
    t0: pydantic.PositiveFloat = 1.0
    t_end: pydantic.PositiveFloat = 2.0
    cfl: float = pydantic.Field(0.2, gt=0.0, le=1.0)
    max_steps: int = pydantic.Field(50_000_000, ge=1)
    save_every: int = pydantic.Field(200, ge=1, description="Steps between records")
    save_interval: Optional[pydantic.PositiveFloat] = pydantic.Field(
        None, description="When set, records at uniformly spaced times instead of every save_every steps")

    @model_validator(mode="after")
    def check_horizon(self) -> "TimeConfig":
        if self.t_end < self.t0:
            raise ValueError(f"t_end={self.t_end} must not be before t0={self.t0}")
        return self


class InitConfig(dndelab.models.common.Digestable):
    kind: InitKind = "barenblatt"
    options: Dict[str, float] = {}


class RegularizationConfig(dndelab.models.common.Digestable):
    eps_rule: Union[Literal["auto"], pydantic.NonNegativeFloat] = "auto"
    u_floor_rule: Union[Literal["auto"], pydantic.NonNegativeFloat] = "auto"


class OutputConfig(dndelab.models.common.Digestable):
    dir: str = dndelab.models.constants.DEFAULT_OUTPUT_DIR
    emit_csv: bool = True
    emit_snapshots: bool = False


class ToleranceConfig(dndelab.models.common.Digestable):
    constants_rel: float = 1e-12
    sobolev_rel: float = 1e-10
    c_iso_quadrature: float = 1e-2
    identity_fuzz: float = 1e-10
    quadrature_rel: float = 5e-3
    mass: float = 1e-6
    quadrature_order_slow: float = 0.9
    quadrature_order_fast: float = 1.8
    l1_error: float = 2e-3
    convergence_order: float = 0.8
    mass_conservation: float = 1e-10
    pressure_residual: float = 0.05
    n_linear_r2: float = 0.99999
    n_slope: float = 1e-2
    de_bruijn: float = 0.02
    entropy_rate: float = 1e-2
    concavity_slack: float = 1e-2
    d2n_mismatch: float = 0.1
    d2e_mismatch: float = 0.1
    w_ratio: float = 1e-3
    q_monotone_slack: float = 1e-3
    q_lower: float = 0.98
    q_barenblatt: float = 1e-2
    sobolev_equality: float = 1e-3
    sobolev_gaussian_min: float = 1.01
    gn_equality: float = 1e-3
    remainder: float = 0.05


class ExperimentConfig(dndelab.models.common.Digestable):
    dimension: int = pydantic.Field(1, ge=1)
    p: float = pydantic.Field(2.0, gt=1.0)
    gamma: float = pydantic.Field(2.0, allow_inf_nan=False)
    grid: GridConfig = GridConfig()
    time: TimeConfig = TimeConfig()
    init: InitConfig = InitConfig()
    regularization: RegularizationConfig = RegularizationConfig()
    output: OutputConfig = OutputConfig()
    tolerances: ToleranceConfig = ToleranceConfig()

    @classmethod
    def parse(cls, data: Dict[str, Any]) -> ExperimentConfig:
        """Validates a configuration dictionary

        Raises:
            dndelab.models.errors.ConfigError: with one problem per invalid field
        """
        try:
            return cls.model_validate(data)
        except pydantic.ValidationError as e:
            raise dndelab.models.errors.ConfigError.from_pydantic("Invalid experiment configuration", e)

    def params(self) -> dndelab.models.params.Params:
        return dndelab.models.params.derive(self.dimension, self.p, self.gamma)

    def with_case(self, n: int, p: float, gamma: float, output_dir: Optional[str] = None) -> ExperimentConfig:
        update: Dict[str, Any] = {"dimension": n, "p": p, "gamma": gamma}
        if output_dir is not None:
            update["output"] = self.output.model_copy(update={"dir": output_dir})
        return self.model_copy(update=update)

    def with_updates(self, **sections: Dict[str, Any]) -> ExperimentConfig:
        """Returns a validated copy in which the named sections are updated, e.g. with_updates(time={"t_end": 3})"""
        data = self.model_dump()
        for name, values in sections.items():
            if isinstance(data.get(name), dict):
                data[name].update(values)
            else:
                data[name] = values
        return self.parse(data)
