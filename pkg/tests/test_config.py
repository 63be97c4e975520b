# Copyright IBM Inc. All Rights Reserved.
# SPDX-License-Identifier: Apache-2.0


import json
import os

import pytest

import dndelab.models.config
import dndelab.models.errors
import dndelab.models.params
import utils


def test_defaults():
    config = dndelab.models.config.ExperimentConfig()

    assert config.params() == dndelab.models.params.derive(1, 2.0, 2.0)
    assert config.grid.r_max == "auto"
    assert config.time.t0 == 1.0 and config.time.t_end == 2.0
    assert config.init.kind == "barenblatt"
    assert config.tolerances.constants_rel == 1e-12


def test_parse_collects_problems():
    with pytest.raises(dndelab.models.errors.ConfigError) as e:
        dndelab.models.config.ExperimentConfig.parse({
            "dimension": 0,
            "grid": {"cells": 2},
            "time": {"cfl": 2.0},
            "init": {"kind": "top_hat"},
        })

    locations = {tuple(x["location"]) for x in e.value.problems}
    print(e.value)
    assert ("dimension",) in locations
    assert ("grid", "cells") in locations
    assert ("time", "cfl") in locations
    assert ("init", "kind") in locations


def test_time_horizon():
    with pytest.raises(dndelab.models.errors.ConfigError):
        dndelab.models.config.ExperimentConfig.parse({"time": {"t0": 2.0, "t_end": 1.0}})

    config = dndelab.models.config.ExperimentConfig.parse({"time": {"t0": 1.5, "t_end": 1.5}})
    assert config.time.t_end == config.time.t0


def test_gamma_only_needs_to_be_finite():
    config = dndelab.models.config.ExperimentConfig.parse({"gamma": 0.0})
    assert config.params().regime == dndelab.models.params.Regime.MassRangeOnly

    with pytest.raises(dndelab.models.errors.ConfigError):
        dndelab.models.config.ExperimentConfig.parse({"gamma": float("nan")})


def test_r_max():
    config = dndelab.models.config.ExperimentConfig.parse({"grid": {"r_max": 12.5}})
    assert config.grid.r_max == 12.5

    with pytest.raises(dndelab.models.errors.ConfigError):
        dndelab.models.config.ExperimentConfig.parse({"grid": {"r_max": "large"}})
    with pytest.raises(dndelab.models.errors.ConfigError):
        dndelab.models.config.ExperimentConfig.parse({"grid": {"r_max": -1.0}})


def test_with_case_and_updates(output_dir: str):
    config = dndelab.models.config.ExperimentConfig()

    case = config.with_case(3, 2.0, 0.75, output_dir=output_dir)
    assert case.params().regime == dndelab.models.params.Regime.FastDiffusionFisherRange
    assert case.output.dir == output_dir
    assert config.dimension == 1

    updated = config.with_updates(time={"t_end": 3.0}, gamma=1.5)
    assert updated.time.t_end == 3.0
    assert updated.time.t0 == 1.0
    assert updated.gamma == 1.5

    with pytest.raises(dndelab.models.errors.ConfigError):
        config.with_updates(time={"t_end": 0.5})


def test_digest_ignores_key_order():
    one = dndelab.models.config.ExperimentConfig.parse({"dimension": 3, "gamma": 0.75})
    two = dndelab.models.config.ExperimentConfig.parse({"gamma": 0.75, "dimension": 3})
    other = dndelab.models.config.ExperimentConfig.parse({"dimension": 3, "gamma": 0.8})

    assert one.to_digest() == two.to_digest()
    assert one.to_digest() != other.to_digest()
    assert one.to_digest().startswith("sha256x")


def test_validate_config_suggests_keys():
    with pytest.raises(dndelab.models.errors.ConfigError) as e:
        utils.validate_config({"dimensoin": 3, "grid": {"cellz": 10}, "tolerances": {"foo": 1.0}})

    messages = [x["message"] for x in e.value.problems]
    print(e.value)
    assert any('did you mean "dimension"' in x for x in messages)
    assert any('did you mean "cells"' in x for x in messages)
    assert any("valid keys are" in x for x in messages)


def test_validate_config_not_a_dict():
    with pytest.raises(dndelab.models.errors.ConfigError):
        utils.validate_config([1, 2, 3])


def test_setup_config_from_file(output_dir: str):
    path = os.path.join(output_dir, "experiment.json")
    with open(path, "w") as f:
        json.dump({"dimension": 3, "p": 3.0, "gamma": 1.0}, f)

    config = utils.parse_configuration(path)
    assert config.params() == dndelab.models.params.derive(3, 3.0, 1.0)


def test_setup_config_errors(output_dir: str):
    with pytest.raises(dndelab.models.errors.ConfigError):
        utils.setup_config(os.path.join(output_dir, "missing.json"))

    path = os.path.join(output_dir, "broken.json")
    with open(path, "w") as f:
        f.write("{not json")

    with pytest.raises(dndelab.models.errors.ConfigError):
        utils.setup_config(path)


def test_setup_config_from_env(config_json_path: str):
    assert utils.get_config_json_path() == config_json_path
    assert utils.setup_config() == {"dimension": 3, "gamma": 0.75}
    assert utils.parse_configuration().params() == dndelab.models.params.derive(3, 2.0, 0.75)
