# Copyright IBM Inc. All Rights Reserved.
# SPDX-License-Identifier: Apache-2.0


from __future__ import annotations

import importlib
import json
import logging
import os
import shutil
import tempfile

import pytest

import dndelab.models.config
import dndelab.models.constants
import dndelab.models.params

FORMAT = '%(levelname)-9s %(threadName)-30s %(name)-30s: %(funcName)-20s %(asctime)-15s: %(message)s'
logging.basicConfig(format=FORMAT)
rootLogger = logging.getLogger()


@pytest.fixture()
def output_dir() -> str:
    path = tempfile.mkdtemp(prefix="dndelab-")
    try:
        yield path
    finally:
        shutil.rmtree(path, ignore_errors=True)


@pytest.fixture()
def config_json_path(output_dir: str) -> str:
    """Points $DNDELAB_CONFIG_JSON_PATH to a configuration file and reloads dndelab.models.constants"""
    path = os.path.join(output_dir, "from-env.json")
    with open(path, "w") as f:
        json.dump({"dimension": 3, "gamma": 0.75}, f)

    orig_env = os.environ.get('DNDELAB_CONFIG_JSON_PATH')
    os.environ['DNDELAB_CONFIG_JSON_PATH'] = path
    importlib.reload(dndelab.models.constants)

    yield path

    if orig_env is not None:
        os.environ['DNDELAB_CONFIG_JSON_PATH'] = orig_env
    else:
        del os.environ['DNDELAB_CONFIG_JSON_PATH']

    importlib.reload(dndelab.models.constants)


@pytest.fixture()
def params_slow_1d() -> dndelab.models.params.Params:
    return dndelab.models.params.derive(1, 2.0, 2.0)


@pytest.fixture()
def params_slow_3d() -> dndelab.models.params.Params:
    return dndelab.models.params.derive(3, 2.0, 2.0)


@pytest.fixture()
def params_p3() -> dndelab.models.params.Params:
    return dndelab.models.params.derive(3, 3.0, 1.0)


@pytest.fixture()
def params_fast_3d() -> dndelab.models.params.Params:
    return dndelab.models.params.derive(3, 2.0, 0.75)


@pytest.fixture()
def quick_config(output_dir: str) -> dndelab.models.config.ExperimentConfig:
    """A coarse and short experiment for n=1, p=2, gamma=2 with tolerances that match its resolution"""
    return dndelab.models.config.ExperimentConfig.parse({
        "dimension": 1,
        "p": 2.0,
        "gamma": 2.0,
        "grid": {"cells": 200, "static_cells": 2000},
        "time": {"t0": 1.0, "t_end": 1.3},
        "output": {"dir": output_dir},
        "tolerances": {
            "l1_error": 0.05,
            "convergence_order": 0.0,
            "pressure_residual": 0.2,
            "n_linear_r2": 0.999,
            "n_slope": 0.05,
            "de_bruijn": 0.05,
            "entropy_rate": 0.05,
            "concavity_slack": 0.1,
            "d2n_mismatch": 1.0,
            "w_ratio": 0.05,
            "q_monotone_slack": 1e-2,
            "q_barenblatt": 0.05,
            "sobolev_equality": 5e-3,
            "gn_equality": 5e-3,
            "remainder": 0.3,
        },
    })


@pytest.fixture()
def acceptance_config(output_dir: str):
    """Builds experiments for (n, p, gamma) with the default mesh, horizon and tolerances"""
    def make(n: int, p: float, gamma: float, **sections) -> dndelab.models.config.ExperimentConfig:
        config = dndelab.models.config.ExperimentConfig.parse(
            {"dimension": n, "p": p, "gamma": gamma, "output": {"dir": output_dir}})
        return config.with_updates(**sections) if sections else config

    return make
