# Copyright IBM Inc. All Rights Reserved.
# SPDX-License-Identifier: Apache-2.0


import csv
import os

import numpy as np
import pytest

import dndelab.harness.output
import dndelab.models.constants
import dndelab.models.errors
import dndelab.models.report
import dndelab.numerics.grid
import dndelab.numerics.solver
import logs


def _record(t: float, err=None) -> dndelab.models.report.DiagRecord:
    return dndelab.models.report.DiagRecord(t=t, dt=0.1, mass=1.0, E_b=0.66, R_b=0.41, N_b=3.47, I_b=4.0 / t,
                                            Q_b=13.9, W_b=1e-9, err_exact_l1=err)


def test_series_round_trip(output_dir: str):
    records = [_record(1.0, 1e-4), _record(1.1 + 1e-13), _record(1.0 / 3.0, 2e-4)]
    path = dndelab.harness.output.write_series(os.path.join(output_dir, "a", "series.csv"), records)

    with open(path, newline="") as f:
        rows = list(csv.reader(f))
    assert rows[0] == dndelab.models.constants.CSV_HEADER
    assert rows[2][-1] == ""

    assert dndelab.harness.output.read_series(path) == records


def test_snapshots(output_dir: str, params_slow_1d):
    grid = dndelab.numerics.grid.build(1, 2.0, 20)
    state = dndelab.numerics.solver.from_density(params_slow_1d, grid, np.ones(20), 1.5)

    directory = dndelab.harness.output.write_snapshots(os.path.join(output_dir, "snapshots"), [state, state])
    assert sorted(os.listdir(directory)) == ["snapshot_00000.npz", "snapshot_00001.npz"]

    with np.load(os.path.join(directory, "snapshot_00001.npz")) as data:
        assert float(data["t"]) == 1.5
        np.testing.assert_array_equal(data["r"], grid.centers)
        np.testing.assert_array_equal(data["u"], state.u)

    assert dndelab.harness.output.write_snapshots(os.path.join(output_dir, "none"), []) is None


@pytest.mark.parametrize("log_type,handler", [("stream", "logging.StreamHandler"),
                                              ("watched", "logging.handlers.WatchedFileHandler"),
                                              ("rotating", "logging.handlers.RotatingFileHandler")])
def test_log_setup(output_dir: str, log_type: str, handler: str):
    setup = logs.LogSetup(level="debug", log_type=log_type, log_dir=output_dir, log_name="lab.log", copies=2)
    config = setup.log_config()

    assert config["handlers"]["default"]["class"] == handler
    assert config["root"]["level"] == "DEBUG"
    if log_type != "stream":
        assert config["handlers"]["default"]["filename"] == os.path.join(output_dir, "lab.log")


def test_log_setup_rejects_unknown_type_and_level():
    with pytest.raises(dndelab.models.errors.ConfigError):
        logs.LogSetup(log_type="syslog")
    with pytest.raises(dndelab.models.errors.ConfigError):
        logs.LogSetup(level="loud")
