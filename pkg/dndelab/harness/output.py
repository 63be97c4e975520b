# Copyright IBM Inc. All Rights Reserved.
# SPDX-License-Identifier: Apache-2.0

"""Writers for the artifacts of a run: series.csv, report.json, optional npz snapshots and profile samples"""

from __future__ import annotations

import csv
import logging
import os
from typing import List
from typing import Optional
from typing import Sequence
from typing import TYPE_CHECKING

import numpy as np

import dndelab.models.constants
import dndelab.models.report

if TYPE_CHECKING:
    import dndelab.numerics.solver

logger = logging.getLogger(__name__)

SERIES_FILENAME = "series.csv"
REPORT_FILENAME = "report.json"
SNAPSHOTS_DIRNAME = "snapshots"
PROFILE_HEADER = ["x", "U", "v"]


def suite_dir(output_dir: str, suite: str) -> str:
    path = os.path.join(output_dir, suite)
    os.makedirs(path, exist_ok=True)
    return path


def write_series(path: str, records: Sequence[dndelab.models.report.DiagRecord]) -> str:
    """Writes one row per record with the header t,dt,mass,E_b,R_b,N_b,I_b,Q_b,W_b,err_exact_l1

    Floats use repr so that the file round-trips exactly; a missing err_exact_l1 is an empty field.
    """
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)

    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(dndelab.models.constants.CSV_HEADER)
        for record in records:
            writer.writerow([repr(float(x)) if x != "" else "" for x in record.to_row()])

    logger.info(f"Wrote {len(records)} records to {path}")
    return path


def read_series(path: str) -> List[dndelab.models.report.DiagRecord]:
    ret = []
    with open(path, newline="", encoding="utf-8") as f:
        for row in csv.DictReader(f):
            ret.append(dndelab.models.report.DiagRecord(
                **{k: float(v) for k, v in row.items() if v != ""}))
    return ret


def write_report(path: str, report: dndelab.models.report.Report) -> str:
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        f.write(report.to_json())
    return path


def write_snapshots(directory: str, states: Sequence[dndelab.numerics.solver.State]) -> Optional[str]:
    """Saves the radial mesh and the density of every recorded state as snapshot_<k>.npz"""
    if not states:
        return None

    os.makedirs(directory, exist_ok=True)
    for k, state in enumerate(states):
        np.savez(
            os.path.join(directory, f"snapshot_{k:05d}.npz"),
            t=np.array(state.t), r=state.grid.centers, u=state.u, volumes=state.grid.volumes,
        )
    logger.info(f"Wrote {len(states)} snapshots to {directory}")
    return directory


def write_profile(path: str, x: np.ndarray, u: np.ndarray, v: np.ndarray) -> str:
    """Writes a sampled Barenblatt solution with the header x,U,v"""
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)

    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(PROFILE_HEADER)
        for row in zip(x, u, v):
            writer.writerow([repr(float(value)) for value in row])

    logger.info(f"Wrote {len(x)} profile samples to {path}")
    return path
