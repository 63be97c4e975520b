# Copyright IBM Inc. All Rights Reserved.
# SPDX-License-Identifier: Apache-2.0

import os
from typing import Mapping, Text, Optional


class EnvVar:

    def __init__(
            self,
            key: Text,
            default: Text = None,
            env: Optional[Mapping[Text, Text]] = None,
    ):
        if env is None:
            env = os.environ.copy()

        self.key = key
        self.default = default
        self._env = env

    def __str__(self) -> Text:
        return self.get()

    def get(self) -> Text:
        return self._env.get(self.key, self.default)

    @property
    def value(self) -> Text:
        return self.get()

    @property
    def defined(self) -> bool:
        return self.key in self._env

    @property
    def enabled(self) -> bool:
        return (self.value or "").lower() in ["true", "yes", "enabled", "1"]

    def as_int(self) -> int:
        return int(self.value)


CONFIG_JSON_PATH = EnvVar('DNDELAB_CONFIG_JSON_PATH').value
DEFAULT_CONFIG_FILENAME = "dndelab.json"

LOG_LEVEL = EnvVar('DNDELAB_LOG_LEVEL', 'INFO').value
LOG_TYPE = EnvVar('DNDELAB_LOG_TYPE', 'stream').value
LOG_DIR = EnvVar('DNDELAB_LOG_DIR', os.getcwd()).value
LOG_NAME = EnvVar('DNDELAB_LOG_NAME', 'dndelab.log').value
LOG_MAX_BYTES = EnvVar('DNDELAB_LOG_MAX_BYTES', str(10 * 1024 * 1024)).as_int()
LOG_COPIES = EnvVar('DNDELAB_LOG_COPIES', '5').as_int()

DEFAULT_OUTPUT_DIR = EnvVar('DNDELAB_OUTPUT_DIR', 'dndelab-out').value
MAX_WORKERS = EnvVar('DNDELAB_MAX_WORKERS', '1').as_int()

# Regime boundaries are compared with this absolute tolerance
REGIME_TOLERANCE = 1e-12

# u_floor = U_FLOOR_FACTOR * max(u0), eps = EPS_FACTOR * max|face gradient|
U_FLOOR_FACTOR = 1e-12
EPS_FACTOR = 1e-6

# Tail mass left outside r_max when b < 0
TAIL_MASS = 1e-6
SUPPORT_MARGIN = 3.0

MIN_CELLS = 16

CSV_HEADER = ["t", "dt", "mass", "E_b", "R_b", "N_b", "I_b", "Q_b", "W_b", "err_exact_l1"]

SUITES = [
    "constants", "quadrature", "self_similar", "debruijn", "concavity",
    "isoperimetric", "sobolev", "gn", "remainder",
]

PARAMETER_MATRIX = [(1, 2.0, 2.0), (3, 2.0, 2.0), (3, 3.0, 1.0), (3, 2.0, 0.75)]

# Records kept by the verification suites when time.save_interval is unset
SUITE_RECORDS = 40

# Radius of the static mesh used for Sobolev quadratures, the extremals decay like a power of r
SOBOLEV_RADIUS = 50.0

# Seed and size of the random tuples fed to the A-norm decomposition check
FUZZ_SEED = 20240101
FUZZ_SAMPLES = 10_000

# d^2N_b/dt^2 is the curvature of a quadratic least-squares fit over 2 * D2N_HALF_WINDOW + 1 records
D2N_HALF_WINDOW = 4

# Below this fraction of the d2N tolerance a finer mesh counts as converged even if its mismatch grew
D2N_REFINEMENT_FLOOR = 0.1

# Radii sampled by the barenblatt verb
PROFILE_SAMPLES = 201
