# Copyright IBM Inc. All Rights Reserved.
# SPDX-License-Identifier: Apache-2.0


from __future__ import annotations

import concurrent.futures
import logging
import os
import traceback
from typing import List
from typing import Optional
from typing import Sequence
from typing import Tuple
from typing import Union

import dndelab.db.reports
import dndelab.harness.suites
import dndelab.models.config
import dndelab.models.constants
import dndelab.models.errors
import dndelab.models.params
import dndelab.models.report

logger = logging.getLogger(__name__)

REGISTRY_FILENAME = "registry.json"
ANCHOR_RUN = "run completed without parameter, mesh or numerical errors"


def case_dirname(n: int, p: float, gamma: float) -> str:
    return f"n{n}_p{p:g}_gamma{gamma:g}"


def matrix_configs(
        base: dndelab.models.config.ExperimentConfig,
        cases: Sequence[Tuple[int, float, float]],
        output_dir: Optional[str] = None,
) -> List[dndelab.models.config.ExperimentConfig]:
    """One configuration per (n, p, gamma), each writing to its own sub-directory of output_dir"""
    output_dir = output_dir or base.output.dir
    return [base.with_case(n, p, gamma, output_dir=os.path.join(output_dir, case_dirname(n, p, gamma)))
            for n, p, gamma in cases]


def _validate(configs: Sequence[dndelab.models.config.ExperimentConfig], suites: Sequence[str]):
    if len(configs) == 0:
        raise dndelab.models.errors.ConfigError("A sweep needs at least one configuration")
    if len(suites) == 0:
        raise dndelab.models.errors.ConfigError("A sweep needs at least one suite")

    for name in suites:
        if name not in dndelab.harness.suites.SUITE_FUNCTIONS:
            raise dndelab.models.errors.UnknownSuiteError(name, list(dndelab.models.constants.SUITES))

    seen = {}
    problems = []
    for idx, config in enumerate(configs):
        path = os.path.abspath(os.path.normpath(config.output.dir))
        if path in seen:
            problems.append({"message": f"configurations {seen[path]} and {idx} share the output directory {path}",
                             "location": [idx, "output", "dir"]})
        else:
            seen[path] = idx

    if problems:
        raise dndelab.models.errors.ConfigError("Invalid sweep", problems)


def params_echo(
        config: dndelab.models.config.ExperimentConfig,
) -> Union[dndelab.models.params.Params, dndelab.models.params.Triple]:
    try:
        return config.params()
    except dndelab.models.errors.ParameterError:
        return dndelab.models.params.Triple(n=config.dimension, p=config.p, gamma=config.gamma)


def aborted_report(
        suite: str,
        config: dndelab.models.config.ExperimentConfig,
        error: Exception,
) -> dndelab.models.report.Report:
    """A failed report for a run that raised, so that the sweep can carry on

    The run_aborted check names the error in its anchor.
    """
    echo = params_echo(config)
    check = dndelab.models.report.Check.flag("run_aborted", False, f"{ANCHOR_RUN}; got {type(error).__name__}: {error}")
    logger.error(f"Suite {suite} for {echo.label()} aborted: {type(error).__name__}: {error}")
    return dndelab.models.report.Report(suite=suite, params_echo=echo, checks=[check])


def _run_isolated(job: Tuple[str, dndelab.models.config.ExperimentConfig]) -> dndelab.models.report.Report:
    suite, config = job
    try:
        return dndelab.harness.suites.run_suite(suite, config)
    except Exception as e:
        logger.debug(f"Traceback of {suite} for {params_echo(config).label()}: {traceback.format_exc()}")
        return aborted_report(suite, config, e)


def sweep(
        configs: Sequence[dndelab.models.config.ExperimentConfig],
        suites: Sequence[str],
        workers: int = 1,
        registry_path: Optional[str] = None,
) -> List[dndelab.models.report.Report]:
    """Runs every suite for every configuration

    Arguments:
        configs: the configurations, each with its own output.dir
        suites: names of the suites to run for each configuration
        workers: size of the process pool, 1 runs everything in this process
        registry_path: TinyDB file that receives every report keyed by (suite, config digest)

    Returns:
        One report per (configuration, suite), ordered like the inputs irrespective of completion order. A
        configuration with invalid exponents yields an aborted report per suite like any other failed run

    Raises:
        dndelab.models.errors.ConfigError: if there are no configurations, output directories repeat or a suite
            is unknown
    """
    _validate(configs, suites)
    jobs = [(suite, config) for config in configs for suite in suites]
    logger.info(f"Sweeping {len(jobs)} runs with {workers} worker(s)")

    if workers <= 1 or len(jobs) == 1:
        reports = [_run_isolated(job) for job in jobs]
    else:
        with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as executor:
            reports = list(executor.map(_run_isolated, jobs))

    if registry_path:
        with dndelab.db.reports.DatabaseReports(registry_path) as db:
            for (suite, config), report in zip(jobs, reports):
                db.push_report(report, config.to_digest())

    failed = [r for r in reports if not r.passed]
    logger.info(f"Sweep finished: {len(reports) - len(failed)}/{len(reports)} reports passed")
    return reports
