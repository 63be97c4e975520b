#!/usr/bin/env python3
# Copyright IBM Inc. All Rights Reserved.
# SPDX-License-Identifier: Apache-2.0

"""Command line entry point

    app.py [--config PATH] [--out DIR] [--json] [--log-level LEVEL] VERB ...

Verbs: constants, barenblatt, evolve, verify <suite|all>, sweep.
Exit codes: 0 pass, 1 check failure, 2 configuration or parameter error, 3 numerical abort.
"""

import argparse
import json
import logging
import math
import os
import sys
from typing import Any
from typing import Dict
from typing import List
from typing import Optional
from typing import Tuple

import dndelab.harness.output
import dndelab.harness.suites
import dndelab.harness.sweep
import dndelab.models.config
import dndelab.models.constants
import dndelab.models.errors
import dndelab.models.params
import dndelab.numerics.barenblatt
import dndelab.numerics.special
import logs
import utils

EXIT_PASS = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG_ERROR = 2
EXIT_NUMERICAL_ABORT = 3

# Checked in order, so subclasses come before their bases
EXIT_CODES = [
    (dndelab.models.errors.NumericalAbortError, EXIT_NUMERICAL_ABORT),
    (dndelab.models.errors.ParameterError, EXIT_CONFIG_ERROR),
    (dndelab.models.errors.MeshError, EXIT_CONFIG_ERROR),
    (dndelab.models.errors.InvalidModelError, EXIT_CONFIG_ERROR),
    (dndelab.models.errors.DiagnosticsError, EXIT_CONFIG_ERROR),
    (dndelab.models.errors.DBError, EXIT_CONFIG_ERROR),
]

CONSTANTS_COLUMNS = ["n", "p", "gamma", "regime", "b", "q", "sigma", "a", "D_b", "C_profile", "C_iso", "S_np",
                     "theta", "vartheta", "C_gn"]

Case = Tuple[int, float, float]


class NoSystemExitParser(argparse.ArgumentParser):
    def error(self, message):
        raise dndelab.models.errors.ConfigError(f"Invalid command line: {message}")


def parse_case(value: str) -> Case:
    """Parses n,p,gamma"""
    try:
        n, p, gamma = value.split(",")
        return int(n), float(p), float(gamma)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected n,p,gamma (e.g. 3,2,0.75), got {value!r}")


def build_parser() -> NoSystemExitParser:
    parser = NoSystemExitParser(description="Verification lab for the doubly nonlinear diffusion equation")
    parser.add_argument("--config", default=None, help="Experiment configuration JSON (default: "
                                                       "$DNDELAB_CONFIG_JSON_PATH or ./dndelab.json)")
    parser.add_argument("--out", default=None, help="Output directory, overrides output.dir")
    parser.add_argument("--json", action="store_true", help="Print machine-readable JSON")
    parser.add_argument("--log-level", default=None, help="Overrides $DNDELAB_LOG_LEVEL")

    verbs = parser.add_subparsers(dest="verb", required=True)

    constants = verbs.add_parser("constants", help="Derived exponents and closed-form constants")
    constants.add_argument("--case", action="append", type=parse_case, default=None,
                           help="n,p,gamma; repeatable, defaults to the configured parameters")

    barenblatt = verbs.add_parser("barenblatt", help="Closed-form functionals of the Barenblatt solution")
    barenblatt.add_argument("--case", action="append", type=parse_case, default=None)
    barenblatt.add_argument("--t", type=float, default=1.0,
                            help="Time t of U_{b,t}; time t of the evolution matches U_{b, time_scale * t}")

    verbs.add_parser("evolve", help="Evolve the configured initial condition and write series.csv")

    verify = verbs.add_parser("verify", help="Run a verification suite")
    verify.add_argument("suite", choices=list(dndelab.models.constants.SUITES) + ["all"])

    sweep = verbs.add_parser("sweep", help="Run suites over a parameter matrix")
    sweep.add_argument("--case", action="append", type=parse_case, default=None,
                       help="n,p,gamma; repeatable, defaults to the acceptance parameter matrix")
    sweep.add_argument("--suite", action="append", choices=list(dndelab.models.constants.SUITES), default=None,
                       help="Repeatable, defaults to concavity")
    sweep.add_argument("--workers", type=int, default=dndelab.models.constants.MAX_WORKERS,
                       help="Size of the process pool")
    return parser


def _finite_or_none(value: float) -> Optional[float]:
    return value if math.isfinite(value) else None


def describe_constants(params: dndelab.models.params.Params) -> Dict[str, Any]:
    """One row of the constants table; None where a constant does not apply to the regime"""
    ret: Dict[str, Any] = {key: None for key in CONSTANTS_COLUMNS}
    ret.update(n=params.n, p=params.p, gamma=params.gamma, regime=params.regime.value, b=params.b, q=params.q,
               sigma=params.sigma, a=_finite_or_none(params.a))

    if params.regime in dndelab.models.params.PROFILE_REGIMES:
        ret["D_b"] = dndelab.numerics.special.const_D_b(params)
        ret["C_profile"] = dndelab.numerics.special.const_profile_C(params)

    if params.regime in dndelab.models.params.FISHER_REGIMES:
        ret["C_iso"] = dndelab.numerics.special.const_isoperimetric(params, form="theorem")

    if 1.0 < params.p < params.n:
        ret["S_np"] = dndelab.numerics.special.sobolev_constant(params.n, params.p)

    if params.gn_part is not None and params.regime in dndelab.models.params.FISHER_REGIMES:
        s = dndelab.models.params.gn_s_of_b(params)
        try:
            exponents = dndelab.numerics.special.gn_exponents(params, s)
        except dndelab.models.errors.RangeMismatchError as e:
            logging.getLogger("app").info(f"No Gagliardo-Nirenberg constants for {params.label()}: {e}")
        else:
            ret["theta" if exponents.part == 1 else "vartheta"] = exponents.exponent
            ret["C_gn"] = dndelab.numerics.special.gn_constant(params, s)
    return ret


def constants_table(rows: List[Dict[str, Any]]) -> List[str]:
    def cell(value: Any) -> str:
        if value is None:
            return "-"
        if isinstance(value, float):
            return f"{value:.8g}"
        return str(value)

    cells = [CONSTANTS_COLUMNS] + [[cell(row[key]) for key in CONSTANTS_COLUMNS] for row in rows]
    widths = [max(len(line[k]) for line in cells) for k in range(len(CONSTANTS_COLUMNS))]
    return ["  ".join(value.rjust(width) for value, width in zip(line, widths)) for line in cells]


def describe_barenblatt(params: dndelab.models.params.Params, t: float, output_dir: str) -> Dict[str, Any]:
    """Samples (x, U, v) of U_{b,t} into <output_dir>/barenblatt/<case>.csv next to the closed-form functionals

    The functionals are None in MassRangeOnly, where the Fisher information of the profile diverges.
    """
    spec = dndelab.numerics.barenblatt.barenblatt_spec(params)
    try:
        functionals = dndelab.numerics.barenblatt.exact_functionals(spec, t).model_dump(mode="json")
    except dndelab.models.errors.OutOfRangeRegimeError:
        functionals = None

    x, u, v = dndelab.numerics.barenblatt.sample(spec, t)
    profile_file = dndelab.harness.output.write_profile(
        os.path.join(dndelab.harness.output.suite_dir(output_dir, "barenblatt"),
                     dndelab.harness.sweep.case_dirname(params.n, params.p, params.gamma) + ".csv"), x, u, v)

    return {
        "params": params.model_dump(mode="json"),
        "C": spec.C,
        "support_radius": _finite_or_none(dndelab.numerics.barenblatt.support_radius(spec, t)),
        "characteristic_radius": dndelab.numerics.barenblatt.characteristic_radius(spec, t),
        "time_scale": dndelab.numerics.barenblatt.time_scale(params),
        "functionals": functionals,
        "profile_file": profile_file,
    }


def _barenblatt_lines(described: Dict[str, Any]) -> List[str]:
    params = described["params"]
    lines = [f"n={params['n']},p={params['p']:g},gamma={params['gamma']:g}: C={described['C']:.10g} "
             f"time_scale={described['time_scale']:.10g} profile={described['profile_file']}"]
    for key, value in (described["functionals"] or {}).items():
        lines.append(f"  {key}={value:.10g}")
    return lines


def _params_for(cases: Optional[List[Case]],
                config: dndelab.models.config.ExperimentConfig) -> List[dndelab.models.params.Params]:
    if not cases:
        return [config.params()]
    return [dndelab.models.params.derive(n, p, gamma) for n, p, gamma in cases]


def _print(args: argparse.Namespace, payload: Any, lines: List[str]):
    if args.json:
        print(json.dumps(payload, indent=2))
    else:
        print("\n".join(lines))


def _report_lines(report) -> List[str]:
    lines = [f"{report.suite} {report.params_echo.label()}: {'PASS' if report.passed else 'FAIL'}"]
    for c in report.checks:
        lines.append(f"  [{'ok' if c.passed else 'FAIL'}] {c.name}: value={c.value:.10g} expected={c.expected:.10g} "
                     f"tolerance={c.tolerance:g} ({c.anchor})")
    return lines


def run_verb(args: argparse.Namespace, config: dndelab.models.config.ExperimentConfig) -> int:
    if args.verb == "constants":
        described = [describe_constants(x) for x in _params_for(args.case, config)]
        _print(args, described, constants_table(described))
        return EXIT_PASS

    if args.verb == "barenblatt":
        described = [describe_barenblatt(x, args.t, config.output.dir) for x in _params_for(args.case, config)]
        lines = []
        for x in described:
            lines.extend(_barenblatt_lines(x))
        _print(args, described, lines)
        return EXIT_PASS

    if args.verb == "evolve":
        run = dndelab.harness.suites.evolve_config(config, interval=config.time.save_interval)
        directory = dndelab.harness.output.suite_dir(config.output.dir, "evolve")
        series = dndelab.harness.output.write_series(
            os.path.join(directory, dndelab.harness.output.SERIES_FILENAME), run.records)
        if config.output.emit_snapshots:
            dndelab.harness.output.write_snapshots(
                os.path.join(directory, dndelab.harness.output.SNAPSHOTS_DIRNAME), run.states)
        final = run.records[-1]
        _print(args, {"series_file": series, "final": final.model_dump(mode="json"),
                      "records": len(run.records), "wallclock_s": run.wallclock_s},
               [f"Wrote {len(run.records)} records to {series}", f"final: {final.model_dump()}"])
        return EXIT_PASS

    if args.verb == "verify":
        names = list(dndelab.models.constants.SUITES) if args.suite == "all" else [args.suite]
        reports = [dndelab.harness.suites.run_suite(name, config) for name in names]
        lines = []
        for report in reports:
            lines.extend(_report_lines(report))
        _print(args, [r.to_dict() for r in reports], lines)
        return EXIT_PASS if all(r.passed for r in reports) else EXIT_CHECK_FAILED

    if args.verb == "sweep":
        cases = args.case or list(dndelab.models.constants.PARAMETER_MATRIX)
        configs = dndelab.harness.sweep.matrix_configs(config, cases)
        reports = dndelab.harness.sweep.sweep(
            configs, args.suite or ["concavity"], workers=args.workers,
            registry_path=os.path.join(config.output.dir, dndelab.harness.sweep.REGISTRY_FILENAME))
        lines = []
        for report in reports:
            lines.extend(_report_lines(report))
        _print(args, [r.to_dict() for r in reports], lines)
        return EXIT_PASS if all(r.passed for r in reports) else EXIT_CHECK_FAILED

    raise dndelab.models.errors.ConfigError(f"Unknown verb {args.verb}")


def exit_code_for(error: dndelab.models.errors.LabError) -> int:
    for kind, code in EXIT_CODES:
        if isinstance(error, kind):
            return code
    raise error


def main(argv: Optional[List[str]] = None) -> int:
    logger = logging.getLogger("app")

    try:
        args = build_parser().parse_args(argv)
        logs.LogSetup(level=args.log_level).apply()

        config = utils.parse_configuration(args.config)
        if args.out:
            config = config.model_copy(update={"output": config.output.model_copy(update={"dir": args.out})})

        return run_verb(args, config)
    except dndelab.models.errors.LabError as e:
        code = exit_code_for(e)
        logger.error(f"{type(e).__name__}: {e}")
        print(f"error: {e}", file=sys.stderr)
        return code


if __name__ == '__main__':
    sys.exit(main())
