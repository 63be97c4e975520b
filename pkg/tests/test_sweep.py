# Copyright IBM Inc. All Rights Reserved.
# SPDX-License-Identifier: Apache-2.0


import os

import pytest

import dndelab.db.reports
import dndelab.harness.sweep
import dndelab.models.config
import dndelab.models.errors
import dndelab.models.params
import dndelab.models.report


def test_matrix_configs(quick_config: dndelab.models.config.ExperimentConfig, output_dir: str):
    configs = dndelab.harness.sweep.matrix_configs(quick_config, [(1, 2.0, 2.0), (3, 2.0, 0.75)])

    assert [c.params().n for c in configs] == [1, 3]
    assert configs[1].output.dir == os.path.join(output_dir, "n3_p2_gamma0.75")
    assert configs[0].grid == quick_config.grid


def test_sweep_rejects_bad_inputs(quick_config: dndelab.models.config.ExperimentConfig):
    with pytest.raises(dndelab.models.errors.ConfigError):
        dndelab.harness.sweep.sweep([], ["constants"])
    with pytest.raises(dndelab.models.errors.ConfigError):
        dndelab.harness.sweep.sweep([quick_config], [])
    with pytest.raises(dndelab.models.errors.UnknownSuiteError):
        dndelab.harness.sweep.sweep([quick_config], ["everything"])

    with pytest.raises(dndelab.models.errors.ConfigError) as e:
        dndelab.harness.sweep.sweep([quick_config, quick_config.with_case(3, 2.0, 2.0)], ["constants"])
    print(e.value)
    assert e.value.problems[0]["location"] == [1, "output", "dir"]


def test_sweep_aborts_only_the_degenerate_case(quick_config: dndelab.models.config.ExperimentConfig,
                                               output_dir: str):
    configs = dndelab.harness.sweep.matrix_configs(quick_config, [(1, 2.0, 2.0), (1, 2.0, 1.0)])
    registry = os.path.join(output_dir, dndelab.harness.sweep.REGISTRY_FILENAME)

    reports = dndelab.harness.sweep.sweep(configs, ["constants"], registry_path=registry)

    assert reports[0].passed
    assert not reports[1].passed
    aborted = reports[1].checks[0]
    assert aborted.name == "run_aborted"
    assert "DegenerateBError" in aborted.anchor
    assert reports[1].params_echo == dndelab.models.params.Triple(n=1, p=2.0, gamma=1.0)
    assert reports[1].to_dict()["params"] == {"n": 1, "p": 2.0, "gamma": 1.0}

    with dndelab.db.reports.DatabaseReports(registry) as db:
        loaded = db.load_reports(suite="constants")
        assert sorted(r.params_echo.label() for r in loaded) == ["n=1,p=2,gamma=1", "n=1,p=2,gamma=2"]


def test_sweep_isolates_aborted_runs(quick_config: dndelab.models.config.ExperimentConfig, output_dir: str):
    configs = dndelab.harness.sweep.matrix_configs(quick_config, [(1, 2.0, 2.0), (3, 2.0, 2.0 / 3.0)])
    registry = os.path.join(output_dir, dndelab.harness.sweep.REGISTRY_FILENAME)

    reports = dndelab.harness.sweep.sweep(configs, ["gn"], registry_path=registry)

    assert [r.params_echo.n for r in reports] == [1, 3]
    assert reports[0].passed
    assert not reports[1].passed
    assert [c.name for c in reports[1].checks] == ["run_aborted"]
    assert reports[1].params_echo.regime == dndelab.models.params.Regime.SobolevCritical

    with dndelab.db.reports.DatabaseReports(registry) as db:
        assert len(db.query_reports()) == 2
        failed = db.query_reports(passed=False)
        assert len(failed) == 1
        assert failed[0]["failed"] == ["run_aborted"]
        assert failed[0]["digest"] == configs[1].to_digest()


def test_sweep_with_workers(quick_config: dndelab.models.config.ExperimentConfig, output_dir: str):
    configs = dndelab.harness.sweep.matrix_configs(quick_config, [(1, 2.0, 2.0), (3, 2.0, 2.0)])

    reports = dndelab.harness.sweep.sweep(configs, ["constants", "gn"], workers=2)

    assert [(r.suite, r.params_echo.n) for r in reports] == [("constants", 1), ("gn", 1), ("constants", 3),
                                                             ("gn", 3)]
    assert all(r.passed for r in reports)
    assert os.path.isfile(os.path.join(output_dir, "n3_p2_gamma2", "gn", "report.json"))


def test_registry_upserts(output_dir: str, params_slow_1d: dndelab.models.params.Params):
    path = os.path.join(output_dir, "registry.json")
    ok = dndelab.models.report.Report(suite="gn", params_echo=params_slow_1d, checks=[
        dndelab.models.report.Check.flag("gn_gaussian", True, "anchor")])
    bad = dndelab.models.report.Report(suite="gn", params_echo=params_slow_1d, checks=[
        dndelab.models.report.Check.flag("gn_gaussian", False, "anchor")])

    with dndelab.db.reports.DatabaseReports(path) as db:
        db.push_report(ok, "sha256xabc")
        db.push_report(ok, "sha256xdef")
        db.push_report(bad, "sha256xabc")

    with dndelab.db.reports.DatabaseReports(path) as db:
        assert len(db.query_reports(suite="gn")) == 2
        assert len(db.query_reports(suite="constants")) == 0
        stored = db.query_reports(digest="sha256xabc")
        assert len(stored) == 1 and stored[0]["passed"] is False

        loaded = db.load_reports(suite="gn")
        assert sorted(r.passed for r in loaded) == [False, True]
        assert loaded[0].params_echo == params_slow_1d

        assert db.delete(db.construct_query("gn", "sha256xdef")) == 1
        assert len(db.query_reports()) == 1


def test_registry_outside_with_block(output_dir: str):
    db = dndelab.db.reports.DatabaseReports(os.path.join(output_dir, "registry.json"))

    with pytest.raises(dndelab.models.errors.DBError):
        db.query_reports()
