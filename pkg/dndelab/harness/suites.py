# Copyright IBM Inc. All Rights Reserved.
# SPDX-License-Identifier: Apache-2.0

"""Verification suites: each one turns an ExperimentConfig into a list of named checks

Suites that time-step write the diagnostics of their main run to <output.dir>/<suite>/series.csv, and every suite
writes <output.dir>/<suite>/report.json.
"""

from __future__ import annotations

import logging
import math
import os
import time
from typing import Callable
from typing import Dict
from typing import List
from typing import Optional
from typing import Tuple

import numpy as np
import pydantic
import scipy.stats
from pydantic import ConfigDict

import dndelab.harness.output
import dndelab.models.config
import dndelab.models.constants
import dndelab.models.errors
import dndelab.models.params
import dndelab.models.report
import dndelab.numerics.barenblatt
import dndelab.numerics.functionals
import dndelab.numerics.grid
import dndelab.numerics.inequalities
import dndelab.numerics.solver
import dndelab.numerics.special

logger = logging.getLogger(__name__)

Check = dndelab.models.report.Check

ANCHOR_ISOPERIMETRIC = "sharp isoperimetric inequality N_b I_b >= C_b"
ANCHOR_PROFILE = "Barenblatt profile normalisation D_b, C"
ANCHOR_GAMMA = "Gamma recurrence ln Gamma(x+1) = ln Gamma(x) + ln x"
ANCHOR_SOBOLEV = "sharp Sobolev inequality"
ANCHOR_SOBOLEV_CHAIN = "Sobolev constant from the isoperimetric constant with u = w^{p*}"
ANCHOR_A_NORM = "A-norm decomposition |Hess v|_A^2 = (Delta_p v)^2/n + |T|_A^2"
ANCHOR_GN_EXPONENTS = "Gagliardo-Nirenberg interpolation exponents"
ANCHOR_BARENBLATT = "closed-form functionals of the Barenblatt profile"
ANCHOR_SELF_SIMILAR = "self-similar source-type solution U_{b,t}"
ANCHOR_MASS = "mass conservation"
ANCHOR_PRESSURE = "pressure equation v_t = b v Delta_p v + |grad v|^p"
ANCHOR_N_LINEAR = "N_b(U_{b,t}) = N_b(B) t"
ANCHOR_DE_BRUIJN = "de Bruijn identity dR_b/dt = I_b"
ANCHOR_ENTROPY_RATE = "entropy dissipation dE_b/dt = -(b(b+1)/gamma) int |grad v|^p u"
ANCHOR_CONCAVITY = "concavity of the entropy power N_b"
ANCHOR_SECOND_DERIVATIVE = "d^2N_b/dt^2 = (sigma b (b+1)/gamma) W_b"
ANCHOR_ENTROPY_SECOND = "d^2E_b/dt^2 = pb int [|grad v|^(2p-4)|Hess v|_A^2 + b (Delta_p v)^2] u^(b+1)"
ANCHOR_W_BARENBLATT = "W_b vanishes exactly at Barenblatt profiles"
ANCHOR_Q_FLOW = "Q_b = N_b I_b is nonincreasing along the flow"
ANCHOR_DILATION = "dilation invariance of Q_b and shift of R_b"
ANCHOR_GN = "sharp Gagliardo-Nirenberg inequality"
ANCHOR_REMAINDER = "Gagliardo-Nirenberg remainder equals the integrated entropy production"

# Reference values that do not depend on the configuration
_D_B_REFERENCES = (
    ((1, 2.0, 2.0), 4.0 / 3.0),
    ((3, 2.0, 2.0), 8.0 * math.pi / 15.0),
    ((3, 2.0, 2.0 / 3.0), math.pi ** 2 / 4.0),
)
_C_ISO_REFERENCES = (
    ((1, 2.0, 2.0), 125.0 / 9.0),
)
_SOBOLEV_CHAIN_CASES = ((3, 2.0), (4, 2.0), (5, 3.0))
_CLASSICAL_SOBOLEV_DIMENSIONS = (3, 4, 5, 6)

# (n, p, gamma): one case per part of the Gagliardo-Nirenberg family plus a p != 2 case
_GN_EXPONENT_CASES = ((3, 2.0, 0.75), (1, 2.0, 2.0), (4, 3.0, 0.4))

DILATION = 1.25
SOBOLEV_DILATION = 2.0
PERTURBATION_AMPLITUDE = 0.05


class SuiteOutcome(pydantic.BaseModel):
    model_config = ConfigDict(extra="forbid", arbitrary_types_allowed=True)

    checks: List[dndelab.models.report.Check] = pydantic.Field(default_factory=list)
    run: Optional[dndelab.numerics.solver.RunResult] = None


# Shared plumbing


def save_interval(config: dndelab.models.config.ExperimentConfig) -> Optional[float]:
    if config.time.save_interval is not None:
        return config.time.save_interval
    span = config.time.t_end - config.time.t0
    return span / dndelab.models.constants.SUITE_RECORDS if span > 0.0 else None


def evolution_radius(
        config: dndelab.models.config.ExperimentConfig,
        params: dndelab.models.params.Params,
        kind: str,
        options: Optional[Dict[str, float]] = None,
) -> float:
    """The configured r_max, or one that holds the initial density and the Barenblatt solution at t_end"""
    if config.grid.r_max != "auto":
        return float(config.grid.r_max)

    spec = dndelab.numerics.barenblatt.barenblatt_spec(params)
    radius = dndelab.numerics.barenblatt.auto_radius(
        spec, dndelab.numerics.barenblatt.self_similar_time(params, config.time.t_end))
    if kind in ("gaussian_bump", "double_bump"):
        radius += dndelab.numerics.solver.init_extent(kind, params, config.time.t0, options)
    return radius


def static_grid(
        config: dndelab.models.config.ExperimentConfig,
        spec: dndelab.numerics.barenblatt.BarenblattSpec,
        cells: Optional[int] = None,
        t: float = 1.0,
) -> dndelab.numerics.grid.RadialGrid:
    """Mesh for quadratures of U_{b,t}; t is the time of the U_{b,.} family, not of the evolution"""
    if config.grid.r_max == "auto":
        radius = dndelab.numerics.barenblatt.auto_radius(spec, t)
    else:
        radius = float(config.grid.r_max)
    return dndelab.numerics.grid.build(spec.params.n, radius, cells or config.grid.static_cells)


def start_state(
        config: dndelab.models.config.ExperimentConfig,
        params: dndelab.models.params.Params,
        grid: dndelab.numerics.grid.RadialGrid,
        kind: str,
        options: Optional[Dict[str, float]] = None,
) -> dndelab.numerics.solver.State:
    return dndelab.numerics.solver.initial_condition(
        kind, params, grid, config.time.t0, options,
        eps_rule=config.regularization.eps_rule, u_floor_rule=config.regularization.u_floor_rule)


def run_from(
        config: dndelab.models.config.ExperimentConfig,
        state: dndelab.numerics.solver.State,
        exact: Optional[dndelab.numerics.barenblatt.BarenblattSpec] = None,
        interval: Optional[float] = ...,
) -> dndelab.numerics.solver.RunResult:
    """Evolves state to time.t_end; interval=... picks the suite record spacing, None records every save_every"""
    if interval is ...:
        interval = save_interval(config)
    return dndelab.numerics.solver.evolve(
        state, config.time.t_end, save_every=config.time.save_every, cfl=config.time.cfl,
        max_steps=config.time.max_steps, save_interval=interval, exact=exact)


def evolve_config(
        config: dndelab.models.config.ExperimentConfig,
        kind: Optional[str] = None,
        cells: Optional[int] = None,
        interval: Optional[float] = ...,
) -> dndelab.numerics.solver.RunResult:
    """Runs the configured initial condition (or the given kind with default options) to time.t_end

    Barenblatt starts are compared with the exact solution along the way.
    """
    params = config.params()
    if kind is None or kind == config.init.kind:
        kind, options = config.init.kind, config.init.options
    else:
        options = None

    grid = dndelab.numerics.grid.build(
        params.n, evolution_radius(config, params, kind, options), cells or config.grid.cells)
    exact = dndelab.numerics.barenblatt.barenblatt_spec(params) if kind == "barenblatt" else None
    return run_from(config, start_state(config, params, grid, kind, options), exact=exact, interval=interval)


def _column(run: dndelab.numerics.solver.RunResult, name: str) -> np.ndarray:
    return np.array([getattr(r, name) for r in run.records], dtype=float)


def _linear_fit_r2(t: np.ndarray, y: np.ndarray) -> Tuple[float, float]:
    """Returns (slope, R^2) of the least-squares line through (t, y)"""
    if np.ptp(y) == 0.0:
        return 0.0, 1.0
    fit = scipy.stats.linregress(t, y)
    return float(fit.slope), float(fit.rvalue) ** 2


def _relative_mismatch(value: float, reference: float) -> float:
    scale = max(abs(value), abs(reference))
    return abs(value - reference) / scale if scale > 0.0 else 0.0


def _gaussian(grid: dndelab.numerics.grid.RadialGrid, width: float) -> np.ndarray:
    return np.exp(-0.5 * (grid.centers / width) ** 2)


# Suites


def suite_constants(config: dndelab.models.config.ExperimentConfig) -> SuiteOutcome:
    """Closed-form constants: both isoperimetric forms, quadrature of Q_b(B), Sobolev constants, identity fuzz"""
    tol = config.tolerances
    params = config.params()
    checks = []

    theorem = dndelab.numerics.special.const_isoperimetric(params, form="theorem")
    proof = dndelab.numerics.special.const_isoperimetric(params, form="proof")
    checks.append(Check.relative("C_iso_two_forms", theorem, proof, tol.constants_rel, ANCHOR_ISOPERIMETRIC))

    spec = dndelab.numerics.barenblatt.barenblatt_spec(params)
    grid = static_grid(config, spec)
    barenblatt = dndelab.numerics.solver.from_density(
        params, grid, np.asarray(dndelab.numerics.barenblatt.profile(spec, grid.centers)), 1.0)
    checks.append(Check.relative(
        "C_iso_quadrature", dndelab.numerics.functionals.isoperimetric_Q(barenblatt), theorem,
        tol.c_iso_quadrature, ANCHOR_ISOPERIMETRIC))

    for (n, p, gamma), expected in _C_ISO_REFERENCES:
        value = dndelab.numerics.special.const_isoperimetric(dndelab.models.params.derive(n, p, gamma))
        checks.append(Check.relative(
            f"C_iso_reference[n={n},p={p:g},gamma={gamma:g}]", value, expected, tol.constants_rel,
            ANCHOR_ISOPERIMETRIC))

    for (n, p, gamma), expected in _D_B_REFERENCES:
        case = dndelab.models.params.derive(n, p, gamma)
        checks.append(Check.relative(
            f"D_b_reference[n={n},p={p:g},gamma={gamma:g}]", dndelab.numerics.special.const_D_b(case), expected,
            tol.constants_rel, ANCHOR_PROFILE))
        expected_c = expected ** (-case.b * case.q / (case.n * case.b + case.q))
        checks.append(Check.relative(
            f"C_reference[n={n},p={p:g},gamma={gamma:g}]", dndelab.numerics.special.const_profile_C(case),
            expected_c, tol.constants_rel, ANCHOR_PROFILE))

    x = np.linspace(0.05, 20.0, 400)
    recurrence = np.abs(dndelab.numerics.special.ln_gamma(x + 1.0) - dndelab.numerics.special.ln_gamma(x) - np.log(x))
    checks.append(Check.at_most("gamma_recurrence", float(np.max(recurrence)), tol.identity_fuzz, ANCHOR_GAMMA))

    checks.append(Check.relative(
        "sobolev_S_3_2", dndelab.numerics.special.sobolev_constant(3, 2.0), 3.0 * (math.pi / 2.0) ** (4.0 / 3.0),
        tol.sobolev_rel, ANCHOR_SOBOLEV))

    for n in _CLASSICAL_SOBOLEV_DIMENSIONS:
        classical = math.pi * n * (n - 2.0) * (math.gamma(0.5 * n) / math.gamma(float(n))) ** (2.0 / n)
        checks.append(Check.relative(
            f"sobolev_classical[n={n}]", dndelab.numerics.special.sobolev_constant(n, 2.0), classical,
            tol.constants_rel, ANCHOR_SOBOLEV))

    for n, p in _SOBOLEV_CHAIN_CASES:
        chain = dndelab.numerics.special.sobolev_constant_from_isoperimetric(n, p)
        statement = dndelab.numerics.special.sobolev_constant_statement_form(n, p)
        logger.info(f"Sobolev n={n} p={p}: chain {chain}, C_1/K^p without gamma/(b+1) {statement}")
        checks.append(Check.relative(
            f"sobolev_chain[n={n},p={p:g}]", chain, dndelab.numerics.special.sobolev_constant(n, p),
            tol.sobolev_rel, ANCHOR_SOBOLEV_CHAIN))

    checks.append(Check.at_most("a_norm_fuzz", a_norm_fuzz(), tol.identity_fuzz, ANCHOR_A_NORM))

    for n, p, gamma in _GN_EXPONENT_CASES:
        case = dndelab.models.params.derive(n, p, gamma)
        exponents = dndelab.numerics.special.gn_exponents(case, dndelab.models.params.gn_s_of_b(case))
        checks.append(Check.relative(
            f"gn_exponent_forms[n={n},p={p:g},gamma={gamma:g}]", exponents.exponent_alt, exponents.exponent,
            tol.identity_fuzz, ANCHOR_GN_EXPONENTS))

    return SuiteOutcome(checks=checks)


def a_norm_fuzz(samples: int = dndelab.models.constants.FUZZ_SAMPLES,
                seed: int = dndelab.models.constants.FUZZ_SEED) -> float:
    """Max relative residual of the A-norm decomposition over random (n, p, v_r, v_rr, r) tuples"""
    rng = np.random.default_rng(seed)
    dimensions = rng.integers(1, 7, size=samples)
    exponents = rng.uniform(1.1, 4.0, size=samples)
    signs = rng.choice([-1.0, 1.0], size=samples)
    slopes = signs * 10.0 ** rng.uniform(-2.0, 1.0, size=samples)
    curvatures = rng.normal(0.0, 3.0, size=samples)
    radii = 10.0 ** rng.uniform(-2.0, 1.0, size=samples)

    worst = 0.0
    for n, p, v_r, v_rr, r in zip(dimensions, exponents, slopes, curvatures, radii):
        worst = max(worst, dndelab.numerics.functionals.a_norm_decomposition_residual(
            int(n), float(p), float(v_r), float(v_rr), float(r)))
    return worst


def suite_quadrature(config: dndelab.models.config.ExperimentConfig) -> SuiteOutcome:
    """Midpoint quadrature of the Barenblatt profile against its closed-form functionals"""
    tol = config.tolerances
    params = config.params()
    spec = dndelab.numerics.barenblatt.barenblatt_spec(params)
    exact = dndelab.numerics.barenblatt.exact_functionals(spec)

    grid = static_grid(config, spec)
    u = np.asarray(dndelab.numerics.barenblatt.source_solution(spec, grid.centers, 1.0))
    state = dndelab.numerics.solver.from_density(params, grid, u, 1.0, normalize=False)
    tail = params.b < 0

    mass = extrapolated_mass(spec, grid, u)
    e_b = dndelab.numerics.grid.integrate(grid, u ** (params.b + 1.0), tail=tail)
    moment = dndelab.numerics.grid.integrate(grid, grid.centers ** params.q * u, tail=tail)
    fisher = dndelab.numerics.functionals.fisher_I(state)

    threshold = tol.quadrature_order_slow if params.b > 0 else tol.quadrature_order_fast
    checks = [
        Check.absolute("mass", mass, 1.0, tol.mass, ANCHOR_PROFILE),
        Check.relative("E_b", e_b, exact.E_b, tol.quadrature_rel, ANCHOR_BARENBLATT),
        Check.relative("q_moment", moment, exact.q_moment, tol.quadrature_rel, ANCHOR_BARENBLATT),
        Check.relative("I_b", fisher, exact.I_b, tol.quadrature_rel, ANCHOR_BARENBLATT),
        Check.at_least("quadrature_order", quadrature_order(config, spec, grid.r_max), threshold, ANCHOR_PROFILE),
    ]
    return SuiteOutcome(checks=checks)


def extrapolated_mass(
        spec: dndelab.numerics.barenblatt.BarenblattSpec,
        grid: dndelab.numerics.grid.RadialGrid,
        u: np.ndarray,
) -> float:
    """Mass of U_{b,1} sampled on grid

    For b < 0 the profile is smooth on the whole mesh and the midpoint error is c dr^2, so the sum on grid and the
    one on half as many cells are combined as (4 M_m - M_{m/2})/3, with the tail closure on both. Compactly supported
    profiles keep the plain sum because the free boundary spoils the dr^2 expansion.
    """
    params = spec.params
    if params.b > 0:
        return dndelab.numerics.grid.integrate(grid, u)

    fine = dndelab.numerics.grid.integrate(grid, u, tail=True)
    half = grid.cells // 2
    if half < dndelab.models.constants.MIN_CELLS:
        return fine

    coarse_grid = dndelab.numerics.grid.build(params.n, grid.r_max, half)
    coarse_u = np.asarray(dndelab.numerics.barenblatt.source_solution(spec, coarse_grid.centers, 1.0))
    coarse = dndelab.numerics.grid.integrate(coarse_grid, coarse_u, tail=True)

    extrapolated = (4.0 * fine - coarse) / 3.0
    logger.info(f"Mass with {half} cells {coarse}, with {grid.cells} cells {fine}, extrapolated {extrapolated}")
    return extrapolated


def quadrature_order(
        config: dndelab.models.config.ExperimentConfig,
        spec: dndelab.numerics.barenblatt.BarenblattSpec,
        r_max: float,
) -> float:
    """Observed order of the mass quadrature from three meshes with 3k, 6k and 12k cells

    Differences of successive refinements cancel the error that does not depend on the mesh (the tail beyond r_max).
    Multiples of 3 put the free boundary on a face when r_max is three support radii.
    """
    params = spec.params
    base = 3 * max(dndelab.models.constants.MIN_CELLS, config.grid.static_cells // 12)
    masses = []
    for k in range(3):
        grid = dndelab.numerics.grid.build(params.n, r_max, base * 2 ** k)
        u = np.asarray(dndelab.numerics.barenblatt.source_solution(spec, grid.centers, 1.0))
        masses.append(dndelab.numerics.grid.integrate(grid, u, tail=params.b < 0))

    coarse = abs(masses[0] - masses[1])
    fine = max(abs(masses[1] - masses[2]), np.finfo(float).tiny)
    order = math.log2(coarse / fine) if coarse > 0.0 else 0.0
    logger.info(f"Mass quadrature with {base}, {2 * base}, {4 * base} cells: {masses}, order {order}")
    return order


def suite_self_similar(config: dndelab.models.config.ExperimentConfig) -> SuiteOutcome:
    """Evolves the Barenblatt solution and compares it with U_{b,t}; also runs at half resolution for the order"""
    tol = config.tolerances
    params = config.params()
    spec = dndelab.numerics.barenblatt.barenblatt_spec(params)

    run = evolve_config(config, kind="barenblatt")
    coarse = evolve_config(config, kind="barenblatt",
                           cells=max(dndelab.models.constants.MIN_CELLS, config.grid.cells // 2))

    error = run.records[-1].err_exact_l1
    coarse_error = coarse.records[-1].err_exact_l1
    order = math.log2(coarse_error / error) if error > 0.0 and coarse_error > 0.0 else 0.0

    first, last = run.states[0], run.final
    drift = abs(last.mass - last.clamped_mass - (first.mass - first.clamped_mass)) / first.mass
    if last.clamped_mass > 0.0:
        logger.info(f"Positivity clamps added mass {last.clamped_mass:.3e}, excluded from the conservation check")

    middle = run.states[len(run.states) // 2]
    following = dndelab.numerics.solver.step(middle, dndelab.numerics.solver.cfl_dt(middle, config.time.cfl))
    residual = dndelab.numerics.solver.pressure_residual(middle, following)

    slope, r2 = _linear_fit_r2(_column(run, "t"), _column(run, "N_b"))
    exact = dndelab.numerics.barenblatt.exact_functionals(spec)

    checks = [
        Check.at_most("l1_error", error, tol.l1_error, ANCHOR_SELF_SIMILAR),
        Check.at_least("convergence_order", order, tol.convergence_order, ANCHOR_SELF_SIMILAR),
        Check.at_most("mass_conservation", drift, tol.mass_conservation, ANCHOR_MASS),
        Check.at_most("pressure_residual", residual, tol.pressure_residual, ANCHOR_PRESSURE),
        Check.at_least("N_linear_fit", r2, tol.n_linear_r2, ANCHOR_N_LINEAR),
        Check.relative("N_slope", slope, exact.N_b * dndelab.numerics.barenblatt.time_scale(params), tol.n_slope,
                       ANCHOR_N_LINEAR),
    ]
    return SuiteOutcome(checks=checks, run=run)


def suite_debruijn(config: dndelab.models.config.ExperimentConfig) -> SuiteOutcome:
    tol = config.tolerances
    run = evolve_config(config)

    residual = dndelab.numerics.functionals.de_bruijn_residual(run.records)
    middle = len(run.records) // 2
    laplacian_form, pressure_form = dndelab.numerics.functionals.entropy_rate(run.states[middle])
    finite_difference = float(np.gradient(_column(run, "E_b"), _column(run, "t"))[middle])

    checks = [
        Check.at_most("max_residual", residual, tol.de_bruijn, ANCHOR_DE_BRUIJN),
        Check.relative("dE_dt_forms", laplacian_form, pressure_form, tol.entropy_rate, ANCHOR_ENTROPY_RATE),
        Check.relative("dE_dt_finite_difference", finite_difference, pressure_form, tol.de_bruijn,
                       ANCHOR_ENTROPY_RATE),
    ]
    return SuiteOutcome(checks=checks, run=run)


def w_barenblatt_ratio(config: dndelab.models.config.ExperimentConfig,
                       params: dndelab.models.params.Params) -> float:
    """W_b of the Barenblatt profile over W_b of the same profile perturbed by 5%, both on the static mesh"""
    spec = dndelab.numerics.barenblatt.barenblatt_spec(params)
    grid = static_grid(config, spec, t=dndelab.numerics.barenblatt.self_similar_time(params, config.time.t0))

    exact = start_state(config, params, grid, "barenblatt")
    perturbed = start_state(config, params, grid, "perturbed_barenblatt", {"amplitude": PERTURBATION_AMPLITUDE})

    w_exact = dndelab.numerics.functionals.entropy_production_W(exact).total
    w_perturbed = dndelab.numerics.functionals.entropy_production_W(perturbed).total
    logger.info(f"W_b at the Barenblatt profile {w_exact}, at the perturbed profile {w_perturbed}")
    return abs(w_exact) / w_perturbed


def second_derivative_with_baseline(
        config: dndelab.models.config.ExperimentConfig,
        params: dndelab.models.params.Params,
        run: dndelab.numerics.solver.RunResult,
        cells: Optional[int] = None,
) -> dndelab.numerics.functionals.SecondDerivativeCheck:
    """d^2N_b/dt^2 of run against its W_b formula

    Perturbed Barenblatt starts stay close to the exact solution, so the curvature the mesh gives the exact solution
    is of the size of the true one; a companion Barenblatt run on the same mesh provides that baseline.
    """
    if config.init.kind != "perturbed_barenblatt":
        return dndelab.numerics.functionals.second_derivative_check(run.records, params, run.states)

    baseline = evolve_config(config, kind="barenblatt", cells=cells)
    return dndelab.numerics.functionals.second_derivative_check(
        run.records, params, run.states, baseline_records=baseline.records, baseline_states=baseline.states)


def suite_concavity(config: dndelab.models.config.ExperimentConfig) -> SuiteOutcome:
    """N_b increasing and concave; d^2N_b/dt^2 against W_b, and d^2E_b/dt^2 against its formula when b < 0

    Barenblatt starts have N_b linear in t, so the curvature checks are replaced by a linear fit. The d^2N_b/dt^2
    mismatch is also measured with half the cells and must not grow under the refinement.
    """
    tol = config.tolerances
    params = config.params()
    run = evolve_config(config)

    t = _column(run, "t")
    entropy_power = _column(run, "N_b")
    checks = [Check.flag("N_increasing", bool(np.all(np.diff(entropy_power) > 0.0)), ANCHOR_CONCAVITY)]

    if config.init.kind == "barenblatt":
        _, r2 = _linear_fit_r2(t, entropy_power)
        checks.append(Check.at_least("N_linear_fit", r2, tol.n_linear_r2, ANCHOR_N_LINEAR))
    else:
        curvature = dndelab.numerics.functionals.second_difference(t, entropy_power)
        bound = tol.concavity_slack * float(np.max(np.abs(curvature)))
        checks.append(Check.at_most("N_concave", float(np.max(curvature)), bound, ANCHOR_CONCAVITY))

        second = second_derivative_with_baseline(config, params, run)
        checks.append(Check.at_most("d2N_mismatch", second.mismatch, tol.d2n_mismatch, ANCHOR_SECOND_DERIVATIVE))

        half = max(dndelab.models.constants.MIN_CELLS, config.grid.cells // 2)
        coarse = second_derivative_with_baseline(config, params, evolve_config(config, cells=half), cells=half)
        logger.info(f"d2N mismatch with {half} cells {coarse.mismatch}, with {config.grid.cells} {second.mismatch}")
        allowed = max(coarse.mismatch, dndelab.models.constants.D2N_REFINEMENT_FLOOR * tol.d2n_mismatch)
        checks.append(Check.at_most("d2N_refinement", second.mismatch, allowed, ANCHOR_SECOND_DERIVATIVE))

        if params.b < 0:
            middle = len(run.records) // 2
            fd = float(dndelab.numerics.functionals.second_difference(
                t[middle - 1:middle + 2], _column(run, "E_b")[middle - 1:middle + 2])[0])
            formula = dndelab.numerics.functionals.entropy_second_derivative(run.states[middle])
            checks.append(Check.at_most(
                "d2E_mismatch", _relative_mismatch(fd, formula), tol.d2e_mismatch, ANCHOR_ENTROPY_SECOND))

    checks.append(Check.at_most("W_barenblatt_ratio", w_barenblatt_ratio(config, params), tol.w_ratio,
                                ANCHOR_W_BARENBLATT))
    return SuiteOutcome(checks=checks, run=run)


def suite_isoperimetric(config: dndelab.models.config.ExperimentConfig) -> SuiteOutcome:
    tol = config.tolerances
    params = config.params()
    c_iso = dndelab.numerics.special.const_isoperimetric(params)
    run = evolve_config(config)

    product = _column(run, "Q_b")
    checks = [
        Check.at_most("Q_nonincreasing", float(np.max(np.diff(product))), tol.q_monotone_slack * product[0],
                      ANCHOR_Q_FLOW),
        Check.at_least("Q_lower_bound", float(np.min(product)) / c_iso, tol.q_lower, ANCHOR_ISOPERIMETRIC),
    ]

    if config.init.kind == "barenblatt":
        deviation = float(np.max(np.abs(product - c_iso))) / c_iso
        checks.append(Check.at_most("Q_barenblatt", deviation, tol.q_barenblatt, ANCHOR_ISOPERIMETRIC))

    reference, dilated = dilation_pair(config, params)
    checks.append(Check.relative(
        "Q_dilation_invariance", dndelab.numerics.functionals.isoperimetric_Q(dilated),
        dndelab.numerics.functionals.isoperimetric_Q(reference), tol.q_barenblatt, ANCHOR_DILATION))
    shift = dndelab.numerics.functionals.renyi_R(dilated) - dndelab.numerics.functionals.renyi_R(reference)
    checks.append(Check.relative("R_dilation_shift", shift, params.n * math.log(DILATION), tol.q_barenblatt,
                                 ANCHOR_DILATION))
    return SuiteOutcome(checks=checks, run=run)


def dilation_pair(
        config: dndelab.models.config.ExperimentConfig,
        params: dndelab.models.params.Params,
        lam: float = DILATION,
) -> Tuple[dndelab.numerics.solver.State, dndelab.numerics.solver.State]:
    """The configured initial condition and its dilation D_lam, both sampled on a static mesh

    The mesh has grid.static_cells cells and lam times the evolution radius so that D_lam u is held as well as u.
    """
    kind, options = config.init.kind, config.init.options
    radius = max(lam, 1.0) * evolution_radius(config, params, kind, options)
    grid = dndelab.numerics.grid.build(params.n, radius, config.grid.static_cells)

    reference = start_state(config, params, grid, kind, options)
    dilated = dndelab.numerics.solver.from_density(
        params, grid, dndelab.numerics.functionals.dilate(grid, reference.u, lam), reference.t,
        eps_rule=config.regularization.eps_rule, u_floor_rule=config.regularization.u_floor_rule)
    return reference, dilated


def sobolev_extremal(grid: dndelab.numerics.grid.RadialGrid, p: float, scale: float = 1.0) -> np.ndarray:
    """w = (1 + (r/scale)^q)^((p-n)/p), the optimal profile of the Sobolev inequality"""
    q = p / (p - 1.0)
    return (1.0 + (grid.centers / scale) ** q) ** ((p - grid.n) / p)


def suite_sobolev(config: dndelab.models.config.ExperimentConfig) -> SuiteOutcome:
    """Sobolev quotient of the extremal (equality), of a Gaussian (strict) and of a dilated extremal"""
    tol = config.tolerances
    n, p = config.dimension, config.p

    radius = dndelab.models.constants.SOBOLEV_RADIUS if config.grid.r_max == "auto" else float(config.grid.r_max)
    grid = dndelab.numerics.grid.build(n, radius, config.grid.static_cells)

    extremal = dndelab.numerics.inequalities.sobolev_check(grid, sobolev_extremal(grid, p), p)
    gaussian = dndelab.numerics.inequalities.sobolev_check(grid, _gaussian(grid, 1.0), p)
    dilated = dndelab.numerics.inequalities.sobolev_check(grid, sobolev_extremal(grid, p, SOBOLEV_DILATION), p)

    checks = [
        Check.relative("sobolev_extremal", extremal.ratio, 1.0, tol.sobolev_equality, ANCHOR_SOBOLEV),
        Check.at_least("sobolev_gaussian", gaussian.ratio, tol.sobolev_gaussian_min, ANCHOR_SOBOLEV),
        Check.relative("sobolev_scaling", dilated.ratio, extremal.ratio, tol.sobolev_equality, ANCHOR_SOBOLEV),
    ]
    return SuiteOutcome(checks=checks)


def gn_test_width(spec: dndelab.numerics.barenblatt.BarenblattSpec, t: float = 1.0) -> float:
    """Width of the Gaussian test functions: fits well inside three support radii when b > 0"""
    radius = dndelab.numerics.barenblatt.characteristic_radius(spec, t)
    return radius / 3.0 if spec.params.b > 0 else radius


def suite_gn(config: dndelab.models.config.ExperimentConfig) -> SuiteOutcome:
    """GN quotient of B^{1/(ps)} (equality) and of a Gaussian (strict), plus both exponent forms"""
    tol = config.tolerances
    params = config.params()
    s = dndelab.models.params.gn_s_of_b(params)
    spec = dndelab.numerics.barenblatt.barenblatt_spec(params)
    grid = static_grid(config, spec)

    w = np.asarray(dndelab.numerics.barenblatt.profile(spec, grid.centers)) ** (1.0 / (params.p * s))
    extremal = dndelab.numerics.inequalities.gn_check(grid, w, params, s)
    gaussian = dndelab.numerics.inequalities.gn_check(grid, _gaussian(grid, gn_test_width(spec)), params, s)
    exponents = dndelab.numerics.special.gn_exponents(params, s)

    checks = [
        Check.relative("gn_extremal", extremal.ratio, 1.0, tol.gn_equality, ANCHOR_GN),
        Check.at_most("gn_gaussian", gaussian.ratio, 1.0, ANCHOR_GN),
        Check.relative("gn_exponent_forms", exponents.exponent_alt, exponents.exponent, tol.identity_fuzz,
                       ANCHOR_GN_EXPONENTS),
    ]
    return SuiteOutcome(checks=checks)


def suite_remainder(config: dndelab.models.config.ExperimentConfig) -> SuiteOutcome:
    """Flows u_0 = w^{ps} for a Gaussian w and balances the GN deficit of w against the entropy production"""
    tol = config.tolerances
    params = config.params()
    s = dndelab.models.params.gn_s_of_b(params)
    spec = dndelab.numerics.barenblatt.barenblatt_spec(params)

    width = gn_test_width(spec, dndelab.numerics.barenblatt.self_similar_time(params, config.time.t0))
    if config.grid.r_max == "auto":
        t_end = dndelab.numerics.barenblatt.self_similar_time(params, config.time.t_end)
        radius = dndelab.numerics.barenblatt.auto_radius(spec, t_end) + 8.0 * width
    else:
        radius = float(config.grid.r_max)
    grid = dndelab.numerics.grid.build(params.n, radius, config.grid.cells)

    w = _gaussian(grid, width)
    state = dndelab.numerics.solver.from_density(
        params, grid, dndelab.numerics.inequalities.initial_density(grid, w, params, s), config.time.t0,
        eps_rule=config.regularization.eps_rule, u_floor_rule=config.regularization.u_floor_rule)
    run = run_from(config, state)

    result = dndelab.numerics.inequalities.gn_check(grid, w, params, s, records=run.records)
    logger.info(f"GN remainder of w: {result.remainder_lhs}, integrated production {result.remainder_rhs}, "
                f"left at t_end {result.tail_bound}")

    checks = [
        Check.at_most("remainder_identity", dndelab.numerics.inequalities.remainder_identity_error(result),
                      tol.remainder, ANCHOR_REMAINDER),
        Check.relative("remainder_balance", result.remainder_rhs + result.tail_bound, result.remainder_lhs,
                       tol.remainder, ANCHOR_REMAINDER),
    ]
    return SuiteOutcome(checks=checks, run=run)


SUITE_FUNCTIONS: Dict[str, Callable[[dndelab.models.config.ExperimentConfig], SuiteOutcome]] = {
    "constants": suite_constants,
    "quadrature": suite_quadrature,
    "self_similar": suite_self_similar,
    "debruijn": suite_debruijn,
    "concavity": suite_concavity,
    "isoperimetric": suite_isoperimetric,
    "sobolev": suite_sobolev,
    "gn": suite_gn,
    "remainder": suite_remainder,
}


def run_suite(name: str, config: dndelab.models.config.ExperimentConfig) -> dndelab.models.report.Report:
    """Runs one suite and writes report.json (and series.csv for suites that time-step) under output.dir/name

    Arguments:
        name: one of dndelab.models.constants.SUITES
        config: the experiment configuration

    Returns:
        The Report; it passes iff every check passes

    Raises:
        dndelab.models.errors.UnknownSuiteError: if the suite does not exist
        dndelab.models.errors.LabError: errors of the numerical modules propagate unchanged
    """
    if name not in SUITE_FUNCTIONS:
        raise dndelab.models.errors.UnknownSuiteError(name, list(dndelab.models.constants.SUITES))

    started = time.time()
    params = config.params()
    logger.info(f"Running suite {name} for {params.label()}")

    outcome = SUITE_FUNCTIONS[name](config)
    report = dndelab.models.report.Report(suite=name, params_echo=params, checks=outcome.checks)

    directory = dndelab.harness.output.suite_dir(config.output.dir, name)
    if outcome.run is not None:
        if config.output.emit_csv:
            dndelab.harness.output.write_series(
                os.path.join(directory, dndelab.harness.output.SERIES_FILENAME), outcome.run.records)
            report.series_file = os.path.join(name, dndelab.harness.output.SERIES_FILENAME)
        if config.output.emit_snapshots:
            dndelab.harness.output.write_snapshots(
                os.path.join(directory, dndelab.harness.output.SNAPSHOTS_DIRNAME), outcome.run.states)

    for check in report.failed_checks():
        logger.warning(f"Suite {name} check {check.name} failed: value={check.value} expected={check.expected} "
                       f"tolerance={check.tolerance}")

    report.wallclock_s = time.time() - started
    dndelab.harness.output.write_report(os.path.join(directory, dndelab.harness.output.REPORT_FILENAME), report)
    logger.info(f"Suite {name} {'passed' if report.passed else 'failed'} "
                f"({len(report.checks) - len(report.failed_checks())}/{len(report.checks)} checks)")
    return report
