# Copyright IBM Inc. All Rights Reserved.
# SPDX-License-Identifier: Apache-2.0

"""Explicit conservative finite-volume time stepping of du/dt = Delta_p u^gamma on a radial mesh"""

from __future__ import annotations

import logging
import math
import time
from typing import Dict
from typing import List
from typing import Optional
from typing import Tuple
from typing import Union

import numpy as np
import pydantic
from pydantic import ConfigDict

import dndelab.models.constants
import dndelab.models.errors
import dndelab.models.params
import dndelab.models.report
import dndelab.numerics.barenblatt
import dndelab.numerics.functionals
import dndelab.numerics.grid

logger = logging.getLogger(__name__)

Rule = Union[str, float]

INIT_OPTIONS: Dict[str, Dict[str, float]] = {
    "barenblatt": {},
    "perturbed_barenblatt": {"amplitude": 0.05, "mode": 2.0},
    "gaussian_bump": {"width": 1.0},
    "double_bump": {"separation": 2.0, "width": 0.5},
}


class State(pydantic.BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid", arbitrary_types_allowed=True)

    params: dndelab.models.params.Params
    grid: dndelab.numerics.grid.RadialGrid
    u: np.ndarray
    t: float
    eps: float = pydantic.Field(description="Regularisation of the flux, scaled to gradients of u^gamma")
    u_floor: float = pydantic.Field(description="Cells below this density are excluded from pressure functionals")
    steps: int = 0
    clamped_mass: float = pydantic.Field(0.0, description="Mass added by clipping negative undershoots")

    @property
    def mass(self) -> float:
        return dndelab.numerics.grid.integrate(self.grid, self.u)

    def compatible_with(self, other: State) -> bool:
        return self.params == other.params and self.grid.same_as(other.grid)


class RunResult(pydantic.BaseModel):
    model_config = ConfigDict(extra="forbid", arbitrary_types_allowed=True)

    records: List[dndelab.models.report.DiagRecord] = pydantic.Field(default_factory=list)
    states: List[State] = pydantic.Field(default_factory=list)
    wallclock_s: float = 0.0

    def pairs(self) -> List[Tuple[State, dndelab.models.report.DiagRecord]]:
        return list(zip(self.states, self.records))

    @property
    def final(self) -> State:
        return self.states[-1]


def _resolve_rule(rule: Rule, automatic: float, name: str) -> float:
    if rule == "auto":
        return automatic
    try:
        value = float(rule)
    except (TypeError, ValueError):
        raise dndelab.models.errors.BadOptionError(name, rule, "must be 'auto' or a non-negative real")
    if not (math.isfinite(value) and value >= 0.0):
        raise dndelab.models.errors.BadOptionError(name, rule, "must be 'auto' or a non-negative real")
    return value


def from_density(
        params: dndelab.models.params.Params,
        grid: dndelab.numerics.grid.RadialGrid,
        u: np.ndarray,
        t: float,
        eps_rule: Rule = "auto",
        u_floor_rule: Rule = "auto",
        normalize: bool = True,
) -> State:
    """Wraps non-negative cell values into a State, normalising them to unit mass

    Raises:
        dndelab.models.errors.LengthMismatchError: if u does not have one value per cell
        dndelab.models.errors.EmptyDensityError: if the mass vanishes
        dndelab.models.errors.BadOptionError: on negative or non-finite densities, or invalid rules
    """
    if params.n != grid.n:
        raise dndelab.models.errors.BadOptionError("n", grid.n, f"grid dimension differs from params n={params.n}")

    values = grid.check_cells(u, "densities").copy()

    if not np.all(np.isfinite(values)) or np.any(values < 0.0):
        raise dndelab.models.errors.BadOptionError("u", "cell values", "densities must be finite and non-negative")

    mass = dndelab.numerics.grid.integrate(grid, values)
    if not mass > 0.0:
        raise dndelab.models.errors.EmptyDensityError()

    if normalize:
        values /= mass

    u_floor = _resolve_rule(u_floor_rule, dndelab.models.constants.U_FLOOR_FACTOR * float(np.max(values)),
                            "u_floor_rule")
    gradient = dndelab.numerics.grid.face_gradient(grid, values ** params.gamma)
    eps = _resolve_rule(eps_rule, dndelab.models.constants.EPS_FACTOR * float(np.max(np.abs(gradient))), "eps_rule")

    return State(params=params, grid=grid, u=values, t=float(t), eps=eps, u_floor=u_floor)


def _init_options(kind: str, options: Optional[Dict[str, float]]) -> Dict[str, float]:
    if kind not in INIT_OPTIONS:
        raise dndelab.models.errors.BadOptionError(
            "kind", kind, f"known initial conditions are {', '.join(INIT_OPTIONS)}")

    resolved = dict(INIT_OPTIONS[kind])
    for key, value in (options or {}).items():
        if key not in resolved:
            raise dndelab.models.errors.BadOptionError(key, value, f"not an option of {kind}")
        resolved[key] = float(value)

    for key in ("width", "separation"):
        if key in resolved and not resolved[key] > 0.0:
            raise dndelab.models.errors.BadOptionError(key, resolved[key], "must be positive")

    if "amplitude" in resolved and not abs(resolved["amplitude"]) < 1.0:
        raise dndelab.models.errors.BadOptionError(
            "amplitude", resolved["amplitude"], "must lie in (-1, 1) to keep the density non-negative")
    return resolved


def initial_condition(
        kind: str,
        params: dndelab.models.params.Params,
        grid: dndelab.numerics.grid.RadialGrid,
        t0: float = 1.0,
        options: Optional[Dict[str, float]] = None,
        eps_rule: Rule = "auto",
        u_floor_rule: Rule = "auto",
) -> State:
    """Samples one of the initial densities at the cell centres and normalises it to unit mass

    Kinds: barenblatt (the exact solution at t0, U_{b, kappa t0}), perturbed_barenblatt (the same times
    1 + amplitude cos(mode pi r / R)) with R its support radius (its characteristic radius when b < 0),
    gaussian_bump (exp(-r^2/(2 width^2))) and double_bump (exp(-(r - separation/2)^2/(2 width^2)), two bumps on
    the line and a ring otherwise).
    """
    resolved = _init_options(kind, options)
    r = grid.centers

    if kind in ("barenblatt", "perturbed_barenblatt"):
        spec = dndelab.numerics.barenblatt.barenblatt_spec(params)
        u = np.asarray(dndelab.numerics.barenblatt.exact_solution(spec, r, t0), dtype=float)

        if kind == "perturbed_barenblatt":
            radius = dndelab.numerics.barenblatt.characteristic_radius(
                spec, dndelab.numerics.barenblatt.self_similar_time(params, t0))
            u = u * (1.0 + resolved["amplitude"] * np.cos(resolved["mode"] * math.pi * r / radius))
    elif kind == "gaussian_bump":
        u = np.exp(-0.5 * (r / resolved["width"]) ** 2)
    else:
        u = np.exp(-0.5 * ((r - 0.5 * resolved["separation"]) / resolved["width"]) ** 2)

    return from_density(params, grid, u, t0, eps_rule=eps_rule, u_floor_rule=u_floor_rule)


def init_extent(kind: str, params: dndelab.models.params.Params, t0: float,
                options: Optional[Dict[str, float]] = None) -> float:
    """Radius that holds the initial density up to negligible mass, used to size automatic domains"""
    resolved = _init_options(kind, options)
    if kind == "gaussian_bump":
        return 8.0 * resolved["width"]
    if kind == "double_bump":
        return 0.5 * resolved["separation"] + 8.0 * resolved["width"]
    if params.b < 0:
        return 0.0
    spec = dndelab.numerics.barenblatt.barenblatt_spec(params)
    return dndelab.numerics.barenblatt.support_radius(spec, dndelab.numerics.barenblatt.self_similar_time(params, t0))


def _rates(state: State) -> Tuple[np.ndarray, np.ndarray]:
    """Returns the cell rates du/dt and the local diffusivities D_i"""
    params, grid = state.params, state.grid

    g = dndelab.numerics.grid.face_gradient(grid, state.u ** params.gamma)
    rate = dndelab.numerics.grid.divergence(grid, dndelab.numerics.grid.regularized_flux(g, params.p, state.eps))

    g_cell = np.maximum(np.abs(g[1:]), np.abs(g[:-1]))
    if params.p == 2.0:
        nonlinear = np.ones_like(g_cell)
    else:
        magnitude = g_cell * g_cell + state.eps * state.eps
        with np.errstate(divide="ignore"):
            nonlinear = np.where(magnitude > 0.0, magnitude ** (0.5 * (params.p - 2.0)),
                                 0.0 if params.p > 2.0 else np.inf)

    floored = np.maximum(state.u, state.u_floor)
    with np.errstate(divide="ignore"):
        diffusivity = (params.p - 1.0) * nonlinear * params.gamma * floored ** (params.gamma - 1.0)
    return rate, diffusivity


def cfl_dt(state: State, cfl: float, dt_max: Optional[float] = None) -> float:
    """cfl dr^2 / max_i D_i with D_i = (p-1) (|g_i|^2 + eps^2)^((p-2)/2) gamma max(u_i, u_floor)^(gamma-1)

    Raises:
        dndelab.models.errors.StagnantStateError: if every D_i vanishes and no dt_max is given
    """
    _, diffusivity = _rates(state)
    return _stable_dt(state, diffusivity, cfl, dt_max)


def _stable_dt(state: State, diffusivity: np.ndarray, cfl: float, dt_max: Optional[float]) -> float:
    largest = float(np.max(diffusivity))

    if not largest > 0.0:
        if dt_max is not None:
            return dt_max
        raise dndelab.models.errors.StagnantStateError(state.t)

    dt = cfl * state.grid.dr ** 2 / largest
    if dt_max is not None:
        dt = min(dt, dt_max)
    return dt


def _advance(state: State, rate: np.ndarray, dt: float) -> State:
    u = state.u + dt * rate

    if not np.all(np.isfinite(u)):
        raise dndelab.models.errors.NonFiniteStateError(state.t + dt, state.steps + 1)

    negative = u < 0.0
    clamped = 0.0
    if np.any(negative):
        clamped = -float(np.dot(u[negative], state.grid.volumes[negative]))
        u[negative] = 0.0
        logger.debug(f"Clamped mass {clamped:.3e} in {int(np.count_nonzero(negative))} cells at t={state.t + dt}")

    return state.model_copy(update={
        "u": u, "t": state.t + dt, "steps": state.steps + 1, "clamped_mass": state.clamped_mass + clamped})


def step(state: State, dt: float) -> State:
    """One explicit Euler step of the conservative scheme; negative undershoots are clipped and accounted for"""
    if not (math.isfinite(dt) and dt > 0.0):
        raise dndelab.models.errors.BadOptionError("dt", dt, "must be positive and finite")
    rate, _ = _rates(state)
    return _advance(state, rate, dt)


def evolve(
        state: State,
        t_end: float,
        save_every: int = 200,
        cfl: float = 0.2,
        max_steps: int = 50_000_000,
        save_interval: Optional[float] = None,
        exact: Optional[dndelab.numerics.barenblatt.BarenblattSpec] = None,
) -> RunResult:
    """Marches the state to t_end, recording diagnostics at t0, at the save points and at t_end

    Arguments:
        state: the initial state
        t_end: final time, not before state.t; t_end == state.t records the initial state only
        save_every: steps between records, ignored when save_interval is set
        cfl: Courant number of the explicit step
        max_steps: step budget
        save_interval: record at uniformly spaced times; the step crossing a save time is shortened
        exact: Barenblatt solution the state is compared to (fills err_exact_l1)

    Returns:
        RunResult with one state per record, record times strictly increasing

    Raises:
        dndelab.models.errors.StepBudgetExceededError: if t_end is not reached within max_steps
        dndelab.models.errors.NonFiniteStateError: if the state blows up
        dndelab.models.errors.StagnantStateError: if the diffusivity vanishes everywhere
    """
    if not t_end >= state.t:
        raise dndelab.models.errors.BadOptionError("t_end", t_end, f"must not be before t={state.t}")
    if save_every < 1:
        raise dndelab.models.errors.BadOptionError("save_every", save_every, "must be a positive integer")
    if not 0.0 < cfl <= 1.0:
        raise dndelab.models.errors.BadOptionError("cfl", cfl, "must lie in (0, 1]")
    if save_interval is not None and not save_interval > 0.0:
        raise dndelab.models.errors.BadOptionError("save_interval", save_interval, "must be positive")

    started = time.time()
    log_every = max(1, max_steps // 100)
    logger.info(f"Evolving {state.params.label()} with {state.grid.cells} cells from t={state.t} to t={t_end}")

    result = RunResult()
    result.states.append(state)
    result.records.append(dndelab.numerics.functionals.diagnose(state, dt=0.0, exact=exact))
    if t_end == state.t:
        logger.info(f"Nothing to evolve, t_end equals t={state.t}")
        result.wallclock_s = time.time() - started
        return result

    next_save = state.t + save_interval if save_interval is not None else None
    steps = 0
    since_save = 0
    finish = t_end * (1.0 - 1e-14)
    clamped_before = state.clamped_mass

    while state.t < finish:
        if steps >= max_steps:
            raise dndelab.models.errors.StepBudgetExceededError(max_steps, state.t, t_end)

        rate, diffusivity = _rates(state)
        dt = _stable_dt(state, diffusivity, cfl, None)

        target = t_end if next_save is None else min(next_save, t_end)
        hit_target = state.t + dt >= target * (1.0 - 1e-14)
        if hit_target:
            dt = target - state.t

        state = _advance(state, rate, dt)
        if hit_target:
            state = state.model_copy(update={"t": target})

        steps += 1
        since_save += 1

        if next_save is not None:
            save = hit_target
            if hit_target:
                next_save += save_interval
        else:
            save = since_save >= save_every

        if save or state.t >= finish:
            since_save = 0
            result.states.append(state)
            result.records.append(dndelab.numerics.functionals.diagnose(state, dt=dt, exact=exact))

        if steps % log_every == 0:
            logger.debug(f"step {steps} t={state.t} dt={dt}")

    clamped = state.clamped_mass - clamped_before
    if clamped > 1e-10 * steps:
        logger.warning(f"Positivity clamps added mass {clamped:.3e} over {steps} steps")
    else:
        logger.info(f"Positivity clamps added mass {clamped:.3e} over {steps} steps")

    result.wallclock_s = time.time() - started
    logger.info(f"Reached t={state.t} after {steps} steps in {result.wallclock_s:.2f}s")
    return result


def pressure_residual(prev: State, following: State, front_fraction: float = 0.1) -> float:
    """Max relative residual of dv/dt = b v Delta_p v + |grad v|^p between two consecutive states

    Cells below 100 u_floor, their neighbours and the outermost cell are excluded; for b > 0 cells whose
    pressure is below front_fraction of its maximum are excluded as well, because the discrete pressure has a kink
    at the free boundary.

    Raises:
        dndelab.models.errors.MismatchedStatesError: if the states do not belong to the same run or are not ordered
    """
    if not prev.compatible_with(following):
        raise dndelab.models.errors.MismatchedStatesError("different parameters or meshes")
    if not following.t > prev.t:
        raise dndelab.models.errors.MismatchedStatesError(f"t={following.t} does not follow t={prev.t}")

    params, grid = prev.params, prev.grid
    dt = following.t - prev.t

    v_prev = dndelab.numerics.functionals.pressure(prev)
    v_next = dndelab.numerics.functionals.pressure(following)
    dvdt = (v_next - v_prev) / dt

    eps_v = dndelab.numerics.functionals.pressure_eps(grid, v_prev)
    rhs = (params.b * v_prev * dndelab.numerics.grid.p_laplacian(grid, v_prev, params.p, eps_v)
           + np.abs(dndelab.numerics.grid.center_gradient(grid, v_prev)) ** params.p)

    threshold = 100.0 * prev.u_floor
    good = (prev.u >= threshold) & (following.u >= threshold)
    if params.b > 0:
        good &= v_prev >= front_fraction * float(np.max(v_prev))

    mask = dndelab.numerics.functionals.interior_mask(good)
    if not np.any(mask):
        raise dndelab.models.errors.EmptyDensityError("region where the pressure equation is checked")

    residual = np.abs(dvdt - rhs)[mask]
    scale = float(np.max(np.abs(dvdt[mask])))
    if scale == 0.0:
        return float(np.max(residual))
    return float(np.max(residual)) / scale
