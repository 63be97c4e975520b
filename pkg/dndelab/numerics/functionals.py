# Copyright IBM Inc. All Rights Reserved.
# SPDX-License-Identifier: Apache-2.0

"""Entropies, entropy power, Fisher information, entropy production and their time-derivative checks

Integrals are finite-volume sums over the radial mesh. Quantities built from the pressure v = (gamma/b) u^b skip
cells below u_floor; second derivatives of v also skip the neighbours of such cells and the outermost cell.
"""

from __future__ import annotations

import logging
import math
from typing import List
from typing import Optional
from typing import Sequence
from typing import TYPE_CHECKING
from typing import Tuple

import numpy as np
import pydantic
from pydantic import ConfigDict

import dndelab.models.constants
import dndelab.models.errors
import dndelab.models.params
import dndelab.models.report
import dndelab.numerics.barenblatt
import dndelab.numerics.grid

if TYPE_CHECKING:
    import dndelab.numerics.solver

logger = logging.getLogger(__name__)


class EntropyProduction(pydantic.BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    hessian: float = pydantic.Field(description="Traceless A-Hessian part, p |T|_A^2")
    variance: float = pydantic.Field(description="Variance part, b(1-sigma)(Delta_p v + I_b)^2")

    @property
    def total(self) -> float:
        return self.hessian + self.variance


class SecondDerivativeCheck(pydantic.BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    t: float
    d2N_fd: float
    d2N_formula: float
    W_b: float
    mismatch: float


def pressure(state: dndelab.numerics.solver.State) -> np.ndarray:
    """v = (gamma/b) u^b; densities are floored at u_floor when b < 0 so that v stays finite"""
    params = state.params
    u = state.u if params.b > 0 else np.maximum(state.u, state.u_floor)
    return params.gamma / params.b * u ** params.b


def pressure_eps(grid: dndelab.numerics.grid.RadialGrid, v: np.ndarray) -> float:
    g = dndelab.numerics.grid.face_gradient(grid, v)
    return dndelab.models.constants.EPS_FACTOR * float(np.max(np.abs(g)))


def interior_mask(good: np.ndarray) -> np.ndarray:
    """Cells that are good together with both neighbours, never the outermost cell

    The origin cell has no left neighbour; symmetry makes its stencil self-contained.
    """
    mask = good.copy()
    mask[1:] &= good[:-1]
    mask[:-1] &= good[1:]
    mask[-1] = False
    return mask


def _density(state: dndelab.numerics.solver.State) -> np.ndarray:
    """The density with cells below u_floor zeroed"""
    return np.where(state.u >= state.u_floor, state.u, 0.0)


def _pressure_faces(state: dndelab.numerics.solver.State, v: np.ndarray) -> np.ndarray:
    g = dndelab.numerics.grid.face_gradient(state.grid, v)
    if state.params.b < 0:
        flagged = state.u < state.u_floor
        touching = flagged[:-1] | flagged[1:]
        g[1:-1][touching] = 0.0
    return g


def entropy_E(state: dndelab.numerics.solver.State) -> float:
    """E_b = integral of u^(b+1)"""
    u = state.u
    powered = np.where(u > 0.0, u, 0.0) ** (state.params.b + 1.0)
    return dndelab.numerics.grid.integrate(state.grid, powered)


def renyi_R(state: dndelab.numerics.solver.State) -> float:
    return -math.log(_positive_entropy(state)) / state.params.b


def entropy_power_N(state: dndelab.numerics.solver.State) -> float:
    return _positive_entropy(state) ** state.params.sigma


def _positive_entropy(state: dndelab.numerics.solver.State) -> float:
    e_b = entropy_E(state)
    if not e_b > 0.0:
        raise dndelab.models.errors.EmptyDensityError()
    return e_b


def _pressure_gradient_moment(state: dndelab.numerics.solver.State) -> float:
    """integral of |grad v|^p u"""
    v = pressure(state)
    g = dndelab.numerics.grid.center_average(_pressure_faces(state, v))
    return dndelab.numerics.grid.integrate(state.grid, np.abs(g) ** state.params.p * _density(state))


def fisher_I(state: dndelab.numerics.solver.State) -> float:
    """I_b = (b+1)/(gamma E_b) integral of |grad v|^p u"""
    params = state.params
    return (params.b + 1.0) / (params.gamma * _positive_entropy(state)) * _pressure_gradient_moment(state)


def isoperimetric_Q(state: dndelab.numerics.solver.State) -> float:
    return entropy_power_N(state) * fisher_I(state)


def _radial_terms(state: dndelab.numerics.solver.State) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Returns (X, Y, mask) with X = (p-1)|v_r|^(p-2) v_rr, Y = |v_r|^(p-2) v_r / r

    In the radial eigenbasis of the A-tensor, Delta_p v = X + (n-1) Y and
    |grad v|^(2p-4) |Hess v|_A^2 = X^2 + (n-1) Y^2.
    """
    params, grid = state.params, state.grid
    v = pressure(state)
    g = _pressure_faces(state, v)

    v_r = dndelab.numerics.grid.center_average(g)
    v_rr = np.diff(g) / grid.dr

    if params.p == 2.0:
        weight = np.ones_like(v_r)
    else:
        eps_v = dndelab.models.constants.EPS_FACTOR * float(np.max(np.abs(g)))
        magnitude = v_r * v_r + eps_v * eps_v
        with np.errstate(divide="ignore"):
            weight = np.where(magnitude > 0.0, magnitude ** (0.5 * (params.p - 2.0)), 0.0)

    x = (params.p - 1.0) * weight * v_rr
    y = weight * v_r / grid.centers
    mask = interior_mask(state.u >= state.u_floor)
    return x, y, mask


def traceless_A_norm(n: int, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """|T|_A^2 of T = |grad v|^(p-2) Hess v - (Delta_p v / n) a, written with X and Y of _radial_terms"""
    laplacian = x + (n - 1.0) * y
    return (x - laplacian / n) ** 2 + (n - 1.0) * (y - laplacian / n) ** 2


def a_norm_decomposition_residual(n: int, p: float, v_r: float, v_rr: float, r: float) -> float:
    """Relative residual of |grad v|^(2p-4)|Hess v|_A^2 = (Delta_p v)^2/n + |T|_A^2 for one radial tuple"""
    weight = abs(v_r) ** (p - 2.0)
    x = (p - 1.0) * weight * v_rr
    y = weight * v_r / r
    lhs = abs(v_r) ** (2.0 * p - 4.0) * ((p - 1.0) ** 2 * v_rr ** 2 + (n - 1.0) * (v_r / r) ** 2)
    laplacian = x + (n - 1.0) * y
    rhs = laplacian ** 2 / n + float(traceless_A_norm(n, np.asarray(x), np.asarray(y)))
    scale = max(abs(lhs), abs(rhs), 1e-300)
    return abs(lhs - rhs) / scale


def entropy_production_W(state: dndelab.numerics.solver.State) -> EntropyProduction:
    """W_b = (gamma/(b+1)) E^(sigma-1) integral of [p |T|_A^2 + b(1-sigma)(Delta_p v + I_b)^2] u^(b+1)"""
    params, grid = state.params, state.grid
    n, p, b, sigma = params.n, params.p, params.b, params.sigma

    e_b = _positive_entropy(state)
    i_b = fisher_I(state)
    x, y, mask = _radial_terms(state)

    weight = np.where(mask, _density(state) ** (b + 1.0), 0.0)
    prefactor = params.gamma / (b + 1.0) * e_b ** (sigma - 1.0)

    hessian = p * traceless_A_norm(n, x, y)
    variance = b * (1.0 - sigma) * (x + (n - 1.0) * y + i_b) ** 2

    return EntropyProduction(
        hessian=prefactor * dndelab.numerics.grid.integrate(grid, np.where(mask, hessian, 0.0) * weight),
        variance=prefactor * dndelab.numerics.grid.integrate(grid, np.where(mask, variance, 0.0) * weight),
    )


def entropy_rate(state: dndelab.numerics.solver.State) -> Tuple[float, float]:
    """dE_b/dt in its two forms: b integral of Delta_p v u^(b+1), and -(b(b+1)/gamma) integral of |grad v|^p u"""
    params = state.params
    x, y, mask = _radial_terms(state)
    laplacian = np.where(mask, x + (params.n - 1.0) * y, 0.0)

    laplacian_form = params.b * dndelab.numerics.grid.integrate(
        state.grid, laplacian * _density(state) ** (params.b + 1.0))
    pressure_form = -params.b * (params.b + 1.0) / params.gamma * _pressure_gradient_moment(state)
    return laplacian_form, pressure_form


def entropy_second_derivative(state: dndelab.numerics.solver.State) -> float:
    """d^2E_b/dt^2 = pb integral of [|grad v|^(2p-4)|Hess v|_A^2 + b (Delta_p v)^2] u^(b+1)"""
    params = state.params
    n, p, b = params.n, params.p, params.b
    x, y, mask = _radial_terms(state)

    integrand = x ** 2 + (n - 1.0) * y ** 2 + b * (x + (n - 1.0) * y) ** 2
    integrand = np.where(mask, integrand, 0.0) * _density(state) ** (b + 1.0)
    return p * b * dndelab.numerics.grid.integrate(state.grid, integrand)


def l1_error(state: dndelab.numerics.solver.State, spec: dndelab.numerics.barenblatt.BarenblattSpec) -> float:
    exact = dndelab.numerics.barenblatt.exact_solution(spec, state.grid.centers, state.t)
    return dndelab.numerics.grid.integrate(state.grid, np.abs(state.u - exact))


def diagnose(
        state: dndelab.numerics.solver.State,
        dt: float = 0.0,
        exact: Optional[dndelab.numerics.barenblatt.BarenblattSpec] = None,
) -> dndelab.models.report.DiagRecord:
    e_b = _positive_entropy(state)
    params = state.params
    n_b = e_b ** params.sigma
    i_b = fisher_I(state)

    return dndelab.models.report.DiagRecord(
        t=state.t,
        dt=dt,
        mass=state.mass,
        E_b=e_b,
        R_b=-math.log(e_b) / params.b,
        N_b=n_b,
        I_b=i_b,
        Q_b=n_b * i_b,
        W_b=entropy_production_W(state).total,
        err_exact_l1=l1_error(state, exact) if exact is not None else None,
    )


def dilate(grid: dndelab.numerics.grid.RadialGrid, u: np.ndarray, lam: float) -> np.ndarray:
    """D_lambda u = lambda^(-n) u(x/lambda), interpolated at the cell centres

    For lambda < 1 the samples beyond the last centre continue u with the power law fitted through its last two
    cells, so heavy tails survive the dilation; compactly supported or non-decaying data continue with zero.
    """
    if not lam > 0.0:
        raise dndelab.models.errors.BadOptionError("lambda", lam, "must be positive")
    values = grid.check_cells(u)
    x = grid.centers / lam
    sampled = np.interp(x, grid.centers, values, right=0.0)

    beyond = x > grid.centers[-1]
    if np.any(beyond):
        alpha = dndelab.numerics.grid.decay_exponent(grid, values)
        if alpha is not None:
            sampled[beyond] = values[-1] * (x[beyond] / grid.centers[-1]) ** (-alpha)
    return lam ** (-grid.n) * sampled


def _column(records: Sequence[dndelab.models.report.DiagRecord], name: str) -> np.ndarray:
    return np.array([getattr(r, name) for r in records], dtype=float)


def _require_records(records: Sequence[dndelab.models.report.DiagRecord], needed: int = 3):
    if len(records) < needed:
        raise dndelab.models.errors.TooFewRecordsError(needed, len(records))


def second_difference(t: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Three-point second derivative on a possibly non-uniform time grid, one value per interior record"""
    h_left = t[1:-1] - t[:-2]
    h_right = t[2:] - t[1:-1]
    return 2.0 * ((y[2:] - y[1:-1]) / h_right - (y[1:-1] - y[:-2]) / h_left) / (h_left + h_right)


def de_bruijn_residuals(records: Sequence[dndelab.models.report.DiagRecord]) -> np.ndarray:
    """|dR_b/dt - I_b| / I_b at every interior record, dR_b/dt from second-order centred differences"""
    _require_records(records)
    t = _column(records, "t")
    derivative = np.gradient(_column(records, "R_b"), t)
    fisher = _column(records, "I_b")
    return (np.abs(derivative - fisher) / np.abs(fisher))[1:-1]


def de_bruijn_residual(records: Sequence[dndelab.models.report.DiagRecord]) -> float:
    """Max relative residual of the de Bruijn identity dR_b/dt = I_b over the run

    Raises:
        dndelab.models.errors.TooFewRecordsError: with fewer than 3 records
    """
    return float(np.max(de_bruijn_residuals(records)))


def second_derivative_series(
        records: Sequence[dndelab.models.report.DiagRecord],
        params: dndelab.models.params.Params,
) -> List[SecondDerivativeCheck]:
    """Finite-difference d^2N_b/dt^2 against (sigma b (b+1)/gamma) W_b at every interior record"""
    _require_records(records)
    t = _column(records, "t")
    d2n = second_difference(t, _column(records, "N_b"))
    factor = params.sigma * params.b * (params.b + 1.0) / params.gamma

    ret = []
    for k, fd in enumerate(d2n, start=1):
        w_b = records[k].W_b
        ret.append(_second_derivative_entry(t[k], fd, factor * w_b, w_b))
    return ret


def _second_derivative_entry(t: float, fd: float, formula: float, w_b: float) -> SecondDerivativeCheck:
    scale = max(abs(fd), abs(formula))
    mismatch = abs(fd - formula) / scale if scale > 0.0 else 0.0
    return SecondDerivativeCheck(t=t, d2N_fd=fd, d2N_formula=formula, W_b=w_b, mismatch=mismatch)


def curvature(t: np.ndarray, y: np.ndarray, middle: int, half_width: int) -> float:
    """Second derivative at t[middle] of the quadratic least-squares fit over middle +- half_width

    With half_width = 1 this is the three-point second difference.
    """
    window = slice(middle - half_width, middle + half_width + 1)
    coefficients = np.polynomial.polynomial.polyfit(t[window] - t[middle], y[window], 2)
    return 2.0 * float(coefficients[2])


def _window_W(
        records: Sequence[dndelab.models.report.DiagRecord],
        states: Optional[Sequence[dndelab.numerics.solver.State]],
        window: slice,
) -> float:
    if states is not None:
        return float(np.mean([entropy_production_W(s).total for s in states[window]]))
    return float(np.mean(_column(records[window], "W_b")))


def _check_pairing(records: Sequence[dndelab.models.report.DiagRecord],
                   states: Optional[Sequence[dndelab.numerics.solver.State]]):
    if states is not None and len(states) != len(records):
        raise dndelab.models.errors.MismatchedStatesError("one snapshot per record is required")


def second_derivative_check(
        records: Sequence[dndelab.models.report.DiagRecord],
        params: dndelab.models.params.Params,
        states: Optional[Sequence[dndelab.numerics.solver.State]] = None,
        baseline_records: Optional[Sequence[dndelab.models.report.DiagRecord]] = None,
        baseline_states: Optional[Sequence[dndelab.numerics.solver.State]] = None,
        half_width: int = dndelab.models.constants.D2N_HALF_WINDOW,
) -> SecondDerivativeCheck:
    """Compares d^2N_b/dt^2 with (sigma b (b+1)/gamma) W_b around the middle record

    d^2N_b/dt^2 is the curvature of a quadratic fit of N_b over up to 2 half_width + 1 records and W_b its mean over
    the same records, recomputed from the snapshots when states are given. The window shrinks when the run has
    fewer records.

    A baseline is a run of the exact Barenblatt solution on the same mesh with the same record times. Its curvature
    and its W_b vanish for the continuous flow, so whatever the mesh makes of them is subtracted from both sides.

    Raises:
        dndelab.models.errors.TooFewRecordsError: with fewer than 3 records
        dndelab.models.errors.MismatchedStatesError: if states are given but do not pair with the records, or if the
            baseline does not have the record times of the run
    """
    _require_records(records)
    _check_pairing(records, states)

    middle = len(records) // 2
    half_width = max(1, min(half_width, middle, len(records) - 1 - middle))
    window = slice(middle - half_width, middle + half_width + 1)
    t = _column(records, "t")

    fd = curvature(t, _column(records, "N_b"), middle, half_width)
    w_b = _window_W(records, states, window)

    if baseline_records is not None:
        _check_pairing(baseline_records, baseline_states)
        if len(baseline_records) != len(records) or not np.allclose(_column(baseline_records, "t"), t):
            raise dndelab.models.errors.MismatchedStatesError("the baseline must share the record times of the run")

        fd_baseline = curvature(t, _column(baseline_records, "N_b"), middle, half_width)
        w_baseline = _window_W(baseline_records, baseline_states, window)
        logger.debug(f"d2N baseline {fd_baseline}, W_b baseline {w_baseline}")
        fd -= fd_baseline
        w_b -= w_baseline

    factor = params.sigma * params.b * (params.b + 1.0) / params.gamma
    return _second_derivative_entry(float(t[middle]), fd, factor * w_b, w_b)
