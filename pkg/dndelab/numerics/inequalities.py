# Copyright IBM Inc. All Rights Reserved.
# SPDX-License-Identifier: Apache-2.0

"""Quadrature checks of the sharp Sobolev and Gagliardo-Nirenberg inequalities and of the GN remainder"""

from __future__ import annotations

import logging
import math
from typing import Optional
from typing import Sequence

import numpy as np
import pydantic
from pydantic import ConfigDict

import dndelab.models.errors
import dndelab.models.params
import dndelab.models.report
import dndelab.numerics.grid
import dndelab.numerics.special

logger = logging.getLogger(__name__)


class SobolevResult(pydantic.BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    lhs: float = pydantic.Field(description="integral of |grad w|^p")
    rhs: float = pydantic.Field(description="S_{n,p} (integral of w^{p*})^{p/p*}")
    ratio: float
    S: float


class GNResult(pydantic.BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    part: int
    exponent: float
    constant: float
    ratio: float = pydantic.Field(description="Left side over right side of the inequality, at most 1")
    remainder_lhs: float
    remainder_rhs: Optional[float] = pydantic.Field(None, description="Scaled time integral of W_b over the run")
    tail_bound: Optional[float] = pydantic.Field(None, description="Scaled J(u_T) - J(Barenblatt), not yet dissipated")
    J_initial: Optional[float] = None
    J_final: Optional[float] = None
    W_integral: Optional[float] = None


def _nonnegative(grid: dndelab.numerics.grid.RadialGrid, w: np.ndarray) -> np.ndarray:
    values = grid.check_cells(w, "profile values")
    if not np.all(np.isfinite(values)) or np.any(values < 0.0):
        raise dndelab.models.errors.BadOptionError("w", "cell values", "must be finite and non-negative")
    if not np.any(values > 0.0):
        raise dndelab.models.errors.EmptyDensityError("profile")
    return values


def lebesgue_norm(grid: dndelab.numerics.grid.RadialGrid, w: np.ndarray, k: float) -> float:
    return dndelab.numerics.grid.integrate(grid, np.abs(w) ** k, tail=True) ** (1.0 / k)


def gradient_norm(grid: dndelab.numerics.grid.RadialGrid, w: np.ndarray, p: float) -> float:
    g = dndelab.numerics.grid.whole_space_gradient(grid, w)
    return dndelab.numerics.grid.integrate(grid, np.abs(g) ** p, tail=True) ** (1.0 / p)


def sobolev_check(grid: dndelab.numerics.grid.RadialGrid, w: np.ndarray, p: float) -> SobolevResult:
    """Evaluates both sides of int |grad w|^p >= S_{n,p} (int w^{p*})^{p/p*} after normalising int w^{p*} = 1

    Raises:
        dndelab.models.errors.BadExponentError: unless 1 < p < n
    """
    n = grid.n
    s_np = dndelab.numerics.special.sobolev_constant(n, p)
    p_star = n * p / (n - p)

    values = _nonnegative(grid, w)
    values = values / lebesgue_norm(grid, values, p_star)

    lhs = gradient_norm(grid, values, p) ** p
    rhs = s_np * lebesgue_norm(grid, values, p_star) ** p
    return SobolevResult(lhs=lhs, rhs=rhs, ratio=lhs / rhs, S=s_np)


def initial_density(grid: dndelab.numerics.grid.RadialGrid, w: np.ndarray, params: dndelab.models.params.Params,
                    s: float) -> np.ndarray:
    """u_0 = w^{ps} / ||w||_{ps}^{ps}, the density whose flow yields the GN remainder"""
    values = _nonnegative(grid, w)
    k = params.p * s
    return values ** k / lebesgue_norm(grid, values, k) ** k


def _integrate_in_time(records: Sequence[dndelab.models.report.DiagRecord], name: str) -> float:
    t = np.array([r.t for r in records], dtype=float)
    y = np.array([getattr(r, name) for r in records], dtype=float)
    return float(np.sum(0.5 * (y[1:] + y[:-1]) * np.diff(t)))


def gn_check(
        grid: dndelab.numerics.grid.RadialGrid,
        w: np.ndarray,
        params: dndelab.models.params.Params,
        s: float,
        records: Optional[Sequence[dndelab.models.report.DiagRecord]] = None,
) -> GNResult:
    """Evaluates the Gagliardo-Nirenberg inequality tied to b and its remainder

    Part 1 (-1/n < b < 0): ||w||_{ps} <= C_1 ||grad w||_p^theta ||w||_r^(1-theta).
    Part 2 (b > 0): ||w||_r <= C_2 ||grad w||_p^vartheta ||w||_{ps}^(1-vartheta), with r = (p-1)s + 1.

    The remainder equals (ps gamma)^(-p) ||w||^(p/exponent) (J(u_0) - J(Barenblatt)) where J = gamma/(b+1) Q_b;
    given the records of a run started at u_0 = initial_density(w), it is matched by the scaled integral of W_b
    over the run plus the scaled J(u_T) - J(Barenblatt) still left at the end.

    Raises:
        dndelab.models.errors.RangeMismatchError: if s is not tied to b or no part applies
    """
    exponents = dndelab.numerics.special.gn_exponents(params, s)
    constant = dndelab.numerics.special.gn_constant(params, s)
    p, b, gamma = params.p, params.b, params.gamma
    theta = exponents.exponent

    values = _nonnegative(grid, w)
    ps = p * s
    r = (p - 1.0) * s + 1.0
    norm_ps = lebesgue_norm(grid, values, ps)
    norm_r = lebesgue_norm(grid, values, r)
    grad = gradient_norm(grid, values, p)

    if exponents.part == 1:
        ratio = norm_ps / (constant * grad ** theta * norm_r ** (1.0 - theta))
        remainder = (grad ** p * norm_r ** (p * (1.0 - theta) / theta)
                     - constant ** (-p / theta) * norm_ps ** (p / theta))
        scale = (ps * gamma) ** (-p) * norm_ps ** (p / theta)
    else:
        ratio = norm_r / (constant * grad ** theta * norm_ps ** (1.0 - theta))
        remainder = (grad ** p * norm_ps ** (p * (1.0 - theta) / theta)
                     - constant ** (-p / theta) * norm_r ** (p / theta))
        scale = (ps * gamma) ** (-p) * norm_r ** (p / theta)

    if records is None:
        return GNResult(part=exponents.part, exponent=theta, constant=constant, ratio=ratio, remainder_lhs=remainder)

    if len(records) < 2:
        raise dndelab.models.errors.TooFewRecordsError(2, len(records))

    j_factor = gamma / (b + 1.0)
    j_limit = j_factor * dndelab.numerics.special.const_isoperimetric(params)
    j_initial = j_factor * records[0].Q_b
    j_final = j_factor * records[-1].Q_b
    w_integral = _integrate_in_time(records, "W_b")

    logger.debug(f"GN remainder: J(u0)={j_initial} J(uT)={j_final} J(B)={j_limit} int W={w_integral}")

    return GNResult(
        part=exponents.part,
        exponent=theta,
        constant=constant,
        ratio=ratio,
        remainder_lhs=remainder,
        remainder_rhs=scale * w_integral,
        tail_bound=scale * (j_final - j_limit),
        J_initial=j_initial,
        J_final=j_final,
        W_integral=w_integral,
    )


def remainder_identity_error(result: GNResult) -> float:
    """|J(u_0) - J(u_T) - int W dt| / (J(u_0) - J(u_T)) for a result computed with records"""
    if result.J_initial is None:
        raise dndelab.models.errors.TooFewRecordsError(2, 0)
    drop = result.J_initial - result.J_final
    if drop == 0.0:
        return 0.0 if result.W_integral == 0.0 else math.inf
    return abs(drop - result.W_integral) / abs(drop)
