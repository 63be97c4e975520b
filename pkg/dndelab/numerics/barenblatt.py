# Copyright IBM Inc. All Rights Reserved.
# SPDX-License-Identifier: Apache-2.0

"""The Barenblatt profile, the source-type solution it generates and their closed-form functionals"""

from __future__ import annotations

import math
from typing import Tuple
from typing import Union

import numpy as np
import pydantic
from pydantic import ConfigDict

import dndelab.models.constants
import dndelab.models.errors
import dndelab.models.params
import dndelab.numerics.special

ArrayLike = Union[float, np.ndarray]


class BarenblattSpec(pydantic.BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    params: dndelab.models.params.Params
    C: float = pydantic.Field(description="Normalising constant, the profile has unit mass")


class BarenblattFunctionals(pydantic.BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    t: float = 1.0
    mass: float = 1.0
    E_b: float
    q_moment: float
    I_b: float
    N_b: float
    Q_b: float


def barenblatt_spec(params: dndelab.models.params.Params) -> BarenblattSpec:
    """Raises dndelab.models.errors.OutOfRangeRegimeError when the profile has infinite mass"""
    return BarenblattSpec(params=params, C=dndelab.numerics.special.const_profile_C(params))


def _as_output(values: np.ndarray) -> ArrayLike:
    if values.ndim == 0:
        return float(values)
    return values


def profile(spec: BarenblattSpec, xi: ArrayLike) -> ArrayLike:
    """(C - |xi|^q)_+^(1/b) for b > 0 and (C + |xi|^q)^(1/b) for b < 0"""
    params = spec.params
    radius = np.abs(np.asarray(xi, dtype=float))
    power = radius ** params.q

    if params.b > 0:
        values = np.maximum(spec.C - power, 0.0) ** (1.0 / params.b)
    else:
        values = (spec.C + power) ** (1.0 / params.b)
    return _as_output(values)


def _check_time(t: float):
    if not t > 0.0:
        raise dndelab.models.errors.NonPositiveTimeError(t)


def source_solution(spec: BarenblattSpec, x: ArrayLike, t: float) -> ArrayLike:
    """U_{b,t}(x) = t^(-a/b) B(t^(-a/(nb)) x), the self-similar solution with unit mass"""
    _check_time(t)
    params = spec.params
    scale = t ** (-params.a / (params.n * params.b))
    values = t ** (-params.a / params.b) * np.asarray(profile(spec, scale * np.abs(np.asarray(x, dtype=float))))
    return _as_output(np.asarray(values))


def time_scale(params: dndelab.models.params.Params) -> float:
    """kappa = ((p-1)nb + p) (q gamma/|b|)^(p-1)

    The profile has no coefficient in front of |xi|^q, so U_{b,t} solves du/dt = Delta_p u^gamma / kappa. The
    unit-mass solution of du/dt = Delta_p u^gamma is U_{b, kappa t}.
    """
    n, p, q, b, gamma = params.n, params.p, params.q, params.b, params.gamma
    if gamma <= 0.0:
        raise dndelab.models.errors.BadExponentError("gamma", gamma, "the source-type solution needs gamma > 0")
    return ((p - 1.0) * n * b + p) * (q * gamma / abs(b)) ** (p - 1.0)


def self_similar_time(params: dndelab.models.params.Params, t: float) -> float:
    """The time of the U_{b,.} family that matches time t of du/dt = Delta_p u^gamma"""
    return time_scale(params) * t


def exact_solution(spec: BarenblattSpec, x: ArrayLike, t: float) -> ArrayLike:
    """The unit-mass source-type solution of du/dt = Delta_p u^gamma at time t, i.e. U_{b, kappa t}"""
    _check_time(t)
    return source_solution(spec, x, self_similar_time(spec.params, t))


def characteristic_radius(spec: BarenblattSpec, t: float = 1.0) -> float:
    """C^(1/q) t^(a/(nb)); the radius of the support when b > 0"""
    _check_time(t)
    params = spec.params
    return spec.C ** (1.0 / params.q) * t ** (params.a / (params.n * params.b))


def support_radius(spec: BarenblattSpec, t: float = 1.0) -> float:
    if spec.params.b < 0:
        return math.inf
    return characteristic_radius(spec, t)


def tail_radius(spec: BarenblattSpec, t: float, tail_mass: float = dndelab.models.constants.TAIL_MASS) -> float:
    """Radius beyond which U_{b,t} carries less than tail_mass, for b < 0

    Uses (C + r^q)^(1/b) <= r^(q/b) so the bound is conservative.
    """
    _check_time(t)
    params = spec.params
    if params.b > 0:
        return support_radius(spec, t)

    decay = params.n + params.q / params.b
    area = dndelab.numerics.special.sphere_area(params.n)
    rho = (tail_mass * -decay / area) ** (1.0 / decay)
    rho = max(rho, dndelab.models.constants.SUPPORT_MARGIN * spec.C ** (1.0 / params.q))
    return rho * t ** (params.a / (params.n * params.b))


def auto_radius(spec: BarenblattSpec, t_end: float) -> float:
    """Domain radius for runs ending at t_end: a margin around the support for b > 0, the tail rule for b < 0"""
    if spec.params.b > 0:
        return dndelab.models.constants.SUPPORT_MARGIN * support_radius(spec, t_end)
    return tail_radius(spec, t_end)


def exact_functionals(spec: BarenblattSpec, t: float = 1.0) -> BarenblattFunctionals:
    """Closed-form mass, E_b, q-moment, I_b, N_b and Q_b of U_{b,t}

    Raises:
        dndelab.models.errors.OutOfRangeRegimeError: outside the Fisher range, where I_b(B) is infinite
    """
    _check_time(t)
    params = spec.params

    if params.regime not in dndelab.models.params.FISHER_REGIMES:
        raise dndelab.models.errors.OutOfRangeRegimeError(
            regime=params.regime.value, b=params.b, what="The Fisher information of the Barenblatt profile")

    n, p, q, b, gamma, sigma, a = params.n, params.p, params.q, params.b, params.gamma, params.sigma, params.a
    denominator = n * b + q * (b + 1.0)

    e_b = q * (b + 1.0) / denominator * spec.C
    q_moment = abs(n * b) / denominator * spec.C
    i_b = (q * gamma / abs(b)) ** (p - 1.0) * n
    n_b = e_b ** sigma

    return BarenblattFunctionals(
        t=t,
        E_b=e_b * t ** (-a),
        q_moment=q_moment * t ** (a * q / (n * b)),
        I_b=i_b / t,
        N_b=n_b * t,
        Q_b=n_b * i_b,
    )


def exact_pressure(spec: BarenblattSpec, x: ArrayLike, t: float) -> ArrayLike:
    """v = (gamma/b) U_{b,t}^b in closed form

    Raises:
        dndelab.models.errors.OutsideSupportError: if b > 0 and some |x| lies outside the support
    """
    _check_time(t)
    params = spec.params
    radius = np.abs(np.asarray(x, dtype=float))

    if params.b > 0:
        support = support_radius(spec, t)
        if np.any(radius > support):
            raise dndelab.models.errors.OutsideSupportError(float(np.max(radius)), support)

    xi = t ** (-params.a / (params.n * params.b)) * radius
    sign = -1.0 if params.b > 0 else 1.0
    values = params.gamma / params.b * t ** (-params.a) * (spec.C + sign * xi ** params.q)
    return _as_output(np.asarray(values))


def pressure_coefficient(spec: BarenblattSpec, t: float) -> float:
    """c such that the exact pressure reads v = const - c|x|^q"""
    params = spec.params
    return params.gamma / abs(params.b) * t ** (-params.a * (1.0 + params.q / (params.n * params.b)))


def exact_p_laplacian(spec: BarenblattSpec, t: float) -> float:
    """Delta_p v of the exact pressure, constant in space and equal to -I_b(U_{b,t})"""
    _check_time(t)
    params = spec.params
    return -params.n * (pressure_coefficient(spec, t) * params.q) ** (params.p - 1.0)


def sample(spec: BarenblattSpec, t: float = 1.0,
           count: int = dndelab.models.constants.PROFILE_SAMPLES) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(x, U_{b,t}(x), v(x)) at count equispaced radii from 0 to the support radius, or to the tail radius if b < 0"""
    _check_time(t)
    if count < 2:
        raise dndelab.models.errors.BadOptionError("count", count, "must be at least 2")

    x = np.linspace(0.0, tail_radius(spec, t), count)
    u = np.asarray(source_solution(spec, x, t), dtype=float)
    v = np.asarray(exact_pressure(spec, x, t), dtype=float)
    if spec.params.b > 0:
        v = np.maximum(v, 0.0)
    return x, u, v
