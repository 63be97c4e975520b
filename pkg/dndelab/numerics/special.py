# Copyright IBM Inc. All Rights Reserved.
# SPDX-License-Identifier: Apache-2.0

"""Gamma and Beta functions, sphere areas and the closed-form constants of the equation

All constants are evaluated in log space and exponentiated once.
"""

from __future__ import annotations

import logging
import math
from typing import Union

import numpy as np
import pydantic
from pydantic import ConfigDict

import dndelab.models.errors
import dndelab.models.params

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]

# Lanczos approximation with g=7 and 9 coefficients
_LANCZOS_G = 7.0
_LANCZOS_X0 = 0.99999999999980993
_LANCZOS_COEFFICIENTS = (
    676.5203681218851, -1259.1392167224028, 771.32342877765313,
    -176.61502916214059, 12.507343278686905, -0.13857109526572012,
    9.9843695780195716e-6, 1.5056327351493116e-7,
)
_LN_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)


def ln_gamma(x: ArrayLike) -> ArrayLike:
    """Natural logarithm of Gamma(x) for x > 0

    Arguments below 1/2 are lifted with ln Gamma(x) = ln Gamma(x+1) - ln x; the reflection formula is never used
    because only positive arguments are admissible.

    Raises:
        dndelab.models.errors.NonPositiveArgumentError: if any x <= 0 (or is NaN)
    """
    arr = np.asarray(x, dtype=float)
    bad = ~(arr > 0.0)
    if np.any(bad):
        raise dndelab.models.errors.NonPositiveArgumentError("ln_gamma", float(arr[bad].flat[0]))

    small = arr < 0.5
    z = np.where(small, arr + 1.0, arr) - 1.0

    series = np.full_like(z, _LANCZOS_X0)
    for k, coefficient in enumerate(_LANCZOS_COEFFICIENTS):
        series = series + coefficient / (z + k + 1.0)

    t = z + _LANCZOS_G + 0.5
    result = _LN_SQRT_2PI + (z + 0.5) * np.log(t) - t + np.log(series)
    result = np.where(small, result - np.log(arr), result)

    if result.ndim == 0:
        return float(result)
    return result


def gamma_fn(x: ArrayLike) -> ArrayLike:
    return np.exp(ln_gamma(x))


def ln_beta(x: ArrayLike, y: ArrayLike) -> ArrayLike:
    return ln_gamma(x) + ln_gamma(y) - ln_gamma(np.add(x, y))


def beta_fn(x: ArrayLike, y: ArrayLike) -> ArrayLike:
    return np.exp(ln_beta(x, y))


def ln_sphere_area(n: int) -> float:
    return math.log(2.0) + 0.5 * n * math.log(math.pi) - ln_gamma(0.5 * n)


def sphere_area(n: int) -> float:
    """Area of the unit sphere S^{n-1} in R^n, so that sphere_area(1) = 2 counts both ends of the line"""
    if n < 1:
        raise dndelab.models.errors.BadExponentError("n", n, "the dimension must be an integer >= 1")
    return math.exp(ln_sphere_area(n))


def _require_regime(params: dndelab.models.params.Params, allowed, what: str):
    if params.regime not in allowed:
        raise dndelab.models.errors.OutOfRangeRegimeError(regime=params.regime.value, b=params.b, what=what)


def ln_const_D_b(params: dndelab.models.params.Params) -> float:
    _require_regime(params, dndelab.models.params.PROFILE_REGIMES, "D_b")
    n, q, b = params.n, params.q, params.b

    ret = math.log(2.0 / q) + 0.5 * n * math.log(math.pi) - ln_gamma(0.5 * n) + ln_gamma(n / q)
    if b > 0:
        return ret + ln_gamma(1.0 / b + 1.0) - ln_gamma(n / q + 1.0 / b + 1.0)
    return ret + ln_gamma(-n / q - 1.0 / b) - ln_gamma(-1.0 / b)


def const_D_b(params: dndelab.models.params.Params) -> float:
    """Mass of the profile (C -/+ |x|^q)^(1/b) with C = 1, i.e. the normalisation integral of the Barenblatt family

    Raises:
        dndelab.models.errors.OutOfRangeRegimeError: if the profile has infinite mass
    """
    return math.exp(ln_const_D_b(params))


def const_profile_C(params: dndelab.models.params.Params) -> float:
    """The constant C that gives the Barenblatt profile unit mass: C = D_b^(-bq/(nb+q))"""
    n, q, b = params.n, params.q, params.b
    return math.exp(-b * q / (n * b + q) * ln_const_D_b(params))


def _ln_gamma_ratio(params: dndelab.models.params.Params, shifted: bool) -> float:
    n, q, b = params.n, params.q, params.b
    shift = 1.0 if shifted else 0.0

    ret = ln_gamma(n / q + shift) - ln_gamma(0.5 * n + shift)
    if b > 0:
        return ret + ln_gamma(1.0 / b + 1.0) - ln_gamma(n / q + 1.0 / b + 1.0)
    return ret + ln_gamma(-n / q - 1.0 / b) - ln_gamma(-1.0 / b)


def ln_const_isoperimetric(params: dndelab.models.params.Params, form: str = "theorem") -> float:
    _require_regime(params, dndelab.models.params.FISHER_REGIMES, "The isoperimetric constant")
    n, p, q, b, gamma, sigma = params.n, params.p, params.q, params.b, params.gamma, params.sigma

    ret = ((p - 1.0) * math.log(q * gamma / abs(b)) + 0.5 * p * math.log(math.pi) + math.log(n)
           + sigma * math.log(q * (b + 1.0) / (n * b + q * (b + 1.0))))

    if form == "theorem":
        return ret + p / n * _ln_gamma_ratio(params, shifted=True)
    elif form == "proof":
        return ret + p / n * (math.log(2.0 / q) + _ln_gamma_ratio(params, shifted=False))

    raise dndelab.models.errors.BadOptionError("form", form, "must be 'theorem' or 'proof'")


def const_isoperimetric(params: dndelab.models.params.Params, form: str = "theorem") -> float:
    """The sharp constant of N_b(u) I_b(u) >= C (C_{2,b} for b > 0, C_{1,b} for b < 0)

    Two algebraically equal expressions exist: ``theorem`` uses Gamma(n/q+1), Gamma(n/2+1) and ``proof`` uses
    (2/q)^(p/n) Gamma(n/q), Gamma(n/2). Both must agree to rounding.

    Raises:
        dndelab.models.errors.OutOfRangeRegimeError: outside the Fisher range
    """
    return math.exp(ln_const_isoperimetric(params, form=form))


def _check_sobolev_exponents(n: int, p: float):
    if not (1.0 < p < n):
        raise dndelab.models.errors.BadExponentError("p", p, f"the Sobolev inequality needs 1 < p < n={n}")


def sobolev_constant(n: int, p: float) -> float:
    """Sharp constant S_{n,p} of int |grad w|^p >= S (int w^{p*})^{p/p*}"""
    _check_sobolev_exponents(n, p)
    q = p / (p - 1.0)
    ln_s = (math.log(n) + 0.5 * p * math.log(math.pi) + (p - 1.0) * math.log((n - p) / (p - 1.0))
            + p / n * (ln_gamma(n / q + 1.0) + ln_gamma(n / p) - ln_gamma(0.5 * n + 1.0) - ln_gamma(float(n))))
    return math.exp(ln_s)


def sobolev_params(n: int, p: float) -> dndelab.models.params.Params:
    """Parameters on the Sobolev line b = -1/n"""
    _check_sobolev_exponents(n, p)
    return dndelab.models.params.derive(n, p, 1.0 / (p - 1.0) - 1.0 / n)


def sobolev_chain_factor(n: int, p: float) -> float:
    """K = p(n-p+1)/((p-1)(n-p)), the constant p* gamma that appears when substituting u = w^{p*}"""
    _check_sobolev_exponents(n, p)
    return p * (n - p + 1.0) / ((p - 1.0) * (n - p))


def sobolev_constant_from_isoperimetric(n: int, p: float) -> float:
    """S_{n,p} = (gamma/(b+1)) C_{1,-1/n} / K^p, obtained by substituting u = w^{p*} in the isoperimetric inequality"""
    params = sobolev_params(n, p)
    c_1 = const_isoperimetric(params)
    return params.gamma / (params.b + 1.0) * c_1 / sobolev_chain_factor(n, p) ** p


def sobolev_constant_statement_form(n: int, p: float) -> float:
    """C_{1,-1/n} / K^p, i.e. the relation without the gamma/(b+1) factor; differs from S_{n,p} when p != 2"""
    params = sobolev_params(n, p)
    return const_isoperimetric(params) / sobolev_chain_factor(n, p) ** p


class GNExponents(pydantic.BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    part: int = pydantic.Field(description="1 for -1/n < b < 0 (theta), 2 for b > 0 (vartheta)")
    s: float
    exponent: float = pydantic.Field(description="theta (part 1) or vartheta (part 2) from the explicit formula")
    exponent_alt: float = pydantic.Field(description="The same exponent derived from the entropy exponents")


def gn_exponents(params: dndelab.models.params.Params, s: float) -> GNExponents:
    """Interpolation exponent of the Gagliardo-Nirenberg inequality tied to b

    Raises:
        dndelab.models.errors.RangeMismatchError: if s does not match b or lies outside the admissible interval
    """
    n, p, b, sigma = params.n, params.p, params.b, params.sigma
    expected = dndelab.models.params.gn_s_of_b(params)

    if abs(s - expected) > 1e-12 * max(1.0, abs(expected)):
        raise dndelab.models.errors.RangeMismatchError(s, expected, f"b={b} requires s=1/(pb+1)={expected}")

    part = params.gn_part

    if part == 1:
        upper = n / (n - p) if p < n else math.inf
        if not (1.0 < s < upper):
            raise dndelab.models.errors.RangeMismatchError(s, expected, f"part 1 requires 1 < s < {upper}")
        exponent = (1.0 / s) * n * (s - 1.0) / ((p - 1.0) * n * (1.0 - s) + p * ((p - 1.0) * s + 1.0))
        exponent_alt = 1.0 / (s * (b + 1.0) * (sigma - 1.0) + 1.0)
    elif part == 2:
        if not (0.0 < s < 1.0):
            raise dndelab.models.errors.RangeMismatchError(s, expected, "part 2 requires 0 < s < 1")
        exponent = n * (1.0 - s) / (((p - 1.0) * s + 1.0) * (n * (1.0 - s) + p * s))
        exponent_alt = p / ((1.0 - sigma) * ((p - 1.0) * s + 1.0))
    else:
        raise dndelab.models.errors.RangeMismatchError(s, expected, f"no Gagliardo-Nirenberg inequality for b={b}")

    if abs(exponent - exponent_alt) > 1e-10 * abs(exponent):
        logger.warning(f"Interpolation exponents disagree for {params.label()}, s={s}: {exponent} != {exponent_alt}")

    return GNExponents(part=part, s=s, exponent=exponent, exponent_alt=exponent_alt)


def gn_constant(params: dndelab.models.params.Params, s: float) -> float:
    """Sharp Gagliardo-Nirenberg constant [(b+1) gamma^(p-1) (ps)^p / C_b]^(exponent/p)"""
    exponents = gn_exponents(params, s)
    p, b, gamma = params.p, params.b, params.gamma

    ln_base = (math.log(b + 1.0) + (p - 1.0) * math.log(gamma) - ln_const_isoperimetric(params)
               + p * math.log(p * s))
    return math.exp(exponents.exponent / p * ln_base)
