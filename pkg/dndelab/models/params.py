# Copyright IBM Inc. All Rights Reserved.
# SPDX-License-Identifier: Apache-2.0

"""Exponent algebra of the doubly nonlinear diffusion equation du/dt = Delta_p u^gamma

Every other module receives a ``Params`` instance built by ``derive()`` and never recomputes b, q, sigma or a.
"""

from __future__ import annotations

import enum
import math
from typing import Optional

import pydantic
from pydantic import ConfigDict

import dndelab.models.constants
import dndelab.models.errors


class Regime(str, enum.Enum):
    SlowDiffusion = "SlowDiffusion"
    FastDiffusionFisherRange = "FastDiffusionFisherRange"
    SobolevCritical = "SobolevCritical"
    MassRangeOnly = "MassRangeOnly"
    OutOfRange = "OutOfRange"


# Regimes for which the Fisher information of the Barenblatt profile is finite
FISHER_REGIMES = (Regime.SlowDiffusion, Regime.FastDiffusionFisherRange, Regime.SobolevCritical)

# Regimes for which the Barenblatt profile has finite mass
PROFILE_REGIMES = FISHER_REGIMES + (Regime.MassRangeOnly,)


class Params(pydantic.BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    n: int = pydantic.Field(description="Spatial dimension")
    p: float = pydantic.Field(description="Exponent of the p-Laplacian")
    gamma: float = pydantic.Field(description="Power of the nonlinearity u^gamma")
    b: float = pydantic.Field(description="gamma - 1/(p-1)")
    q: float = pydantic.Field(description="Conjugate exponent p/(p-1)")
    sigma: float = pydantic.Field(description="Entropy power exponent -(p-1) - p/(n b)")
    a: float = pydantic.Field(description="Self-similar exponent -1/sigma")
    regime: Regime

    @classmethod
    def derive(cls, n: int, p: float, gamma: float) -> Params:
        return derive(n, p, gamma)

    @property
    def p_star(self) -> Optional[float]:
        """The Sobolev exponent np/(n-p), None when p >= n"""
        if self.p >= self.n:
            return None
        return self.n * self.p / (self.n - self.p)

    @property
    def gn_part(self) -> Optional[int]:
        """Which part of the Gagliardo-Nirenberg family applies: 1 for -1/n < b < 0, 2 for b > 0"""
        if self.b > 0:
            return 2
        if -1.0 / self.n < self.b < 0 and self.regime != Regime.SobolevCritical:
            return 1
        return None

    def label(self) -> str:
        return f"n={self.n},p={self.p:g},gamma={self.gamma:g}"


class Triple(pydantic.BaseModel):
    """(n, p, gamma) as given, for runs whose exponents could not be derived"""
    model_config = ConfigDict(frozen=True, extra="forbid")

    n: int
    p: float
    gamma: float

    def label(self) -> str:
        return f"n={self.n},p={self.p:g},gamma={self.gamma:g}"


def _classify(n: int, p: float, b: float) -> Regime:
    tol = dndelab.models.constants.REGIME_TOLERANCE
    q = p / (p - 1.0)

    if b > tol:
        return Regime.SlowDiffusion
    if abs(b + 1.0 / n) <= tol and p < n:
        return Regime.SobolevCritical
    if -q / (n + q) < b < -tol:
        return Regime.FastDiffusionFisherRange
    if -p / (n * (p - 1.0)) < b <= -q / (n + q):
        return Regime.MassRangeOnly
    return Regime.OutOfRange


def derive(n: int, p: float, gamma: float) -> Params:
    """Computes b, q, sigma, a and the regime for the triple (n, p, gamma)

    Arguments:
        n: spatial dimension, an integer >= 1
        p: exponent of the p-Laplacian, p > 1
        gamma: exponent of the nonlinearity, finite; gamma <= 0 is classified like any other value

    Returns:
        The Params

    Raises:
        dndelab.models.errors.BadExponentError: if n < 1, p <= 1 or gamma is not finite
        dndelab.models.errors.DegenerateBError: if b = 0 (the equation is p-Laplacian heat flow of u^(1/(p-1)))
    """
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise dndelab.models.errors.BadExponentError("n", n, "the dimension must be an integer >= 1")
    n = int(n)
    p = float(p)
    gamma = float(gamma)

    if not math.isfinite(p) or p <= 1.0:
        raise dndelab.models.errors.BadExponentError("p", p, "must be finite and greater than 1")
    if not math.isfinite(gamma):
        raise dndelab.models.errors.BadExponentError("gamma", gamma, "must be finite")

    tol = dndelab.models.constants.REGIME_TOLERANCE
    b = gamma - 1.0 / (p - 1.0)

    if abs(b) <= tol:
        raise dndelab.models.errors.DegenerateBError(n=n, p=p, gamma=gamma)

    q = p / (p - 1.0)

    if abs(b + 1.0 / n) <= tol:
        b = -1.0 / n
        sigma = 1.0
        a = -1.0
    else:
        sigma = -(p - 1.0) - p / (n * b)
        denominator = (p - 1.0) * n * b + p
        a = n * b / denominator if denominator != 0.0 else math.inf

    return Params(n=n, p=p, gamma=gamma, b=b, q=q, sigma=sigma, a=a, regime=_classify(n, p, b))


def classify_regime(params: Params) -> Regime:
    return _classify(params.n, params.p, params.b)


def gn_s_of_b(params: Params) -> float:
    """The Gagliardo-Nirenberg parameter s = 1/(pb+1) tied to b"""
    denominator = params.p * params.b + 1.0
    if abs(denominator) <= dndelab.models.constants.REGIME_TOLERANCE:
        raise dndelab.models.errors.DegenerateBError(
            n=params.n, p=params.p, gamma=params.gamma, reason="pb + 1 vanishes so s = 1/(pb+1) is undefined")
    return 1.0 / denominator


def b_of_gn_s(n: int, p: float, s: float) -> float:
    """Inverse of gn_s_of_b: b = (1 - s)/(ps)"""
    if not math.isfinite(s) or s <= 0.0:
        raise dndelab.models.errors.BadExponentError("s", s, "must be finite and positive")
    if p <= 1.0:
        raise dndelab.models.errors.BadExponentError("p", p, "must be greater than 1")
    return (1.0 - s) / (p * s)
