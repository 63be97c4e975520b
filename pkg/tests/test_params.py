# Copyright IBM Inc. All Rights Reserved.
# SPDX-License-Identifier: Apache-2.0


import pydantic
import pytest

import dndelab.models.errors
import dndelab.models.params

Regime = dndelab.models.params.Regime


def test_derive_slow_diffusion_1d(params_slow_1d: dndelab.models.params.Params):
    assert params_slow_1d.b == pytest.approx(1.0)
    assert params_slow_1d.q == pytest.approx(2.0)
    assert params_slow_1d.sigma == pytest.approx(-3.0)
    assert params_slow_1d.a == pytest.approx(1.0 / 3.0)
    assert params_slow_1d.regime == Regime.SlowDiffusion
    assert params_slow_1d.gn_part == 2
    assert params_slow_1d.p_star is None


def test_derive_fast_diffusion_3d(params_fast_3d: dndelab.models.params.Params):
    assert params_fast_3d.b == pytest.approx(-0.25)
    assert params_fast_3d.sigma == pytest.approx(5.0 / 3.0)
    assert params_fast_3d.a == pytest.approx(-0.6)
    assert params_fast_3d.regime == Regime.FastDiffusionFisherRange
    assert params_fast_3d.gn_part == 1
    assert params_fast_3d.p_star == pytest.approx(6.0)


def test_derive_p3(params_p3: dndelab.models.params.Params):
    assert params_p3.b == pytest.approx(0.5)
    assert params_p3.q == pytest.approx(1.5)
    assert params_p3.sigma == pytest.approx(-4.0)
    assert params_p3.a == pytest.approx(0.25)
    assert params_p3.regime == Regime.SlowDiffusion


@pytest.mark.parametrize("n,p,gamma", [(1, 2.0, 2.0), (3, 2.0, 2.0), (3, 3.0, 1.0), (3, 2.0, 0.75), (2, 1.5, 3.0)])
def test_sigma_times_a_is_minus_one(n: int, p: float, gamma: float):
    params = dndelab.models.params.derive(n, p, gamma)
    assert params.sigma * params.a == pytest.approx(-1.0)
    assert params.b == pytest.approx(gamma - 1.0 / (p - 1.0))


def test_sobolev_line_is_snapped():
    params = dndelab.models.params.derive(3, 2.0, 2.0 / 3.0 + 1e-14)

    assert params.b == -1.0 / 3.0
    assert params.sigma == 1.0
    assert params.a == -1.0
    assert params.regime == Regime.SobolevCritical
    assert params.gn_part is None


@pytest.mark.parametrize("gamma,regime", [
    (2.0, Regime.SlowDiffusion),
    (0.75, Regime.FastDiffusionFisherRange),
    (2.0 / 3.0, Regime.SobolevCritical),
    (0.5, Regime.MassRangeOnly),
    (0.2, Regime.OutOfRange),
])
def test_regimes_in_3d(gamma: float, regime: Regime):
    params = dndelab.models.params.derive(3, 2.0, gamma)
    assert params.regime == regime
    assert dndelab.models.params.classify_regime(params) == regime


def test_profile_and_fisher_regimes():
    assert Regime.MassRangeOnly in dndelab.models.params.PROFILE_REGIMES
    assert Regime.MassRangeOnly not in dndelab.models.params.FISHER_REGIMES
    assert Regime.OutOfRange not in dndelab.models.params.PROFILE_REGIMES


def test_degenerate_b():
    with pytest.raises(dndelab.models.errors.DegenerateBError) as e:
        dndelab.models.params.derive(3, 2.0, 1.0)

    print(e.value)
    assert e.value.gamma == 1.0


@pytest.mark.parametrize("n,gamma,regime", [
    (1, 0.0, Regime.MassRangeOnly),
    (3, 0.0, Regime.OutOfRange),
    (1, -1.0, Regime.OutOfRange),
])
def test_non_positive_gamma_is_classified(n: int, gamma: float, regime: Regime):
    params = dndelab.models.params.derive(n, 2.0, gamma)

    assert params.regime == regime
    assert params.b == pytest.approx(gamma - 1.0)


@pytest.mark.parametrize("n,p,gamma,name", [
    (0, 2.0, 2.0, "n"),
    (1.5, 2.0, 2.0, "n"),
    (1, 1.0, 2.0, "p"),
    (1, 0.5, 2.0, "p"),
    (1, 2.0, float("nan"), "gamma"),
    (1, 2.0, float("inf"), "gamma"),
    (1, float("nan"), 2.0, "p"),
])
def test_bad_exponents(n, p, gamma, name: str):
    with pytest.raises(dndelab.models.errors.BadExponentError) as e:
        dndelab.models.params.derive(n, p, gamma)

    assert e.value.name == name
    assert isinstance(e.value, dndelab.models.errors.ParameterError)


def test_gn_s_and_b_are_inverse(params_fast_3d: dndelab.models.params.Params,
                                params_p3: dndelab.models.params.Params):
    for params in (params_fast_3d, params_p3):
        s = dndelab.models.params.gn_s_of_b(params)
        assert dndelab.models.params.b_of_gn_s(params.n, params.p, s) == pytest.approx(params.b)

    assert dndelab.models.params.gn_s_of_b(params_fast_3d) == pytest.approx(2.0)
    assert dndelab.models.params.gn_s_of_b(params_p3) == pytest.approx(0.4)


def test_gn_s_needs_pb_plus_one_nonzero():
    # b = -1/2 and p = 2
    params = dndelab.models.params.derive(3, 2.0, 0.5)

    with pytest.raises(dndelab.models.errors.DegenerateBError) as e:
        dndelab.models.params.gn_s_of_b(params)
    assert "pb + 1" in str(e.value)


def test_b_of_gn_s_rejects_bad_s():
    with pytest.raises(dndelab.models.errors.BadExponentError):
        dndelab.models.params.b_of_gn_s(3, 2.0, 0.0)


def test_params_are_frozen(params_slow_1d: dndelab.models.params.Params):
    with pytest.raises(pydantic.ValidationError):
        params_slow_1d.b = 3.0

    assert params_slow_1d.label() == "n=1,p=2,gamma=2"
