# Copyright IBM Inc. All Rights Reserved.
# SPDX-License-Identifier: Apache-2.0


import math

import numpy as np
import pytest
import scipy.integrate
import scipy.special

import dndelab.models.errors
import dndelab.models.params
import dndelab.numerics.special


def test_ln_gamma_matches_scipy():
    x = np.concatenate([np.linspace(0.01, 0.49, 25), np.linspace(0.5, 60.0, 400)])
    ours = dndelab.numerics.special.ln_gamma(x)
    np.testing.assert_allclose(ours, scipy.special.gammaln(x), rtol=1e-12, atol=1e-12)


def test_ln_gamma_scalars():
    assert isinstance(dndelab.numerics.special.ln_gamma(3.5), float)
    assert dndelab.numerics.special.ln_gamma(1.0) == pytest.approx(0.0, abs=1e-13)
    assert dndelab.numerics.special.gamma_fn(5.0) == pytest.approx(24.0, rel=1e-13)
    assert dndelab.numerics.special.gamma_fn(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-13)


@pytest.mark.parametrize("x", [0.0, -1.0, float("nan")])
def test_ln_gamma_non_positive(x: float):
    with pytest.raises(dndelab.models.errors.NonPositiveArgumentError):
        dndelab.numerics.special.ln_gamma(x)


def test_ln_gamma_non_positive_in_array():
    with pytest.raises(dndelab.models.errors.NonPositiveArgumentError) as e:
        dndelab.numerics.special.ln_gamma(np.array([1.0, 2.0, -3.0]))

    assert e.value.value == -3.0


def test_beta_values():
    assert dndelab.numerics.special.beta_fn(1.5, 2.0) == pytest.approx(4.0 / 15.0, rel=1e-13)
    assert dndelab.numerics.special.beta_fn(2.5, 1.5) == pytest.approx(math.pi / 16.0, rel=1e-13)
    assert dndelab.numerics.special.beta_fn(3.7, 0.2) == pytest.approx(scipy.special.beta(3.7, 0.2), rel=1e-12)


@pytest.mark.parametrize("n,area", [(1, 2.0), (2, 2.0 * math.pi), (3, 4.0 * math.pi), (4, 2.0 * math.pi ** 2)])
def test_sphere_area(n: int, area: float):
    assert dndelab.numerics.special.sphere_area(n) == pytest.approx(area, rel=1e-13)


@pytest.mark.parametrize("n,p,gamma,expected", [
    (1, 2.0, 2.0, 4.0 / 3.0),
    (3, 2.0, 2.0, 8.0 * math.pi / 15.0),
    (3, 2.0, 2.0 / 3.0, math.pi ** 2 / 4.0),
])
def test_D_b_references(n: int, p: float, gamma: float, expected: float):
    params = dndelab.models.params.derive(n, p, gamma)
    assert dndelab.numerics.special.const_D_b(params) == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("n,p,gamma,expected", [
    (1, 2.0, 2.0, (4.0 / 3.0) ** (-2.0 / 3.0)),
    (3, 2.0, 2.0, (8.0 * math.pi / 15.0) ** (-2.0 / 5.0)),
    (3, 2.0, 2.0 / 3.0, (math.pi ** 2 / 4.0) ** (2.0 / 3.0)),
])
def test_profile_C_closed_form(n: int, p: float, gamma: float, expected: float):
    params = dndelab.models.params.derive(n, p, gamma)
    assert dndelab.numerics.special.const_profile_C(params) == pytest.approx(expected, rel=1e-12)


def test_profile_C_sobolev_line_decimal():
    params = dndelab.models.params.derive(3, 2.0, 2.0 / 3.0)
    assert dndelab.numerics.special.const_profile_C(params) == pytest.approx(1.82597, abs=1e-5)


def _radial_quad(params: dndelab.models.params.Params, c: float) -> float:
    area = dndelab.numerics.special.sphere_area(params.n)
    if params.b > 0:
        upper = c ** (1.0 / params.q)
        f = lambda r: (c - r ** params.q) ** (1.0 / params.b) * r ** (params.n - 1)
    else:
        upper = np.inf
        f = lambda r: (c + r ** params.q) ** (1.0 / params.b) * r ** (params.n - 1)
    value, _ = scipy.integrate.quad(f, 0.0, upper, limit=200)
    return area * value


@pytest.mark.parametrize("n,p,gamma", [(1, 2.0, 2.0), (3, 2.0, 2.0), (3, 3.0, 1.0), (3, 2.0, 0.75), (2, 1.5, 3.0)])
def test_D_b_and_C_against_quadrature(n: int, p: float, gamma: float):
    params = dndelab.models.params.derive(n, p, gamma)

    d_b = dndelab.numerics.special.const_D_b(params)
    assert d_b == pytest.approx(_radial_quad(params, 1.0), rel=1e-7)

    c = dndelab.numerics.special.const_profile_C(params)
    assert _radial_quad(params, c) == pytest.approx(1.0, rel=1e-7)


def test_D_b_outside_mass_range():
    params = dndelab.models.params.derive(3, 2.0, 0.2)

    with pytest.raises(dndelab.models.errors.OutOfRangeRegimeError) as e:
        dndelab.numerics.special.const_D_b(params)

    print(e.value)
    assert e.value.regime == "OutOfRange"


def test_isoperimetric_reference():
    params = dndelab.models.params.derive(1, 2.0, 2.0)
    assert dndelab.numerics.special.const_isoperimetric(params) == pytest.approx(125.0 / 9.0, rel=1e-12)


@pytest.mark.parametrize("n,p,gamma", [(1, 2.0, 2.0), (3, 2.0, 2.0), (3, 3.0, 1.0), (3, 2.0, 0.75),
                                       (3, 2.0, 2.0 / 3.0), (4, 3.0, 0.4)])
def test_isoperimetric_forms_agree(n: int, p: float, gamma: float):
    params = dndelab.models.params.derive(n, p, gamma)
    theorem = dndelab.numerics.special.const_isoperimetric(params, form="theorem")
    proof = dndelab.numerics.special.const_isoperimetric(params, form="proof")
    assert theorem == pytest.approx(proof, rel=1e-12)


def test_isoperimetric_mass_range_only():
    params = dndelab.models.params.derive(3, 2.0, 0.5)

    assert dndelab.numerics.special.const_D_b(params) > 0.0
    with pytest.raises(dndelab.models.errors.OutOfRangeRegimeError):
        dndelab.numerics.special.const_isoperimetric(params)


def test_isoperimetric_bad_form(params_slow_1d: dndelab.models.params.Params):
    with pytest.raises(dndelab.models.errors.BadOptionError):
        dndelab.numerics.special.const_isoperimetric(params_slow_1d, form="lemma")


def test_sobolev_S_3_2():
    assert dndelab.numerics.special.sobolev_constant(3, 2.0) == pytest.approx(
        3.0 * (math.pi / 2.0) ** (4.0 / 3.0), rel=1e-12)


@pytest.mark.parametrize("n", [3, 4, 5, 6, 7])
def test_sobolev_classical(n: int):
    classical = math.pi * n * (n - 2.0) * (math.gamma(0.5 * n) / math.gamma(float(n))) ** (2.0 / n)
    assert dndelab.numerics.special.sobolev_constant(n, 2.0) == pytest.approx(classical, rel=1e-12)


@pytest.mark.parametrize("n,p", [(3, 2.0), (4, 2.0), (5, 3.0)])
def test_sobolev_from_isoperimetric(n: int, p: float):
    chained = dndelab.numerics.special.sobolev_constant_from_isoperimetric(n, p)
    assert chained == pytest.approx(dndelab.numerics.special.sobolev_constant(n, p), rel=1e-10)


def test_sobolev_statement_form_differs_when_p_is_not_2():
    assert dndelab.numerics.special.sobolev_constant_statement_form(3, 2.0) == pytest.approx(
        dndelab.numerics.special.sobolev_constant(3, 2.0), rel=1e-10)

    statement = dndelab.numerics.special.sobolev_constant_statement_form(5, 3.0)
    assert statement != pytest.approx(dndelab.numerics.special.sobolev_constant(5, 3.0), rel=1e-3)


def test_sobolev_chain_factor():
    assert dndelab.numerics.special.sobolev_chain_factor(3, 2.0) == pytest.approx(4.0)


@pytest.mark.parametrize("n,p", [(2, 2.0), (3, 3.0), (3, 1.0)])
def test_sobolev_needs_p_below_n(n: int, p: float):
    with pytest.raises(dndelab.models.errors.BadExponentError):
        dndelab.numerics.special.sobolev_constant(n, p)


@pytest.mark.parametrize("n,p,gamma,part,exponent", [
    (3, 2.0, 0.75, 1, 0.5),
    (1, 2.0, 2.0, 2, 0.375),
    (4, 3.0, 0.4, 1, 1.2 / (8.0 + 1.0 / 7.0)),
])
def test_gn_exponents(n: int, p: float, gamma: float, part: int, exponent: float):
    params = dndelab.models.params.derive(n, p, gamma)
    s = dndelab.models.params.gn_s_of_b(params)
    exponents = dndelab.numerics.special.gn_exponents(params, s)

    assert exponents.part == part
    assert exponents.exponent == pytest.approx(exponent, rel=1e-10)
    assert exponents.exponent_alt == pytest.approx(exponents.exponent, rel=1e-10)


def test_gn_exponents_reject_mismatched_s(params_fast_3d: dndelab.models.params.Params):
    with pytest.raises(dndelab.models.errors.RangeMismatchError) as e:
        dndelab.numerics.special.gn_exponents(params_fast_3d, 1.5)

    assert e.value.expected == pytest.approx(2.0)


def test_gn_exponents_sobolev_line():
    params = dndelab.models.params.derive(3, 2.0, 2.0 / 3.0)

    with pytest.raises(dndelab.models.errors.RangeMismatchError):
        dndelab.numerics.special.gn_exponents(params, dndelab.models.params.gn_s_of_b(params))


def test_gn_constant_is_positive(params_slow_1d, params_fast_3d, params_p3):
    for params in (params_slow_1d, params_fast_3d, params_p3):
        constant = dndelab.numerics.special.gn_constant(params, dndelab.models.params.gn_s_of_b(params))
        assert math.isfinite(constant) and constant > 0.0
