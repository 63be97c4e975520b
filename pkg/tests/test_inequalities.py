# Copyright IBM Inc. All Rights Reserved.
# SPDX-License-Identifier: Apache-2.0


import numpy as np
import pytest

import dndelab.models.errors
import dndelab.models.params
import dndelab.models.report
import dndelab.numerics.barenblatt
import dndelab.numerics.grid
import dndelab.numerics.inequalities
import dndelab.numerics.special


def _extremal(grid: dndelab.numerics.grid.RadialGrid, p: float, scale: float = 1.0) -> np.ndarray:
    q = p / (p - 1.0)
    return (1.0 + (grid.centers / scale) ** q) ** ((p - grid.n) / p)


@pytest.mark.parametrize("n", [3, 4, 5])
def test_sobolev_extremal_attains_equality(n: int):
    grid = dndelab.numerics.grid.build(n, 50.0, 5000)
    result = dndelab.numerics.inequalities.sobolev_check(grid, _extremal(grid, 2.0), 2.0)

    assert result.ratio == pytest.approx(1.0, rel=2e-3)
    assert result.S == pytest.approx(dndelab.numerics.special.sobolev_constant(n, 2.0))
    assert result.lhs / result.rhs == pytest.approx(result.ratio)


@pytest.mark.parametrize("m", [2000, 4000, 8000])
def test_sobolev_extremal_ratio_across_meshes(m: int):
    grid = dndelab.numerics.grid.build(3, 50.0, m)
    result = dndelab.numerics.inequalities.sobolev_check(grid, _extremal(grid, 2.0), 2.0)

    assert result.ratio == pytest.approx(1.0, abs=5e-3)
    if m >= 4000:
        assert result.ratio == pytest.approx(1.0, abs=1e-3)


def test_gradient_norm_includes_the_tail():
    grid = dndelab.numerics.grid.build(3, 50.0, 4000)
    w = _extremal(grid, 2.0)
    inside = dndelab.numerics.grid.integrate(grid, dndelab.numerics.grid.whole_space_gradient(grid, w) ** 2)

    # int |grad (1 + r^2)^(-1/2)|^2 over R^3 = 3 pi^2 / 4, and the part beyond r = 50 is about 4 pi / 50
    assert dndelab.numerics.inequalities.gradient_norm(grid, w, 2.0) ** 2 == pytest.approx(
        0.75 * np.pi ** 2, rel=1e-3)
    assert 0.75 * np.pi ** 2 - inside == pytest.approx(4.0 * np.pi / 50.0, rel=2e-2)


def test_sobolev_is_scale_invariant():
    grid = dndelab.numerics.grid.build(3, 50.0, 5000)
    unit = dndelab.numerics.inequalities.sobolev_check(grid, _extremal(grid, 2.0), 2.0)
    dilated = dndelab.numerics.inequalities.sobolev_check(grid, 7.0 * _extremal(grid, 2.0, 2.0), 2.0)

    assert dilated.ratio == pytest.approx(unit.ratio, rel=2e-3)


def test_sobolev_gaussian_is_strict():
    grid = dndelab.numerics.grid.build(3, 50.0, 5000)
    result = dndelab.numerics.inequalities.sobolev_check(grid, np.exp(-0.5 * grid.centers ** 2), 2.0)

    # 3 pi^(3/2) / 2 / (pi/3)^(1/2) over S_{3,2}
    assert result.ratio == pytest.approx(1.49, rel=1e-2)


def test_sobolev_bad_exponent():
    grid = dndelab.numerics.grid.build(2, 10.0, 100)

    with pytest.raises(dndelab.models.errors.BadExponentError):
        dndelab.numerics.inequalities.sobolev_check(grid, np.exp(-grid.centers ** 2), 2.0)


def test_profile_validation():
    grid = dndelab.numerics.grid.build(3, 10.0, 100)

    with pytest.raises(dndelab.models.errors.BadOptionError):
        dndelab.numerics.inequalities.sobolev_check(grid, -np.ones(100), 2.0)
    with pytest.raises(dndelab.models.errors.EmptyDensityError):
        dndelab.numerics.inequalities.sobolev_check(grid, np.zeros(100), 2.0)
    with pytest.raises(dndelab.models.errors.LengthMismatchError):
        dndelab.numerics.inequalities.sobolev_check(grid, np.ones(99), 2.0)


@pytest.mark.parametrize("n,p,gamma,radius,part", [(1, 2.0, 2.0, 2.0, 2), (3, 2.0, 0.75, 50.0, 1)])
def test_gn_barenblatt_attains_equality(n: int, p: float, gamma: float, radius: float, part: int):
    params = dndelab.models.params.derive(n, p, gamma)
    s = dndelab.models.params.gn_s_of_b(params)
    spec = dndelab.numerics.barenblatt.barenblatt_spec(params)
    grid = dndelab.numerics.grid.build(n, radius, 5000)

    w = np.asarray(dndelab.numerics.barenblatt.profile(spec, grid.centers)) ** (1.0 / (p * s))
    extremal = dndelab.numerics.inequalities.gn_check(grid, w, params, s)

    assert extremal.part == part
    assert extremal.ratio == pytest.approx(1.0, rel=5e-3)
    assert extremal.remainder_rhs is None

    width = dndelab.numerics.barenblatt.characteristic_radius(spec) / (3.0 if params.b > 0 else 1.0)
    gaussian = dndelab.numerics.inequalities.gn_check(grid, np.exp(-0.5 * (grid.centers / width) ** 2), params, s)
    assert gaussian.ratio < 1.0
    assert gaussian.remainder_lhs > 0.0


def test_gn_range_mismatch(params_fast_3d: dndelab.models.params.Params):
    grid = dndelab.numerics.grid.build(3, 10.0, 100)
    w = np.exp(-grid.centers ** 2)

    with pytest.raises(dndelab.models.errors.RangeMismatchError):
        dndelab.numerics.inequalities.gn_check(grid, w, params_fast_3d, 1.5)
    with pytest.raises(dndelab.models.errors.RangeMismatchError):
        critical = dndelab.models.params.derive(3, 2.0, 2.0 / 3.0)
        dndelab.numerics.inequalities.gn_check(grid, w, critical, dndelab.models.params.gn_s_of_b(critical))


def test_initial_density_has_unit_mass(params_fast_3d: dndelab.models.params.Params):
    grid = dndelab.numerics.grid.build(3, 20.0, 400)
    u0 = dndelab.numerics.inequalities.initial_density(grid, (1.0 + grid.centers ** 2) ** -1.0, params_fast_3d, 2.0)

    assert dndelab.numerics.grid.integrate(grid, u0, tail=True) == pytest.approx(1.0, rel=1e-12)


def test_gn_remainder_from_records(params_slow_1d: dndelab.models.params.Params):
    grid = dndelab.numerics.grid.build(1, 3.0, 600)
    s = dndelab.models.params.gn_s_of_b(params_slow_1d)
    t = np.array([0.0, 0.5, 1.0])
    q_b = [3.0, 2.0, 1.5]
    records = [dndelab.models.report.DiagRecord(t=t[k], dt=0.0, mass=1.0, E_b=1.0, R_b=0.0, N_b=1.0, I_b=1.0,
                                                Q_b=q_b[k], W_b=1.0) for k in range(3)]

    result = dndelab.numerics.inequalities.gn_check(grid, np.exp(-4.0 * grid.centers ** 2), params_slow_1d, s,
                                                    records=records)

    # gamma/(b+1) = 1 for (1, 2, 2)
    assert result.J_initial == pytest.approx(3.0)
    assert result.J_final == pytest.approx(1.5)
    assert result.W_integral == pytest.approx(1.0)
    assert dndelab.numerics.inequalities.remainder_identity_error(result) == pytest.approx(1.0 / 3.0)
    assert result.remainder_rhs > 0.0

    with pytest.raises(dndelab.models.errors.TooFewRecordsError):
        dndelab.numerics.inequalities.gn_check(grid, np.exp(-grid.centers ** 2), params_slow_1d, s,
                                               records=records[:1])


def test_remainder_identity_needs_records(params_slow_1d: dndelab.models.params.Params):
    grid = dndelab.numerics.grid.build(1, 3.0, 100)
    s = dndelab.models.params.gn_s_of_b(params_slow_1d)
    result = dndelab.numerics.inequalities.gn_check(grid, np.exp(-grid.centers ** 2), params_slow_1d, s)

    with pytest.raises(dndelab.models.errors.TooFewRecordsError):
        dndelab.numerics.inequalities.remainder_identity_error(result)
