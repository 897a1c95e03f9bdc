"""Energy density, total-energy quadrature, closed forms, asymptotics.

Frozen energies in _refvals were produced by direct adaptive quadrature
of the density built from the trajectory-only solver, so they pin the
whole pipeline (map -> region matrices -> bracket -> integral).
"""
import math

import numpy as np
import pytest

from vibcav import catalog
from vibcav.observables import (Observables, QuadratureError, ResolutionError,
                                coefficient_table)

from _refvals import REF, build_models


@pytest.fixture(scope="module")
def obs():
    return {k: Observables(m) for k, m in build_models().items()}


@pytest.fixture(scope="module")
def obs_static():
    return Observables(catalog.make_static())


def test_static_density_and_energy(obs_static):
    o = obs_static
    L = o.model.L
    for tau in (-1.0, 0.3, 7.9, 120.0):
        assert o.density_profile(tau) == pytest.approx(-math.pi / (48.0 * L * L),
                                                       rel=1e-14)
    for x in (0.0, 0.5, L):
        assert o.energy_density_2d(13.0, x) == pytest.approx(
            -math.pi / (24.0 * L * L), rel=1e-14)
    assert o.total_energy_quadrature(9.0) == pytest.approx(-math.pi / (24.0 * L),
                                                           rel=1e-12)


def test_initial_energy_all_families(obs):
    # before the wall moves every family sits in the vacuum of length L
    for key, o in obs.items():
        want = -math.pi / (24.0 * o.model.L)
        assert o.total_energy_quadrature(0.0) == pytest.approx(want, rel=1e-12), key


def test_frozen_energies(obs):
    for key in ("lf", "lo", "inv"):
        o = obs[key]
        T = o.model.T
        want = REF[key]["E_t"]
        assert o.total_energy_quadrature(5.5 * T) == pytest.approx(want[0], rel=1e-7)
        assert o.total_energy_quadrature(20.0 * T) == pytest.approx(want[1], rel=1e-7)


def test_frozen_energies_homographic(obs):
    o = obs["hom"]
    T = o.model.T
    want = REF["hom"]["E_t"]
    assert o.total_energy_quadrature(5.5 * T) == pytest.approx(want[0], rel=1e-8)
    # 20 T crosses condition-1e12 energy packets: certified only to 1e-3
    got = o.total_energy_quadrature(20.0 * T, rel_tol=1e-3)
    assert got == pytest.approx(want[1], rel=1e-4)


def test_closed_form_matches_quadrature(obs):
    o = obs["lo"]
    T = o.model.T
    rng = np.random.default_rng(211)
    for t in rng.uniform(0.0, 35.0 * T, 40):
        ec = o.total_energy_closed(float(t))
        eq = o.total_energy_quadrature(float(t), rel_tol=1e-10)
        assert abs(ec - eq) <= 1e-9 * max(1.0, abs(ec)), t
    assert o.total_energy_closed(20.0 * T) == pytest.approx(
        REF["lo"]["E_closed_20T"], rel=1e-12)


def test_closed_form_family_guard(obs):
    with pytest.raises(ValueError, match="closed form unavailable"):
        obs["inv"].total_energy_closed(3.0)


def test_classical_energy(obs, obs_static):
    o = obs["lo"]
    L, T = o.model.L, o.model.T
    assert o.classical_energy(0.0) == pytest.approx(math.pi / (24.0 * L), rel=1e-12)
    assert o.classical_energy(7.3 * T) == pytest.approx(REF["lo"]["Ecl_7p3T"],
                                                        rel=1e-8)
    s = obs_static
    assert s.classical_energy(5.0) == pytest.approx(math.pi / (24.0 * s.model.L),
                                                    rel=1e-12)
    with pytest.raises(ValueError, match="classical energy requires"):
        obs["lf"].classical_energy(1.0)


def test_inversion_even_regions_are_flat(obs):
    # the two-fold map is a multiple of the identity, so even regions
    # carry the undistorted density -omega1^2/(48 pi)
    o = obs["inv"]
    m = o.model
    want = -m.omega1 ** 2 / (48.0 * math.pi)
    ms = o.ev.milestones(4)
    for lo_edge, hi_edge in ((ms[1], ms[2]), (ms[3], ms[4])):
        for tau in np.linspace(lo_edge * 1.0001, hi_edge * 0.9999, 7):
            assert o.density_profile(float(tau)) == pytest.approx(want, rel=1e-12)


def test_density_2d_guard_and_symmetry(obs):
    o = obs["lf"]
    t = 3.7
    Lt = o.ev.trajectory(t)
    with pytest.raises(ValueError, match="position outside cavity"):
        o.energy_density_2d(t, Lt * 1.01)
    with pytest.raises(ValueError, match="position outside cavity"):
        o.energy_density_2d(t, -0.1)
    x = np.linspace(0.0, Lt, 50)
    direct = o.energy_density_2d(t, x)
    swapped = o.density_profile(t + x) + o.density_profile(t - x)
    assert np.array_equal(direct, swapped)


def test_plateau_level(obs):
    # late-time finite-shift density plateaus at -(2M + 2 theta/pi)^2 rho0
    o = obs["lf"]
    m = o.model
    t = 40.0 * m.T
    x = np.linspace(0.0, o.ev.trajectory(t), 2001)
    med = np.median(o.energy_density_2d(t, x)) / o.rho0
    want = -(2.0 * m.M + 2.0 * m.theta / math.pi) ** 2
    assert med == pytest.approx(want, rel=0.01)


def test_profile_container(obs):
    o = obs["inv"]
    tau = np.linspace(0.0, 12.0, 64)
    p = o.profile(tau)
    assert p.rho.shape == tau.shape
    assert p.region.shape == tau.shape
    assert p.rho0 == pytest.approx(math.pi / (24.0 * o.model.L ** 2))
    assert np.array_equal(p.rho, np.atleast_1d(o.density_profile(tau)))


def test_period_energy_integral(obs):
    o = obs["hom"]
    m = o.model
    C = (m.omega ** 2 - m.omega1 ** 2) / (48.0 * math.pi)
    assert o.period_energy_integral(0) == pytest.approx(2.0 * C, rel=1e-14)

    # closed form of Tr(H^T H)/det for the n-fold homographic map
    D2 = 4.0 * m.v0 * (2.0 * m.v1 - m.v0)
    rt = math.sqrt(m.v0 * (2.0 * m.v1 - m.v0))
    l1, l2 = -m.v1 - rt, -m.v1 + rt
    for n in (1, 3, 5):
        S = (l1 / l2) ** n + (l2 / l1) ** n
        closed = (S * (D2 + 4.0) ** 2 / (16.0 * D2)
                  - (D2 - 4.0) ** 2 / (8.0 * D2))
        ratio = o.period_energy_integral(n) / o.period_energy_integral(0)
        assert ratio == pytest.approx(closed / 2.0, rel=1e-9), n
    with pytest.raises(ValueError, match="need n >= 0"):
        o.period_energy_integral(-1)


def test_asymptotic_warning_below_validity(obs):
    with pytest.warns(UserWarning, match="unreliable"):
        obs["lf"].asymptotic_energy(5.0 * obs["lf"].model.T)


def test_asymptotic_shapes(obs, obs_static):
    T = obs["lf"].model.T
    # quadratic growth: quadrupling time scales the estimate by 16
    e1 = obs["lf"].asymptotic_energy(25.0 * T)
    e2 = obs["lf"].asymptotic_energy(100.0 * T)
    assert e2 / e1 == pytest.approx(16.0, rel=1e-12)
    # staircase: flat inside one period, steps between periods
    lo = obs["lo"]
    assert lo.asymptotic_energy(30.2 * T) == lo.asymptotic_energy(30.7 * T)
    assert lo.asymptotic_energy(31.2 * T) > lo.asymptotic_energy(30.2 * T)
    m = lo.model
    coef = (m.M * (m.M - 1) * math.pi * math.tan(m.theta) ** 2
            / (3.0 * (2 * m.M - 1) ** 2 * m.L))
    assert lo.asymptotic_energy(30.2 * T) == pytest.approx(coef * 31.0 ** 2,
                                                           rel=1e-12)
    s = obs_static
    assert s.asymptotic_energy(25.0 * s.model.T) == -math.pi / (24.0 * s.model.L)


def test_asymptotic_hyperbolic_growth(obs):
    o = obs["hom"]
    m = o.model
    T = m.T
    lam = (2.0 + math.sqrt(3.0)) / (2.0 - math.sqrt(3.0))
    ratio = o.asymptotic_energy(42.0 * T) / o.asymptotic_energy(40.0 * T)
    assert ratio == pytest.approx(lam, rel=1e-2)


def test_asymptotic_inversion_period_mean(obs):
    o = obs["inv"]
    T = o.model.T
    a = o.asymptotic_energy(30.0 * T)
    assert o.asymptotic_energy(55.5 * T) == a
    # the mean must sit inside the range the energy actually sweeps
    P = (4.0 * o.model.M + 1.0) * T
    vals = [o.total_energy_quadrature(28.0 * T + P * k / 8.0, 1e-7)
            for k in range(8)]
    assert min(vals) - 1e-9 <= a <= max(vals) + 1e-9


def test_asymptotic_parabolic_guard():
    o = Observables(catalog.make_homographic(1, 1.0, 0.5))
    with pytest.raises(ValueError, match="parabolic homographic"):
        o.asymptotic_energy(30.0 * o.model.T)


def test_coefficient_table():
    rows = coefficient_table(4)
    assert [r[0] for r in rows] == [1, 2, 3, 4]
    assert rows[0][1:] == (0.0, 1.0, 1.0)
    assert rows[1][1] == pytest.approx(8.0 / 9.0, rel=1e-15)
    assert rows[1][2] == pytest.approx(1.0 / 9.0, rel=1e-15)
    for _, q, c, s in rows:
        assert s == pytest.approx(1.0, abs=1e-14)
        assert q + c == pytest.approx(1.0, abs=1e-14)
    with pytest.raises(ValueError, match="need M_max >= 1"):
        coefficient_table(0)


def test_resolution_guard(obs):
    # at 50 T the homographic packets are narrower than the double grid
    o = obs["hom"]
    with pytest.raises(ResolutionError, match="below the double-precision grid"):
        o.total_energy_quadrature(50.0 * o.model.T, rel_tol=1e-3)


def test_quadrature_error_contract():
    err = QuadratureError("bound too large", estimate=3.5, error_bound=0.2)
    assert err.estimate == 3.5
    assert err.error_bound == 0.2
    assert isinstance(err, RuntimeError)
    assert issubclass(ResolutionError, QuadratureError)


def test_rel_tol_guard(obs):
    with pytest.raises(ValueError, match="need rel_tol >= 1e-12"):
        obs["lo"].total_energy_quadrature(1.0, rel_tol=1e-13)


def test_energy_series(obs):
    o = obs["lo"]
    T = o.model.T
    t = np.linspace(0.0, 3.0 * T, 7)
    sq = o.energy_series(t, method="quadrature", rel_tol=1e-8)
    sc = o.energy_series(t, method="closed")
    assert sq.method == "quadrature" and sq.rel_tol == 1e-8
    assert sc.rel_tol is None
    assert np.max(np.abs(sq.energy - sc.energy)) < 1e-7
    with pytest.raises(ValueError, match="unknown energy method"):
        o.energy_series(t, method="magic")
