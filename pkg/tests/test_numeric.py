import math

import numpy as np
import pytest

from qlmwkb.errors import FitQualityError, PathError, SingularPointError, UsageError
from qlmwkb.potentials import make_potential
from qlmwkb.riccati_numeric import (
    IterateHistory,
    SampledFunction,
    SolveConfig,
    ZerothIterate,
    asymptotic_residue_fit,
    first_iterate_closed_form,
    k_squared,
    qlm_step_numeric,
    solve_qlm,
)

HO = make_potential("ho1d")


@pytest.fixture(scope="module")
def ho_wide():
    return solve_qlm(HO, 2.5, 6, SolveConfig(imag_shift=1.0))


@pytest.fixture(scope="module")
def ho_default():
    return solve_qlm(HO, 2.5, 4, SolveConfig())


def test_k_squared_examples():
    assert k_squared(HO, 0.5, 0.0) == 0.5
    coul = make_potential("coulomb", Z=1, l=0)
    assert abs(k_squared(coul, -0.5, 2 * math.sqrt(2))) < 1e-15
    # turning point of the oscillator at E = 2.5 sits at z = sqrt(10)
    assert abs(k_squared(HO, 2.5, math.sqrt(10))) < 1e-14


def test_k_squared_singular():
    with pytest.raises(SingularPointError):
        k_squared(make_potential("coulomb"), -0.5, 0.0)
    with pytest.raises(SingularPointError):
        k_squared(make_potential("ho3d", l=1), 1.0, np.array([0.0, 1.0]))


def test_solve_config_validation():
    with pytest.raises(UsageError):
        SolveConfig(z_min=5, z_max=1)
    with pytest.raises(UsageError):
        SolveConfig(grid_points=3)
    with pytest.raises(UsageError):
        SolveConfig(ode_rel_tol=0.1)
    with pytest.raises(UsageError):
        SolveConfig(imag_shift=-1)
    with pytest.raises(UsageError):
        solve_qlm(HO, 2.5, 0)
    with pytest.raises(UsageError):
        SolveConfig().resolved(make_potential("cotangent"), 5.0)


def test_default_path():
    cfg = SolveConfig().resolved(HO, 2.5)
    assert cfg.z_max == 40.0 and cfg.z_min == 0.0
    hul = SolveConfig().resolved(make_potential("hulthen", lam=2), -1.125)
    assert hul.z_max <= 40.0
    assert abs(make_potential("hulthen", lam=2).V(hul.z_max / math.sqrt(2))) <= 1.1e-8 * 1.125


def test_path_error_on_real_axis():
    with pytest.raises(PathError):
        ZerothIterate(HO, 2.5, SolveConfig(imag_shift=0.0, z_min=0.0, z_max=10.0, grid_points=1001))


def test_zeroth_branch_decays_outward():
    y0 = ZerothIterate(HO, 2.5, SolveConfig().resolved(HO, 2.5))
    assert y0.w_grid[-1].real > 0
    z = 30.0
    assert y0(np.array([z]))[0] == pytest.approx(-z / 2, rel=1e-2)


def test_boundary_invariant(ho_default):
    for y in ho_default.iterates:
        z_max = y.path[-1]
        assert y.values[-1] == -np.sqrt(-k_squared(HO, 2.5, z_max))


def test_closed_form_boundary_and_tail():
    cfg = SolveConfig()
    y1 = first_iterate_closed_form(HO, 2.5, cfg)
    assert y1.values[-1] == -np.sqrt(-k_squared(HO, 2.5, y1.path[-1]))
    z = y1.path
    window = (y1.grid > 15) & (y1.grid < 25)
    approx = -z / 2 + 2 / z
    assert np.max(np.abs(y1.values[window] - approx[window])) < 0.02


@pytest.mark.parametrize("shift", [0.05, 1.0])
def test_closed_form_matches_ode(shift):
    cfg = SolveConfig(imag_shift=shift)
    closed = first_iterate_closed_form(HO, 2.5, cfg)
    ode = solve_qlm(HO, 2.5, 1, cfg).iterates[1]
    assert closed.sup_diff(ode) <= 1e-6


def test_fixed_point(ho_wide):
    cfg = SolveConfig(imag_shift=1.0)
    converged = ho_wide.iterates[-1]
    again = qlm_step_numeric(converged, HO, 2.5, cfg)
    assert again.sup_diff(converged) < 10 * cfg.ode_rel_tol


def test_quadratic_convergence_oscillator(ho_wide):
    d = ho_wide.sup_diffs
    assert all(b < a for a, b in zip(d[:4], d[1:4]))
    # below ~1e-10 the differences sit at the ODE tolerance floor
    orders = ho_wide.convergence_orders(floor=1e-10)
    assert len(orders) >= 2 and min(orders) >= 1.8


def test_default_shift_oscillator_reaches_floor(ho_default):
    more = solve_qlm(HO, 2.5, 8, SolveConfig())
    assert more.sup_diffs[-1] < 1e-10
    assert min(more.convergence_orders(floor=1e-10)) >= 1.8


def test_modified_pt_convergence():
    p = make_potential("modified_pt", V0=6, a=1)
    hist = solve_qlm(p, -4.5, 5, SolveConfig())
    assert hist.sup_diffs[4] < 1e-6
    assert min(hist.convergence_orders(floor=1e-10)) >= 1.8


@pytest.mark.parametrize("E", [0.5, 1.3, 2.5, 3.7, 5.0])
def test_oscillator_residue_sweep(E):
    hist = solve_qlm(HO, E, 4, SolveConfig())
    assert asymptotic_residue_fit(hist.iterates[4], "oscillator") == pytest.approx(E - 0.5, abs=1e-4)


@pytest.mark.parametrize("E", [-0.5, -0.3, -0.125, -0.8, -0.2])
def test_coulomb_residue_sweep(E):
    p = make_potential("coulomb", Z=1)
    cfg = SolveConfig(z_max=120.0, grid_points=4001)
    hist = solve_qlm(p, E, 4, cfg)
    alpha = asymptotic_residue_fit(hist.iterates[4], "coulomb", energy=E)
    assert alpha == pytest.approx(1 / math.sqrt(2 * abs(E)), abs=1e-4)


def test_spherical_oscillator_inner_pole():
    p = make_potential("ho3d", l=1)
    hist = solve_qlm(p, 2.5, 6, SolveConfig(imag_shift=1.0))
    a = asymptotic_residue_fit(hist.iterates[-1], "none", side="inner", span=(0.05, 0.55))
    assert a == pytest.approx(2.0, abs=1e-3)


def test_residue_fit_synthetic():
    grid = np.linspace(1.0, 40.0, 801)
    y = SampledFunction(grid, -grid / 2 + 3 / grid)
    assert asymptotic_residue_fit(y, "oscillator", span=(10.0, 40.0)) == pytest.approx(3.0, abs=1e-12)


def test_residue_fit_rejects_noise():
    grid = np.linspace(1.0, 40.0, 801)
    rng = np.random.default_rng(0)
    y = SampledFunction(grid, -grid / 2 + rng.normal(size=grid.size))
    with pytest.raises(FitQualityError):
        asymptotic_residue_fit(y, "none", span=(10.0, 40.0))


def test_sampled_function_validation():
    with pytest.raises(UsageError):
        SampledFunction([0.0, 1.0], [1.0])
    with pytest.raises(UsageError):
        SampledFunction([1.0, 0.0], [1.0, 2.0])
    a = SampledFunction([0.0, 1.0], [1.0, 2.0])
    with pytest.raises(UsageError):
        a.sup_diff(SampledFunction([0.0, 2.0], [1.0, 2.0]))


def test_history_validation():
    with pytest.raises(UsageError):
        IterateHistory([1, 2], [])
    h = IterateHistory([0, 0, 0, 0], [0.5, 0.05, 0.0025])
    assert h.convergence_orders() == [pytest.approx(2.0)]
