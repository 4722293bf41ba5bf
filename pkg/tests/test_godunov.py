import numpy as np
import pytest
from hypothesis import given, strategies as st

from hughes1d.data import exit_blocks, two_blocks
from hughes1d.density import make_density, total_mass
from hughes1d.godunov import (
    advance,
    entropy_residual,
    godunov_flux,
    make_grid,
    riemann_exact,
    solve,
    travelling_jump,
)
from hughes1d.model import ModelParams, flux

P = ModelParams()
WINDOW = (0.05, 0.15, 0.45, 0.75)


def composite_error(dx, t=0.2):
    """L1 error for block (0.2, 0.9, 0.6) at alpha = 0: a shock and a fan that never meet."""
    sol = solve(make_density([(0.2, 0.9, 0.6)]), P, t, dx, [t])
    snap = sol.snapshot(t)
    x = np.linspace(-1.3, 1.3, 260001)
    exact = np.array([riemann_exact(0.0, 0.6, (xx - 0.2) / t) if xx < 0.55 else riemann_exact(0.6, 0.0, (xx - 0.9) / t)
                      for xx in x])
    return float(np.sum(np.abs(snap(x) - exact)) * (x[1] - x[0]))


@given(st.floats(0, 1), st.floats(0, 1))
def test_flux_consistency_and_mirror(a, b):
    assert godunov_flux(a, a, 1) == pytest.approx(flux(a, P), abs=1e-15)
    assert godunov_flux(a, a, -1) == pytest.approx(-flux(a, P), abs=1e-15)
    assert godunov_flux(a, b, -1) == pytest.approx(-godunov_flux(b, a, 1), abs=1e-15)


@given(st.floats(0, 1), st.floats(0, 1))
def test_flux_is_min_or_max_of_f(a, b):
    grid = np.linspace(min(a, b), max(a, b), 2001)
    g = godunov_flux(a, b, 1)
    target = flux(grid, P).min() if a <= b else flux(grid, P).max()
    assert g == pytest.approx(target, abs=1e-6)


def test_flux_validation():
    with pytest.raises(ValueError):
        godunov_flux(1.2, 0.5, 1)
    with pytest.raises(ValueError):
        godunov_flux(0.2, 0.5, 0)


def test_cfl_guard():
    g = make_grid(two_blocks(), P, 0.1, 0.01)
    with pytest.raises(ValueError, match="CFL"):
        advance(g, P, 0.6 * g.dx)


def test_grid_places_exits_on_interfaces():
    g = make_grid(two_blocks(), P, 0.5, 1 / 100)
    lo, hi = g.corridor
    assert g.edges[lo] == -1.0 and g.edges[hi] == 1.0
    assert g.mass() == pytest.approx(0.81, abs=1e-14)


@pytest.mark.parametrize("alpha", [0.0, 1.0, 12.7])
def test_mass_and_maximum_principle(alpha):
    sol = solve(two_blocks(), ModelParams(alpha=alpha), 0.8, 1 / 200)
    assert np.max(np.abs(sol.mass - sol.mass[0])) <= 1e-12
    assert sol.rho_min >= 0.0 and sol.rho_max <= 1.0


def test_riemann_exact_states():
    assert riemann_exact(0.2, 0.6, 0.1) == 0.2 and riemann_exact(0.2, 0.6, 0.3) == 0.6
    assert riemann_exact(0.8, 0.2, 0.0) == pytest.approx(0.5)
    assert riemann_exact(0.8, 0.2, -1.0) == 0.8 and riemann_exact(0.8, 0.2, 1.0) == 0.2


def test_converges_to_exact_riemann_composite():
    errs = [composite_error(dx) for dx in (1 / 100, 1 / 200, 1 / 400)]
    assert errs[0] > errs[1] > errs[2]


def test_symmetric_datum_keeps_xi_at_zero():
    sol = solve(exit_blocks(), ModelParams(alpha=1.0), 0.3, 1 / 200)
    assert np.max(np.abs(sol.xi)) <= 1e-12


def rarefaction_solution(dx=1 / 400):
    return solve(make_density([(0.2, 0.6, 1.0)]), P, 0.15, dx, np.linspace(0.05, 0.15, 41))


@pytest.mark.parametrize("kappa", [0.25, 0.5, 0.75])
def test_entropy_residual_rarefaction(kappa):
    assert entropy_residual(rarefaction_solution(), kappa, WINDOW) <= 1 / 400


@pytest.mark.parametrize("kappa", [0.25, 0.5, 0.75])
def test_entropy_residual_expansion_shock_positive(kappa):
    sol = travelling_jump(0.8, 0.2, 0.6, np.linspace(0.0, 0.2, 41))
    assert entropy_residual(sol, kappa, WINDOW) > 0


def test_entropy_residual_constant_state_is_zero():
    sol = travelling_jump(0.4, 0.4, 0.6, np.linspace(0.0, 0.2, 41))
    assert abs(entropy_residual(sol, 0.3, WINDOW)) <= 1e-14


def test_entropy_residual_window_checks():
    sol = rarefaction_solution()
    with pytest.raises(ValueError, match="turning curve"):
        entropy_residual(sol, 0.5, (0.05, 0.15, -0.2, 0.3))
    with pytest.raises(ValueError, match="cover"):
        entropy_residual(sol, 0.5, (0.0, 0.15, 0.45, 0.75))
    with pytest.raises(ValueError):
        entropy_residual(sol, 1.5, WINDOW)


def test_mass_leaves_corridor_only_through_exits():
    sol = solve(exit_blocks(), ModelParams(alpha=1.0), 0.5, 1 / 200, [0.5])
    inside = total_mass(sol.snapshot(0.5).restrict())
    assert 0 < inside < total_mass(exit_blocks())
