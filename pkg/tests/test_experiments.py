import numpy as np
import pytest

from hughes1d import experiments as ex
from hughes1d.data import exit_blocks, shifted_two_blocks, two_blocks, uneven_exit_blocks, widened_block
from hughes1d.density import make_density, total_variation
from hughes1d.model import ModelParams


def rec(vals, crossings=None):
    crossings = crossings or [0] * len(vals)
    return [ex.SweepRecord(float(i), v, c) for i, (v, c) in enumerate(zip(vals, crossings))]


def test_parameter_grid():
    g = ex.parameter_grid(0, 20, 0.1)
    assert len(g) == 201 and g[0] == 0.0 and g[-1] == 20.0
    assert ex.parameter_grid(0, 0.1, 0.01)[3] == 0.03
    with pytest.raises(ValueError):
        ex.parameter_grid(0, 1, 0)


def test_detect_jumps_median_rule():
    vals = [1.0 + 0.01 * k for k in range(20)]
    vals[10:] = [v + 1.0 for v in vals[10:]]
    jumps = ex.detect_jumps(rec(vals))
    assert [j.index for j in jumps] == [9]
    assert jumps[0].size == pytest.approx(1.01)


def test_detect_jumps_is_deterministic_and_skips_failures():
    r = rec([1.0, 1.01, 1.02, 2.0, 2.01, 2.02])
    r[1] = ex.SweepRecord(1.0, None, 0, error="boom")
    assert ex.detect_jumps(r) == ex.detect_jumps(r)
    assert ex.detect_jumps([]) == []


def test_floor_hides_kinks():
    vals = [2.0, 2.0005, 2.006, 2.0061, 2.0062]
    assert ex.detect_jumps(rec(vals), floor=5e-3) == []
    assert ex.detect_jumps(rec(vals), floor=0.0)


def test_jump_crossing_coincidence():
    r = rec([1, 1, 1, 2, 2, 2], [0, 0, 0, 1, 1, 1])
    j = ex.detect_jumps(r)[0]
    assert ex.jump_has_crossing_change(r, j)
    r = rec([1, 1, 1, 2, 2, 2], [0, 0, 0, 0, 0, 1])
    assert not ex.jump_has_crossing_change(r, ex.detect_jumps(r)[0])


def test_sweep_alpha_single_point_at_one_exit():
    d = make_density([(0.9, 1.0, 0.5)])
    out = ex.sweep_alpha(d, [3.0], N=20)
    assert len(out) == 1 and out[0].t_mic is not None and out[0].error is None


def test_sweep_rejects_bad_grid():
    with pytest.raises(ValueError):
        ex.sweep_alpha(two_blocks(), [])
    with pytest.raises(ValueError):
        ex.sweep_alpha(two_blocks(), [1.0, 0.5])


def test_sweep_constant_family():
    out = ex.sweep_delta(lambda d: two_blocks(), [0.0, 0.5, 1.0], 1.0, N=50)
    assert len({r.t_mic for r in out}) == 1
    assert ex.detect_jumps(out) == []


def test_sweep_records_bad_family_member():
    out = ex.sweep_delta(shifted_two_blocks, [0.5, 1.5], 1.0, N=50)
    assert out[0].error is None and out[1].error and out[1].t_mic is None


def test_sweep_order_independent_of_jobs():
    grid = [0.0, 2.0, 4.0, 6.0]
    a = ex.records_to_csv(ex.sweep_alpha(two_blocks(), grid, N=60, jobs=1))
    b = ex.records_to_csv(ex.sweep_alpha(two_blocks(), grid, N=60, jobs=2))
    assert a == b and a.startswith("param,T_mic,crossings,evacuated\n")


def test_local_resweep_finds_jump():
    out = ex.sweep_alpha(two_blocks(), [12.65, 12.70, 12.75])
    t = [r.t_mic for r in out]
    assert max(abs(b - a) for a, b in zip(t, t[1:])) > 0.1


def test_well_separation_certificates():
    p = ModelParams(alpha=1.0)
    assert ex.well_separation(ex.simulate(exit_blocks(), p, 200, 0.004, 1.2)).ok
    assert not ex.well_separation(ex.simulate(two_blocks(), p, 200, 0.004, 2.0)).ok


def test_stability_identical_inputs_degenerate():
    r = ex.stability_ratio(exit_blocks(), exit_blocks(), 1.0, 1.0, N=100)
    assert r.degenerate and r.numerator == 0.0 and r.ratio is None


def test_stability_out_of_scope():
    r = ex.stability_ratio(two_blocks(), two_blocks(), 1.0, 1.1, N=100, t_eval=2.0)
    assert not r.in_scope and r.status == "out of theorem scope"


def test_stability_gap_bound_inputs():
    r = ex.stability_ratio(exit_blocks(), uneven_exit_blocks(), 1.0, 1.0, N=100)
    assert r.xi0_gap <= r.xi0_bound + 1e-12 and np.isfinite(r.ratio)


def test_dotxi_symmetric_is_zero():
    rep = ex.dotxi_check(exit_blocks(), 1.0, N=201)
    assert rep.in_scope and rep.max_deviation <= 1e-10


def test_dotxi_out_of_scope():
    assert not ex.dotxi_check(two_blocks(), 1.0, N=100, horizon=2.0).in_scope


def test_dotxi_refines():
    a = ex.dotxi_check(uneven_exit_blocks(), 1.0, N=250).max_deviation
    b = ex.dotxi_check(uneven_exit_blocks(), 1.0, N=500).max_deviation
    assert b < a <= 5e-2


def test_boundary_traces_zero_without_exit_mass():
    x = np.linspace(-0.5, 0.5, 11)
    assert ex.boundary_traces(x, 0.05, -1) == (0.0, 0.0)


def test_restart_trivial_cases():
    assert ex.restart_consistency(make_density([]), 1.0) == 0.0
    # immediate restart re-atomises the datum itself: identical particles
    assert ex.restart_consistency(two_blocks(), 1.0, 100, t0=0.0, t_eval=0.3) == 0.0
    with pytest.raises(ValueError):
        ex.restart_consistency(two_blocks(), 1.0, t0=0.5, t_eval=0.2)


def test_convergence_zero_datum():
    tab = ex.cross_scheme_convergence(make_density([]), 1.0, 0.3)
    assert np.all(tab.errors == 0) and tab.decreasing


def test_one_sided_block_against_exact():
    # alpha = 0, block moving right: particle and grid both close to each other
    d = make_density([(0.2, 0.6, 0.6)])
    tab = ex.cross_scheme_convergence(d, 0.0, 0.2, particles=(100, 400), dxs=(1 / 400,))
    assert tab.errors[-1, 0] < tab.errors[0, 0] < 0.05


def test_tv_series_non_increasing_when_separated():
    traj = ex.simulate(exit_blocks(), ModelParams(alpha=1.0), 200, 0.004, 1.2)
    tv = ex.total_variation_series(traj)
    assert np.all(tv <= total_variation(exit_blocks()) + 1e-6)


def test_widened_family_crossing_counts():
    p = ModelParams(alpha=12.7)
    c8 = len(ex.detect_crossings(ex.simulate(widened_block(0.08), p, 500, 0.004, 50)))
    c12 = len(ex.detect_crossings(ex.simulate(widened_block(0.12), p, 500, 0.004, 50)))
    assert c8 == 0 and c12 >= 1
