"""Parameter sweeps and empirical checks of the stability statements.

Every check works on the particle scheme (or the grid oracle) and returns a
small report dataclass; nothing here asserts, callers decide tolerances.
"""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .density import PiecewiseConstantDensity, l1_distance, total_mass, total_variation
from .ftl import Trajectory, atomize, detect_crossings, evacuation_time, integrate, reconstruct_density
from .godunov import solve as godunov_solve
from .model import ModelParams, flux
from .turning import gap_densities, xi0_gap_bound

JUMP_FACTOR = 5.0
JUMP_FLOOR = 5e-3  # jumps must also exceed this fraction of the median T_mic
TRACE_FLOOR = 1e-6
T_MAX = 50.0
ZERO_RATIO = 1e-9  # stability ratios below this are rounding noise


@dataclass
class SweepRecord:
    param: float
    t_mic: float | None
    crossings: int
    max_residual: float = 0.0
    wall_time: float = 0.0
    error: str | None = None

    @property
    def evacuated(self) -> bool:
        return self.t_mic is not None


def _run_point(job) -> SweepRecord:
    param, datum, p, N, dt, leaders, t_end = job
    t0 = time.perf_counter()
    try:
        traj = integrate(atomize(datum, N), p, dt, t_end, 1, leaders)
    except (ValueError, RuntimeError) as exc:
        return SweepRecord(param, None, 0, error=str(exc), wall_time=time.perf_counter() - t0)
    return SweepRecord(param, evacuation_time(traj), len(detect_crossings(traj)), traj.xi_residual,
                       time.perf_counter() - t0)


def _check_grid(grid) -> list[float]:
    grid = [float(g) for g in grid]
    if not grid:
        raise ValueError("empty parameter grid")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("parameter grid must be strictly increasing")
    return grid


def _run_jobs(jobs_list, jobs: int) -> list[SweepRecord]:
    if jobs <= 1 or len(jobs_list) == 1:
        return [_run_point(j) for j in jobs_list]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_run_point, jobs_list))


def sweep_alpha(datum, alpha_grid, N: int = 500, dt: float = 0.004, p: ModelParams = ModelParams(),
                jobs: int = 1, leaders: str = "fixed", t_end: float = T_MAX) -> list[SweepRecord]:
    grid = _check_grid(alpha_grid)
    return _run_jobs([(a, datum, p.with_alpha(a), N, dt, leaders, t_end) for a in grid], jobs)


def sweep_delta(family, delta_grid, alpha: float, N: int = 500, dt: float = 0.004,
                p: ModelParams = ModelParams(), jobs: int = 1, leaders: str = "fixed",
                t_end: float = T_MAX) -> list[SweepRecord]:
    """As :func:`sweep_alpha`; ``family`` maps delta to a datum and may raise for bad delta."""
    grid = _check_grid(delta_grid)
    q = p.with_alpha(alpha)
    jobs_list, bad = [], {}
    for d in grid:
        try:
            jobs_list.append((d, family(d), q, N, dt, leaders, t_end))
        except ValueError as exc:
            bad[d] = SweepRecord(d, None, 0, error=str(exc))
    done = iter(_run_jobs(jobs_list, jobs)) if jobs_list else iter(())
    return [bad[d] if d in bad else next(done) for d in grid]


def parameter_grid(start: float, stop: float, step: float) -> list[float]:
    if not step > 0:
        raise ValueError("step must be positive")
    if stop < start:
        raise ValueError("empty range")
    n = int(round((stop - start) / step))
    return [round(start + k * step, 10) for k in range(n + 1)]


@dataclass(frozen=True)
class Jump:
    index: int  # jump between records index and index + 1
    left: float
    right: float
    size: float

    @property
    def location(self) -> float:
        return 0.5 * (self.left + self.right)


def detect_jumps(records: list[SweepRecord], factor: float = JUMP_FACTOR,
                 floor: float = JUMP_FLOOR) -> list[Jump]:
    """Adjacent differences larger than ``factor`` times their median absolute value.

    ``floor`` additionally ignores differences below ``floor * median(T_mic)``;
    on short or flat sweeps the median alone flags ordinary kinks.
    """
    pairs = [(k, records[k], records[k + 1]) for k in range(len(records) - 1)
             if records[k].t_mic is not None and records[k + 1].t_mic is not None]
    if not pairs:
        return []
    diffs = np.array([abs(b.t_mic - a.t_mic) for _, a, b in pairs])
    level = float(np.median([r.t_mic for r in records if r.t_mic is not None]))
    thresh = max(factor * float(np.median(diffs)), floor * level)
    return [Jump(k, a.param, b.param, float(dv)) for (k, a, b), dv in zip(pairs, diffs) if dv > thresh]


def jump_has_crossing_change(records: list[SweepRecord], jump: Jump) -> bool:
    """Whether the crossing count changes within one grid step of ``jump``."""
    c = [r.crossings for r in records]
    lo, hi = max(0, jump.index - 1), min(len(c) - 1, jump.index + 2)
    return any(c[k] != c[k + 1] for k in range(lo, hi))


def records_to_csv(records: list[SweepRecord]) -> str:
    lines = ["param,T_mic,crossings,evacuated"]
    for r in records:
        t = "" if r.t_mic is None else repr(float(r.t_mic))
        lines.append(f"{float(r.param)!r},{t},{r.crossings},{int(r.evacuated)}")
    return "\n".join(lines) + "\n"


# -- well-separation at scheme level ---------------------------------------


@dataclass
class Separation:
    crossings: int
    min_distance: float
    required: float

    @property
    def ok(self) -> bool:
        return self.crossings == 0 and self.min_distance >= self.required


def well_separation(traj: Trajectory, rho_max: float = 1.0) -> Separation:
    """Empty crossing set and a quantitative gap between xi and the particles."""
    x = traj.positions
    inside = (x > -1.0) & (x < 1.0)
    dist = np.where(inside, np.abs(x - traj.xi[:, None]), np.inf)
    return Separation(len(detect_crossings(traj)), float(np.min(dist)) if dist.size else np.inf,
                      2.0 * traj.m / rho_max)


def simulate(datum, p: ModelParams, N: int, dt: float, t_end: float, leaders: str = "fixed") -> Trajectory:
    return integrate(atomize(datum, N), p, dt, t_end, 1, leaders)


def density_at(traj: Trajectory, t: float) -> PiecewiseConstantDensity:
    k = int(np.argmin(np.abs(traj.times - t)))
    if abs(traj.times[k] - t) > 1e-9:
        raise ValueError(f"no sample at t={t}")
    return reconstruct_density(traj.state(k))


def _density_at_or_empty(traj: Trajectory, t: float) -> PiecewiseConstantDensity:
    # trajectories stop at evacuation; afterwards the corridor is empty
    if t > traj.times[-1] + 1e-9 and traj.t_evac is not None:
        return PiecewiseConstantDensity.zero()
    return density_at(traj, t)


# -- stability ratio --------------------------------------------------------


@dataclass
class StabilityReport:
    numerator: float
    denominator: float
    ratio: float | None
    in_scope: bool
    degenerate: bool
    xi0_gap: float
    xi0_bound: float
    separation: tuple[Separation, Separation] | None = None

    @property
    def status(self) -> str:
        if self.degenerate:
            return "degenerate"
        return "ok" if self.in_scope else "out of theorem scope"


def stability_ratio(datum1, datum2, alpha1: float, alpha2: float, N: int = 500, dt: float = 0.004,
                    t_eval: float = 0.1, p: ModelParams = ModelParams()) -> StabilityReport:
    """``||rho_1(t) - rho_2(t)||_L1 / (|alpha_1 - alpha_2| + ||rho_1(0) - rho_2(0)||_L1)``."""
    gap, bound = xi0_gap_bound(datum1, datum2, alpha1, alpha2)
    den = abs(alpha1 - alpha2) + l1_distance(datum1, datum2, corridor=True)
    t1 = simulate(datum1, p.with_alpha(alpha1), N, dt, t_eval)
    t2 = simulate(datum2, p.with_alpha(alpha2), N, dt, t_eval)
    num = l1_distance(_density_at_or_empty(t1, t_eval), _density_at_or_empty(t2, t_eval), corridor=True)
    s1, s2 = well_separation(t1, p.rho_max), well_separation(t2, p.rho_max)
    degenerate = den == 0.0
    return StabilityReport(num, den, None if degenerate else num / den, s1.ok and s2.ok, degenerate,
                           gap, bound, (s1, s2))


# -- turning-point speed ----------------------------------------------------


def boundary_traces(positions, m: float, i0: int, rho_max: float = 1.0) -> tuple[float, float]:
    """Exit densities from the outermost mass-carrying gaps touching each exit layer."""
    x = np.asarray(positions, dtype=float)
    r = gap_densities(x, m, i0)
    w = 2.0 * m / rho_max
    left = np.flatnonzero((r > TRACE_FLOOR) & (x[:-1] < -1.0 + w) & (x[1:] > -1.0))
    right = np.flatnonzero((r > TRACE_FLOOR) & (x[1:] > 1.0 - w) & (x[:-1] < 1.0))
    rl = min(float(r[left[0]]), rho_max) if left.size else 0.0
    rr = min(float(r[right[-1]]), rho_max) if right.size else 0.0
    return rl, rr


@dataclass
class DotXiReport:
    max_deviation: float
    samples_used: int
    samples_skipped: int
    in_scope: bool
    separation: Separation | None = None


def dotxi_check(datum, alpha: float, N: int = 500, dt: float = 0.004, horizon: float = 1.2,
                p: ModelParams = ModelParams()) -> DotXiReport:
    """Central differences of the discrete turning point against the trace formula.

    Samples whose stencil contains a switch (turning index, or an exit trace
    turning on/off) are skipped: the turning-point speed jumps there.
    """
    q = p.with_alpha(alpha)
    traj = simulate(datum, q, N, dt, horizon)
    sep = well_separation(traj, p.rho_max)
    if not sep.ok:
        return DotXiReport(float("nan"), 0, len(traj), False, sep)
    tr = np.array([boundary_traces(traj.positions[k], traj.m, int(traj.i0[k]), p.rho_max)
                   for k in range(len(traj))])
    if len(traj) < 3:
        return DotXiReport(0.0, 0, len(traj), True, sep)
    fd = (traj.xi[2:] - traj.xi[:-2]) / (traj.times[2:] - traj.times[:-2])
    formula = 0.5 * alpha * (flux(tr[1:-1, 0], p) - flux(tr[1:-1, 1], p))
    key = np.stack([traj.i0, tr[:, 0] > 0, tr[:, 1] > 0], axis=1)
    ok = np.all(key[2:] == key[1:-1], axis=1) & np.all(key[:-2] == key[1:-1], axis=1)
    dev = np.abs(fd - formula)[ok]
    return DotXiReport(float(dev.max()) if dev.size else 0.0, int(ok.sum()), int((~ok).sum()), True, sep)


# -- TV along a run ---------------------------------------------------------


def total_variation_series(traj: Trajectory) -> np.ndarray:
    return np.array([total_variation(reconstruct_density(traj.state(k))) for k in range(len(traj))])


# -- restart ----------------------------------------------------------------


def restart_consistency(datum, alpha: float, N: int = 500, dt: float = 0.004, t0: float = 0.2,
                        t_eval: float = 0.5, p: ModelParams = ModelParams()) -> float:
    """L1 gap at ``t_eval`` between a straight run and a stop/restrict/re-atomise/restart run."""
    if not 0.0 <= t0 < t_eval:
        raise ValueError("need 0 <= t0 < t_eval")
    if total_mass(datum) == 0.0:
        return 0.0
    q = p.with_alpha(alpha)
    full = simulate(datum, q, N, dt, t_eval)
    ref = _density_at_or_empty(full, t_eval).restrict()
    if t0 == 0.0:
        mid = datum
    else:
        first = simulate(datum, q, N, dt, t0)
        mid = _density_at_or_empty(first, t0).restrict()
    if total_mass(mid) == 0.0:
        return l1_distance(ref, PiecewiseConstantDensity.zero())
    state = atomize(mid, N)
    state = type(state)(t0, state.positions, state.m)
    second = integrate(state, q, dt, t_eval, 1)
    return l1_distance(ref, _density_at_or_empty(second, t_eval).restrict())


# -- particles vs grid ------------------------------------------------------


@dataclass
class ConvergenceTable:
    particles: list[int]
    dxs: list[float]
    errors: np.ndarray  # (len(particles), len(dxs))
    decreasing: bool = field(default=False)

    def rows(self) -> list[dict]:
        return [{"N": n, "dx": dx, "l1": float(self.errors[i, j])}
                for i, n in enumerate(self.particles) for j, dx in enumerate(self.dxs)]


def cross_scheme_convergence(datum, alpha: float, t_eval: float, particles=(125, 250, 500),
                             dxs=(1 / 800,), dt: float = 0.004, p: ModelParams = ModelParams()) -> ConvergenceTable:
    q = p.with_alpha(alpha)
    errs = np.zeros((len(particles), len(dxs)))
    if total_mass(datum) == 0.0:
        return ConvergenceTable(list(particles), list(dxs), errs, True)
    grids = [godunov_solve(datum, q, t_eval, dx, [t_eval]).snapshot(t_eval) for dx in dxs]
    for i, n in enumerate(particles):
        rho = _density_at_or_empty(simulate(datum, q, n, dt, t_eval), t_eval)
        for j, g in enumerate(grids):
            errs[i, j] = l1_distance(rho, g, corridor=True)
    col = errs[:, -1]
    return ConvergenceTable(list(particles), list(dxs), errs, bool(np.all(np.diff(col) < 0)))


def report_dict(obj) -> dict:
    d = asdict(obj)
    return {k: (v.tolist() if isinstance(v, np.ndarray) else v) for k, v in d.items()}
