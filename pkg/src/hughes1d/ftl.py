"""Deterministic many-particle (follow-the-leader) Hughes scheme.

Particles ``x_0 < ... < x_N`` carry mass ``m`` per gap. Particles up to the
turning index move left following their left neighbour, the others move
right following their right neighbour; the outermost particles are leaders
moving at ``v_max``.

Time stepping: the turning index is refreshed at the start of each step of
size ``dt`` and frozen during it. Inside the step the switched system is
advanced with Heun's method (SSP-RK2) on ``s`` equal substeps, where ``s`` is
the smallest integer with ``v_max rho_max dt / (s m) <= 1``; under that bound
each Euler stage keeps every gap at or above ``m / rho_max``, hence so does
their convex combination.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .density import PiecewiseConstantDensity, total_mass
from .model import ModelParams
from .turning import NO_INDEX, balance_point, gap_densities, turning_index

SPACING_TOL = 1e-9
LEADER_RULES = ("fixed", "natural")


class IntegrationError(RuntimeError):
    def __init__(self, msg: str, step: int | None = None, time: float | None = None):
        super().__init__(msg if step is None else f"{msg} (step {step}, t={time:.6g})")
        self.step = step
        self.time = time


@dataclass(frozen=True, eq=False)
class ParticleSystemState:
    time: float
    positions: np.ndarray
    m: float
    current_I0: int | None = None

    def __post_init__(self):
        x = np.asarray(self.positions, dtype=float).reshape(-1)
        if x.size < 2:
            raise ValueError("need at least two particles")
        if np.any(np.diff(x) <= 0):
            raise ValueError("particle positions must be strictly increasing")
        if not self.m > 0:
            raise ValueError("particle mass must be positive")
        object.__setattr__(self, "positions", x)

    @property
    def N(self) -> int:
        return self.positions.size - 1

    def in_corridor(self) -> int:
        x = self.positions
        return int(np.count_nonzero((x > -1.0) & (x < 1.0)))


def atomize(d: PiecewiseConstantDensity, N: int) -> ParticleSystemState:
    """Place ``N + 1`` particles so that every gap carries mass ``M / N``."""
    if N < 2:
        raise ValueError("N must be at least 2")
    M = total_mass(d)
    if not M > 0:
        raise ValueError("initial datum has zero mass")
    blocks = np.array(d.blocks(), dtype=float)
    lo, hi, val = blocks[:, 0], blocks[:, 1], blocks[:, 2]
    cum_end = np.cumsum(val * (hi - lo))
    cum_start = cum_end - val * (hi - lo)
    levels = M * np.arange(N + 1) / N
    j = np.minimum(np.searchsorted(cum_end, levels, side="left"), lo.size - 1)
    x = lo[j] + (levels - cum_start[j]) / val[j]
    x = np.minimum(np.maximum(x, lo[j]), hi[j])
    x[0], x[-1] = lo[0], hi[-1]
    return ParticleSystemState(0.0, x, M / N)


def _substeps(dt: float, m: float, p: ModelParams) -> int:
    return max(1, math.ceil(dt * p.v_max * p.rho_max / m - 1e-9))


def _velocities(x, m, i0, v_max, rho_max, natural=False):
    n = x.size - 1
    vg = v_max * (1.0 - (m / np.diff(x)) / rho_max)
    np.maximum(vg, 0.0, out=vg)
    out = np.empty_like(x)
    k = min(max(i0, 0), n - 1)
    out[1:k + 1] = -vg[:k]
    out[k + 1:n] = vg[k + 1:n]
    out[0] = -v_max
    out[n] = v_max
    if natural:
        if i0 < 0:
            out[0] = vg[0]
        elif i0 >= n:
            out[n] = -vg[n - 1]
    return out


def _check_spacing(x, m, rho_max):
    g = np.diff(x)
    bad = g < m / rho_max - SPACING_TOL
    return not bool(np.any(bad))


def rhs(state: ParticleSystemState, p: ModelParams, leaders: str = "fixed") -> np.ndarray:
    """Particle velocities for the current positions (turning index recomputed)."""
    x = state.positions
    if not _check_spacing(x, state.m, p.rho_max):
        raise ValueError("particle spacing below m / rho_max: local density exceeds rho_max")
    i0 = turning_index(x, p.alpha, state.m)
    return _velocities(x, state.m, i0, p.v_max, p.rho_max, leaders == "natural")


@dataclass(eq=False)
class Trajectory:
    times: np.ndarray
    positions: np.ndarray  # (samples, N + 1)
    i0: np.ndarray
    xi: np.ndarray
    in_corridor: np.ndarray
    m: float
    dt: float
    t_evac: float | None = None
    xi_residual: float = 0.0
    min_spacing_margin: float = field(default=np.inf)

    @property
    def N(self) -> int:
        return self.positions.shape[1] - 1

    def __len__(self):
        return self.times.size

    def state(self, k: int) -> ParticleSystemState:
        return ParticleSystemState(float(self.times[k]), self.positions[k], self.m, int(self.i0[k]))

    def final_state(self) -> ParticleSystemState:
        return self.state(len(self) - 1)

    def to_csv(self) -> str:
        buf = io.StringIO()
        cols = ["t"] + [f"x{i}" for i in range(self.N + 1)] + ["I0", "xi", "in_corridor"]
        buf.write(",".join(cols) + "\n")
        for k in range(len(self)):
            row = [format(float(self.times[k]), ".17g")]
            row += [format(float(v), ".17g") for v in self.positions[k]]
            row += [str(int(self.i0[k])), format(float(self.xi[k]), ".17g"), str(int(self.in_corridor[k]))]
            buf.write(",".join(row) + "\n")
        return buf.getvalue()


def _count_inside(x) -> int:
    return int(np.count_nonzero((x > -1.0) & (x < 1.0)))


def _exit_time(t0, x0, x1, h) -> float:
    """Time at which the linear interpolant from x0 to x1 empties (-1, 1)."""
    inside = (x0 > -1.0) & (x0 < 1.0)
    a, b = x0[inside], x1[inside]
    bound = np.where(b >= 1.0, 1.0, -1.0)
    frac = (bound - a) / (b - a)
    return t0 + h * float(np.clip(np.max(frac), 0.0, 1.0)) if frac.size else t0


def integrate(
    state: ParticleSystemState,
    p: ModelParams,
    dt: float = 0.004,
    t_end: float = 100.0,
    record_every: int = 1,
    leaders: str = "fixed",
) -> Trajectory:
    if not dt > 0:
        raise ValueError("dt must be positive")
    if not t_end > state.time:
        raise ValueError("t_end must exceed the initial time")
    if record_every < 1:
        raise ValueError("record_every must be >= 1")
    if leaders not in LEADER_RULES:
        raise ValueError(f"leaders must be one of {LEADER_RULES}")
    natural = leaders == "natural"
    alpha, v_max, rho_max, m = p.alpha, p.v_max, p.rho_max, state.m
    x = state.positions.copy()
    if not _check_spacing(x, m, rho_max):
        raise IntegrationError("initial spacing below m / rho_max", 0, state.time)

    s = _substeps(dt, m, p)
    t0 = state.time
    n_steps = max(1, math.ceil((t_end - t0) / dt - 1e-9))

    times, pos, i0s, xis, counts = [], [], [], [], []
    worst_res = 0.0
    margin = np.inf

    def record(t, xx, i0):
        nonlocal worst_res, margin
        xi, res = balance_point(xx, gap_densities(xx, m, i0), alpha)
        worst_res = max(worst_res, res)
        margin = min(margin, float(np.min(np.diff(xx))) - m / rho_max)
        times.append(t)
        pos.append(xx.copy())
        i0s.append(i0)
        xis.append(xi)
        counts.append(_count_inside(xx))

    i0 = turning_index(x, alpha, m)
    record(t0, x, i0)
    t_evac = t0 if counts[0] == 0 else None

    step = 0
    t = t0
    while t_evac is None and step < n_steps:
        h_step = dt if step < n_steps - 1 else (t_end - t0) - (n_steps - 1) * dt
        h = h_step / s
        x_prev = x
        for _ in range(s):
            k1 = _velocities(x, m, i0, v_max, rho_max, natural)
            y = x + h * k1
            k2 = _velocities(y, m, i0, v_max, rho_max, natural)
            x = 0.5 * (x + y + h * k2)
        step += 1
        t = t0 + step * dt if step < n_steps else t_end
        if not _check_spacing(x, m, rho_max):
            raise IntegrationError("ordering / maximum principle violated", step, t)
        i0 = turning_index(x, alpha, m)
        cnt = _count_inside(x)
        if cnt == 0:
            t_evac = _exit_time(t - h_step, x_prev, x, h_step)
            record(t, x, i0)
        elif step % record_every == 0 or step == n_steps:
            record(t, x, i0)

    return Trajectory(
        times=np.array(times),
        positions=np.array(pos),
        i0=np.array(i0s, dtype=int),
        xi=np.array(xis),
        in_corridor=np.array(counts, dtype=int),
        m=m,
        dt=dt,
        t_evac=t_evac,
        xi_residual=worst_res,
        min_spacing_margin=margin,
    )


def reconstruct_density(state: ParticleSystemState) -> PiecewiseConstantDensity:
    """Piecewise-constant density with the turning gap set to zero."""
    i0 = NO_INDEX if state.current_I0 is None else state.current_I0
    x = state.positions
    return PiecewiseConstantDensity(x, gap_densities(x, state.m, i0))


def evacuation_time(traj: Trajectory) -> float | None:
    """First time with no particle in (-1, 1); ``None`` if never reached."""
    if traj.t_evac is not None:
        return traj.t_evac
    empty = np.flatnonzero(traj.in_corridor == 0)
    if empty.size == 0:
        return None
    k = int(empty[0])
    if k == 0:
        return float(traj.times[0])
    t0, t1 = float(traj.times[k - 1]), float(traj.times[k])
    return _exit_time(t0, traj.positions[k - 1], traj.positions[k], t1 - t0)


@dataclass(frozen=True)
class Crossing:
    particle: int
    time: float


def detect_crossings(traj: Trajectory) -> list[Crossing]:
    """Sign changes of ``x_i - xi`` between consecutive samples, in-corridor particles only."""
    x = traj.positions
    inside = (x > -1.0) & (x < 1.0)
    side = x > traj.xi[:, None]
    flip = (side[1:] != side[:-1]) & inside[1:] & inside[:-1]
    k, i = np.nonzero(flip)
    return [Crossing(int(ii), float(traj.times[kk + 1])) for kk, ii in zip(k, i)]


def with_time(state: ParticleSystemState, t: float) -> ParticleSystemState:
    return replace(state, time=t)
