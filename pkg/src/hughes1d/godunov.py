"""Finite-volume oracle for the open-end Hughes problem on a padded grid.

The grid covers ``[-1 - v_max T, 1 + v_max T]`` (plus two guard cells) with
``+-1`` on cell interfaces. Each step recomputes the turning point from the
cell averages, closes the interface nearest to it (zero flux from both
sides) and uses Godunov fluxes for ``-f`` on its left and ``+f`` on its
right. The closure is only trusted for well-separated solutions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .density import PiecewiseConstantDensity, make_density
from .model import ModelParams
from .turning import balance_point

CFL = 0.4
CFL_MAX = 0.5


def godunov_flux_arrays(a, b, direction, p: ModelParams):
    """Vectorised Godunov flux for ``direction * f`` between states ``a | b``."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    rc = 0.5 * p.rho_max
    k = p.v_max / p.rho_max

    def f(r):
        return k * r * (p.rho_max - r)

    def demand(r):
        return f(np.minimum(r, rc))

    def supply(r):
        return f(np.maximum(r, rc))

    plus = np.minimum(demand(a), supply(b))
    minus = -np.minimum(demand(b), supply(a))  # mirrored states
    return np.where(np.asarray(direction) > 0, plus, minus)


def godunov_flux(rho_left: float, rho_right: float, direction: int, p: ModelParams = ModelParams()) -> float:
    for r in (rho_left, rho_right):
        if not (0.0 <= r <= p.rho_max):
            raise ValueError(f"density {r} outside [0, {p.rho_max}]")
    if direction not in (1, -1):
        raise ValueError("direction must be +1 or -1")
    return float(godunov_flux_arrays(rho_left, rho_right, direction, p))


@dataclass(frozen=True, eq=False)
class GodunovGridState:
    edges: np.ndarray
    rho: np.ndarray
    time: float
    xi: float
    turning_interface: int
    corridor: tuple[int, int]  # cell index range [lo, hi) covering (-1, 1)
    outflow: float = 0.0  # mass that left through the ends of the padded grid

    @property
    def x_left(self) -> float:
        return float(self.edges[0])

    @property
    def x_right(self) -> float:
        return float(self.edges[-1])

    @property
    def dx(self) -> float:
        return float(self.edges[1] - self.edges[0])

    def mass(self) -> float:
        return float(np.sum(self.rho * np.diff(self.edges)))

    def density(self) -> PiecewiseConstantDensity:
        return PiecewiseConstantDensity(self.edges, self.rho)

    def exit_traces(self) -> tuple[float, float]:
        lo, hi = self.corridor
        return float(self.rho[lo]), float(self.rho[hi - 1])


def _nearest_interface(edges: np.ndarray, xi: float) -> int:
    j = int(np.searchsorted(edges, xi))
    if j > 0 and (j == edges.size or xi - edges[j - 1] <= edges[j] - xi):
        j -= 1
    return j


def make_grid(d: PiecewiseConstantDensity, p: ModelParams, t_end: float, dx: float) -> GodunovGridState:
    if not dx > 0:
        raise ValueError("dx must be positive")
    n_c = max(2, round(2.0 / dx))
    pad = math.ceil(p.v_max * t_end * n_c / 2.0 - 1e-9) + 2
    k = np.arange(-pad, n_c + pad + 1)
    edges = (2.0 * k - n_c) / n_c
    rho = np.diff(d.cumulative_mass(edges)) / np.diff(edges)
    rho = np.clip(rho, 0.0, p.rho_max)
    xi, _ = balance_point(edges, rho, p.alpha)
    return GodunovGridState(edges, rho, 0.0, xi, _nearest_interface(edges, xi), (pad, pad + n_c))


def advance(grid: GodunovGridState, p: ModelParams, dt: float) -> GodunovGridState:
    dx = grid.dx
    if not (0 < dt <= CFL_MAX * dx / p.v_max * (1 + 1e-12)):
        raise ValueError(f"time step {dt} violates the CFL bound {CFL_MAX} dx / v_max")
    edges, rho = grid.edges, grid.rho
    xi, _ = balance_point(edges, rho, p.alpha)
    jt = _nearest_interface(edges, xi)
    a = np.concatenate((rho[:1], rho))
    b = np.concatenate((rho, rho[-1:]))
    direction = np.where(edges > xi, 1, -1)
    F = godunov_flux_arrays(a, b, direction, p)
    F[jt] = 0.0
    new = rho - (dt / dx) * np.diff(F)
    out = grid.outflow + dt * (F[-1] - F[0])
    return replace(grid, rho=new, time=grid.time + dt, xi=xi, turning_interface=jt, outflow=out)


@dataclass
class GodunovSolution:
    times: list[float]
    snapshots: list[PiecewiseConstantDensity]
    xi_times: np.ndarray
    xi: np.ndarray
    mass: np.ndarray = field(default_factory=lambda: np.empty(0))  # grid mass plus outflow
    rho_min: float = 0.0
    rho_max: float = 0.0
    traces: np.ndarray = field(default_factory=lambda: np.empty((0, 2)))
    dx: float = 0.0

    def snapshot(self, t: float) -> PiecewiseConstantDensity:
        k = int(np.argmin(np.abs(np.asarray(self.times) - t)))
        return self.snapshots[k]


def solve(d: PiecewiseConstantDensity, p: ModelParams, t_end: float, dx: float, snapshot_times=()) -> GodunovSolution:
    """Run the scheme with ``dt = 0.4 dx / v_max`` and snapshots at the given times."""
    grid = make_grid(d, p, t_end, dx)
    dt = CFL * grid.dx / p.v_max
    targets = sorted(set(float(t) for t in snapshot_times if 0.0 <= t <= t_end))
    snaps_t, snaps = [], []
    xi_t, xi_v, mass, traces = [0.0], [grid.xi], [grid.mass()], [grid.exit_traces()]
    lo, hi = float(np.min(grid.rho)), float(np.max(grid.rho))

    def take():
        snaps_t.append(grid.time)
        snaps.append(grid.density())

    ti = 0
    while ti < len(targets) and targets[ti] <= 0.0:
        take()
        ti += 1
    while grid.time < t_end - 1e-12:
        h = min(dt, t_end - grid.time)
        if ti < len(targets):
            h = min(h, targets[ti] - grid.time)
        grid = advance(grid, p, h)
        xi_t.append(grid.time)
        xi_v.append(grid.xi)
        mass.append(grid.mass() + grid.outflow)
        traces.append(grid.exit_traces())
        lo = min(lo, float(np.min(grid.rho)))
        hi = max(hi, float(np.max(grid.rho)))
        while ti < len(targets) and targets[ti] <= grid.time + 1e-12:
            take()
            ti += 1
    return GodunovSolution(snaps_t, snaps, np.array(xi_t), np.array(xi_v), np.array(mass), lo, hi,
                           np.array(traces), grid.dx)


def riemann_exact(rho_left: float, rho_right: float, slope: float, p: ModelParams = ModelParams()) -> float:
    """Entropy solution of ``rho_t + f(rho)_x = 0`` at ``x / t = slope``."""
    k = p.v_max / p.rho_max
    if rho_left == rho_right:
        return float(rho_left)
    if rho_left < rho_right:
        s = k * (p.rho_max - rho_left - rho_right)
        return float(rho_left if slope < s else rho_right)
    # rarefaction: f'(r) = v_max (1 - 2 r / rho_max)
    cl = p.v_max * (1.0 - 2.0 * rho_left / p.rho_max)
    cr = p.v_max * (1.0 - 2.0 * rho_right / p.rho_max)
    if slope <= cl:
        return float(rho_left)
    if slope >= cr:
        return float(rho_right)
    return 0.5 * p.rho_max * (1.0 - slope / p.v_max)


def travelling_jump(rho_left: float, rho_right: float, x0: float, times, p: ModelParams = ModelParams(),
                    xi: float = 0.0) -> GodunovSolution:
    """A single jump moving at its Rankine-Hugoniot speed, packaged as a solution.

    With ``rho_left > rho_right`` this is an expansion shock: a weak solution
    that violates the entropy condition. Used as a negative control.
    """
    k = p.v_max / p.rho_max
    speed = k * (p.rho_max - rho_left - rho_right) if rho_left != rho_right else 0.0
    times = [float(t) for t in times]
    snaps = []
    for t in times:
        c = x0 + speed * t
        snaps.append(make_density([(c - 2.0, c, rho_left), (c, c + 2.0, rho_right)], p.rho_max))
    tt = np.array(times)
    return GodunovSolution(times, snaps, tt, np.full_like(tt, xi))


def _bump(s):
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    inside = np.abs(s) < 1.0
    si = s[inside]
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - si * si))
    return out


def entropy_residual(sol: GodunovSolution, kappa: float, window, p: ModelParams = ModelParams(), nx: int = 400) -> float:
    """Discrete ``-iint(|rho - k| phi_t + Phi phi_x)`` over a window off the turning curve.

    ``window = (t0, t1, x0, x1)``; ``phi`` is a smooth bump supported in it.
    Both terms are summed in telescoping (summation-by-parts) form, so
    constant states give zero up to rounding. Entropy-admissible data give
    values ``<= O(dx)``; a non-admissible jump gives a positive value.
    """
    t0, t1, x0, x1 = map(float, window)
    if not (t1 > t0 and x1 > x0):
        raise ValueError("empty window")
    if not 0.0 <= kappa <= p.rho_max:
        raise ValueError("kappa outside [0, rho_max]")
    sel = (sol.xi_times >= t0 - 1e-12) & (sol.xi_times <= t1 + 1e-12)
    xis = sol.xi[sel] if np.any(sel) else np.interp([t0, t1], sol.xi_times, sol.xi)
    if np.all(xis < x0):
        sgn = 1.0
    elif np.all(xis > x1):
        sgn = -1.0
    else:
        raise ValueError("window intersects the turning curve")
    times = np.asarray(sol.times, dtype=float)
    use = np.flatnonzero((times >= t0 - 1e-12) & (times <= t1 + 1e-12))
    if use.size < 3 or times[use[0]] > t0 + 1e-9 or times[use[-1]] < t1 - 1e-9:
        raise ValueError("snapshots must cover the window in time, endpoints included")
    tau = times[use]
    h = (x1 - x0) / nx
    y = x0 + h * (np.arange(nx) + 0.5)
    tc, ht = 0.5 * (t0 + t1), 0.5 * (t1 - t0)
    xc, hx = 0.5 * (x0 + x1), 0.5 * (x1 - x0)
    bx_c = _bump((y - xc) / hx)
    bx_e = _bump((x0 + h * np.arange(nx + 1) - xc) / hx)
    bt = _bump((tau - tc) / ht)
    kf = p.v_max / p.rho_max * kappa * (p.rho_max - kappa)
    eta, Phi = [], []
    for k in use:
        r = sol.snapshots[k](y)
        fr = p.v_max / p.rho_max * r * (p.rho_max - r)
        eta.append(np.abs(r - kappa))
        Phi.append(sgn * np.sign(r - kappa) * (fr - kf))
    eta = np.array(eta)
    Phi = np.array(Phi)
    # time term: sum_k (eta_k + eta_{k+1})/2 * (phi_{k+1} - phi_k) * h
    eta_mid = 0.5 * (eta[1:] + eta[:-1])
    term_t = np.sum(eta_mid * np.diff(bt)[:, None] * bx_c[None, :]) * h
    # space term: sum_k w_k sum_j Phi_kj (phi(y_j + h/2) - phi(y_j - h/2))
    w = np.zeros_like(tau)
    w[1:] += 0.5 * np.diff(tau)
    w[:-1] += 0.5 * np.diff(tau)
    term_x = np.sum((w * bt)[:, None] * Phi * np.diff(bx_e)[None, :])
    return float(-(term_t + term_x))
