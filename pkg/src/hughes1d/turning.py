"""Turning point of the cost balance, and the discrete turning index.

For the affine cost ``c = 1 + alpha rho`` the accumulated cost
``G(x) = (x + 1) + alpha * mass(-1, x)`` is piecewise linear and strictly
increasing on the corridor, so the balance ``G(xi) = G(1) / 2`` is solved by
one linear solve inside the bracketing segment.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .density import PiecewiseConstantDensity, cumulative_cost, weighted_l1_distance
from .model import ModelParams, flux

NO_INDEX = -1


@dataclass(frozen=True)
class TurningState:
    xi: float
    index: int | None
    residual: float


def _cost_knots(breaks: np.ndarray, values: np.ndarray, alpha: float):
    """Knots in [-1, 1] and the accumulated cost at each knot."""
    if values.size == 0:
        knots = np.array([-1.0, 1.0])
        seg = np.zeros(1)
    else:
        inner = breaks[(breaks > -1.0) & (breaks < 1.0)]
        knots = np.concatenate(([-1.0], inner, [1.0]))
        mid = 0.5 * (knots[:-1] + knots[1:])
        k = np.searchsorted(breaks, mid, side="right") - 1
        ok = (k >= 0) & (k < values.size)
        seg = np.where(ok, values[np.clip(k, 0, values.size - 1)], 0.0)
    slope = 1.0 + alpha * seg
    cost = np.concatenate(([0.0], np.cumsum(slope * np.diff(knots))))
    return knots, slope, cost


def balance_point(breaks: np.ndarray, values: np.ndarray, alpha: float) -> tuple[float, float]:
    """Solve the cost balance for a profile given as raw arrays.

    Returns ``(xi, residual)``. ``breaks``/``values`` follow the
    :class:`PiecewiseConstantDensity` layout but need not be canonical.
    """
    if alpha == 0.0:
        return 0.0, 0.0
    knots, slope, cost = _cost_knots(breaks, values, alpha)
    target = 0.5 * cost[-1]
    j = int(np.searchsorted(cost, target, side="left"))
    j = min(max(j, 1), knots.size - 1)
    xi = knots[j - 1] + (target - cost[j - 1]) / slope[j - 1]
    xi = float(min(max(xi, knots[j - 1]), knots[j]))
    residual = abs(float(np.interp(xi, knots, cost)) - target)
    return xi, residual


def turning_point(d: PiecewiseConstantDensity, alpha: float) -> TurningState:
    if alpha < 0:
        raise ValueError("alpha must be non-negative")
    xi, res = balance_point(d.breakpoints, d.values, float(alpha))
    return TurningState(xi, None, res)


def turning_point_bisect(d: PiecewiseConstantDensity, alpha: float, tol: float = 1e-14) -> float:
    """Independent bisection on ``cumulative_cost`` (test oracle)."""
    total = cumulative_cost(d, alpha, 1.0)
    lo, hi = -1.0, 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if cumulative_cost(d, alpha, mid) < 0.5 * total:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def turning_index(positions, alpha: float, m: float) -> int:
    """Largest ``i`` with ``2 x_i / (alpha m) < #right_i - #left_i``.

    The counts only include particles strictly inside (-1, 1). Returns
    ``NO_INDEX`` (-1) when no index qualifies. For ``alpha == 0`` the
    nearest-exit rule ``max{i : x_i < 0}`` is used.
    """
    x = np.asarray(positions, dtype=float)
    if x.size > 1 and np.any(np.diff(x) <= 0):
        raise ValueError("particle positions must be strictly increasing")
    if m <= 0:
        raise ValueError("particle mass must be positive")
    scale = 2.0 / (alpha * m) if alpha * m > 0.0 else np.inf
    if not np.isfinite(scale):  # alpha == 0, or so small that alpha * m underflows
        return int(np.searchsorted(x, 0.0, side="left")) - 1
    i = np.arange(x.size)
    n_lt1 = int(np.searchsorted(x, 1.0, side="left"))  # x_j < 1
    n_lem1 = int(np.searchsorted(x, -1.0, side="right"))  # x_j <= -1
    right = np.maximum(n_lt1 - np.maximum(i + 1, n_lem1), 0)
    left = np.maximum(np.minimum(i, n_lt1) - n_lem1, 0)
    ok = np.flatnonzero(scale * x < (right - left))
    return int(ok[-1]) if ok.size else NO_INDEX


def gap_densities(x: np.ndarray, m: float, i0: int) -> np.ndarray:
    """Local densities ``m / (x_{i+1} - x_i)`` with the turning gap zeroed."""
    r = m / np.diff(x)
    if 0 <= i0 < r.size:
        r[i0] = 0.0
    return r


def discrete_turning_point(state, alpha: float) -> TurningState:
    x = np.asarray(state.positions, dtype=float)
    i0 = turning_index(x, alpha, state.m)
    xi, res = balance_point(x, gap_densities(x, state.m, i0), float(alpha))
    return TurningState(xi, i0, res)


def xi_dot_formula(alpha: float, rho_left: float, rho_right: float, p: ModelParams = ModelParams()) -> float:
    """Speed of the turning point from the exit traces of a well-separated solution."""
    return 0.5 * alpha * (flux(rho_left, p) - flux(rho_right, p))


def xi0_gap_bound(d1, d2, alpha1: float, alpha2: float) -> tuple[float, float]:
    """``(2 |xi_2(0) - xi_1(0)|, integral of |alpha_2 d2 - alpha_1 d1|)`` over the corridor."""
    xi1 = turning_point(d1, alpha1).xi
    xi2 = turning_point(d2, alpha2).xi
    return 2.0 * abs(xi2 - xi1), weighted_l1_distance(d1, d2, alpha1, alpha2, corridor=True)
