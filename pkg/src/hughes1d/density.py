"""Piecewise-constant densities on the real line.

A profile is stored as strictly increasing ``breakpoints`` and one value per
interval ``[b_k, b_{k+1})``; it is zero outside ``[b_0, b_K]``. All integral
functionals below are exact on the merged partition (no quadrature).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

CORRIDOR = (-1.0, 1.0)


@dataclass(frozen=True, eq=False)
class PiecewiseConstantDensity:
    breakpoints: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.breakpoints, dtype=float).reshape(-1)
        v = np.asarray(self.values, dtype=float).reshape(-1)
        if b.size == 0 and v.size == 0:
            pass
        elif b.size != v.size + 1:
            raise ValueError("need exactly one more breakpoint than values")
        elif np.any(np.diff(b) <= 0):
            raise ValueError("breakpoints must be strictly increasing")
        if np.any(~np.isfinite(v)) or np.any(v < 0):
            raise ValueError("densities must be finite and non-negative")
        b, v = _canonical(b, v)
        b.flags.writeable = False
        v.flags.writeable = False
        object.__setattr__(self, "breakpoints", b)
        object.__setattr__(self, "values", v)

    @classmethod
    def zero(cls) -> "PiecewiseConstantDensity":
        return cls(np.empty(0), np.empty(0))

    @property
    def is_zero(self) -> bool:
        return self.values.size == 0

    @property
    def support(self) -> tuple[float, float] | None:
        if self.is_zero:
            return None
        return float(self.breakpoints[0]), float(self.breakpoints[-1])

    def blocks(self) -> list[tuple[float, float, float]]:
        """Non-zero runs as ``(left, right, value)`` triples."""
        b, v = self.breakpoints, self.values
        return [(float(b[k]), float(b[k + 1]), float(v[k])) for k in range(v.size) if v[k] != 0.0]

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.is_zero:
            return np.zeros_like(x)
        k = np.searchsorted(self.breakpoints, x, side="right") - 1
        inside = (k >= 0) & (k < self.values.size)
        out = np.zeros_like(x)
        out[inside] = self.values[k[inside]]
        return out

    def cumulative_mass(self, x):
        """Mass on ``(-inf, x)``; continuous and piecewise linear."""
        if self.is_zero:
            return np.zeros_like(np.asarray(x, dtype=float))
        cum = np.concatenate(([0.0], np.cumsum(self.values * np.diff(self.breakpoints))))
        return np.interp(x, self.breakpoints, cum)

    def mass_between(self, a: float, b: float) -> float:
        return float(self.cumulative_mass(b) - self.cumulative_mass(a))

    def restrict(self, a: float = CORRIDOR[0], b: float = CORRIDOR[1]) -> "PiecewiseConstantDensity":
        """The profile multiplied by the indicator of ``(a, b)``."""
        if self.is_zero:
            return self
        br = self.breakpoints
        keep = br[(br > a) & (br < b)]
        knots = np.concatenate(([a], keep, [b]))
        vals = self(0.5 * (knots[:-1] + knots[1:]))
        return PiecewiseConstantDensity(knots, vals)

    def __eq__(self, other):
        if not isinstance(other, PiecewiseConstantDensity):
            return NotImplemented
        return np.array_equal(self.breakpoints, other.breakpoints) and np.array_equal(self.values, other.values)

    def __repr__(self):
        return f"PiecewiseConstantDensity({self.blocks()!r})"


def _canonical(b: np.ndarray, v: np.ndarray):
    if v.size == 0:
        return np.empty(0), np.empty(0)
    # merge equal neighbours
    keep = np.concatenate(([True], v[1:] != v[:-1]))
    starts = np.flatnonzero(keep)
    v = v[starts]
    b = np.concatenate((b[starts], b[-1:]))
    # trim zero runs at both ends
    nz = np.flatnonzero(v != 0.0)
    if nz.size == 0:
        return np.empty(0), np.empty(0)
    lo, hi = nz[0], nz[-1]
    return b[lo:hi + 2].copy(), v[lo:hi + 1].copy()


def make_density(blocks, rho_max: float = 1.0, initial: bool = False) -> PiecewiseConstantDensity:
    """Build a canonical profile from ``(left, right, value)`` blocks.

    With ``initial=True`` the support must lie in the closed corridor
    ``[-1, 1]`` (the datum is extended by zero outside).
    """
    blocks = sorted((float(l), float(r), float(v)) for l, r, v in blocks)
    for l, r, v in blocks:
        if not (np.isfinite(l) and np.isfinite(r)) or r <= l:
            raise ValueError(f"block ({l}, {r}) has non-positive length")
        if not np.isfinite(v) or v < 0:
            raise ValueError(f"density {v} is negative")
        if v > rho_max:
            raise ValueError(f"density exceeds rho_max: {v} > {rho_max}")
        if initial and (l < CORRIDOR[0] or r > CORRIDOR[1]):
            raise ValueError(f"block ({l}, {r}) leaves the corridor [-1, 1]")
    for (l0, r0, _), (l1, r1, _) in zip(blocks, blocks[1:]):
        if l1 < r0:
            raise ValueError(f"overlapping blocks ({l0}, {r0}) and ({l1}, {r1})")
    if not blocks:
        return PiecewiseConstantDensity.zero()
    knots, vals = [blocks[0][0]], []
    for l, r, v in blocks:
        if l > knots[-1]:
            vals.append(0.0)
            knots.append(l)
        vals.append(v)
        knots.append(r)
    return PiecewiseConstantDensity(np.array(knots), np.array(vals))


def total_mass(d: PiecewiseConstantDensity) -> float:
    return float(np.sum(d.values * np.diff(d.breakpoints))) if not d.is_zero else 0.0


def _common_partition(d1: PiecewiseConstantDensity, d2: PiecewiseConstantDensity):
    knots = np.union1d(d1.breakpoints, d2.breakpoints)
    if knots.size < 2:
        return knots, np.empty(0), np.empty(0)
    mid = 0.5 * (knots[:-1] + knots[1:])
    return knots, d1(mid), d2(mid)


def l1_distance(d1: PiecewiseConstantDensity, d2: PiecewiseConstantDensity, corridor: bool = False) -> float:
    """Exact L1 norm of ``d1 - d2``; over ``(-1, 1)`` only if ``corridor``."""
    if corridor:
        d1, d2 = d1.restrict(), d2.restrict()
    knots, v1, v2 = _common_partition(d1, d2)
    if v1.size == 0:
        return 0.0
    return float(np.sum(np.abs(v1 - v2) * np.diff(knots)))


def weighted_l1_distance(d1, d2, w1: float, w2: float, corridor: bool = True) -> float:
    """Exact integral of ``|w2 d2 - w1 d1|``."""
    if corridor:
        d1, d2 = d1.restrict(), d2.restrict()
    knots, v1, v2 = _common_partition(d1, d2)
    if v1.size == 0:
        return 0.0
    return float(np.sum(np.abs(w2 * v2 - w1 * v1) * np.diff(knots)))


def total_variation(d: PiecewiseConstantDensity) -> float:
    if d.is_zero:
        return 0.0
    padded = np.concatenate(([0.0], d.values, [0.0]))
    return float(np.sum(np.abs(np.diff(padded))))


def cumulative_cost(d: PiecewiseConstantDensity, alpha: float, x: float) -> float:
    """Integral of ``1 + alpha rho`` from -1 to ``x``."""
    if not (CORRIDOR[0] <= x <= CORRIDOR[1]):
        raise ValueError(f"position {x} outside the corridor [-1, 1]")
    return float((x + 1.0) + alpha * (d.cumulative_mass(x) - d.cumulative_mass(-1.0)))


def shift(d: PiecewiseConstantDensity, delta: float, initial: bool = True) -> PiecewiseConstantDensity:
    if d.is_zero:
        return d
    out = PiecewiseConstantDensity(d.breakpoints + delta, d.values)
    lo, hi = out.support
    if initial and (lo < CORRIDOR[0] or hi > CORRIDOR[1]):
        raise ValueError(f"shifted support ({lo}, {hi}) leaves the corridor")
    return out
