"""Velocity/flux law and the structural assumptions the solvers rely on.

Only the affine velocity law ``v(rho) = v_max (1 - rho / rho_max)`` ships.
Other concave laws can be plugged in by implementing the ``VelocityLaw``
interface (value and first two derivatives of ``v``).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

GRID_POINTS = 1024
GRID_TOL = 1e-12


@dataclass(frozen=True)
class ModelParams:
    v_max: float = 1.0
    rho_max: float = 1.0
    alpha: float = 0.0

    def __post_init__(self):
        if not (np.isfinite(self.v_max) and self.v_max > 0):
            raise ValueError(f"v_max must be positive, got {self.v_max}")
        if not (np.isfinite(self.rho_max) and self.rho_max > 0):
            raise ValueError(f"rho_max must be positive, got {self.rho_max}")
        if not (np.isfinite(self.alpha) and self.alpha >= 0):
            raise ValueError(f"alpha must be non-negative, got {self.alpha}")

    @property
    def law(self) -> "AffineVelocity":
        return AffineVelocity(self.v_max, self.rho_max)

    def with_alpha(self, alpha: float) -> "ModelParams":
        return ModelParams(self.v_max, self.rho_max, alpha)


@dataclass(frozen=True)
class AffineVelocity:
    """v(rho) = v_max (1 - rho/rho_max) together with its derivatives."""

    v_max: float
    rho_max: float

    def v(self, rho):
        return self.v_max * (1.0 - np.asarray(rho, dtype=float) / self.rho_max)

    def dv(self, rho):
        return np.full_like(np.asarray(rho, dtype=float), -self.v_max / self.rho_max)

    def d2v(self, rho):
        return np.zeros_like(np.asarray(rho, dtype=float))

    def f(self, rho):
        rho = np.asarray(rho, dtype=float)
        return rho * self.v(rho)

    def df(self, rho):
        rho = np.asarray(rho, dtype=float)
        return self.v(rho) + rho * self.dv(rho)

    def d2f(self, rho):
        rho = np.asarray(rho, dtype=float)
        return 2.0 * self.dv(rho) + rho * self.d2v(rho)

    @property
    def rho_crit(self) -> float:
        """Maximiser of the flux."""
        return 0.5 * self.rho_max


def _check_range(rho, p: ModelParams):
    arr = np.asarray(rho, dtype=float)
    if np.any(~np.isfinite(arr)) or np.any(arr < 0.0) or np.any(arr > p.rho_max):
        raise ValueError(f"density outside [0, {p.rho_max}]: {rho!r}")
    return arr


def velocity(rho, p: ModelParams):
    arr = _check_range(rho, p)
    out = p.v_max * (1.0 - arr / p.rho_max)
    return float(out) if out.ndim == 0 else out


def flux(rho, p: ModelParams):
    arr = _check_range(rho, p)
    out = arr * (p.v_max * (1.0 - arr / p.rho_max))
    return float(out) if out.ndim == 0 else out


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class ValidationReport:
    params: ModelParams
    checks: list[CheckResult] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[CheckResult]:
        return [c for c in self.checks if not c.passed]

    def lines(self) -> list[str]:
        return [
            f"{'PASS' if c.passed else 'FAIL'}  {c.name}" + (f"  ({c.detail})" if c.detail else "")
            for c in self.checks
        ]


def validate_model(p: ModelParams, law=None) -> ValidationReport:
    """Check the flux assumptions needed for existence and particle convergence.

    Every assumption is checked on a uniform grid of ``GRID_POINTS`` points
    with tolerance ``GRID_TOL``; for the built-in affine law the closed forms
    are checked as well.
    """
    law = p.law if law is None else law
    rho_max = p.rho_max
    grid = np.linspace(0.0, rho_max, GRID_POINTS)
    interior = grid[1:]  # (0, rho_max]
    f, df, d2f = law.f(grid), law.df(grid), law.d2f(grid)
    v, dv, d2v = law.v(grid), law.dv(grid), law.d2v(grid)
    scale = max(1.0, float(np.max(np.abs(f))), p.v_max)
    tol = GRID_TOL * scale
    report = ValidationReport(p)
    add = report.checks.append

    end_vals = (float(law.f(0.0)), float(law.f(rho_max)))
    add(CheckResult("f(0) = f(rho_max) = 0", abs(end_vals[0]) <= tol and abs(end_vals[1]) <= tol,
                    f"f(0)={end_vals[0]:.3g}, f(rho_max)={end_vals[1]:.3g}"))

    # midpoint concavity on the grid plus the sign of f''
    mid = law.f(0.5 * (grid[:-1] + grid[1:]))
    chord = 0.5 * (f[:-1] + f[1:])
    concave = bool(np.all(mid >= chord - tol) and np.all(d2f <= tol))
    add(CheckResult("f concave", concave, f"max f''={float(np.max(d2f)):.3g}"))

    # {f' = 0} has zero measure: no two consecutive grid points with f' = 0
    zero = np.abs(df) <= tol
    add(CheckResult("critical set of f has zero measure", not bool(np.any(zero[:-1] & zero[1:]))))

    g1 = f[1:] - interior * df[1:]
    add(CheckResult("f > rho f' on (0, rho_max]", bool(np.all(g1 > 0.0)), f"min={float(np.min(g1)):.3g}"))

    g2 = f[1:] - interior * df[1:] + interior**2 * d2f[1:]
    add(CheckResult("f - rho f' + rho^2 f'' <= 0 on (0, rho_max]", bool(np.all(g2 <= tol)),
                    f"max={float(np.max(g2)):.3g}"))

    add(CheckResult("v' < 0", bool(np.all(dv < 0.0)), f"max v'={float(np.max(dv)):.3g}"))
    g3 = dv + grid * d2v
    add(CheckResult("v' + rho v'' <= 0", bool(np.all(g3 <= tol)), f"max={float(np.max(g3)):.3g}"))
    add(CheckResult("v(0) = v_max > 0, v(rho_max) = 0",
                    abs(float(v[0]) - p.v_max) <= tol and abs(float(v[-1])) <= tol))

    if isinstance(law, AffineVelocity):
        # closed forms: f'' = -2 v_max/rho_max, f - rho f' = v_max rho^2/rho_max,
        # f - rho f' + rho^2 f'' = -v_max rho^2/rho_max, v' = -v_max/rho_max, v'' = 0
        k = law.v_max / law.rho_max
        add(CheckResult("closed form: affine law satisfies all assumptions", k > 0,
                        f"f''={-2 * k:.6g}, v'={-k:.6g}"))
    return report
