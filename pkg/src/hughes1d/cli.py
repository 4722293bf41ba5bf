"""Command-line front end.

Exit codes: 0 success or within tolerance, 1 usage or scenario error,
2 numerical failure (integration error or a check outside tolerance).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import experiments as ex
from .density import make_density
from .ftl import IntegrationError, atomize, detect_crossings, evacuation_time, integrate
from .godunov import solve as godunov_solve, entropy_residual
from .scenario import Scenario, ScenarioError, bundled_names, load, parse, read_text

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2
CHECKS = ("dotxi", "stability", "restart", "convergence", "entropy")
DOTXI_TOL = 5e-2
STABILITY_GROWTH = 2.0
ENTROPY_KAPPAS = (0.25, 0.5, 0.75)
ENTROPY_WINDOWS = ((-0.95, -0.65), (-0.65, -0.35), (-0.35, -0.05), (0.05, 0.35), (0.35, 0.65), (0.65, 0.95))
ENTROPY_TIMES = (0.05, 0.15)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _emit(obj) -> None:
    print(json.dumps(obj, indent=2, default=_jsonable))


def _jsonable(o):
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(type(o).__name__)


def _scenario(args, strict: bool = True) -> Scenario:
    sc = load(args.scenario, strict=False)
    sc = sc.with_overrides(dt=getattr(args, "dt", None), particles=getattr(args, "particles", None))
    if strict:
        bad = sc.failures()
        if bad:
            raise ScenarioError("; ".join(f"{c.name}: {c.detail}" for c in bad))
    return sc


def _run(sc: Scenario, delta=None):
    return integrate(atomize(sc.datum(delta), sc.particles), sc.model, sc.dt, sc.horizon, sc.record_every,
                     sc.one_sided_leaders)


# -- subcommands ------------------------------------------------------------


def cmd_validate(args) -> int:
    sc = parse(read_text(args.scenario))
    checks = sc.checks()
    for c in checks:
        print(f"{'PASS' if c.passed else 'FAIL'}  {c.name}" + (f"  ({c.detail})" if c.detail else ""))
    return EXIT_OK if all(c.passed for c in checks) else EXIT_USAGE


def cmd_simulate(args) -> int:
    sc = _scenario(args)
    traj = _run(sc)
    csv = traj.to_csv()
    if args.seedless and _run(sc).to_csv() != csv:
        print("determinism check failed: rerun differs", file=sys.stderr)
        return EXIT_NUMERIC
    if args.out:
        Path(args.out).write_text(csv)
    t_mic = evacuation_time(traj)
    _emit({
        "scenario": sc.to_dict(),
        "T_mic": t_mic,
        "evacuated": t_mic is not None,
        "crossings": len(detect_crossings(traj)),
        "final_xi": float(traj.xi[-1]),
        "final_time": float(traj.times[-1]),
        "samples": len(traj),
        "xi_residual": traj.xi_residual,
        "min_spacing_margin": traj.min_spacing_margin,
    })
    return EXIT_OK


def cmd_sweep(args) -> int:
    sc = _scenario(args)
    if args.step <= 0:
        raise UsageError("--step must be positive")
    if args.to < args.start:
        raise UsageError("--to must not be below --from")
    grid = ex.parameter_grid(args.start, args.to, args.step)
    kw = dict(N=sc.particles, dt=sc.dt, leaders=sc.one_sided_leaders, t_end=sc.horizon)

    if args.param == "delta" and sc.family is None:
        raise UsageError("delta sweeps need a scenario with a datum family")

    def run(jobs):
        if args.param == "alpha":
            return ex.sweep_alpha(sc.datum(), grid, p=sc.model, jobs=jobs, **kw)
        return ex.sweep_delta(_FamilyAt(sc), grid, sc.model.alpha, p=sc.model, jobs=jobs, **kw)

    recs = run(args.jobs)
    table = ex.records_to_csv(recs)
    if args.seedless:
        again = ex.records_to_csv(run(1))
        if again != table:
            print("determinism check failed: rerun differs", file=sys.stderr)
            return EXIT_NUMERIC
    if args.out:
        Path(args.out).write_text(table)
    else:
        sys.stdout.write(table)
    jumps = ex.detect_jumps(recs, args.jump_factor)
    summary = {
        "scenario": sc.to_dict(),
        "param": args.param, "from": args.start, "to": args.to, "step": args.step,
        "rows": len(recs),
        "failed": [{"param": r.param, "error": r.error} for r in recs if r.error],
        "jumps": [{"left": j.left, "right": j.right, "size": j.size,
                   "crossing_change": ex.jump_has_crossing_change(recs, j)} for j in jumps],
    }
    print(json.dumps(summary, indent=2), file=sys.stderr if not args.out else sys.stdout)
    return EXIT_OK


class _FamilyAt:
    def __init__(self, sc: Scenario):
        self.sc = sc

    def __call__(self, delta):
        return self.sc.datum(delta)


def _check_dotxi(sc: Scenario, args) -> tuple[bool, dict]:
    horizon = min(sc.horizon, args.t_eval or sc.horizon)
    reps = [ex.dotxi_check(sc.datum(), sc.model.alpha, n, sc.dt, horizon, sc.model)
            for n in (sc.particles, 2 * sc.particles)]
    if not all(r.in_scope for r in reps):
        return True, {"status": "out of theorem scope", "in_scope": False}
    devs = [r.max_deviation for r in reps]
    trend = devs[1] < devs[0] or devs[0] < 1e-10
    return devs[0] <= DOTXI_TOL, {"status": "ok", "in_scope": True, "particles": [sc.particles, 2 * sc.particles],
                                  "max_deviation": devs, "tolerance": DOTXI_TOL, "decreasing": trend}


def _perturbed(sc: Scenario):
    blocks = sc.datum().blocks()
    a, b, v = blocks[0]
    return make_density([(a + 0.01, b + 0.01, v)] + blocks[1:], sc.model.rho_max, initial=True)


def _check_stability(sc: Scenario, args) -> tuple[bool, dict]:
    t_eval = args.t_eval or 0.1
    ns = (sc.particles // 2, sc.particles, 2 * sc.particles)
    d1 = sc.datum()
    pairs = {"alpha": (d1, d1, sc.model.alpha, sc.model.alpha + 0.01)}
    try:
        pairs["shift"] = (d1, _perturbed(sc), sc.model.alpha, sc.model.alpha)
    except ValueError as exc:
        pairs["shift"] = None
        shift_err = str(exc)
    out, ok, in_scope = {}, True, True
    for name, pair in pairs.items():
        if pair is None:
            out[name] = {"status": "skipped", "reason": shift_err}
            continue
        reps = [ex.stability_ratio(*pair, N=n, dt=sc.dt, t_eval=t_eval, p=sc.model) for n in ns]
        if not all(r.in_scope for r in reps):
            in_scope = False
            out[name] = {"status": "out of theorem scope"}
            continue
        ratios = [r.ratio for r in reps]
        growth = [_growth(a, b) for a, b in zip(ratios, ratios[1:])]
        good = all(np.isfinite(ratios)) and all(g < STABILITY_GROWTH for g in growth)
        ok &= good
        out[name] = {"status": "ok" if good else "fail", "particles": list(ns), "ratios": ratios,
                     "growth": growth, "xi0_gap": reps[0].xi0_gap, "xi0_bound": reps[0].xi0_bound}
    return ok, {"in_scope": in_scope, "t_eval": t_eval, "pairs": out,
                "flag": None if in_scope else "out of theorem scope"}


def _growth(a: float, b: float) -> float:
    # ratios at rounding level carry no growth information
    return 0.0 if max(a, b) < ex.ZERO_RATIO else b / a


def _check_restart(sc: Scenario, args) -> tuple[bool, dict]:
    t0, t_eval = args.t0 if args.t0 is not None else 0.2, args.t_eval or 0.5
    ns = (sc.particles // 2, sc.particles, 2 * sc.particles)
    diffs = [ex.restart_consistency(sc.datum(), sc.model.alpha, n, sc.dt, t0, t_eval, sc.model) for n in ns]
    dec = all(b < a for a, b in zip(diffs, diffs[1:]))
    return dec, {"t0": t0, "t_eval": t_eval, "particles": list(ns), "l1": diffs, "decreasing": dec}


def _check_convergence(sc: Scenario, args) -> tuple[bool, dict]:
    t_eval = args.t_eval or 0.3
    ns = (sc.particles // 4, sc.particles // 2, sc.particles)
    d = sc.datum()
    traj = _run(sc.with_overrides(t_end=t_eval))
    sep = ex.well_separation(traj, sc.model.rho_max)
    tab = ex.cross_scheme_convergence(d, sc.model.alpha, t_eval, ns, (sc.oracle_dx,), sc.dt, sc.model)
    rep = {"t_eval": t_eval, "rows": tab.rows(), "decreasing": tab.decreasing, "in_scope": sep.ok}
    if not sep.ok:
        rep["flag"] = "outside the oracle validity domain"
        return True, rep
    return tab.decreasing, rep


def _check_entropy(sc: Scenario, args) -> tuple[bool, dict]:
    t0, t1 = ENTROPY_TIMES
    dx = sc.oracle_dx
    sol = godunov_solve(sc.datum(), sc.model, t1, dx, np.linspace(t0, t1, 41))
    rows, worst = [], -np.inf
    for x0, x1 in ENTROPY_WINDOWS:
        for k in ENTROPY_KAPPAS:
            try:
                r = entropy_residual(sol, k * sc.model.rho_max, (t0, t1, x0, x1), sc.model)
            except ValueError as exc:
                rows.append({"window": [x0, x1], "kappa": k, "skipped": str(exc)})
                break
            rows.append({"window": [x0, x1], "kappa": k, "residual": r})
            worst = max(worst, r)
    return bool(worst <= dx), {"dx": dx, "tolerance": dx, "max_residual": worst, "rows": rows}


_CHECK_FNS = {"dotxi": _check_dotxi, "stability": _check_stability, "restart": _check_restart,
              "convergence": _check_convergence, "entropy": _check_entropy}


def cmd_check(args) -> int:
    sc = _scenario(args)
    ok, rep = _CHECK_FNS[args.check](sc, args)
    _emit({"check": args.check, "scenario": sc.to_dict(), "pass": ok, **rep})
    return EXIT_OK if ok else EXIT_NUMERIC


def cmd_list(args) -> int:
    for n in bundled_names():
        print(n)
    return EXIT_OK


# -- wiring -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="hughes1d", description="Particle and grid solvers for the 1D Hughes evacuation model.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, runs=True):
        p.add_argument("--scenario", required=True, help="scenario file or bundled name")
        if runs:
            p.add_argument("--dt", type=float, help="override the time step")
            p.add_argument("--particles", type=int, help="override N")

    p = sub.add_parser("validate", help="check a scenario against every precondition")
    common(p, runs=False)
    p.set_defaults(fn=cmd_validate)

    p = sub.add_parser("simulate", help="run the particle scheme")
    common(p)
    p.add_argument("--out", help="trajectory CSV")
    p.add_argument("--seedless", action="store_true", help="run twice and require identical bytes")
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("sweep", help="evacuation time over a parameter range")
    common(p)
    p.add_argument("--param", choices=("alpha", "delta"), required=True)
    p.add_argument("--from", dest="start", type=float, required=True)
    p.add_argument("--to", type=float, required=True)
    p.add_argument("--step", type=float, required=True)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", help="sweep CSV (default: stdout)")
    p.add_argument("--jump-factor", type=float, default=ex.JUMP_FACTOR)
    p.add_argument("--seedless", action="store_true", help="rerun serially and require identical bytes")
    p.set_defaults(fn=cmd_sweep)

    p = sub.add_parser("check", help="empirical stability and consistency checks")
    p.add_argument("check", choices=CHECKS)
    common(p)
    p.add_argument("--t0", type=float, help="restart time")
    p.add_argument("--t-eval", type=float, help="evaluation time or horizon")
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("list", help="bundled scenario names")
    p.set_defaults(fn=cmd_list)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if getattr(args, "jobs", 1) < 1:
            raise UsageError("--jobs must be >= 1")
        return args.fn(args)
    except ScenarioError as exc:
        loc = f":{exc.line}:{exc.col}" if exc.line is not None else ""
        print(f"{args.scenario}{loc}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (UsageError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except IntegrationError as exc:
        print(f"integration failed: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
