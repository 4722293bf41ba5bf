"""JSON scenario files: model, initial datum and integration settings."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path

from .data import FAMILIES
from .density import PiecewiseConstantDensity, make_density, total_mass
from .ftl import LEADER_RULES
from .model import CheckResult, ModelParams, validate_model

SCHEMA_VERSION = 1
UNTIL_EVACUATED = "until_evacuated"
EVACUATION_CAP = 100.0  # hard horizon when running until evacuation

_TOP_KEYS = ("schema_version", "name", "model", "datum", "particles", "dt", "t_end", "record_every",
             "one_sided_leaders", "oracle_dx")
_REQUIRED = ("schema_version", "model", "datum")
_MODEL_KEYS = ("v_max", "rho_max", "alpha")


class ScenarioError(ValueError):
    """Malformed or inadmissible scenario; ``line``/``col`` set for syntax errors."""

    def __init__(self, msg: str, line: int | None = None, col: int | None = None):
        super().__init__(msg)
        self.line, self.col = line, col


@dataclass(frozen=True)
class Scenario:
    model: ModelParams
    blocks: tuple[tuple[float, float, float], ...] = ()
    family: str | None = None
    delta: float | None = None
    name: str = ""
    particles: int = 500
    dt: float = 0.004
    t_end: float | str = UNTIL_EVACUATED
    record_every: int = 1
    one_sided_leaders: str = "fixed"
    oracle_dx: float = 1.0 / 400.0

    @property
    def horizon(self) -> float:
        return EVACUATION_CAP if self.t_end == UNTIL_EVACUATED else float(self.t_end)

    def datum(self, delta: float | None = None) -> PiecewiseConstantDensity:
        """Initial density; ``delta`` overrides the family parameter."""
        if self.family is not None:
            d = FAMILIES[self.family](self.delta if delta is None else delta)
            if d.breakpoints.size and d.values.max() > self.model.rho_max:
                raise ValueError("density exceeds rho_max")
            return d
        if delta is not None:
            raise ValueError("scenario has no parametric family")
        return make_density(self.blocks, self.model.rho_max, initial=True)

    def with_overrides(self, **kw) -> "Scenario":
        kw = {k: v for k, v in kw.items() if v is not None}
        return replace(self, **kw) if kw else self

    def checks(self) -> list[CheckResult]:
        """Every load-time precondition, one line each."""
        out = list(validate_model(self.model).checks)
        try:
            d = self.datum()
            out.append(CheckResult("datum admissible", True, f"{len(d.blocks())} block(s) in the corridor"))
            ok = total_mass(d) > 0.0
            out.append(CheckResult("datum has positive mass", ok, "" if ok else "zero-mass datum"))
        except ValueError as exc:
            out.append(CheckResult("datum admissible", False, str(exc)))
        out.append(CheckResult("particles >= 2", self.particles >= 2, str(self.particles)))
        out.append(CheckResult("dt > 0", self.dt > 0, repr(self.dt)))
        ok_t = self.t_end == UNTIL_EVACUATED or self.t_end > 0
        out.append(CheckResult("t_end > 0 or until_evacuated", ok_t, repr(self.t_end)))
        out.append(CheckResult("record_every >= 1", self.record_every >= 1, str(self.record_every)))
        out.append(CheckResult("one_sided_leaders known", self.one_sided_leaders in LEADER_RULES,
                               self.one_sided_leaders))
        out.append(CheckResult("oracle_dx in (0, 1]", 0 < self.oracle_dx <= 1, repr(self.oracle_dx)))
        return out

    def failures(self) -> list[CheckResult]:
        return [c for c in self.checks() if not c.passed]

    # -- serialization ------------------------------------------------------

    def to_dict(self) -> dict:
        if self.family is not None:
            datum = {"family": self.family, "delta": float(self.delta)}
        else:
            datum = {"blocks": [[float(a), float(b), float(v)] for a, b, v in self.blocks]}
        return {
            "schema_version": SCHEMA_VERSION,
            "name": self.name,
            "model": {"v_max": float(self.model.v_max), "rho_max": float(self.model.rho_max),
                      "alpha": float(self.model.alpha)},
            "datum": datum,
            "particles": int(self.particles),
            "dt": float(self.dt),
            "t_end": self.t_end if self.t_end == UNTIL_EVACUATED else float(self.t_end),
            "record_every": int(self.record_every),
            "one_sided_leaders": self.one_sided_leaders,
            "oracle_dx": float(self.oracle_dx),
        }

    def to_json(self) -> str:
        d = self.to_dict()
        d["datum"] = _Inline(d["datum"])
        return _dump(d) + "\n"


class _Inline(dict):
    pass


def _dump(d: dict) -> str:
    # datum blocks on one line each, everything else indented
    lines = ["{"]
    items = list(d.items())
    for i, (k, v) in enumerate(items):
        comma = "," if i < len(items) - 1 else ""
        if isinstance(v, _Inline) and "blocks" in v:
            rows = ",\n".join("      " + json.dumps(b) for b in v["blocks"])
            body = f'{{"blocks": [\n{rows}\n    ]}}' if v["blocks"] else '{"blocks": []}'
            lines.append(f"  {json.dumps(k)}: {body}{comma}")
        else:
            lines.append(f"  {json.dumps(k)}: {json.dumps(v)}{comma}")
    lines.append("}")
    return "\n".join(lines)


def _num(v, key: str, integer: bool = False):
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ScenarioError(f"{key}: expected a number, got {json.dumps(v)}")
    if not math.isfinite(v):
        raise ScenarioError(f"{key}: must be finite")
    if integer:
        if float(v) != int(v):
            raise ScenarioError(f"{key}: expected an integer")
        return int(v)
    return float(v)


def _only(obj, allowed, where: str):
    if not isinstance(obj, dict):
        raise ScenarioError(f"{where}: expected an object")
    extra = sorted(set(obj) - set(allowed))
    if extra:
        raise ScenarioError(f"{where}: unknown key(s) {', '.join(extra)}")


def from_dict(obj) -> Scenario:
    _only(obj, _TOP_KEYS, "scenario")
    for k in _REQUIRED:
        if k not in obj:
            raise ScenarioError(f"scenario: missing key {k}")
    if obj["schema_version"] != SCHEMA_VERSION:
        raise ScenarioError(f"unsupported schema_version {obj['schema_version']!r}")
    m = obj["model"]
    _only(m, _MODEL_KEYS, "model")
    try:
        model = ModelParams(**{k: _num(m[k], f"model.{k}") for k in _MODEL_KEYS if k in m})
    except ScenarioError:
        raise
    except ValueError as exc:
        raise ScenarioError(f"model: {exc}") from None
    d = obj["datum"]
    _only(d, ("blocks", "family", "delta"), "datum")
    kw: dict = {}
    if "blocks" in d:
        if "family" in d or "delta" in d:
            raise ScenarioError("datum: give either blocks or family/delta")
        if not isinstance(d["blocks"], list):
            raise ScenarioError("datum.blocks: expected a list")
        blocks = []
        for i, b in enumerate(d["blocks"]):
            if not isinstance(b, list) or len(b) != 3:
                raise ScenarioError(f"datum.blocks[{i}]: expected [left, right, value]")
            blocks.append(tuple(_num(x, f"datum.blocks[{i}]") for x in b))
        kw["blocks"] = tuple(blocks)
    elif "family" in d:
        if d["family"] not in FAMILIES:
            raise ScenarioError(f"datum.family: unknown family {d['family']!r}; known: {', '.join(FAMILIES)}")
        kw["family"] = d["family"]
        kw["delta"] = _num(d.get("delta", 0.0), "datum.delta")
    else:
        raise ScenarioError("datum: needs blocks or family")
    if "name" in obj:
        if not isinstance(obj["name"], str):
            raise ScenarioError("name: expected a string")
        kw["name"] = obj["name"]
    for k in ("particles", "record_every"):
        if k in obj:
            kw[k] = _num(obj[k], k, integer=True)
    for k in ("dt", "oracle_dx"):
        if k in obj:
            kw[k] = _num(obj[k], k)
    if "t_end" in obj:
        kw["t_end"] = obj["t_end"] if obj["t_end"] == UNTIL_EVACUATED else _num(obj["t_end"], "t_end")
    if "one_sided_leaders" in obj:
        kw["one_sided_leaders"] = obj["one_sided_leaders"]
    return Scenario(model=model, **kw)


def parse(text: str) -> Scenario:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(exc.msg, exc.lineno, exc.colno) from None
    return from_dict(obj)


def bundled_names() -> list[str]:
    root = resources.files(__package__) / "scenarios"
    return sorted(p.name[: -len(".scenario")] for p in root.iterdir() if p.name.endswith(".scenario"))


def read_text(ref: str | Path) -> str:
    """File contents for a path, or for a bundled scenario name."""
    path = Path(ref)
    if path.exists():
        return path.read_text()
    name = str(ref).removesuffix(".scenario")
    res = resources.files(__package__) / "scenarios" / f"{name}.scenario"
    if res.is_file():
        return res.read_text()
    raise FileNotFoundError(f"no scenario file or bundled scenario named {ref}")


def load(ref: str | Path, strict: bool = True) -> Scenario:
    """Parse a scenario; with ``strict`` every precondition must hold."""
    sc = parse(read_text(ref))
    if strict:
        bad = sc.failures()
        if bad:
            raise ScenarioError("; ".join(f"{c.name}: {c.detail}" for c in bad))
    return sc
