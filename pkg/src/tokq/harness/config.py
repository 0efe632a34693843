"""Experiment configuration: parameter tables, validation, config files.

Every knob is keyed by its CLI flag name (``s-target``, ``k-prime``, ...).
The same keys are accepted in ``--config`` files and echoed in manifests.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Mapping

import yaml

from ..errors import InvalidArgumentError

AUTO = "auto"


class ConfigError(InvalidArgumentError):
    def __init__(self, field_name: str, message: str):
        self.field = field_name
        super().__init__(f"{field_name}: {message}")

    def as_json(self) -> str:
        return json.dumps({"error": "config-validation", "field": self.field, "message": str(self)})


# --- value parsers / checks ----------------------------------------------------

def _int(v):
    if isinstance(v, bool):
        raise ValueError("expected an integer")
    if isinstance(v, float) and not v.is_integer():
        raise ValueError("expected an integer")
    return int(v)


def _float(v):
    x = float(v)
    if not math.isfinite(x):
        raise ValueError("expected a finite number")
    return x


def _bool(v):
    if isinstance(v, bool):
        return v
    s = str(v).strip().lower()
    if s in ("1", "true", "yes", "on"):
        return True
    if s in ("0", "false", "no", "off"):
        return False
    raise ValueError("expected a boolean")


def _opt(parse):
    def inner(v):
        if v is None or (isinstance(v, str) and v.strip().lower() == AUTO):
            return AUTO
        return parse(v)
    return inner


def _int_list(v):
    if isinstance(v, (list, tuple)):
        items = list(v)
    else:
        items = [s for s in str(v).split(",") if s.strip()]
    return [_int(str(s).strip()) if isinstance(s, str) else _int(s) for s in items]


def _str_list(v):
    if isinstance(v, (list, tuple)):
        return [str(s) for s in v]
    return [s.strip() for s in str(v).split(",") if s.strip()]


def positive(x):
    return x == AUTO or x > 0


def non_negative(x):
    return x == AUTO or x >= 0


def unit_open(x):
    return 0 < x < 1


def unit_closed(x):
    return 0 <= x <= 1


@dataclass(frozen=True)
class Param:
    name: str
    parse: Callable[[Any], Any]
    default: Any
    check: Callable[[Any], bool] | None = None
    requirement: str = ""
    help: str = ""
    flag_type: str = "value"  # value | bool

    @property
    def key(self) -> str:
        return self.name.replace("-", "_")


def _p(name, parse, default, check=None, requirement="", help="", flag_type="value"):
    return Param(name, parse, default, check, requirement, help, flag_type)


COMMON = [
    _p("seed", _int, 0, non_negative, "must be >= 0", "master seed"),
    _p("plot", _bool, False, None, "", "write SVG figures beside the CSV", "bool"),
]

SPSA = [
    _p("spsa-a", _opt(_float), AUTO, positive, "must be > 0 or auto", "SPSA gain a (auto: calibrate first step)"),
    _p("spsa-c", _float, 0.1, positive, "must be > 0", "SPSA perturbation c"),
    _p("spsa-big-a", _opt(_float), AUTO, non_negative, "must be >= 0 or auto", "SPSA stability constant A"),
    _p("spsa-alpha", _float, 0.602, lambda x: 0.5 < x <= 1, "must lie in (0.5, 1]", "SPSA gain exponent"),
    _p("spsa-gamma", _float, 0.101, lambda x: 0 < x <= 0.5, "must lie in (0, 0.5]", "SPSA perturbation exponent"),
    _p("target-step", _float, 0.1, positive, "must be > 0", "first-step size used when spsa-a=auto"),
]

GEN_INSTANCES = [
    _p("n", _int, 50, lambda x: x >= 2, "must be >= 2", "vertices of the base graph"),
    _p("density", _float, 0.95, lambda x: 0 < x <= 1, "must lie in (0, 1]", "edge probability"),
    _p("seed", _int, 0, non_negative, "must be >= 0", "master seed"),
    _p("perturb-fractions", _int_list, [7, 9, 15, 25, 50],
       lambda xs: all(0 <= x <= 100 for x in xs), "percentages in [0, 100]", "edge-removal percentages"),
    _p("unrelated", _bool, True, None, "", "also write the regenerated MaxCut_<n>_100 instance", "bool"),
    _p("out-dir", str, "instances", None, "", "output directory"),
]

UC1 = [
    _p("base", str, "gen", None, "", "base instance file, or 'gen' for the seeded generator"),
    _p("n", _int, 50, lambda x: x >= 2, "must be >= 2", "vertices when base=gen"),
    _p("density", _float, 0.95, lambda x: 0 < x <= 1, "must lie in (0, 1]", "edge probability when base=gen"),
    _p("fractions", _int_list, [7, 9, 15, 25, 50],
       lambda xs: all(0 <= x <= 100 for x in xs), "percentages in [0, 100]", "source perturbation percentages"),
    _p("unrelated", _bool, True, None, "", "include the regenerated unrelated source", "bool"),
    _p("reads", _int, 1000, positive, "must be > 0", "reads per anneal"),
    _p("hold", _int, 100, non_negative, "must be >= 0", "hold time in sweeps at s_target"),
    _p("s-target", _float, 0.5, unit_open, "must lie in (0, 1)", "reverse-anneal turning point"),
    _p("ramp", _float, 2.0, positive, "must be > 0", "ramp slope"),
    _p("ramp-scale", _float, 0.01, positive, "must be > 0", "|ds| per sweep at ramp slope 1"),
    _p("reinitialize", _bool, True, None, "", "restart every read from the seed state", "bool"),
    _p("runs", _int, 10, positive, "must be > 0", "independent runs per condition"),
    _p("sweeps", _opt(_int), AUTO, positive, "must be > 0 or auto", "forward-anneal sweeps (auto: 10*n)"),
    _p("t-max", _opt(_float), AUTO, positive, "must be > 0 or auto",
       "forward-anneal start temperature (auto: max local field)"),
    _p("ra-t-max", _opt(_float), AUTO, positive, "must be > 0 or auto",
       "reverse-anneal temperature at s=0 (auto: max local field)"),
    _p("out", str, "results_uc1.csv", None, "", "results CSV"),
] + COMMON

UC2 = [
    _p("n", _int, 10, lambda x: 2 <= x <= 20, "must lie in [2, 20]", "vertices per graph"),
    _p("k", _int, 4, positive, "must be > 0", "number of graphs"),
    _p("density", _float, 0.5, lambda x: 0 < x <= 1, "must lie in (0, 1]", "root graph edge probability"),
    _p("modify-frac", _float, 0.20, unit_closed, "must lie in [0, 1]", "fraction of root edges rewired per graph"),
    _p("p", _int, 2, positive, "must be > 0", "QAOA depth"),
    _p("transfers", _int, 4, positive, "must be > 0", "number of sub-blocks / transfer rounds"),
    _p("steps", _int, 20, positive, "must be > 0", "SPSA steps per sub-block"),
    _p("k-prime", _opt(_int), AUTO, positive, "must be > 0 or auto", "evolve comparison horizon (auto: steps)"),
    _p("strategy", _str_list, ["none", "static", "evolve"],
       lambda xs: bool(xs) and all(x in ("none", "static", "evolve") for x in xs),
       "comma list of none|static|evolve", "strategies to run"),
    _p("seeds", _int, 10, positive, "must be > 0", "independent runs"),
    _p("out", str, "results_uc2.csv", None, "", "results CSV"),
] + SPSA + COMMON

UC3 = [
    _p("table", str, "default", None, "", "H2 coefficient CSV ('default' = shipped table)"),
    _p("mode", str, "transfer", lambda x: x in ("transfer", "cold-start"), "must be transfer or cold-start",
       "initialization mode"),
    _p("iters", _int, 100, positive, "must be > 0", "SPSA iterations per bond length"),
    _p("runs", _int, 100, positive, "must be > 0", "independent sweeps"),
    _p("focus-r", _float, 0.75, positive, "must be > 0", "bond length for the convergence study"),
    _p("wrap", _bool, False, None, "", "wrap theta into (-pi, pi] after each step", "bool"),
    _p("out", str, "results_uc3.csv", None, "", "results CSV"),
] + SPSA + COMMON

PARAMS: dict[str, list[Param]] = {
    "gen-instances": GEN_INSTANCES,
    "uc1": UC1,
    "uc2": UC2,
    "uc3": UC3,
}


class ConsumedDict(dict):
    """Dict that records which keys were read."""

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self.consumed: set[str] = set()

    def __getitem__(self, key):
        self.consumed.add(key)
        return super().__getitem__(key)


@dataclass
class ExperimentConfig:
    use_case: str
    params: ConsumedDict = field(default_factory=ConsumedDict)

    @property
    def master_seed(self) -> int:
        return self.params["seed"]

    def __getitem__(self, key):
        return self.params[key]

    def echo(self) -> dict:
        return {k: v for k, v in dict.items(self.params)}


def _normalize_key(k: str) -> str:
    return str(k).strip().replace("_", "-")


def build_config(use_case: str, overrides: Mapping[str, Any] | None = None) -> ExperimentConfig:
    """Defaults updated with ``overrides``, parsed and validated."""
    if use_case not in PARAMS:
        raise ConfigError("use_case", f"unknown use case {use_case!r}")
    specs = {p.name: p for p in PARAMS[use_case]}
    raw = {name: p.default for name, p in specs.items()}
    for k, v in (overrides or {}).items():
        name = _normalize_key(k)
        if name not in specs:
            raise ConfigError(name, f"unknown option for {use_case}")
        raw[name] = v
    values = ConsumedDict()
    for name, p in specs.items():
        try:
            val = p.parse(raw[name])
        except (TypeError, ValueError) as exc:
            raise ConfigError(name, f"invalid value {raw[name]!r} ({exc})") from None
        if p.check is not None and not p.check(val):
            raise ConfigError(name, f"invalid value {val!r}: {p.requirement}")
        values[name] = val
    values.consumed.clear()
    return ExperimentConfig(use_case, values)


def load_config_file(path: str | Path) -> dict:
    """Flat key/value YAML or JSON; a run manifest is accepted too (its ``config``)."""
    text = Path(path).read_text()
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError("config", f"cannot parse {path}: {exc}") from None
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError("config", f"{path} must contain a key/value mapping")
    if "config" in data and isinstance(data["config"], dict) and "use_case" in data:
        data = data["config"]
    for k, v in data.items():
        if isinstance(v, dict):
            raise ConfigError(str(k), "nested values are not allowed; use flat keys")
    return data
