"""Run configuration: JSON schema, defaults and canonical serialization."""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass, replace
from typing import Optional

import jsonschema

from . import physics

MODES = ("field", "marginals", "sweep", "experiment", "compare-mc")
FORMATS = ("csv", "json")

PRESETS = {
    "badurek": {
        "B0": physics.BADUREK.field_mean_B0,
        "deltaB": physics.BADUREK.field_std_deltaB,
        "L": physics.BADUREK.region_length_L,
        "k0": physics.BADUREK.mean_wavenumber_k0,
        "delta": physics.BADUREK.packet_spread_delta,
    }
}

DEFAULT_GRID_N = 512
DEFAULT_MC_GRID_N = 128
DEFAULT_SEED = 7
DEFAULT_SAMPLES = 100_000
DEFAULT_QUAD_ORDER = 64
DEFAULT_SWEEP = {
    "delta_axis": {"start": 0.5, "stop": 5.0, "num": 10},
    "sigma_axis": {"start": 0.0, "stop": 2.5, "num": 26},
}

_number = {"type": "number"}
_axis = {
    "oneOf": [
        {"type": "array", "items": _number, "minItems": 1},
        {
            "type": "object",
            "properties": {"start": _number, "stop": _number, "num": {"type": "integer", "minimum": 1}},
            "required": ["start", "stop", "num"],
            "additionalProperties": False,
        },
    ]
}

SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "neutron_wigner run configuration",
    "type": "object",
    "properties": {
        "mode": {"enum": list(MODES)},
        "state": {
            "type": "object",
            "properties": {
                "tag": {"enum": ["gaussian", "squashed", "cat", "cat_averaged"]},
                "x0": _number,
                "k0": _number,
                "delta": {"type": "number", "exclusiveMinimum": 0},
                "delta0": _number,
                "sigma": {"type": "number", "minimum": 0},
            },
            "required": ["tag", "k0", "delta"],
            "additionalProperties": False,
        },
        "experiment": {
            "type": "object",
            "properties": {
                "preset": {"enum": sorted(PRESETS)},
                "B0": {"type": "number", "minimum": 0},
                "deltaB": {"type": "number", "minimum": 0},
                "deltaB_over_B0": {"type": "number", "minimum": 0},
                "L": {"type": "number", "exclusiveMinimum": 0},
                "k0": {"type": "number", "exclusiveMinimum": 0},
                "delta": {"type": "number", "exclusiveMinimum": 0},
            },
            "additionalProperties": False,
        },
        "grid": {
            "type": "object",
            "properties": {
                "nx": {"type": "integer", "minimum": 8},
                "nk": {"type": "integer", "minimum": 8},
                "x_min": _number,
                "x_max": _number,
                "k_min": _number,
                "k_max": _number,
            },
            "additionalProperties": False,
        },
        "sweep": {
            "type": "object",
            "properties": {"delta_axis": _axis, "sigma_axis": _axis},
            "additionalProperties": False,
        },
        "output": {
            "type": "object",
            "properties": {"dir": {"type": "string"}, "format": {"enum": list(FORMATS)}},
            "additionalProperties": False,
        },
        "seed": {"type": "integer", "minimum": 0},
        "samples": {"type": "integer", "minimum": 100},
        "quad_order": {"type": "integer", "minimum": 4, "maximum": 256},
        "figures": {"type": "boolean"},
    },
    "additionalProperties": False,
}


class ConfigError(ValueError):
    """Invalid run configuration."""


@dataclass(frozen=True)
class StateSpec:
    """State in internal units (1e-10 m, 1e10 m^-1)."""

    tag: str
    k0: float
    delta: float
    x0: float = 0.0
    delta0: float = 0.0
    sigma: float = 0.0


@dataclass(frozen=True)
class ExperimentSpec:
    """Experiment inputs in SI; ``preset`` is kept only for the record."""

    B0: float
    deltaB: float
    L: float
    k0: float
    delta: float
    preset: Optional[str] = None

    def to_config(self) -> physics.ExperimentConfig:
        return physics.ExperimentConfig(self.B0, self.deltaB, self.L, self.k0, self.delta)


@dataclass(frozen=True)
class GridSpec:
    nx: int
    nk: int
    x_min: Optional[float] = None
    x_max: Optional[float] = None
    k_min: Optional[float] = None
    k_max: Optional[float] = None

    @property
    def has_bounds(self) -> bool:
        return self.x_min is not None


@dataclass(frozen=True)
class SweepSpec:
    delta_axis: tuple
    sigma_axis: tuple


@dataclass(frozen=True)
class RunConfig:
    mode: str
    state: Optional[StateSpec]
    experiment: Optional[ExperimentSpec]
    grid: GridSpec
    out_dir: str = "out"
    format: str = "csv"
    seed: int = DEFAULT_SEED
    samples: int = DEFAULT_SAMPLES
    quad_order: int = DEFAULT_QUAD_ORDER
    sweep: Optional[SweepSpec] = None
    figures: bool = False

    def to_dict(self) -> dict:
        doc = {
            "mode": self.mode,
            "grid": {k: v for k, v in asdict(self.grid).items() if v is not None},
            "output": {"dir": self.out_dir, "format": self.format},
            "seed": self.seed,
            "samples": self.samples,
            "quad_order": self.quad_order,
            "figures": self.figures,
        }
        if self.state is not None:
            doc["state"] = asdict(self.state)
        if self.experiment is not None:
            exp = asdict(self.experiment)
            if exp["preset"] is None:
                del exp["preset"]
            doc["experiment"] = exp
        if self.sweep is not None:
            doc["sweep"] = {"delta_axis": list(self.sweep.delta_axis), "sigma_axis": list(self.sweep.sigma_axis)}
        return doc

    def digest(self) -> str:
        """SHA-256 of the canonical config, excluding the output directory."""
        doc = self.to_dict()
        doc["output"] = {"format": self.format}
        blob = json.dumps(doc, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()

    def with_overrides(self, **kw) -> "RunConfig":
        return replace(self, **kw)


def serialize(cfg: RunConfig) -> str:
    return json.dumps(cfg.to_dict(), sort_keys=True, indent=2) + "\n"


def _axis_values(spec) -> tuple:
    if isinstance(spec, dict):
        num = spec["num"]
        if num == 1:
            return (float(spec["start"]),)
        step = (spec["stop"] - spec["start"]) / (num - 1)
        return tuple(float(spec["start"] + i * step) for i in range(num))
    return tuple(float(v) for v in spec)


def _schema_error(err: jsonschema.ValidationError) -> ConfigError:
    where = ".".join(str(p) for p in err.absolute_path) or "<root>"
    if err.validator == "additionalProperties":
        return ConfigError(f"{where}: {err.message}")
    expected = err.schema.get("type") or err.validator
    constraint = {
        k: err.schema[k] for k in ("minimum", "maximum", "exclusiveMinimum", "enum") if k in err.schema
    }
    detail = f" with {constraint}" if constraint else ""
    return ConfigError(f"{where}: expected {expected}{detail}; {err.message}")


def _resolve_experiment(doc: dict) -> ExperimentSpec:
    preset = doc.get("preset")
    values = dict(PRESETS[preset]) if preset else {}
    for key in ("B0", "deltaB", "L", "k0", "delta"):
        if key in doc:
            values[key] = float(doc[key])
    if "deltaB_over_B0" in doc:
        if "deltaB" in doc:
            raise ConfigError("experiment: give either deltaB or deltaB_over_B0, not both")
        values["deltaB"] = float(doc["deltaB_over_B0"]) * values.get("B0", 0.0)
    missing = [k for k in ("B0", "L", "k0", "delta") if k not in values]
    if missing:
        raise ConfigError(f"experiment: missing {missing} (or name a preset)")
    values.setdefault("deltaB", 0.0)
    spec = ExperimentSpec(preset=preset, **values)
    try:
        physics.cat_separation(spec.to_config())
    except ValueError as exc:
        raise ConfigError(f"experiment: {exc}") from exc
    return spec


def parse_config(text: str, mode: Optional[str] = None) -> RunConfig:
    """Validate a JSON config document and materialize every default.

    ``mode`` (from the command line) fills in or must agree with the
    document's ``mode`` key.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    if "state" in doc and "experiment" in doc:
        raise ConfigError("conflict: give either 'state' or 'experiment', not both")
    errors = sorted(jsonschema.Draft202012Validator(SCHEMA).iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        raise _schema_error(errors[0])
    if mode is not None:
        if "mode" in doc and doc["mode"] != mode:
            raise ConfigError(f"mode: command line says {mode!r} but config says {doc['mode']!r}")
        doc["mode"] = mode
    if "mode" not in doc:
        raise ConfigError("mode: required (in the config or on the command line)")
    mode = doc["mode"]

    state = experiment = None
    if "state" in doc:
        st = {k: float(v) if k != "tag" else v for k, v in doc["state"].items()}
        for key, value in st.items():
            if key != "tag" and not math.isfinite(value):
                raise ConfigError(f"state.{key}: expected a finite number")
        state = StateSpec(**st)
    elif "experiment" in doc:
        experiment = _resolve_experiment(doc["experiment"])
    elif mode == "experiment":
        experiment = _resolve_experiment({"preset": "badurek"})
    elif mode == "sweep":
        state = StateSpec(tag="cat_averaged", k0=1.7, delta=1.1, delta0=16.1)
    else:
        raise ConfigError("config needs a 'state' or an 'experiment'")
    if mode == "experiment" and experiment is None:
        raise ConfigError("mode 'experiment' needs an 'experiment' section")
    if mode == "compare-mc" and state is not None and state.tag not in ("squashed", "cat_averaged"):
        raise ConfigError("state.tag: compare-mc needs 'squashed' or 'cat_averaged'")

    g = doc.get("grid", {})
    n_default = DEFAULT_MC_GRID_N if mode == "compare-mc" else DEFAULT_GRID_N
    bounds = [g.get(k) for k in ("x_min", "x_max", "k_min", "k_max")]
    if any(b is not None for b in bounds) and not all(b is not None for b in bounds):
        raise ConfigError("grid: give all of x_min, x_max, k_min, k_max or none")
    grid = GridSpec(
        int(g.get("nx", n_default)),
        int(g.get("nk", n_default)),
        *[None if b is None else float(b) for b in bounds],
    )

    sweep = None
    if mode == "sweep" or (mode == "experiment" and doc.get("figures")):
        sw = doc.get("sweep", {})
        sweep = SweepSpec(
            _axis_values(sw.get("delta_axis", DEFAULT_SWEEP["delta_axis"])),
            _axis_values(sw.get("sigma_axis", DEFAULT_SWEEP["sigma_axis"])),
        )
    elif "sweep" in doc:
        raise ConfigError(f"sweep: only valid in mode 'sweep' or 'experiment' with figures, not {mode!r}")

    out = doc.get("output", {})
    return RunConfig(
        mode=mode,
        state=state,
        experiment=experiment,
        grid=grid,
        out_dir=out.get("dir", "out"),
        format=out.get("format", "csv"),
        seed=int(doc.get("seed", DEFAULT_SEED)),
        samples=int(doc.get("samples", DEFAULT_SAMPLES)),
        quad_order=int(doc.get("quad_order", DEFAULT_QUAD_ORDER)),
        sweep=sweep,
        figures=bool(doc.get("figures", False)),
    )
