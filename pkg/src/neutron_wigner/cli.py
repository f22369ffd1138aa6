"""Command-line front end.

    neutron-wigner <mode> --config run.json [--out DIR] [--format csv|json]
                   [--seed N] [--samples N] [--grid NX,NK] [--quad-order N]
                   [--figures]

Exit codes: 0 success, 2 configuration error, 3 computation error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
import time
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import __version__, physics, serialize
from .config import MODES, ConfigError, RunConfig, StateSpec, parse_config
from .decoherence import decoherence_parameter, find_extrema, sweep
from .states import (
    FluctuationLaw,
    GaussianPacket,
    StateKind,
    cat_family,
    marginals_closed,
    norm_cat_averaged,
    wigner_gaussian,
)
from .transform import (
    PhaseSpaceGrid,
    average_over_shift,
    monte_carlo_average,
    reduce,
    sample_field,
    z_scores,
)

TOOL = "neutron_wigner"


@dataclass
class RunReport:
    config: dict
    derived: dict
    wall_time: float
    files: dict  # relative path -> sha256
    digest: str = ""

    def to_json(self) -> str:
        # wall time is left out so that reruns write identical reports
        doc = {
            "tool": TOOL,
            "version": __version__,
            "config_sha256": self.digest,
            "config": self.config,
            "derived": self.derived,
            "files": self.files,
        }
        return json.dumps(doc, sort_keys=True, indent=2) + "\n"


class _Writer:
    def __init__(self, cfg: RunConfig, out_dir: Path):
        self.cfg = cfg
        self.out = out_dir
        self.digest = cfg.digest()
        self.header = f"# {TOOL} {__version__} config_sha256={self.digest}"
        self.meta = {"tool": TOOL, "version": __version__, "config_sha256": self.digest}
        self.files = {}

    def _record(self, path: Path):
        self.files[str(path.relative_to(self.out))] = hashlib.sha256(path.read_bytes()).hexdigest()

    def field(self, name, wf, fmt=None):
        fmt = fmt or self.cfg.format
        path = self.out / f"{name}.{fmt}"
        path.parent.mkdir(parents=True, exist_ok=True)
        serialize.write_field(path, wf, fmt, header=self.header, meta=self.meta)
        self._record(path)

    def table(self, name, columns: dict):
        path = self.out / f"{name}.csv"
        path.parent.mkdir(parents=True, exist_ok=True)
        cols = list(columns)
        data = np.column_stack([np.asarray(columns[c], dtype=float) for c in cols])
        with path.open("w") as fh:
            fh.write(self.header + "\n" + ",".join(cols) + "\n")
            np.savetxt(fh, data, fmt=serialize.FMT, delimiter=",")
        self._record(path)

    def json(self, name, doc):
        path = self.out / f"{name}.json"
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps({**self.meta, **doc}, sort_keys=True, indent=2) + "\n")
        self._record(path)

    def text(self, name, text):
        path = self.out / name
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
        self._record(path)


def _state_from_spec(spec: StateSpec) -> StateKind:
    packet = GaussianPacket(spec.x0, spec.k0, spec.delta)
    law = None if spec.tag == "gaussian" else FluctuationLaw(spec.delta0, spec.sigma)
    return StateKind(spec.tag, packet, law)


def resolve_state(cfg: RunConfig) -> StateKind:
    """The state a config describes; an experiment maps to its averaged cat."""
    if cfg.state is not None:
        return _state_from_spec(cfg.state)
    k0, delta, delta0, sigma = physics.to_internal(cfg.experiment.to_config())
    return StateKind("cat_averaged", GaussianPacket(0.0, k0, delta), FluctuationLaw(delta0, sigma))


def resolve_grid(cfg: RunConfig, s: StateKind) -> PhaseSpaceGrid:
    g = cfg.grid
    if g.has_bounds:
        return PhaseSpaceGrid(g.x_min, g.x_max, g.k_min, g.k_max, g.nx, g.nk)
    return PhaseSpaceGrid.for_state(s, g.nx, g.nk)


def experiment_summary(cfg: RunConfig) -> dict:
    """Derived quantities of an experiment config, each from one library call."""
    exp = cfg.experiment.to_config()
    d = physics.derive(exp)
    s = resolve_state(cfg)
    res = decoherence_parameter(s.packet, s.law, grid=resolve_grid(cfg, s))
    return {
        "momentum_shift_per_m": d.momentum_shift,
        "displacement_m": d.displacement,
        "delta0_m": d.delta0,
        "sigma_m": d.sigma,
        "delta0_internal": s.law.delta0,
        "sigma_internal": s.law.sigma,
        "time_of_flight_s": d.time_of_flight,
        "free_spread_m": d.free_spread,
        "norm_N": norm_cat_averaged(s.packet, s.law),
        "grid_trace": res.total_N,
        "epsilon": res.epsilon,
        "epsilon_clamped": res.clamped,
    }


def _sweep_inputs(cfg: RunConfig):
    if cfg.experiment is not None:
        k0, delta, delta0, _ = physics.to_internal(cfg.experiment.to_config())
        return k0, delta0, delta
    return cfg.state.k0, cfg.state.delta0, 1.1


def _write_surface(w: _Writer, name: str, surface, extrema):
    if w.cfg.format == "json":
        w.text(f"{name}.json", serialize.surface_to_json(surface, extrema, meta=w.meta))
    else:
        w.text(f"{name}.csv", serialize.surface_to_csv(surface, header=w.header))
        w.table(
            f"{name}_extrema",
            {
                "delta": [e.delta for e in extrema],
                "sigma": [e.sigma for e in extrema],
                "is_max": [1.0 if e.kind == "max" else 0.0 for e in extrema],
            },
        )


def _run_field(cfg, w, derived):
    s = resolve_state(cfg)
    wf = sample_field(s, resolve_grid(cfg, s))
    w.field("field", wf)
    derived["norm_N"] = reduce(wf).total


def _run_marginals(cfg, w, derived):
    s = resolve_state(cfg)
    wf = sample_field(s, resolve_grid(cfg, s))
    red = reduce(wf)
    px, pk = marginals_closed(s)
    w.table("marginal_x", {"x": wf.grid.x, "p_grid": red.marginal_x, "p_closed": px(wf.grid.x)})
    w.table("marginal_k", {"k": wf.grid.k, "p_grid": red.marginal_k, "p_closed": pk(wf.grid.k)})
    derived.update(total=red.total, mean_x=red.mean_x, var_x=red.var_x, mean_k=red.mean_k, var_k=red.var_k)


def _run_sweep(cfg, w, derived):
    k0, delta0, _ = _sweep_inputs(cfg)
    surface = sweep(cfg.sweep.delta_axis, cfg.sweep.sigma_axis, k0=k0, delta0=delta0, n=cfg.grid.nx)
    extrema = find_extrema(surface) if surface.complete else []
    _write_surface(w, "sweep", surface, extrema)
    derived["extrema"] = [asdict(e) for e in extrema]
    derived["failed_cells"] = len(surface.failures)


def _run_experiment(cfg, w, derived):
    summary = experiment_summary(cfg)
    derived.update(summary)
    w.json("experiment_summary", summary)
    s = resolve_state(cfg)
    w.field("experiment_field", sample_field(s, resolve_grid(cfg, s)))


def _run_compare_mc(cfg, w, derived):
    s = resolve_state(cfg)
    grid = resolve_grid(cfg, s)
    if s.tag == "cat_averaged":
        base, parametric = cat_family(s.packet), True
    else:
        base, parametric = (lambda x, k: wigner_gaussian(x, k, s.packet)), False
    mc = monte_carlo_average(base, s.law, grid, cfg.samples, cfg.seed, parametric=parametric)
    exact = sample_field(s, grid)
    gh = average_over_shift(base, s.law, cfg.quad_order, parametric=parametric)(grid.x[:, None], grid.k[None, :])
    dev = mc.values - exact.values
    z = z_scores(mc, exact.values)
    stats = {
        "samples": cfg.samples,
        "seed": cfg.seed,
        "max_abs_deviation": float(np.max(np.abs(dev))),
        "rms_deviation": float(np.sqrt(np.mean(dev**2))),
        "max_abs_z": float(np.nanmax(np.abs(z))),
        "rms_z": float(np.sqrt(np.nanmean(z**2))),
        "z_nodes": int(np.count_nonzero(np.isfinite(z))),
        "mean_stderr": float(np.mean(mc.stderr)),
        "gauss_hermite_max_abs_deviation": float(np.max(np.abs(gh - exact.values))),
    }
    w.field("mc_field", mc)
    w.field("analytic_field", exact)
    w.table("deviation", {k: [v] for k, v in stats.items()})
    derived.update(stats)


_DISPATCH = {
    "field": _run_field,
    "marginals": _run_marginals,
    "sweep": _run_sweep,
    "experiment": _run_experiment,
    "compare-mc": _run_compare_mc,
}


def render_figures_data(cfg: RunConfig, out_dir=None) -> dict:
    """Emit the parameter sets of the three figures as CSV bundles.

    fig1: Gaussian packets with delta in {1/sqrt2, 1, sqrt2} (upper row) and
    squashed states with delta = 1/sqrt2, Delta0 = 0, sigma in
    {0, 1/sqrt2, sqrt(3/2)} (lower row); fig2: averaged cat with Delta0 = 0,
    delta = 1.1, sigma in {0, 0.5, 1.0, 1.5}; fig3: epsilon surface plus the
    delta = 1.1 slice. Returns ``{relative path: sha256}``.
    """
    if cfg.mode not in ("experiment", "sweep"):
        raise ConfigError("figure bundles need mode 'experiment' or 'sweep'")
    out = Path(out_dir or cfg.out_dir)
    w = _Writer(cfg, out)
    _write_figures(cfg, w)
    return w.files


def _write_figures(cfg: RunConfig, w: _Writer):
    n = cfg.grid.nx, cfg.grid.nk
    k0 = 1.7
    panels = []
    for i, delta in enumerate((1 / math.sqrt(2), 1.0, math.sqrt(2))):
        s = StateKind("gaussian", GaussianPacket(0.0, k0, delta))
        name = f"fig1/upper_{i}"
        w.field(name, sample_field(s, PhaseSpaceGrid.for_state(s, *n)), fmt="csv")
        panels.append({"file": name + ".csv", "tag": "gaussian", "delta": delta, "sigma": 0.0,
                       "delta0": 0.0, "k0": k0, "uncertainty_product": 0.5})
    lower_delta = 1 / math.sqrt(2)
    for i, sigma in enumerate((0.0, 1 / math.sqrt(2), math.sqrt(1.5))):
        packet = GaussianPacket(0.0, k0, lower_delta)
        law = FluctuationLaw(0.0, sigma)
        s = StateKind("squashed", packet, law)
        name = f"fig1/lower_{i}"
        w.field(name, sample_field(s, PhaseSpaceGrid.for_state(s, *n)), fmt="csv")
        panels.append({"file": name + ".csv", "tag": "squashed", "delta": lower_delta, "sigma": sigma,
                       "delta0": 0.0, "k0": k0, "uncertainty_product": packet.delta_k * math.hypot(lower_delta, sigma)})
    w.json("fig1/panels", {"panels": panels})

    panels = []
    for i, sigma in enumerate((0.0, 0.5, 1.0, 1.5)):
        s = StateKind("cat_averaged", GaussianPacket(0.0, k0, 1.1), FluctuationLaw(0.0, sigma))
        name = f"fig2/sigma_{i}"
        w.field(name, sample_field(s, PhaseSpaceGrid.for_state(s, *n)), fmt="csv")
        panels.append({"file": name + ".csv", "tag": "cat_averaged", "delta": 1.1, "sigma": sigma,
                       "delta0": 0.0, "k0": k0})
    w.json("fig2/panels", {"panels": panels})

    sk0, delta0, delta_exp = _sweep_inputs(cfg)
    surface = sweep(cfg.sweep.delta_axis, cfg.sweep.sigma_axis, k0=sk0, delta0=delta0, n=cfg.grid.nx)
    extrema = find_extrema(surface) if surface.complete else []
    w.text("fig3/surface.csv", serialize.surface_to_csv(surface, header=w.header))
    sigmas = np.asarray(cfg.sweep.sigma_axis)
    slice_ = sweep([delta_exp], sigmas, k0=sk0, delta0=delta0, n=cfg.grid.nx)
    w.table("fig3/slice", {"sigma": sigmas, "epsilon": slice_.epsilon[0]})
    w.json("fig3/panels", {"k0": sk0, "delta0": delta0, "slice_delta": delta_exp,
                           "extrema": [asdict(e) for e in extrema]})


def run(cfg: RunConfig, out_dir=None) -> RunReport:
    """Execute ``cfg`` and write its artifacts plus ``report.json``."""
    start = time.perf_counter()
    out = Path(out_dir or cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    w = _Writer(cfg, out)
    derived = {}
    if cfg.experiment is not None:
        d = physics.derive(cfg.experiment.to_config())
        derived.update(momentum_shift_per_m=d.momentum_shift, displacement_m=d.displacement)
    _DISPATCH[cfg.mode](cfg, w, derived)
    if cfg.figures:
        _write_figures(cfg, w)
    echo = cfg.to_dict()
    # the output directory is not part of the digest, so it stays out of the echo too
    echo["output"] = {"format": cfg.format}
    report = RunReport(echo, derived, time.perf_counter() - start, dict(w.files), w.digest)
    (out / "report.json").write_text(report.to_json())
    return report


def _build_parser():
    ap = argparse.ArgumentParser(prog="neutron-wigner", description=__doc__.split("\n")[0])
    ap.add_argument("mode", choices=MODES)
    ap.add_argument("--config", required=True, help="JSON run configuration")
    ap.add_argument("--out", help="output directory")
    ap.add_argument("--format", choices=("csv", "json"))
    ap.add_argument("--seed", type=int)
    ap.add_argument("--samples", type=int)
    ap.add_argument("--grid", help="NX,NK")
    ap.add_argument("--quad-order", type=int)
    ap.add_argument("--figures", action="store_true", help="also emit the figure bundles")
    return ap


def _load(args) -> RunConfig:
    try:
        doc = json.loads(Path(args.config).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    out = dict(doc.get("output", {}))
    if args.out:
        out["dir"] = args.out
    if args.format:
        out["format"] = args.format
    if out:
        doc["output"] = out
    for key in ("seed", "samples", "quad_order"):
        value = getattr(args, key)
        if value is not None:
            doc[key] = value
    if args.grid:
        try:
            nx, nk = (int(v) for v in args.grid.split(","))
        except ValueError as exc:
            raise ConfigError(f"--grid: expected NX,NK, got {args.grid!r}") from exc
        doc["grid"] = {**doc.get("grid", {}), "nx": nx, "nk": nk}
    if args.figures:
        doc["figures"] = True
    return parse_config(json.dumps(doc), mode=args.mode)


def _fail(kind, exc, code):
    record = {"error": {"type": kind, "exception": type(exc).__name__, "message": str(exc), "exit_code": code}}
    print(json.dumps(record), file=sys.stderr)
    return code


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = _load(args)
        if cfg.figures and cfg.mode not in ("experiment", "sweep"):
            raise ConfigError("figures: only available in mode 'experiment' or 'sweep'")
    except ConfigError as exc:
        return _fail("config", exc, 2)
    try:
        report = run(cfg)
    except (ValueError, ArithmeticError, OSError) as exc:
        return _fail("computation", exc, 3)
    print(json.dumps({"mode": cfg.mode, "out": cfg.out_dir, "wall_time_s": round(report.wall_time, 3),
                      "files": len(report.files)}))
    return 0


if __name__ == "__main__":
    sys.exit(main())
