"""CSV and JSON containers for Wigner fields and sweep surfaces.

Numbers are written with 17 significant digits in CSV and with Python's
shortest round-trip repr in JSON; both reproduce every double bit-for-bit.
"""

from __future__ import annotations

import io
import json
from pathlib import Path

import numpy as np

from .transform import PhaseSpaceGrid, WignerField

UNIT_HEADER = "# x_unit=1e-10 m, k_unit=1e10 m^-1"
FMT = "%.17g"


def _comment_lines(text: str):
    return [line for line in text.splitlines() if line.startswith("#")]


def field_to_csv(wf: WignerField, header: str | None = None) -> str:
    buf = io.StringIO()
    if header:
        buf.write(header.rstrip("\n") + "\n")
    buf.write(UNIT_HEADER + "\n")
    buf.write("x,k,w\n")
    xs, ks = np.meshgrid(wf.grid.x, wf.grid.k, indexing="ij")
    table = np.column_stack([xs.ravel(), ks.ravel(), wf.values.ravel()])
    np.savetxt(buf, table, fmt=FMT, delimiter=",")
    return buf.getvalue()


def field_from_csv(text: str) -> WignerField:
    lines = [ln for ln in text.splitlines() if ln and not ln.startswith("#") and ln != "x,k,w"]
    table = np.array([[float(v) for v in ln.split(",")] for ln in lines])
    xs = np.unique(table[:, 0])
    ks = np.unique(table[:, 1])
    grid = PhaseSpaceGrid(float(xs[0]), float(xs[-1]), float(ks[0]), float(ks[-1]), xs.size, ks.size)
    values = table[:, 2].reshape(xs.size, ks.size)
    prov = {"kind": "csv", "header": _comment_lines(text)}
    return WignerField(grid, values, prov)


def field_to_json(wf: WignerField, meta: dict | None = None) -> str:
    doc = dict(meta or {})
    doc.update(
        {
            "format": "wigner-field",
            "units": {"x": "1e-10 m", "k": "1e10 m^-1"},
            "grid": wf.grid.as_dict(),
            "provenance": wf.provenance,
            "values": wf.values.tolist(),
        }
    )
    if wf.stderr is not None:
        doc["stderr"] = wf.stderr.tolist()
    return json.dumps(doc, sort_keys=True) + "\n"


def field_from_json(text: str) -> WignerField:
    doc = json.loads(text)
    if doc.get("format") != "wigner-field":
        raise ValueError("not a wigner-field document")
    grid = PhaseSpaceGrid(**doc["grid"])
    stderr = np.array(doc["stderr"]) if "stderr" in doc else None
    return WignerField(grid, np.array(doc["values"], dtype=float), doc["provenance"], stderr=stderr)


def write_field(path, wf: WignerField, fmt: str = "csv", header: str | None = None, meta: dict | None = None) -> Path:
    path = Path(path)
    text = field_to_csv(wf, header) if fmt == "csv" else field_to_json(wf, meta)
    path.write_text(text)
    return path


def read_field(path) -> WignerField:
    path = Path(path)
    text = path.read_text()
    return field_from_json(text) if path.suffix == ".json" else field_from_csv(text)


def surface_to_csv(surface, header: str | None = None) -> str:
    buf = io.StringIO()
    if header:
        buf.write(header.rstrip("\n") + "\n")
    buf.write("# delta, sigma in 1e-10 m\n")
    buf.write("delta,sigma,epsilon\n")
    ds, ss = np.meshgrid(surface.delta_axis, surface.sigma_axis, indexing="ij")
    table = np.column_stack([ds.ravel(), ss.ravel(), surface.epsilon.ravel()])
    np.savetxt(buf, table, fmt=FMT, delimiter=",")
    return buf.getvalue()


def surface_to_json(surface, extrema=(), meta: dict | None = None) -> str:
    doc = dict(meta or {})
    doc.update(
        {
            "format": "sweep-surface",
            "delta_axis": surface.delta_axis.tolist(),
            "sigma_axis": surface.sigma_axis.tolist(),
            "epsilon": [[None if not np.isfinite(v) else float(v) for v in row] for row in surface.epsilon],
            "fixed": surface.fixed,
            "cell_grids": [
                {"i": i, "j": j, **g} for (i, j), g in sorted(surface.cell_grids.items())
            ],
            "failures": [{"i": i, "j": j, "error": e} for (i, j), e in sorted(surface.failures.items())],
            "extrema": [{"delta": e.delta, "sigma": e.sigma, "kind": e.kind} for e in extrema],
        }
    )
    return json.dumps(doc, sort_keys=True) + "\n"


def surface_from_json(text: str):
    from .decoherence import Extremum, SweepSurface

    doc = json.loads(text)
    if doc.get("format") != "sweep-surface":
        raise ValueError("not a sweep-surface document")
    eps = np.array([[np.nan if v is None else v for v in row] for row in doc["epsilon"]], dtype=float)
    grids = {(c.pop("i"), c.pop("j")): c for c in doc["cell_grids"]}
    failures = {(f["i"], f["j"]): f["error"] for f in doc["failures"]}
    surface = SweepSurface(doc["delta_axis"], doc["sigma_axis"], eps, doc["fixed"], grids, failures)
    return surface, [Extremum(**e) for e in doc["extrema"]]
