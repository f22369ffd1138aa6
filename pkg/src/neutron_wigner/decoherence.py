"""Purity, the decoherence parameter and (delta, sigma) sweeps."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from . import physics
from .states import FluctuationLaw, GaussianPacket, StateKind, evaluator
from .transform import DEFAULT_N, PhaseSpaceGrid, SupportError, WignerField, evaluate_on_grid

EPSILON_TOL = 1e-8
EXTREMUM_FLOOR = 1e-6
SUPPORT_REL = 1e-10


@dataclass(frozen=True)
class PurityResult:
    trace: float
    trace_sq: float

    @property
    def ratio(self) -> float:
        return self.trace_sq / self.trace**2


def _check_boundary(values: np.ndarray):
    peak = float(np.max(np.abs(values)))
    edges = {
        "x_min": values[0, :],
        "x_max": values[-1, :],
        "k_min": values[:, 0],
        "k_max": values[:, -1],
    }
    for name, edge in edges.items():
        level = float(np.max(np.abs(edge)))
        if level > SUPPORT_REL * peak:
            raise SupportError(
                f"grid boundary {name} cuts the support: |W|={level:.3e} is "
                f"{level / peak:.3e} of the peak (limit {SUPPORT_REL:.0e})"
            )


def purity(source, grid: Optional[PhaseSpaceGrid] = None) -> PurityResult:
    """Trace and trace of rho^2 from a Wigner function.

    ``source`` is a :class:`WignerField` or a callable ``f(x, k)`` tabulated
    on ``grid``. Returns ``trace = int W`` and ``trace_sq = 2 pi int W^2``.
    """
    if isinstance(source, WignerField):
        wf = source
    else:
        if grid is None:
            raise ValueError("a grid is required when purity is given an evaluator")
        wf = evaluate_on_grid(source, grid, {"kind": "evaluator"})
    _check_boundary(wf.values)
    x, k = wf.grid.x, wf.grid.k
    tr = np.trapezoid(np.trapezoid(wf.values, k, axis=1), x)
    tr2 = np.trapezoid(np.trapezoid(wf.values * wf.values, k, axis=1), x)
    return PurityResult(float(tr), float(2.0 * math.pi * tr2))


@dataclass(frozen=True)
class DecoherenceResult:
    epsilon: float  # raw value, not clamped
    purity_ratio: float
    total_N: float
    packet: GaussianPacket
    law: FluctuationLaw
    grid: PhaseSpaceGrid

    def __post_init__(self):
        if not (-EPSILON_TOL <= self.epsilon <= 1 + EPSILON_TOL):
            raise ValueError(f"epsilon={self.epsilon!r} outside [0, 1] beyond tolerance")

    @property
    def clamped(self) -> float:
        return min(1.0, max(0.0, self.epsilon))

    @property
    def k0(self) -> float:
        return self.packet.k0


def epsilon_from_field(wf: WignerField) -> float:
    """1 - Tr rho^2 / (Tr rho)^2 for any tabulated field, e.g. a Monte Carlo one."""
    res = purity(wf)
    return 1.0 - res.ratio


def decoherence_parameter(
    packet: GaussianPacket, law: FluctuationLaw, grid: Optional[PhaseSpaceGrid] = None, n: int = DEFAULT_N
) -> DecoherenceResult:
    """Decoherence parameter of the noise-averaged cat state.

    Uses the closed-form averaged Wigner function on ``grid`` (default: the
    state's default window at ``n x n`` nodes).
    """
    s = StateKind("cat_averaged", packet, law)
    grid = grid or PhaseSpaceGrid.for_state(s, n, n)
    res = purity(evaluator(s), grid)
    ratio = res.ratio
    return DecoherenceResult(1.0 - ratio, ratio, res.trace, packet, law, grid)


@dataclass
class SweepSurface:
    delta_axis: np.ndarray
    sigma_axis: np.ndarray
    epsilon: np.ndarray  # shape (len(delta_axis), len(sigma_axis))
    fixed: dict
    cell_grids: dict = field(default_factory=dict)
    failures: dict = field(default_factory=dict)

    def __post_init__(self):
        self.delta_axis = np.asarray(self.delta_axis, dtype=float)
        self.sigma_axis = np.asarray(self.sigma_axis, dtype=float)
        self.epsilon = np.asarray(self.epsilon, dtype=float)
        for name in ("delta_axis", "sigma_axis"):
            ax = getattr(self, name)
            if ax.ndim != 1 or ax.size == 0 or np.any(np.diff(ax) <= 0):
                raise ValueError(f"{name} must be a non-empty, strictly increasing 1-D array")
        if self.epsilon.shape != (self.delta_axis.size, self.sigma_axis.size):
            raise ValueError("epsilon shape must be (len(delta_axis), len(sigma_axis))")

    @property
    def complete(self) -> bool:
        return not self.failures and bool(np.all(np.isfinite(self.epsilon)))

    def column(self, delta: float) -> np.ndarray:
        """epsilon(sigma) at the axis value closest to ``delta``."""
        return self.epsilon[int(np.argmin(np.abs(self.delta_axis - delta)))]


def sweep(
    delta_axis,
    sigma_axis,
    k0: Optional[float] = None,
    delta0: Union[float, physics.ExperimentConfig] = 16.1,
    n: int = DEFAULT_N,
    max_workers: Optional[int] = None,
) -> SweepSurface:
    """Tabulate epsilon over a (delta, sigma) lattice.

    ``delta0`` is either the fixed mean separation in internal units or an
    :class:`~neutron_wigner.physics.ExperimentConfig`, in which case both the
    separation and ``k0`` come from the experiment. A failing cell is
    recorded in ``failures`` and left as NaN.
    """
    if isinstance(delta0, physics.ExperimentConfig):
        k_exp, _, sep, _ = physics.to_internal(delta0)
        k0 = k_exp if k0 is None else k0
        delta0 = sep
    if k0 is None:
        k0 = 1.7
    deltas = np.asarray(delta_axis, dtype=float)
    sigmas = np.asarray(sigma_axis, dtype=float)
    if np.any(deltas < 0.05) or np.any(deltas > 10) or np.any(sigmas < 0) or np.any(sigmas > 10):
        raise ValueError("sweep axes must lie in delta in [0.05, 10] and sigma in [0, 10]")

    eps = np.full((deltas.size, sigmas.size), np.nan)
    grids, failures = {}, {}

    def cell(ij):
        i, j = ij
        try:
            res = decoherence_parameter(GaussianPacket(0.0, k0, deltas[i]), FluctuationLaw(delta0, sigmas[j]), n=n)
        except (ValueError, ArithmeticError) as exc:
            failures[(i, j)] = f"{type(exc).__name__}: {exc}"
            return
        eps[i, j] = res.epsilon
        grids[(i, j)] = res.grid.as_dict()

    cells = [(i, j) for i in range(deltas.size) for j in range(sigmas.size)]
    if max_workers and max_workers > 1:
        with ThreadPoolExecutor(max_workers) as pool:
            list(pool.map(cell, cells))
    else:
        for ij in cells:
            cell(ij)
    return SweepSurface(deltas, sigmas, eps, {"k0": k0, "delta0": delta0, "n": n}, grids, failures)


@dataclass(frozen=True)
class Extremum:
    delta: float
    sigma: float
    kind: str  # "max" or "min"


def find_extrema(surface: SweepSurface, floor: float = EXTREMUM_FLOOR):
    """Interior sign changes of the sigma-direction difference of epsilon.

    Differences with magnitude below ``floor`` count as flat and never start
    or end a sign change.
    """
    if not surface.complete:
        raise ValueError("find_extrema needs a complete surface")
    found = []
    for i, row in enumerate(surface.epsilon):
        diffs = np.diff(row)
        signs = np.where(np.abs(diffs) < floor, 0, np.sign(diffs)).astype(int)
        nonzero = np.nonzero(signs)[0]
        for a, b in zip(nonzero[:-1], nonzero[1:]):
            if signs[a] != signs[b]:
                kind = "max" if signs[a] > 0 else "min"
                found.append(Extremum(float(surface.delta_axis[i]), float(surface.sigma_axis[a + 1]), kind))
    return found
