"""Numerical Wigner transforms, displacement averaging and grid reductions."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.special import ndtri

from .states import FluctuationLaw, StateKind

DEFAULT_N = 512
DEFAULT_ORDER = 64


class SupportError(ValueError):
    """Raised when a function is not negligible at the edge of its sampled domain."""


@dataclass(frozen=True)
class PhaseSpaceGrid:
    x_min: float
    x_max: float
    k_min: float
    k_max: float
    nx: int = DEFAULT_N
    nk: int = DEFAULT_N

    def __post_init__(self):
        if not (self.x_max > self.x_min and self.k_max > self.k_min):
            raise ValueError("grid bounds must satisfy x_max > x_min and k_max > k_min")
        if int(self.nx) < 8 or int(self.nk) < 8:
            raise ValueError("nx and nk must be at least 8")
        object.__setattr__(self, "nx", int(self.nx))
        object.__setattr__(self, "nk", int(self.nk))

    @property
    def x(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.nx)

    @property
    def k(self) -> np.ndarray:
        return np.linspace(self.k_min, self.k_max, self.nk)

    @property
    def hx(self) -> float:
        return (self.x_max - self.x_min) / (self.nx - 1)

    @property
    def hk(self) -> float:
        return (self.k_max - self.k_min) / (self.nk - 1)

    def resized(self, nx, nk) -> "PhaseSpaceGrid":
        return PhaseSpaceGrid(self.x_min, self.x_max, self.k_min, self.k_max, nx, nk)

    def as_dict(self) -> dict:
        return {
            "x_min": self.x_min,
            "x_max": self.x_max,
            "k_min": self.k_min,
            "k_max": self.k_max,
            "nx": self.nx,
            "nk": self.nk,
        }

    @classmethod
    def for_state(cls, s: StateKind, nx=DEFAULT_N, nk=DEFAULT_N) -> "PhaseSpaceGrid":
        """Default window: x0 +/- (8 delta' + |Delta0|), k0 +/- 8 delta_k.

        The packet centre (x0, k0) is always a grid node.

        ``delta' = sqrt(delta^2 + sigma^2)`` bounds the widest Gaussian of
        every state kind.
        """
        p = s.packet
        delta0 = 0.0 if s.law is None else s.law.delta0
        sigma = 0.0 if s.law is None else s.law.sigma
        half_x = 8.0 * math.hypot(p.delta, sigma) + abs(delta0)
        half_k = 8.0 * p.delta_k
        return cls(*_centered(p.x0, half_x, nx), *_centered(p.k0, half_k, nk), nx, nk)


def _centered(center, half, n):
    """Bounds of an n-node axis covering center +/- half with ``center`` on a node.

    For even n the extra node goes on the high side.
    """
    m = (int(n) - 1) // 2
    step = half / m
    lo = center - m * step
    return lo, lo + (int(n) - 1) * step


@dataclass(frozen=True, eq=False)
class WignerField:
    """Wigner values sampled on a grid; ``values[i, j]`` is W(x_i, k_j)."""

    grid: PhaseSpaceGrid
    values: np.ndarray
    provenance: dict
    stderr: Optional[np.ndarray] = None

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != (self.grid.nx, self.grid.nk):
            raise ValueError(f"values shape {values.shape} does not match grid {(self.grid.nx, self.grid.nk)}")
        if not np.all(np.isfinite(values)):
            raise ValueError("WignerField values must be finite")
        if not self.provenance:
            raise ValueError("WignerField provenance must be populated")
        object.__setattr__(self, "values", values)

    def scaled(self, c: float) -> "WignerField":
        return WignerField(self.grid, c * self.values, dict(self.provenance, scale=c))


def sample_field(s: StateKind, grid: Optional[PhaseSpaceGrid] = None) -> WignerField:
    """Tabulate the closed-form Wigner function of ``s``."""
    from .states import wigner

    grid = grid or PhaseSpaceGrid.for_state(s)
    values = wigner(grid.x[:, None], grid.k[None, :], s)
    law = None if s.law is None else {"delta0": s.law.delta0, "sigma": s.law.sigma}
    prov = {
        "kind": "analytic",
        "tag": s.tag,
        "packet": {"x0": s.packet.x0, "k0": s.packet.k0, "delta": s.packet.delta},
        "law": law,
    }
    return WignerField(grid, values, prov)


def evaluate_on_grid(func: Callable, grid: PhaseSpaceGrid, provenance: dict) -> WignerField:
    values = np.broadcast_to(func(grid.x[:, None], grid.k[None, :]), (grid.nx, grid.nk))
    return WignerField(grid, np.array(values, dtype=float), provenance)


# -- sampled wave functions and density kernels ------------------------------


@dataclass(frozen=True, eq=False)
class SampledWavefunction:
    """psi on the uniform lattice ``x_start + j * step``.

    ``expected_norm`` is the squared norm the samples must reproduce; it is 1
    for physical states and the trace N for post-selected ones.
    """

    x_start: float
    step: float
    amplitudes: np.ndarray
    expected_norm: float = 1.0
    norm_tol: float = 1e-6

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if not self.step > 0:
            raise ValueError("step must be positive")
        if amps.ndim != 1 or amps.size < 16:
            raise ValueError("need a 1-D array of at least 16 samples")
        norm = float(np.sum(np.abs(amps) ** 2) * self.step)
        if abs(norm - self.expected_norm) > self.norm_tol * max(self.expected_norm, 1e-300):
            raise ValueError(f"squared norm {norm!r} differs from expected {self.expected_norm!r}")
        object.__setattr__(self, "amplitudes", amps)

    @property
    def x(self) -> np.ndarray:
        return self.x_start + self.step * np.arange(self.amplitudes.size)

    @classmethod
    def from_function(cls, psi: Callable, x_min, x_max, step, expected_norm=1.0, norm_tol=1e-6):
        n = int(round((x_max - x_min) / step)) + 1
        xs = x_min + step * np.arange(n)
        return cls(x_min, step, psi(xs), expected_norm, norm_tol)


@dataclass(frozen=True)
class DensityKernel:
    """Position-space density matrix rho(a, b) = <a|rho|b>.

    ``func`` must broadcast over its two array arguments. ``window`` is the
    half-width in xi = a - b beyond which the kernel is negligible.
    """

    func: Callable
    window: float

    def __call__(self, a, b):
        return self.func(np.asarray(a, dtype=float), np.asarray(b, dtype=float))

    def scaled(self, c: float) -> "DensityKernel":
        f = self.func
        return DensityKernel(lambda a, b: c * f(a, b), self.window)

    def hermiticity_defect(self, points) -> float:
        pts = np.asarray(points, dtype=float)
        a, b = pts[:, None], pts[None, :]
        return float(np.max(np.abs(self(a, b) - np.conj(self(b, a)))))

    @classmethod
    def pure(cls, psi: Callable, window: float) -> "DensityKernel":
        return cls(lambda a, b: psi(a) * np.conj(psi(b)), window)

    @classmethod
    def mixture(cls, family: Callable, law: FluctuationLaw, window: float, order=DEFAULT_ORDER):
        """rho = E[|psi_D><psi_D|] over D ~ law, by Gauss-Hermite quadrature.

        ``family(x, d)`` returns psi_d(x).
        """
        nodes, weights = shift_nodes(law, order)

        def rho(a, b):
            out = 0.0
            for d, w in zip(nodes, weights):
                out = out + w * family(a, d) * np.conj(family(b, d))
            return out

        return cls(rho, window)


# -- numerical transforms -----------------------------------------------------


def _xi_step_limit(k_axis) -> float:
    kmax = float(np.max(np.abs(k_axis)))
    return math.inf if kmax == 0 else math.pi / (4.0 * kmax)


def _fourier_refine(amps: np.ndarray, factor: int) -> np.ndarray:
    """Band-limited upsampling of ``amps`` by an integer factor."""
    if factor == 1:
        return amps
    n = amps.size
    spec = np.fft.fft(amps)
    padded = np.zeros(n * factor, dtype=complex)
    half = n // 2
    padded[:half] = spec[:half]
    padded[-(n - half):] = spec[half:]
    return np.fft.ifft(padded) * factor


def _fourier_shift(amps: np.ndarray, frac: float) -> np.ndarray:
    """Band-limited samples at ``j + frac`` from samples at integer ``j``."""
    n = amps.size
    freqs = np.fft.fftfreq(n)
    return np.fft.ifft(np.fft.fft(amps) * np.exp(2j * math.pi * freqs * frac))


def _cubic_shift(amps: np.ndarray, frac: float) -> np.ndarray:
    """Four-point Lagrange interpolation at ``j + frac``; zero outside the samples."""
    t = frac
    w = (
        -t * (t - 1) * (t - 2) / 6.0,
        (t + 1) * (t - 1) * (t - 2) / 2.0,
        -(t + 1) * t * (t - 2) / 2.0,
        (t + 1) * t * (t - 1) / 6.0,
    )
    padded = np.concatenate([np.zeros(1, complex), amps, np.zeros(2, complex)])
    n = amps.size
    return w[0] * padded[0:n] + w[1] * padded[1 : n + 1] + w[2] * padded[2 : n + 2] + w[3] * padded[3 : n + 3]


def _check_support(amps: np.ndarray, margin: int = 4, rel: float = 1e-10):
    peak = float(np.max(np.abs(amps)))
    if peak == 0:
        raise SupportError("wave function is identically zero")
    edge = float(max(np.max(np.abs(amps[:margin])), np.max(np.abs(amps[-margin:]))))
    if edge > rel * peak:
        raise SupportError(
            f"wave function is not negligible at the sampled boundary: |psi|={edge:.3e} "
            f"is {edge / peak:.3e} of the peak (limit {rel:.0e})"
        )


def _accumulate(products: np.ndarray, k_axis: np.ndarray, xi_step: float, rel_floor=1e-16) -> np.ndarray:
    """(xi_step / 2 pi) sum_j e^{-i k xi_j} f_j with f_{-j} = conj(f_j).

    ``products[i, j]`` holds f_j at the i-th x node for j >= 0.
    """
    mags = np.max(np.abs(products), axis=0)
    peak = float(np.max(mags)) if mags.size else 0.0
    if peak == 0:
        return np.zeros((products.shape[0], k_axis.size))
    keep = np.nonzero(mags > rel_floor * peak)[0]
    jmax = int(keep[-1]) + 1
    # Tail values sit ~1e-10 below the peak after cancellation across the sum,
    # so phases and the contraction are carried in extended precision.
    f = products[:, :jmax]
    j = np.arange(jmax, dtype=np.longdouble)
    weights = np.where(j == 0, 1.0, 2.0).astype(np.longdouble)
    phase = np.outer(j * np.longdouble(xi_step), k_axis.astype(np.longdouble))
    cos = weights[:, None] * np.cos(phase)
    sin = weights[:, None] * np.sin(phase)
    acc = f.real.astype(np.longdouble) @ cos + f.imag.astype(np.longdouble) @ sin
    return (acc * (np.longdouble(xi_step) / (2 * np.pi))).astype(float)


def wigner_transform(psi: SampledWavefunction, grid: PhaseSpaceGrid, interpolation="fourier") -> WignerField:
    """Wigner function of a sampled pure state by direct quadrature.

    The xi-integral uses the trapezoid rule with step ``2h`` so that
    ``x +/- xi/2`` fall on a lattice offset from the samples by a fixed
    fraction per x node. The samples are first refined until
    ``max|k| * 2h <= pi/4``. Off-lattice values come from band-limited
    (``"fourier"``) or four-point (``"cubic"``) interpolation; nodes that sit
    on the sample lattice use the samples directly.
    """
    if interpolation not in ("fourier", "cubic"):
        raise ValueError("interpolation must be 'fourier' or 'cubic'")
    amps = psi.amplitudes
    _check_support(amps)
    k_axis = grid.k
    factor = max(1, math.ceil(2.0 * psi.step / _xi_step_limit(k_axis) - 1e-12))
    if interpolation == "fourier":
        amps = _fourier_refine(amps, factor)
    else:
        amps = _refine_cubic(amps, factor)
    h = psi.step / factor
    n = amps.size
    xs = grid.x
    pos = (xs - psi.x_start) / h
    base = np.floor(pos + 1e-9).astype(int)
    frac = pos - base
    frac[np.abs(frac) < 1e-9] = 0.0

    jmax = n
    products = np.zeros((xs.size, jmax), dtype=complex)
    shift = _fourier_shift if interpolation == "fourier" else _cubic_shift
    cache = {}
    for i, (b, t) in enumerate(zip(base, frac)):
        key = round(float(t), 12)
        if key not in cache:
            cache[key] = amps if t == 0.0 else shift(amps, t)
        shifted = cache[key]
        if len(cache) > 64:
            cache.clear()
        j = np.arange(jmax)
        up, down = b + j, b - j
        valid = (up >= 0) & (up < n) & (down >= 0) & (down < n)
        if not np.any(valid):
            continue
        products[i, valid] = shifted[up[valid]] * np.conj(shifted[down[valid]])

    values = _accumulate(products, k_axis, 2.0 * h)
    prov = {"kind": "numeric_transform", "interpolation": interpolation, "refine": factor, "step": h}
    return WignerField(grid, values, prov)


def _refine_cubic(amps, factor):
    if factor == 1:
        return amps
    out = np.empty(amps.size * factor, dtype=complex)
    for r in range(factor):
        out[r::factor] = amps if r == 0 else _cubic_shift(amps, r / factor)
    return out[: (amps.size - 1) * factor + 1]


def wigner_from_density(rho: DensityKernel, grid: PhaseSpaceGrid) -> WignerField:
    """Wigner function of a density kernel by trapezoid quadrature over xi.

    The kernel must be negligible (1e-16 of its diagonal peak) at
    ``|xi| = rho.window``.
    """
    xs, k_axis = grid.x, grid.k
    nsteps = max(16, math.ceil(rho.window / _xi_step_limit(k_axis)))
    xi_step = rho.window / nsteps
    xi = xi_step * np.arange(nsteps + 1)
    a = xs[:, None] + 0.5 * xi[None, :]
    b = xs[:, None] - 0.5 * xi[None, :]
    products = np.asarray(rho(a, b), dtype=complex)
    peak = float(np.max(np.abs(products[:, 0])))
    edge = float(np.max(np.abs(products[:, -1])))
    if peak == 0 or edge > 1e-16 * peak:
        raise SupportError(
            f"density kernel is not negligible at |xi|={rho.window}: "
            f"|rho|={edge:.3e} against diagonal peak {peak:.3e}"
        )
    values = _accumulate(products, k_axis, xi_step, rel_floor=0.0)
    return WignerField(grid, values, {"kind": "density_transform", "xi_step": xi_step, "window": rho.window})


# -- averaging over the random displacement ---------------------------------


def shift_nodes(law: FluctuationLaw, order=DEFAULT_ORDER):
    """Gauss-Hermite nodes and weights for expectations over ``law``."""
    if not 4 <= int(order) <= 256:
        raise ValueError(f"quadrature order must lie in [4, 256], got {order!r}")
    t, w = np.polynomial.hermite.hermgauss(int(order))
    return law.delta0 + math.sqrt(2.0) * law.sigma * t, w / math.sqrt(math.pi)


def _apply(base, x, k, d, parametric):
    return base(x, k, d) if parametric else base(x - d, k)


def average_over_shift(base: Callable, law: FluctuationLaw, order=DEFAULT_ORDER, parametric=False) -> Callable:
    """Return ``(x, k) -> E[base(x - D, k)]`` for D distributed by ``law``.

    With ``parametric=True`` the displacement is handed to ``base(x, k, D)``
    instead of translating x; the cat state depends on its separation this way.
    """
    if law.sigma == 0:
        if not 4 <= int(order) <= 256:
            raise ValueError(f"quadrature order must lie in [4, 256], got {order!r}")
        return lambda x, k: _apply(base, np.asarray(x, float), np.asarray(k, float), law.delta0, parametric)
    nodes, weights = shift_nodes(law, order)

    def averaged(x, k):
        x = np.asarray(x, dtype=float)
        k = np.asarray(k, dtype=float)
        out = 0.0
        for d, w in zip(nodes, weights):
            out = out + w * _apply(base, x, k, d, parametric)
        return out

    return averaged


def normal_draws(law: FluctuationLaw, samples: int, seed: int) -> np.ndarray:
    """Displacements drawn from ``law`` by inverse CDF on a Philox stream.

    Uniforms are k/2^53 from ``Generator.random``, moved to the open
    interval by adding 2^-54 before the inverse normal CDF.
    """
    gen = np.random.Generator(np.random.Philox(int(seed)))
    u = gen.random(int(samples)) + 2.0**-54
    return law.delta0 + law.sigma * ndtri(u)


def monte_carlo_average(
    base: Callable,
    law: FluctuationLaw,
    grid: PhaseSpaceGrid,
    samples: int,
    seed: int,
    parametric=False,
    chunk: int = 32,
) -> WignerField:
    """Sample mean of ``base`` over random displacements on ``grid``.

    The returned field carries the per-node standard error of the mean in
    ``stderr``. Draws and chunk sums follow a fixed order, so a given seed
    always yields the same bits.
    """
    if samples < 100:
        raise ValueError("monte_carlo_average needs at least 100 samples")
    prov = {"kind": "monte_carlo", "seed": int(seed), "samples": int(samples), "rng": "philox+ndtri"}
    x = grid.x[None, :, None]
    k = grid.k[None, None, :]
    if law.sigma == 0:
        values = np.broadcast_to(_apply(base, x, k, law.delta0, parametric)[0], (grid.nx, grid.nk))
        return WignerField(grid, np.array(values), prov, stderr=np.zeros((grid.nx, grid.nk)))
    draws = normal_draws(law, samples, seed)
    total = np.zeros((grid.nx, grid.nk))
    total_sq = np.zeros((grid.nx, grid.nk))
    for start in range(0, draws.size, chunk):
        d = draws[start : start + chunk][:, None, None]
        vals = np.broadcast_to(_apply(base, x, k, d, parametric), (d.shape[0], grid.nx, grid.nk))
        total += vals.sum(axis=0)
        total_sq += (vals * vals).sum(axis=0)
    mean = total / samples
    var = np.maximum(total_sq / samples - mean * mean, 0.0) * samples / (samples - 1)
    return WignerField(grid, mean, prov, stderr=np.sqrt(var / samples))


def z_scores(mc: WignerField, exact: np.ndarray, rel_floor: float = 1e-10) -> np.ndarray:
    """Per-node (estimate - exact) / stderr, NaN where the estimator is degenerate.

    Nodes whose standard error is below ``rel_floor`` times the peak of
    ``|exact|`` are masked: there the mean is carried by rare draws and the
    normal approximation does not hold.
    """
    if mc.stderr is None:
        raise ValueError("field carries no standard errors")
    exact = np.asarray(exact, dtype=float)
    mask = mc.stderr > rel_floor * float(np.max(np.abs(exact)))
    z = np.full(exact.shape, np.nan)
    z[mask] = (mc.values[mask] - exact[mask]) / mc.stderr[mask]
    return z


# -- reductions ---------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Reduction:
    total: float
    marginal_x: np.ndarray
    marginal_k: np.ndarray
    mean_x: float
    var_x: float
    mean_k: float
    var_k: float
    extras: dict = field(default_factory=dict)


def _moments(axis, density):
    mass = np.trapezoid(density, axis)
    mean = np.trapezoid(axis * density, axis) / mass
    var = np.trapezoid((axis - mean) ** 2 * density, axis) / mass
    return float(mean), float(var)


def reduce(wf: WignerField) -> Reduction:
    """Trapezoid integral, marginals and normalized first two moments."""
    x, k = wf.grid.x, wf.grid.k
    px = np.trapezoid(wf.values, k, axis=1)
    pk = np.trapezoid(wf.values, x, axis=0)
    total = float(np.trapezoid(px, x))
    mean_x, var_x = _moments(x, px)
    mean_k, var_k = _moments(k, pk)
    return Reduction(total, px, pk, mean_x, var_x, mean_k, var_k)
