"""Closed-form wave functions, Wigner functions and marginals.

All quantities are in internal units (lengths in 1e-10 m, wavenumbers in
1e10 m^-1). The evaluators broadcast over ``x`` and ``k``; they are written
as products of a position factor and a momentum factor so that calling them
with ``x[:, None]`` and ``k[None, :]`` only evaluates transcendental
functions on the 1-D axes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

TAGS = ("gaussian", "squashed", "cat", "cat_averaged")

# Exponents below this return exactly zero instead of denormals.
EXP_FLOOR = -700.0


def _exp(arg):
    arg = np.asarray(arg, dtype=float)
    return np.where(arg < EXP_FLOOR, 0.0, np.exp(np.maximum(arg, EXP_FLOOR)))


def _positive(name, value):
    if not (math.isfinite(value) and value > 0):
        raise ValueError(f"{name} must be finite and positive, got {value!r}")


@dataclass(frozen=True)
class GaussianPacket:
    """Minimum-uncertainty packet centred at ``x0`` with mean wavenumber ``k0``."""

    x0: float
    k0: float
    delta: float

    def __post_init__(self):
        if not (math.isfinite(self.x0) and math.isfinite(self.k0)):
            raise ValueError("x0 and k0 must be finite")
        _positive("delta", self.delta)

    @property
    def delta_k(self) -> float:
        return 1.0 / (2.0 * self.delta)

    @property
    def is_coherent(self) -> bool:
        """Equal position and wavenumber widths, i.e. delta = 1/sqrt(2)."""
        return math.isclose(self.delta, self.delta_k, rel_tol=1e-12)


@dataclass(frozen=True)
class FluctuationLaw:
    """Normal law of the random displacement: mean ``delta0``, std ``sigma``.

    ``sigma == 0`` is the deterministic limit.
    """

    delta0: float
    sigma: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.delta0):
            raise ValueError("delta0 must be finite")
        if not (math.isfinite(self.sigma) and self.sigma >= 0):
            raise ValueError(f"sigma must be finite and >= 0, got {self.sigma!r}")

    def density(self, d):
        d = np.asarray(d, dtype=float)
        if self.sigma == 0:
            raise ValueError("the sigma = 0 law is a point mass and has no density")
        z = (d - self.delta0) / self.sigma
        return np.exp(-0.5 * z * z) / math.sqrt(2.0 * math.pi * self.sigma**2)


@dataclass(frozen=True)
class StateKind:
    """One of the four states with a closed-form Wigner function.

    ``gaussian`` ignores ``law``; ``cat`` uses only ``law.delta0`` as the
    separation of its two components.
    """

    tag: str
    packet: GaussianPacket
    law: Optional[FluctuationLaw] = None

    def __post_init__(self):
        if self.tag not in TAGS:
            raise ValueError(f"unknown state tag {self.tag!r}; expected one of {TAGS}")
        if not isinstance(self.packet, GaussianPacket):
            raise TypeError("packet must be a GaussianPacket")
        if self.tag == "gaussian":
            if self.law is not None:
                object.__setattr__(self, "law", None)
        elif not isinstance(self.law, FluctuationLaw):
            raise ValueError(f"state {self.tag!r} requires a FluctuationLaw")
        elif self.tag == "cat" and self.law.sigma != 0:
            object.__setattr__(self, "law", FluctuationLaw(self.law.delta0, 0.0))


# -- amplitudes -------------------------------------------------------------


def psi_position(x, p: GaussianPacket):
    """Position amplitude (2 pi delta^2)^(-1/4) exp[-(x-x0)^2/4delta^2 + i k0 x]."""
    x = np.asarray(x, dtype=float)
    norm = (2.0 * math.pi * p.delta**2) ** -0.25
    return norm * _exp(-((x - p.x0) ** 2) / (4.0 * p.delta**2)) * np.exp(1j * p.k0 * x)


def phi_momentum(k, p: GaussianPacket):
    """Momentum amplitude, the unitary Fourier transform of :func:`psi_position`."""
    k = np.asarray(k, dtype=float)
    norm = (2.0 * p.delta**2 / math.pi) ** 0.25
    dk = k - p.k0
    return norm * _exp(-(p.delta**2) * dk**2) * np.exp(-1j * dk * p.x0)


def cat_wavefunction(x, p: GaussianPacket, separation: float):
    """Post-selected superposition ``(psi(x - d/2) + psi(x + d/2)) / 2``.

    Each component is a rigid translation of :func:`psi_position`, phase
    included. The result is not normalized: its squared norm is
    :func:`norm_cat_averaged` at ``sigma = 0``.
    """
    x = np.asarray(x, dtype=float)
    half = 0.5 * separation
    return 0.5 * (psi_position(x - half, p) + psi_position(x + half, p))


# -- Wigner functions -------------------------------------------------------


def _k_envelope(k, p):
    return _exp(-2.0 * p.delta**2 * (np.asarray(k, dtype=float) - p.k0) ** 2)


def wigner_gaussian(x, k, p: GaussianPacket):
    x = np.asarray(x, dtype=float)
    xf = _exp(-((x - p.x0) ** 2) / (2.0 * p.delta**2))
    return xf * _k_envelope(k, p) / math.pi


def wigner_squashed(x, k, p: GaussianPacket, law: FluctuationLaw):
    """Gaussian Wigner function convolved in x with the displacement law."""
    x = np.asarray(x, dtype=float)
    var = p.delta**2 + law.sigma**2
    amp = p.delta / math.sqrt(var)
    xf = amp * _exp(-((x - p.x0 - law.delta0) ** 2) / (2.0 * var))
    return xf * _k_envelope(k, p) / math.pi


def wigner_cat(x, k, p: GaussianPacket, separation: float):
    """Wigner function of :func:`cat_wavefunction`; reduces to the Gaussian at zero separation."""
    x = np.asarray(x, dtype=float)
    k = np.asarray(k, dtype=float)
    two_var = 2.0 * p.delta**2
    u = x - p.x0
    half = 0.5 * separation
    gauss = _exp(-((u - half) ** 2) / two_var) + _exp(-((u + half) ** 2) / two_var)
    interference = 2.0 * _exp(-(u**2) / two_var) * np.cos(k * separation)
    return _k_envelope(k, p) * (gauss + interference) / (4.0 * math.pi)


def cat_averaged_parts(x, k, p: GaussianPacket, law: FluctuationLaw):
    """Split the averaged cat Wigner function into (component Gaussians, interference)."""
    x = np.asarray(x, dtype=float)
    k = np.asarray(k, dtype=float)
    var = p.delta**2 + 0.25 * law.sigma**2
    amp = p.delta / math.sqrt(var)
    u = x - p.x0
    half = 0.5 * law.delta0
    env = _k_envelope(k, p) / (4.0 * math.pi)
    gauss = amp * (_exp(-((u - half) ** 2) / (2.0 * var)) + _exp(-((u + half) ** 2) / (2.0 * var)))
    damping = _exp(-0.5 * law.sigma**2 * k**2) * np.cos(k * law.delta0)
    interference = 2.0 * _exp(-(u**2) / (2.0 * p.delta**2)) * damping
    return env * gauss, env * interference


def wigner_cat_averaged(x, k, p: GaussianPacket, law: FluctuationLaw):
    """Cat Wigner function averaged over a normally distributed separation.

    The component Gaussians widen to ``delta^2 + sigma^2/4``; the interference
    term is damped by ``exp(-sigma^2 k^2 / 2)`` in the absolute wavenumber.
    """
    gauss, interference = cat_averaged_parts(x, k, p, law)
    return gauss + interference


def wigner(x, k, s: StateKind):
    """Evaluate the closed-form Wigner function of ``s`` at ``(x, k)``."""
    if s.tag == "gaussian":
        return wigner_gaussian(x, k, s.packet)
    if s.tag == "squashed":
        return wigner_squashed(x, k, s.packet, s.law)
    if s.tag == "cat":
        return wigner_cat(x, k, s.packet, s.law.delta0)
    return wigner_cat_averaged(x, k, s.packet, s.law)


def evaluator(s: StateKind) -> Callable:
    """Bind ``s`` and return ``f(x, k)``."""
    return lambda x, k: wigner(x, k, s)


def cat_family(p: GaussianPacket) -> Callable:
    """Return ``f(x, k, separation)`` for averaging the cat over its separation."""
    return lambda x, k, d: wigner_cat(x, k, p, d)


# -- marginals and normalization -------------------------------------------


def _gauss_fourier(alpha, beta, k0, d):
    """Real part of the integral of exp(-alpha (k-k0)^2 - beta k^2 + i k d) over k."""
    a = alpha + beta
    mag = math.sqrt(math.pi / a) * math.exp(-(d * d + 4.0 * alpha * beta * k0 * k0) / (4.0 * a))
    return mag * math.cos(alpha * k0 * d / a)


def marginals_closed(s: StateKind):
    """Closed-form position and momentum densities ``(P_x, P_k)`` of ``s``.

    Both returned callables take an array and return an array. For the cat
    states they integrate to the trace ``N`` rather than to one.
    """
    p = s.packet
    d2 = p.delta**2

    def pk_gauss(k):
        k = np.asarray(k, dtype=float)
        return math.sqrt(2.0 * d2 / math.pi) * _exp(-2.0 * d2 * (k - p.k0) ** 2)

    if s.tag in ("gaussian", "squashed"):
        shift = 0.0 if s.tag == "gaussian" else s.law.delta0
        var = d2 + (0.0 if s.tag == "gaussian" else s.law.sigma**2)

        def px(x):
            x = np.asarray(x, dtype=float)
            return _exp(-((x - p.x0 - shift) ** 2) / (2.0 * var)) / math.sqrt(2.0 * math.pi * var)

        return px, pk_gauss

    sep = s.law.delta0
    sigma = s.law.sigma if s.tag == "cat_averaged" else 0.0
    var = d2 + 0.25 * sigma**2
    amp = p.delta / math.sqrt(var)
    cross = _gauss_fourier(2.0 * d2, 0.5 * sigma**2, p.k0, sep)

    def px_cat(x):
        u = np.asarray(x, dtype=float) - p.x0
        half = 0.5 * sep
        gauss = _exp(-((u - half) ** 2) / (2.0 * var)) + _exp(-((u + half) ** 2) / (2.0 * var))
        gauss_part = amp * gauss * math.sqrt(math.pi / (2.0 * d2))
        return (gauss_part + 2.0 * cross * _exp(-(u**2) / (2.0 * d2))) / (4.0 * math.pi)

    def pk_cat(k):
        k = np.asarray(k, dtype=float)
        damping = _exp(-0.5 * sigma**2 * k**2) * np.cos(k * sep)
        return math.sqrt(d2 / (2.0 * math.pi)) * _exp(-2.0 * d2 * (k - p.k0) ** 2) * (1.0 + damping)

    return px_cat, pk_cat


def norm_cat_averaged(p: GaussianPacket, law: FluctuationLaw) -> float:
    """Trace of the post-selected, noise-averaged cat state.

    Obtained by integrating the averaged cat Wigner function analytically::

        N = 1/2 [1 + a exp(-(D0^2 + 4 d^2 s^2 k0^2) / (8 v)) cos(d^2 k0 D0 / v)]

    with ``d = delta``, ``s = sigma``, ``D0 = delta0``, ``v = d^2 + s^2/4`` and
    ``a = d / sqrt(v)``.
    """
    d2 = p.delta**2
    var = d2 + 0.25 * law.sigma**2
    amp = p.delta / math.sqrt(var)
    arg = -(law.delta0**2 + 4.0 * d2 * law.sigma**2 * p.k0**2) / (8.0 * var)
    if arg < EXP_FLOOR:
        return 0.5
    return 0.5 * (1.0 + amp * math.exp(arg) * math.cos(d2 * p.k0 * law.delta0 / var))


def trace(s: StateKind) -> float:
    """Integral of the Wigner function of ``s`` over phase space."""
    if s.tag in ("gaussian", "squashed"):
        return 1.0
    law = s.law if s.tag == "cat_averaged" else FluctuationLaw(s.law.delta0, 0.0)
    return norm_cat_averaged(s.packet, law)


def uncertainty_product(p: GaussianPacket, law: FluctuationLaw) -> float:
    """delta_k * delta' for the squashed state, delta' = sqrt(delta^2 + sigma^2)."""
    return p.delta_k * math.hypot(p.delta, law.sigma)
