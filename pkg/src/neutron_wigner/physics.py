"""Physical constants and unit handling for the field-induced displacement of a neutron packet.

Everything downstream of this module works in internal units: lengths in
1e-10 m and wavenumbers in 1e10 m^-1. SI values only appear in
:class:`ExperimentConfig`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class NeutronConstants:
    # CODATA 2018 recommended values.
    mass: float = 1.67492749804e-27  # kg
    magnetic_moment_magnitude: float = 9.6623651e-27  # J/T, |mu_n|
    hbar: float = 1.054571817e-34  # J s

    def __post_init__(self):
        for name in ("mass", "magnetic_moment_magnitude", "hbar"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be finite and positive, got {value!r}")


CODATA2018 = NeutronConstants()


@dataclass(frozen=True)
class UnitScale:
    length_unit: float = 1e-10  # m
    wavenumber_unit: float = 1e10  # 1/m

    def __post_init__(self):
        if self.length_unit * self.wavenumber_unit != 1.0:
            raise ValueError("length_unit * wavenumber_unit must be exactly 1")

    def length_to_internal(self, value):
        return value / self.length_unit

    def length_to_si(self, value):
        return value * self.length_unit

    def wavenumber_to_internal(self, value):
        return value / self.wavenumber_unit

    def wavenumber_to_si(self, value):
        return value * self.wavenumber_unit


UNITS = UnitScale()


@dataclass(frozen=True)
class ExperimentConfig:
    """Physical inputs of the field-crossing experiment, all in SI."""

    field_mean_B0: float  # T
    field_std_deltaB: float  # T
    region_length_L: float  # m
    mean_wavenumber_k0: float  # 1/m
    packet_spread_delta: float  # m

    def __post_init__(self):
        checks = {
            "field_mean_B0": self.field_mean_B0 >= 0,
            "field_std_deltaB": self.field_std_deltaB >= 0,
            "region_length_L": self.region_length_L > 0,
            "mean_wavenumber_k0": self.mean_wavenumber_k0 > 0,
            "packet_spread_delta": self.packet_spread_delta > 0,
        }
        for name, ok in checks.items():
            value = getattr(self, name)
            if not math.isfinite(value) or not ok:
                raise ValueError(f"{name}={value!r} violates its range constraint")


BADUREK = ExperimentConfig(
    field_mean_B0=0.28e-3,
    field_std_deltaB=0.0,
    region_length_L=0.57,
    mean_wavenumber_k0=1.7e10,
    packet_spread_delta=1.1e-10,
)


def _check_k0(k0):
    if not (math.isfinite(k0) and k0 > 0):
        raise ValueError(f"k0 must be finite and positive, got {k0!r}")


def momentum_shift(B, k0, c=CODATA2018):
    """Wavenumber change m*mu*B / (hbar^2 k0) of a neutron entering a field B.

    Parameters
    ----------
    B : float
        Field intensity in tesla. The sign of the result follows ``B``.
    k0 : float
        Mean wavenumber in 1/m.
    c : NeutronConstants, optional

    Returns
    -------
    float
        Shift in 1/m.
    """
    _check_k0(k0)
    return c.mass * c.magnetic_moment_magnitude * B / (c.hbar**2 * k0)


def displacement(B, L, k0, c=CODATA2018):
    """Spatial displacement L * dk / k0 (m) accumulated across a field region."""
    _check_k0(k0)
    if not (math.isfinite(L) and L > 0):
        raise ValueError(f"L must be finite and positive, got {L!r}")
    return L * momentum_shift(B, k0, c) / k0


def cat_separation(cfg: ExperimentConfig, c=CODATA2018):
    """Separation of the two spin components and its standard deviation.

    The two spin states are pushed in opposite directions, so the separation
    is twice :func:`displacement`. The spread follows from
    ``sigma / Delta0 = deltaB / B0``.

    Returns
    -------
    (delta0, sigma) : tuple of float
        Both in metres.
    """
    if cfg.field_mean_B0 == 0:
        if cfg.field_std_deltaB > 0:
            raise ValueError("deltaB > 0 with B0 = 0: sigma/Delta0 = deltaB/B0 is undefined")
        return 0.0, 0.0
    delta0 = 2.0 * displacement(cfg.field_mean_B0, cfg.region_length_L, cfg.mean_wavenumber_k0, c)
    sigma = delta0 * (cfg.field_std_deltaB / cfg.field_mean_B0)
    return delta0, sigma


def time_of_flight(L, k0, c=CODATA2018):
    """Transit time m L / (hbar k0) in seconds."""
    _check_k0(k0)
    if not (math.isfinite(L) and L > 0):
        raise ValueError(f"L must be finite and positive, got {L!r}")
    return c.mass * L / (c.hbar * k0)


def free_spread(delta, t, c=CODATA2018):
    """Width of a freely evolving Gaussian packet after time ``t`` (SI)."""
    if not (math.isfinite(delta) and delta > 0):
        raise ValueError(f"delta must be finite and positive, got {delta!r}")
    if not (math.isfinite(t) and t >= 0):
        raise ValueError(f"t must be finite and non-negative, got {t!r}")
    return math.hypot(delta, c.hbar * t / (2.0 * c.mass * delta))


@dataclass(frozen=True)
class ExperimentDerived:
    momentum_shift: float  # 1/m
    displacement: float  # m, single-component definition
    delta0: float  # m, cat separation
    sigma: float  # m
    time_of_flight: float  # s
    free_spread: float  # m


def derive(cfg: ExperimentConfig, c=CODATA2018) -> ExperimentDerived:
    """All kinematic quantities implied by ``cfg`` in one record."""
    t = time_of_flight(cfg.region_length_L, cfg.mean_wavenumber_k0, c)
    delta0, sigma = cat_separation(cfg, c)
    return ExperimentDerived(
        momentum_shift=momentum_shift(cfg.field_mean_B0, cfg.mean_wavenumber_k0, c),
        displacement=displacement(cfg.field_mean_B0, cfg.region_length_L, cfg.mean_wavenumber_k0, c),
        delta0=delta0,
        sigma=sigma,
        time_of_flight=t,
        free_spread=free_spread(cfg.packet_spread_delta, t, c),
    )


def to_internal(cfg: ExperimentConfig, c=CODATA2018):
    """Return ``(k0, delta, delta0, sigma)`` of ``cfg`` in internal units."""
    delta0, sigma = cat_separation(cfg, c)
    return (
        UNITS.wavenumber_to_internal(cfg.mean_wavenumber_k0),
        UNITS.length_to_internal(cfg.packet_spread_delta),
        UNITS.length_to_internal(delta0),
        UNITS.length_to_internal(sigma),
    )
