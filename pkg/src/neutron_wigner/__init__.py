"""Wigner functions of neutron wave packets in a fluctuating magnetic field."""

__version__ = "0.1.0"

from .physics import (
    BADUREK,
    CODATA2018,
    UNITS,
    ExperimentConfig,
    NeutronConstants,
    UnitScale,
    cat_separation,
    displacement,
    free_spread,
    momentum_shift,
    time_of_flight,
)
from .states import (
    FluctuationLaw,
    GaussianPacket,
    StateKind,
    marginals_closed,
    norm_cat_averaged,
    phi_momentum,
    psi_position,
    wigner,
)
from .transform import (
    DensityKernel,
    PhaseSpaceGrid,
    SampledWavefunction,
    SupportError,
    WignerField,
    average_over_shift,
    monte_carlo_average,
    reduce,
    wigner_from_density,
    wigner_transform,
)
from .decoherence import (
    DecoherenceResult,
    SweepSurface,
    decoherence_parameter,
    find_extrema,
    purity,
    sweep,
)
