# # Wigner functions from sampled wave functions
#
# The closed forms are handy, but any sampled wave function can be turned into
# a Wigner function by direct quadrature. Here we check the numerical route
# against the analytic Gaussian, then use it on a superposition and on a
# mixed state given only through its density matrix.

# %%

import numpy as np

from neutron_wigner import FluctuationLaw, GaussianPacket, StateKind, psi_position
from neutron_wigner.states import cat_wavefunction, norm_cat_averaged, wigner_cat_averaged, wigner_gaussian
from neutron_wigner.transform import (
    DensityKernel,
    PhaseSpaceGrid,
    SampledWavefunction,
    reduce,
    wigner_from_density,
    wigner_transform,
)

p = GaussianPacket(0.0, 1.7, 1.1)
grid = PhaseSpaceGrid.for_state(StateKind("gaussian", p), 256, 256)

# %%

psi = SampledWavefunction.from_function(lambda x: psi_position(x, p), -24, 24, 0.05)
wf = wigner_transform(psi, grid)
exact = wigner_gaussian(grid.x[:, None], grid.k[None, :], p)
support = exact > 1e-10 * exact.max()
print("largest relative error on the support:",
      f"{np.max(np.abs(wf.values - exact)[support] / exact[support]):.1e}")
print("total probability:", f"{reduce(wf).total:.12f}")

# %% [markdown]
# A superposition has squared norm N, not 1, so we tell the sampler what to
# expect. The numerical Wigner function picks up the negative fringes.

# %%

law = FluctuationLaw(16.1)
cat = SampledWavefunction.from_function(lambda x: cat_wavefunction(x, p, 16.1), -40, 40, 0.05,
                                        expected_norm=norm_cat_averaged(p, law))
cat_grid = PhaseSpaceGrid.for_state(StateKind("cat", p, law), 128, 128)
print("most negative value:", f"{wigner_transform(cat, cat_grid).values.min():.4e}")

# %% [markdown]
# A noisy separation leaves a mixed state. Its density matrix is an average of
# pure projectors, which we form with Gauss-Hermite nodes and transform.

# %%

law = FluctuationLaw(16.1, 1.0)
rho = DensityKernel.mixture(lambda x, d: cat_wavefunction(x, p, d), law, window=60.0)
mixed_grid = PhaseSpaceGrid.for_state(StateKind("cat_averaged", p, law), 64, 64)
mixed = wigner_from_density(rho, mixed_grid)
exact = wigner_cat_averaged(mixed_grid.x[:, None], mixed_grid.k[None, :], p, law)
print("mixed-state deviation / peak:", f"{np.max(np.abs(mixed.values - exact)) / exact.max():.1e}")
