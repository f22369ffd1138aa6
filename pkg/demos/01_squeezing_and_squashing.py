# # Squeezed and squashed Gaussian packets
#
# A minimum-uncertainty Gaussian packet has a Wigner function that is a product
# of a position Gaussian of width delta and a wavenumber Gaussian of width
# 1/(2 delta). Averaging it over a random displacement leaves the wavenumber
# factor alone and widens the position factor to sqrt(delta^2 + sigma^2).
# Lengths are in units of 1e-10 m and wavenumbers in units of 1e10 m^-1.

# %%

import math

import numpy as np

from neutron_wigner import FluctuationLaw, GaussianPacket, StateKind
from neutron_wigner.transform import PhaseSpaceGrid, reduce, sample_field

# %% [markdown]
# The coherent packet has delta = 1/sqrt(2), so both widths are equal. The
# other two packets are squeezed in position or in wavenumber.

# %%

for delta in (1 / math.sqrt(2), 1.0, math.sqrt(2)):
    p = GaussianPacket(0.0, 1.7, delta)
    red = reduce(sample_field(StateKind("gaussian", p)))
    print(f"delta={delta:.4f}  coherent={p.is_coherent!s:5}  "
          f"dx*dk={math.sqrt(red.var_x * red.var_k):.6f}")

# %% [markdown]
# Now squash the coherent packet. The uncertainty product grows as
# (1/2) sqrt(1 + sigma^2/delta^2) while the momentum distribution stays put.

# %%

p = GaussianPacket(0.0, 1.7, 1 / math.sqrt(2))
reference = None
for sigma in (0.0, 1 / math.sqrt(2), math.sqrt(1.5)):
    s = StateKind("squashed", p, FluctuationLaw(0.0, sigma))
    wf = sample_field(s, PhaseSpaceGrid.for_state(StateKind("squashed", p, FluctuationLaw(0.0, 2.0)), 256, 256))
    red = reduce(wf)
    if reference is None:
        reference = red.marginal_k
    drift = np.max(np.abs(red.marginal_k - reference))
    print(f"sigma={sigma:.4f}  dx*dk={math.sqrt(red.var_x * red.var_k):.6f}  "
          f"max change in P(k)={drift:.1e}")
