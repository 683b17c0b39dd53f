"""
Davey-Stewartson envelope
=========================

Small KP-II wave packets are described on the slow time tau = eps t by the
DS system. The envelope flow conserves its L^2 norm, and the KP field is
recovered from the envelope as 2 eps Re(psi e^{i(x+t)/eps}).
"""

import numpy as np
import scipy.fft as sfft

from kpwaves.analysis import field_diff_norms, reconstruct_uapp, wave_energy
from kpwaves.grid import SpectralField, make_grid
from kpwaves.initial import modulated_packet, radial_dx_sech2
from kpwaves.integrator import RunConfig, evolve
from kpwaves.models import DSState, ModelSpec

eps = 0.1
g = make_grid(1024, 64, 10, 10)
psi0 = DSState(SpectralField(g, sfft.fft2(radial_dx_sech2(g, 1.0, 1.0).values + 0j)), 0.0)
ds = evolve(psi0, ModelSpec.ds(1.0), RunConfig(dt=2e-3, t_end=0.05))
print("wave energy drift:", abs(wave_energy(ds.final.psi) / wave_energy(psi0.psi) - 1))

# compare with the KP-II solution at t = tau / eps
kp = evolve(modulated_packet(g, eps), ModelSpec.kp(1, eps), RunConfig(dt=1e-4, t_end=0.5)).final
d2, dinf = field_diff_norms(kp, reconstruct_uapp(ds.final, 0.5, eps))
print(f"t=0.5: Delta_2={d2:.3e} Delta_inf={dinf:.3e} max|u|={np.max(np.abs(kp.values)):.3e}")
