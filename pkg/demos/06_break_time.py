"""
Gradient catastrophe in dispersionless KP-I
===========================================

With a small viscosity the dKP-I front steepens near t = 1/4 and then
saturates. The largest negative x-slope on the y = 0 line tracks this.
"""

import numpy as np

from kpwaves.grid import apply_derivative, make_grid
from kpwaves.initial import radial_dx_sech2
from kpwaves.integrator import RunConfig, evolve
from kpwaves.models import ModelSpec

g = make_grid(1024, 64, 10, 10)
u0 = radial_dx_sech2(g, 6.0, 1.0)
res = evolve(u0, ModelSpec.dkp(-1, 0.05), RunConfig(dt=1e-4, t_end=0.4, snapshot_every=200))
j0 = g.Ny // 2
for t, snap in res.snapshots:
    ux = apply_derivative(snap.to_spectral(), "x", 1).to_real().values
    print(f"t={t:.2f} max(-u_x) on x>0: {np.max(-ux[j0, g.x > 0]):8.2f}")
