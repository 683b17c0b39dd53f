"""
Small dispersion: KP against dispersionless KP
==============================================

Before the dispersionless solution breaks (t = 1/4 for amplitude 6), the KP
solution converges to it as epsilon -> 0. This script runs a reduced version
of the convergence study on a coarse grid and fits the rate.
"""

import time

from kpwaves.analysis import field_diff_norms, hopf_break_time, power_law_fit
from kpwaves.grid import make_grid
from kpwaves.initial import radial_dx_sech2
from kpwaves.integrator import RunConfig, evolve
from kpwaves.models import ModelSpec

g = make_grid(1024, 64, 6, 6)
u0 = radial_dx_sech2(g, 6.0, 1.0)
j0 = g.Ny // 2
print("break time of the y = 0 slice:", hopf_break_time(u0.values[j0], g.hx))

cfg = RunConfig(dt=4e-5, t_end=0.1)
start = time.perf_counter()
ref = evolve(u0, ModelSpec.dkp(-1), cfg).final
eps = [0.1, 0.0562, 0.0316]
d2 = [field_diff_norms(evolve(u0, ModelSpec.kp(-1, e), cfg).final, ref)[0] for e in eps]
for e, d in zip(eps, d2):
    print(f"eps={e:<7} Delta_2={d:.3e}")
print(power_law_fit(eps, d2).format(), f"({time.perf_counter() - start:.0f}s)")
