"""
Exact linear flow and the Airy function
=======================================

With the nonlinearity switched off the integrating factor makes every step
exact, so the integrator reproduces the closed-form Fourier solution. The
one-dimensional linear KdV kernel is an Airy function; the package evaluates
it with a power series for moderate arguments and asymptotic forms outside.
"""

import numpy as np
from scipy import special

from kpwaves.airy import airy_eval
from kpwaves.grid import RealField, make_grid
from kpwaves.initial import radial_dx_sech2
from kpwaves.integrator import RunConfig, evolve
from kpwaves.linear import exact_linear_evolve
from kpwaves.models import ModelSpec

g = make_grid(128, 64, 4, 4)
u0 = radial_dx_sech2(g, 1.0, 1.0)
res = evolve(u0, ModelSpec.kp(-1, 0.3), RunConfig(dt=1e-2, t_end=1.0, linear_only=True))
ref = exact_linear_evolve(u0, 1.0, -1, 0.3)
print("linear run vs closed form, Linf:", np.max(np.abs(res.final.values - ref.values)))

xs = np.array([-10.0, -3.0, 0.0, 2.0, 5.0, 8.0])
ours = np.array([airy_eval(v) for v in xs])
print("x      Ai(x) here         scipy")
for v, a, b in zip(xs, ours, special.airy(xs)[0]):
    print(f"{v:5.1f}  {a: .12e}  {b: .12e}")
