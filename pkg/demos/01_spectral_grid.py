"""
Spectral grid, derivatives and the x-antiderivative
===================================================

The periodic box is [-pi Lx, pi Lx) x [-pi Ly, pi Ly). Derivatives are
multipliers on the FFT coefficients; the KP models also need the inverse
x-derivative, which only makes sense for rows with zero x-mean.
"""

import numpy as np

from kpwaves.grid import RealField, antideriv_x, apply_derivative, make_grid, project_constraint

g = make_grid(64, 32, 1.0, 2.0)
x, y = g.meshgrid()
print("grid", g.shape, "hx =", g.hx, "hy =", g.hy)

# d/dx of sin(3x) cos(y/2): exact to rounding on a resolved grid
u = RealField(g, np.sin(3 * x) * np.cos(y / 2))
ux = apply_derivative(u.to_spectral(), "x", 1).to_real().values
print("max |u_x - exact| =", np.max(np.abs(ux - 3 * np.cos(3 * x) * np.cos(y / 2))))

# the antiderivative inverts d/dx on zero-mean rows
back = antideriv_x(apply_derivative(u.to_spectral(), "x", 1)).to_real().values
print("max |dx^-1 dx u - u| =", np.max(np.abs(back - u.values)))

# data with a nonzero row mean are projected before use
w = RealField(g, 1 + np.sin(x))
p = project_constraint(w)
print("row means before:", w.values.mean(axis=1)[:3], "after:", p.values.mean(axis=1)[:3])
