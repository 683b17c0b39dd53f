"""
Line soliton and lump
=====================

The KdV line soliton 12 sech^2(x - 4t) moves at speed 4. Evolving it with
the full solver and checking the crest position is the simplest nonlinear
test. The lump is the localized KP-I soliton with algebraic tails.
"""

import numpy as np

from kpwaves.analysis import mass
from kpwaves.grid import make_grid
from kpwaves.initial import line_soliton, lump_soliton
from kpwaves.integrator import RunConfig, evolve
from kpwaves.models import ModelSpec

g = make_grid(512, 4, 10, 10)
res = evolve(line_soliton(g), ModelSpec.kdv(1.0), RunConfig(dt=1e-3, t_end=1.0, diagnostics_every=100))
exact = line_soliton(g, 0.0, 1.0)
print("crest at t=1:", g.x[np.argmax(res.final.values[0])], "(expected 4)")
print("Linf error:", np.max(np.abs(res.final.values - exact.values)))
print("relative mass drift:", np.max(np.abs(res.diagnostics.err)))

g2 = make_grid(256, 256, 20, 20)
lump = lump_soliton(g2, 1.0)
print("lump peak", lump.values.max(), "mass", mass(lump))
