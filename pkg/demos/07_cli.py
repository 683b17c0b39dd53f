"""
Driving runs from a config file
===============================

The same runs are available from the command line. This script writes a
small config with a sweep section, runs it through the CLI entry point and
prints the summary table.
"""

import tempfile
from pathlib import Path

from kpwaves.cli import run_command

CONFIG = """\
[model]
kind = KP
lambda = -1
epsilon = 0.3

[init]
family = RADIAL_DX_SECH2
amplitude = 1

[grid]
Nx = 128
Ny = 32
Lx = 6
Ly = 6

[run]
dt = 1e-3
t_end = 0.05

[sweep]
epsilon = 0.3, 0.2, 0.1
"""

with tempfile.TemporaryDirectory() as tmp:
    cfg = Path(tmp) / "sweep.cfg"
    cfg.write_text(CONFIG)
    code = run_command(["sweep", "--config", str(cfg), "--out", tmp])
    print("exit code", code)
    print((Path(tmp) / "sweep_summary.csv").read_text())
