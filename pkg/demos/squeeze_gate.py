"""
Measurement-induced squeezing in the loop
=========================================

A single-mode squeeze is built from an ancilla, a variable beam splitter and
a homodyne measurement with feedforward. This script compiles the gate,
runs it with ideal and finite ancilla squeezing, and prints the output
covariance.
"""

import numpy as np

from cvloop import gaussian as g
from cvloop import sim
from cvloop.compiler import compile_single_mode
from cvloop.decomp import EulerForm

r = np.log(np.sqrt(2))
prog = compile_single_mode(EulerForm(0.0, r, 0.0))
print(f"program: n={prog.n} m={prog.m} tau_prime={prog.tau_prime}, {len(prog.events)} events")

# ideal ancilla: the output is exactly S(r)|0>
out, tr = sim.run(prog, g.vacuum(1), seed=1)
print("ideal covariance\n", np.round(out.cov, 6))

###############################################################################
# Finite squeezing leaves excess x noise proportional to (1 - R0) Var_anc.

for db in (5.0, 10.0, 20.0):
    ch = sim.extract_channel(prog, sim.NoiseConfig(ancilla_db=db))
    print(f"{db:5.1f} dB ancilla: added x noise {ch.noise[0, 0]:.5f}")
