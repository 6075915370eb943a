"""
Compiling a multimode Gaussian unitary
======================================

Draw a random three-mode symplectic matrix, decompose it, compile it into a
timed control program and check the extracted channel against the target.
"""

import numpy as np
from scipy.linalg import expm

from cvloop import gaussian as g
from cvloop import sim
from cvloop.compiler import compile_gaussian
from cvloop.validation import validate

n = 3
rng = np.random.default_rng(7)
h = rng.normal(scale=0.3, size=(2 * n, 2 * n))
S = expm(g.omega(n) @ (h + h.T) / 2)
print(f"symplectic error of target: {g.symplectic_error(S):.2e}")

prog = compile_gaussian(S)
print(f"compiled: n={prog.n} m={prog.m} tau_prime={prog.tau_prime}, {len(prog.events)} events")
print("validator:", "clean" if validate(prog).ok else validate(prog))

rep = sim.verify(prog, S)
print(f"ideal:  transfer error {rep.transfer_error:.2e}, noise {rep.noise_norm:.2e}")

###############################################################################
# Finite squeezing alone keeps the transfer matrix exact and only adds noise.
# Loop loss also shrinks the transfer matrix, so verification fails.

for label, noisy in (
    ("15 dB", sim.NoiseConfig(ancilla_db=15.0)),
    ("15 dB + loss", sim.NoiseConfig(ancilla_db=15.0, eta_in=0.995, eta_det=0.99)),
):
    rep = sim.verify(prog, S, noisy)
    print(f"{label}: transfer error {rep.transfer_error:.2e}, noise {rep.noise_norm:.2e}, pass={rep.passed}")
