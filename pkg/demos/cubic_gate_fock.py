"""
Cubic phase gate in the Fock backend
====================================

The cubic gate needs a non-Gaussian ancilla, so it runs on a truncated Fock
space. Sample the circuit on a coherent input and compare the averaged
output means with the closed-form prediction. Moderate squeezing keeps the
state inside the cutoff.
"""

import numpy as np

from cvloop import fock as f

N, r, gamma = 60, 0.5, 0.1
inp = f.coherent(1.0, 0.0, N)
res = f.sample_cubic_circuit(inp, gamma, r, N=N, samples=100, seed=3, leakage_bound=1.0)

# finite r adds exp(-2r)/2 to <x^2>
pred = f.predicted_cubic_moments(1.0, 0.0, 1.5, gamma, r=r)
sem = res.std_p / np.sqrt(res.samples)
print(f"<x> = {res.mean_x:.4f}  (predicted {pred[0]:.4f})")
print(f"<p> = {res.mean_p:.4f} +- {sem:.4f}  (predicted {pred[1]:.4f})")
print(f"max leakage past cutoff: {res.max_leakage:.2e}")
