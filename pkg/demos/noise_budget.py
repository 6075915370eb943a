"""
Squeezing budget against the GKP threshold
==========================================

An ancilla that loops around the inner delay line loses squeezing on each
pass. Tabulate the effective squeezing for a few source levels and losses.
"""

from cvloop import sim

print(f"{'source dB':>10} {'loss':>6} {'trips':>6} {'effective dB':>13}  threshold")
for db in (15.0, 20.0, 25.0):
    for loss in (0.001, 0.005, 0.01):
        for trips in (1, 5):
            rep = sim.noise_budget(sim.NoiseConfig(ancilla_db=db, eta_in=1 - loss), trips)
            ok = "yes" if rep["meets_threshold"] else "no"
            print(f"{db:10.1f} {loss:6.3f} {trips:6d} {rep['effective_squeezing_db']:13.3f}  {ok}")
