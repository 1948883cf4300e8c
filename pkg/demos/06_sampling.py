"""
Monte Carlo decay events
========================

Events are drawn flat in phase space or weighted by the squared matrix
element through rejection sampling.
"""

import numpy as np

from opsent.entanglement import three_tangle
from opsent.search import sample_events

flat = sample_events(2000, "uniform", seed=1)
weighted = sample_events(2000, "matrix-element", seed=1)
print("acceptance", weighted.acceptance_rate, "envelope", weighted.envelope)

for name, res in (("flat", flat), ("weighted", weighted)):
    x3 = np.array([e.triple.energies[2] for e in res.events])
    tau = np.array([three_tangle(e.state) for e in res.events])
    print(f"{name:9s} <x3>={x3.mean():.4f}  <tangle>={tau.mean():.4f}")
