"""
Three-photon kinematics
=======================

A decay event is fixed by two energy fractions and an orientation.
"""

import numpy as np

from opsent.kinematics import DalitzPoint, Orientation, build_event, f_factor, plane_normal

# the symmetric "Mercedes" configuration: three photons 120 degrees apart
sym = build_event(DalitzPoint(2 / 3, 2 / 3))
print("directions\n", np.round(sym.directions, 6))
print("pairwise cosines\n", np.round(sym.cosines(), 6))
print("f12 =", f_factor(sym, 1, 2))

# rotate the same event out of the x-y plane
tilted = build_event(DalitzPoint(0.8, 0.7), Orientation(0.3, 1.1, -0.4))
print("momentum residual", tilted.momentum_residual())
print("plane normal", np.round(plane_normal(tilted), 6))

# at x1 = 1 photons 2 and 3 travel together, opposite photon 1
edge = build_event(DalitzPoint(1.0, 0.5))
print("edge cosines\n", np.round(edge.cosines(), 6))
