"""
Mermin and Svetlichny values
============================

Analyzer settings are optimized by restarted Nelder-Mead searches.
"""

import math

from opsent.amplitude import state_tensor
from opsent.correlations import SPIN1_3D, embed_3d
from opsent.entanglement import ghz_state, w_state
from opsent.kinematics import DalitzPoint, build_event
from opsent.search import optimize_settings

print("GHZ Mermin", optimize_settings(ghz_state(), "mermin").value)
print("GHZ Svetlichny", optimize_settings(ghz_state(), "svetlichny").value, "vs", 4 * math.sqrt(2))
print("W Mermin", optimize_settings(w_state(), "mermin").value)

t = build_event(DalitzPoint(2 / 3, 2 / 3))
s = state_tensor(t, 0)
print("symmetric decay, qubit", optimize_settings(s, "mermin", restarts=10).value)
print("symmetric decay, spin-1", optimize_settings(embed_3d(s, t), "mermin", SPIN1_3D, restarts=10).value)
