"""
Classifying three-photon entanglement
=====================================

The hyperdeterminant separates GHZ-type entanglement from the rest; Schmidt
ranks across the three cuts find the biseparable states.
"""

from opsent.amplitude import state_tensor
from opsent.entanglement import classify, ghz_state, to_linear_basis, w_state
from opsent.kinematics import DalitzPoint, build_event

for name, s in (("GHZ", ghz_state()), ("W", w_state())):
    r = classify(s)
    print(f"{name:4s} tangle={r.three_tangle:.3f}  {r.class_label}")

sym = build_event(DalitzPoint(2 / 3, 2 / 3))
s = state_tensor(sym, 0)
print("symmetric decay, circular:", classify(s).class_label, classify(s).three_tangle)
print("symmetric decay, linear:  ", classify(to_linear_basis(s)).class_label)

# the collinear edge of phase space factorizes
edge = build_event(DalitzPoint(1.0, 0.5))
print("collinear edge:", classify(state_tensor(edge, 0)).class_label)
