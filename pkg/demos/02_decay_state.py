"""
The polarization state of the decay photons
===========================================

Each spin projection of the positronium gives an eight-component helicity
state.  In the reference plane it matches the closed-form coefficients up to
one global factor.
"""

from opsent.amplitude import closed_form_coefficients, decay_weight, state_tensor
from opsent.kinematics import DalitzPoint, Orientation, build_event

t = build_event(DalitzPoint(0.8, 0.7))
for s_z in (-1, 0, 1):
    s = state_tensor(t, s_z)
    form = closed_form_coefficients(t, s_z)
    print(f"S_z={s_z:+d}  norm={s.norm:.6f}  factor={form.global_factor:.6f}  residual={form.residual:.1e}")

# tilting the decay plane keeps the magnitudes but moves the relative phases
tilted = build_event(DalitzPoint(0.8, 0.7), Orientation(0.0, 0.9, 0.0))
print("tilted residual", closed_form_coefficients(tilted, 0).residual)

# the spin-averaged weight depends on the energies only
print("weight", decay_weight(t), decay_weight(tilted))
