"""
Looking for W-class decays
==========================

Zeros of the hyperdeterminant are either factorizing configurations or
W-class states.  With the spin quantized along the decay-plane normal every
zero found is factorizing.
"""

from collections import Counter

from opsent.search import ScanSpec, find_hdet_zeros, scan_dalitz

scan = scan_dalitz(ScanSpec(n=41, s_z=0, observable="class"))
print(Counter(row["class"] for row in scan.rows))

for s_z in (0, 1):
    result = find_hdet_zeros(s_z, "plane-normal", n=31)
    print(f"S_z={s_z:+d}: {len(result.zeros)} zeros,",
          Counter(e.finding for e in result.zeros),
          Counter(e.report.class_label for e in result.zeros))

# the fixed-z policy also searches the orientation of the decay plane
result = find_hdet_zeros(1, "fixed-z", n=13, n_angles=2)
print("fixed z:", len(result.zeros), "zeros;", len(result.w_class), "W-class")
