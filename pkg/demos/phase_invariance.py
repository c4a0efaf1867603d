"""A local phase shift on mode b rotates (Jx, Jy) but leaves w14 alone.

w9 changes as the state is rotated, and at the nulling phase the
cross-covariance vanishes so w9 and w12 coincide.
"""

import math

import numpy as np

from suwitness import build_operator_set, build_space, covariance_record, two_photon_theta
from suwitness.criteria import witness_w9, witness_w12, witness_w14
from suwitness.transforms import nulling_phase, phase_shift

space = build_space(8, 8)
ops = build_operator_set(space)
state = two_photon_theta(math.pi / 3, space)

print("  phi/pi      w9          w14")
for phi in np.linspace(0, math.pi, 7):
    rec = covariance_record(phase_shift(state, phi), ops)
    print(f"  {phi / math.pi:5.3f}  {witness_w9(rec):+.6f}  {witness_w14(rec):+.6f}")

rec = covariance_record(state, ops)
phi0 = nulling_phase(rec)
rotated = covariance_record(phase_shift(state, phi0), ops)
print(f"\nnulling phase = {phi0:.6f}")
print(f"  cov after rotation = {rotated.cov_xy:.2e}")
print(f"  w9 = {witness_w9(rotated):+.6f}, w12 = {witness_w12(rotated):+.6f}")
