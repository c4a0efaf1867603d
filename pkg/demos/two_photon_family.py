"""Walk through the two-photon family cos(theta)|2,0> + i sin(theta)|0,2>.

Every member sits exactly on the w9 boundary, while the covariance-corrected
witness w12 flags all of them except the Fock states at theta = 0 and pi/2.
"""

import math

import numpy as np

from suwitness import build_operator_set, build_space, covariance_record, evaluate, two_photon_theta

space = build_space(8, 8)
ops = build_operator_set(space)

# one member in detail
state = two_photon_theta(math.pi / 4, space)
rec = covariance_record(state, ops)
print("theta = pi/4")
print(f"  <N+> = {rec.mean_n:.6f}")
print(f"  var Jx = {rec.var_jx:.6f}, var Jy = {rec.var_jy:.6f}, cov = {rec.cov_xy:.6f}")
report = evaluate(state, ops)
for name, value in report.witnesses().items():
    print(f"  {name} = {value:+.6f}  ({report.verdicts[name]})")

# the whole family; w12 should trace -sin^2(2 theta)/4
print("\n theta/pi      w9          w12      -sin^2(2theta)/4")
for theta in np.linspace(0, math.pi / 2, 9):
    rep = evaluate(two_photon_theta(theta, space), ops)
    print(f"  {theta / math.pi:5.3f}  {rep.w9:+.2e}  {rep.w12:+.6f}  {-math.sin(2 * theta) ** 2 / 4:+.6f}")
