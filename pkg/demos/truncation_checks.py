"""Why the guard levels matter.

Ladder operators truncated at a finite cutoff break the commutation
relations in the top rows. Away from the boundary the identities hold to
machine precision, and states kept off the top levels see exact moments.
"""

import numpy as np

from suwitness import build_operator_set, build_space
from suwitness.algebra import commutator_residual
from suwitness.catalog import random_guarded_state
from suwitness.criteria import verify_pt_covariance, verify_pt_moments

space = build_space(6, 6)
ops = build_operator_set(space)
for guard in range(4):
    worst = max(commutator_residual(ops, guard).values())
    print(f"guard {guard}: worst commutator residual {worst:.2e}")

# The partial-transpose moment identity is a matrix identity that survives
# truncation, so its residual is zero either way; the taint flag is what warns
# that the truncated moments no longer match the physical ones. The covariance
# bridge mixes su(1,1) and su(2) operators and visibly breaks at the boundary.
space = build_space(8, 8)
ops = build_operator_set(space)
rng = np.random.default_rng(0)
for guard in (0, 4):
    rho = random_guarded_state(rng, space, guard=guard)
    moments = verify_pt_moments(rho, 4)
    bridge = verify_pt_covariance(rho, ops)
    print(f"\nrandom state kept {guard} levels below the cutoff")
    print(f"  PT moment residual {moments.residual:.2e} (tainted: {moments.tainted})")
    print(f"  PT covariance residual {bridge.residual:.2e} (tainted: {bridge.tainted})")
