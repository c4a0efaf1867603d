"""Local phase shifts, the 50:50 beamsplitter, and rotated-frame covariances.

Phase convention: ``phase_shift(state, phi)`` maps b -> b exp(-i phi) in the
Heisenberg picture, so that

    <Jx'> =  cos(phi) <Jx> + sin(phi) <Jy>
    <Jy'> = -sin(phi) <Jx> + cos(phi) <Jy>

This is checked once at import time by :func:`_self_test`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np
from scipy.linalg import expm

from .algebra import OperatorSet, build_operator_set
from .criteria import CovarianceRecord, covariance_record, witness_w14
from .fock import FockSpace, Operator, QuantumState, annihilation, build_space, expectation, pure_state


def reduce_phase(phi: float) -> float:
    """Map an angle into (-pi, pi]."""
    r = math.remainder(phi, 2 * math.pi)
    return math.pi if r == -math.pi else r


@dataclass(frozen=True)
class PhaseShift:
    phi: float

    def __post_init__(self):
        object.__setattr__(self, "phi", reduce_phase(float(self.phi)))

    def phases(self, space: FockSpace) -> np.ndarray:
        _, n_b = space.occupations()
        return np.exp(-1j * self.phi * n_b)


def phase_shift(state: QuantumState, phi: float) -> QuantumState:
    u = PhaseShift(phi).phases(state.space)
    if state.is_pure:
        return state._replace(u * state.data)
    return state._replace(u[:, None] * state.data * u.conj()[None, :])


def rotate_record(rec: CovarianceRecord, phi: float) -> CovarianceRecord:
    if rec.provenance != "exact":
        raise ValueError("rotate_record only accepts exact records")
    c, s = math.cos(phi), math.sin(phi)
    c2, s2 = math.cos(2 * phi), math.sin(2 * phi)
    vx, vy, cov = rec.var_jx, rec.var_jy, rec.cov_xy
    return replace(
        rec,
        mean_jx=c * rec.mean_jx + s * rec.mean_jy,
        mean_jy=-s * rec.mean_jx + c * rec.mean_jy,
        var_jx=c * c * vx + s * s * vy + s2 * cov,
        var_jy=s * s * vx + c * c * vy - s2 * cov,
        cov_xy=0.5 * s2 * (vy - vx) + c2 * cov,
    )


def nulling_phase(rec: CovarianceRecord) -> float:
    """Phase that makes the rotated-frame cross covariance vanish."""
    return 0.5 * math.atan2(2.0 * rec.cov_xy, rec.var_jx - rec.var_jy)


def _photon_blocks(space: FockSpace) -> dict[int, np.ndarray]:
    n_a, n_b = space.occupations()
    total = n_a + n_b
    return {int(n): np.flatnonzero(total == n) for n in np.unique(total)}


def _mixing_generator(n_a: np.ndarray, n_b: np.ndarray) -> np.ndarray:
    """Matrix of a^dag b - a b^dag on the listed basis states of one photon-number block."""
    size = len(n_a)
    gen = np.zeros((size, size))
    pos = {(int(x), int(y)): i for i, (x, y) in enumerate(zip(n_a, n_b))}
    for j, (x, y) in enumerate(zip(n_a, n_b)):
        if y > 0 and (x + 1, y - 1) in pos:  # a^dag b |x,y>
            gen[pos[(x + 1, y - 1)], j] += math.sqrt((x + 1) * y)
        if x > 0 and (x - 1, y + 1) in pos:  # -a b^dag |x,y>
            gen[pos[(x - 1, y + 1)], j] -= math.sqrt(x * (y + 1))
    return gen


@lru_cache(maxsize=64)
def _mixing_block(total: int) -> np.ndarray:
    """Exact 50:50 mixing unitary on the complete block {|k, total-k>}, ordered by k."""
    k = np.arange(total + 1)
    return expm((math.pi / 4) * _mixing_generator(k, total - k))


def beamsplitter_unitary(space: FockSpace, phi: float) -> Operator:
    """Phase shifter on b followed by a 50:50 beamsplitter.

    Heisenberg action: a -> (a + b e^{-i phi})/sqrt2, b -> (-a + b e^{-i phi})/sqrt2.
    Built as expm of the truncated mixing generator, block by block in total
    photon number; blocks that fit entirely under the cutoffs are exact.
    """
    n_a, n_b = space.occupations()
    mix = np.zeros((space.dim, space.dim))
    for idx in _photon_blocks(space).values():
        mix[np.ix_(idx, idx)] = expm((math.pi / 4) * _mixing_generator(n_a[idx], n_b[idx]))
    u = mix * PhaseShift(phi).phases(space)[None, :]
    return Operator(u, f"BS(phi={phi:.6g})", space)


def beamsplitter_exact_region(space: FockSpace, guard: int = 1) -> np.ndarray:
    """Mask of basis states whose photon-number block (with `guard` margin) is untruncated."""
    n_a, n_b = space.occupations()
    return n_a + n_b <= min(space.shape) - 1 - guard


def mode_map_residual(space: FockSpace, phi: float, guard: int = 1) -> float:
    """Max elementwise deviation of U^dag a U and U^dag b U from the output modes c, d.

    Only matrix elements inside the untruncated region are compared.
    """
    u = beamsplitter_unitary(space, phi).matrix
    a = annihilation(space, "a").matrix
    b = annihilation(space, "b").matrix
    shifted_b = b * np.exp(-1j * phi)
    keep = np.ix_(*[np.flatnonzero(beamsplitter_exact_region(space, guard))] * 2)
    worst = 0.0
    for mode, target in ((a, (a + shifted_b) / math.sqrt(2)), (b, (-a + shifted_b) / math.sqrt(2))):
        diff = (u.conj().T @ mode @ u - target)[keep]
        worst = max(worst, float(np.max(np.abs(diff), initial=0.0)))
    return worst


def invariance_scan(
    state: QuantumState, ops: OperatorSet, phases, witness=witness_w14
) -> float:
    """Largest change of `witness` under local phase shifts over `phases`."""
    ref = witness(covariance_record(state, ops))
    return max(abs(witness(covariance_record(phase_shift(state, p), ops)) - ref) for p in phases)


def _self_test() -> None:
    space = build_space(3, 3)
    ops = build_operator_set(space)
    psi = pure_state(space, [((1, 0), 1.0), ((0, 1), 0.6 + 0.3j), ((1, 1), 0.2)])
    phi = 0.37
    jx, jy = expectation(psi, ops.jx).real, expectation(psi, ops.jy).real
    shifted = phase_shift(psi, phi)
    jx2, jy2 = expectation(shifted, ops.jx).real, expectation(shifted, ops.jy).real
    c, s = math.cos(phi), math.sin(phi)
    if abs(jx2 - (c * jx + s * jy)) > 1e-12 or abs(jy2 - (-s * jx + c * jy)) > 1e-12:
        raise RuntimeError("phase_shift violates the Jx/Jy rotation convention")


_self_test()
