"""Schwinger-type su(2) and su(1,1) bilinears of two bosonic modes."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fock import FockSpace, Operator, annihilation


@dataclass(frozen=True, eq=False)
class OperatorSet:
    jx: Operator
    jy: Operator
    jz: Operator
    kx: Operator
    ky: Operator
    kz: Operator
    n_plus: Operator
    space: FockSpace

    def as_dict(self) -> dict[str, Operator]:
        return {
            "jx": self.jx,
            "jy": self.jy,
            "jz": self.jz,
            "kx": self.kx,
            "ky": self.ky,
            "kz": self.kz,
            "n_plus": self.n_plus,
        }


def build_operator_set(space: FockSpace) -> OperatorSet:
    a = annihilation(space, "a").matrix
    b = annihilation(space, "b").matrix
    ad, bd = a.conj().T, b.conj().T
    eye = np.eye(space.dim)

    hop = ad @ b  # a^dag b
    pair = ad @ bd  # a^dag b^dag
    # exact diagonal number operators (ad @ a would round sqrt(n)**2)
    occ_a, occ_b = space.occupations()
    na, nb = np.diag(occ_a.astype(float)), np.diag(occ_b.astype(float))

    def op(m, label):
        # bilinears are Hermitian up to rounding; symmetrize so the flag holds exactly
        return Operator((m + m.conj().T) / 2, label, space, hermitian=True)

    return OperatorSet(
        jx=op((hop + hop.conj().T) / 2, "Jx"),
        jy=op((hop - hop.conj().T) / 2j, "Jy"),
        jz=op((na - nb) / 2, "Jz"),
        kx=op((pair + pair.conj().T) / 2, "Kx"),
        ky=op((pair - pair.conj().T) / 2j, "Ky"),
        kz=op((na + nb + eye) / 2, "Kz"),
        n_plus=op(na + nb, "N+"),
        space=space,
    )


def _residual_terms(ops: OperatorSet) -> dict[str, np.ndarray]:
    def comm(x, y):
        return x.matrix @ y.matrix - y.matrix @ x.matrix

    return {
        "[Jx,Jy]-iJz": comm(ops.jx, ops.jy) - 1j * ops.jz.matrix,
        "[Jy,Jz]-iJx": comm(ops.jy, ops.jz) - 1j * ops.jx.matrix,
        "[Jz,Jx]-iJy": comm(ops.jz, ops.jx) - 1j * ops.jy.matrix,
        "[Kx,Ky]+iKz": comm(ops.kx, ops.ky) + 1j * ops.kz.matrix,
        "[Ky,Kz]-iKx": comm(ops.ky, ops.kz) - 1j * ops.kx.matrix,
        "[Kz,Kx]-iKy": comm(ops.kz, ops.kx) - 1j * ops.ky.matrix,
    }


def commutator_residual(ops: OperatorSet, guard: int) -> dict[str, float]:
    """Max |matrix element| of each commutation-relation residual.

    Only rows and columns inside the guarded subspace (both modes at least
    `guard` levels below their cutoff) are inspected; guard 0 inspects the
    whole truncated space, where boundary rows are corrupted.
    """
    space = ops.space
    if guard < 0 or guard >= min(space.shape):
        raise ValueError(f"guard {guard} too large for cutoffs {space.shape}")
    keep = np.flatnonzero(space.guarded_mask(guard))
    out = {}
    for name, residual in _residual_terms(ops).items():
        block = residual[np.ix_(keep, keep)]
        out[name] = float(np.max(np.abs(block), initial=0.0))
    return out
