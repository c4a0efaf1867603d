"""Photon counting behind a phase shifter and a 50:50 beamsplitter.

Each phase setting phi yields a joint distribution of output counts
(n_c, n_d). The difference n_c - n_d is the observable
``a^dag b e^{-i phi} + a b^dag e^{i phi}``, i.e. 2Jx at phi = 0 and 2Jy at
phi = pi/2; the settings +-pi/4 give the symmetrized product <JxJy + JyJx>.
Four settings therefore determine every statistic the witnesses need.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from . import config
from .criteria import CovarianceRecord, CriterionReport, _moment_tail, report_from_record
from .errors import InconsistentSpace, MissingPhaseSetting
from .fock import FockSpace, Operator, QuantumState, annihilation, as_density, expectation
from .transforms import _mixing_block, _photon_blocks, phase_shift, reduce_phase

PROTOCOL_PHASES = (0.0, math.pi / 2, math.pi / 4, -math.pi / 4)
PHASE_MATCH_TOL = 1e-12


def _moment_vectors(outcomes: np.ndarray) -> np.ndarray:
    """Per-outcome values of (N-, N-^2, N+), shape (K, 3)."""
    minus = (outcomes[:, 0] - outcomes[:, 1]).astype(float)
    plus = (outcomes[:, 0] + outcomes[:, 1]).astype(float)
    return np.column_stack([minus, minus**2, plus])


@dataclass(frozen=True, eq=False)
class OutcomeDistribution:
    """Exact joint count distribution for one phase setting.

    ``outcomes[i] = (n_c, n_d)`` occurs with probability ``probs[i]``.
    """

    phi: float
    outcomes: np.ndarray
    probs: np.ndarray
    space: FockSpace
    tainted: bool = False

    @property
    def pmf(self) -> dict[tuple[int, int], float]:
        return {(int(c), int(d)): float(p) for (c, d), p in zip(self.outcomes, self.probs)}

    @property
    def moments(self) -> np.ndarray:
        return self.probs @ _moment_vectors(self.outcomes)

    @property
    def mean_minus(self) -> float:
        return float(self.moments[0])

    @property
    def mean_minus_sq(self) -> float:
        return float(self.moments[1])

    @property
    def mean_plus(self) -> float:
        return float(self.moments[2])

    @property
    def moment_cov(self) -> np.ndarray:
        # infinite-shot limit
        return np.zeros((3, 3))


@dataclass(frozen=True, eq=False)
class ShotRecord:
    phi: float
    n_shots: int
    outcomes: np.ndarray
    counts: np.ndarray
    seed: int
    space: FockSpace
    moments: np.ndarray = field(repr=False)
    moment_cov: np.ndarray = field(repr=False)

    @property
    def mean_minus(self) -> float:
        return float(self.moments[0])

    @property
    def mean_minus_sq(self) -> float:
        return float(self.moments[1])

    @property
    def mean_plus(self) -> float:
        return float(self.moments[2])

    @property
    def stderr(self) -> dict[str, float]:
        se = np.sqrt(np.clip(np.diag(self.moment_cov), 0.0, None))
        return {"mean_minus": float(se[0]), "mean_minus_sq": float(se[1]), "mean_plus": float(se[2])}


def outcome_distribution(state: QuantumState, phi: float) -> OutcomeDistribution:
    """Joint (n_c, n_d) distribution after the phase shifter and beamsplitter.

    The beamsplitter conserves total photon number, so each block
    {|k, N-k>} is mixed by its own exact unitary; outputs are allowed to
    exceed the input cutoffs, which keeps the distribution free of
    truncation artefacts.
    """
    space = state.space
    rho = as_density(phase_shift(state, phi)).data
    n_a, _ = space.occupations()
    outcomes, probs = [], []
    for total, idx in sorted(_photon_blocks(space).items()):
        sub = rho[np.ix_(idx, idx)]
        if not np.any(sub):
            continue
        full = np.zeros((total + 1, total + 1), dtype=complex)
        pos = n_a[idx]
        full[np.ix_(pos, pos)] = sub
        u = _mixing_block(total)
        p = np.einsum("ij,jk,ik->i", u, full, u.conj()).real
        k = np.arange(total + 1)
        outcomes.append(np.column_stack([k, total - k]))
        probs.append(p)
    tainted = _moment_tail(state) > config.GUARD_TOL
    return OutcomeDistribution(
        phi=reduce_phase(phi),
        outcomes=np.concatenate(outcomes).astype(int),
        probs=np.concatenate(probs),
        space=space,
        tainted=tainted,
    )


def difference_operator(space: FockSpace, phi: float) -> Operator:
    """a^dag b e^{-i phi} + a b^dag e^{i phi} on the input modes."""
    a = annihilation(space, "a").matrix
    b = annihilation(space, "b").matrix
    hop = a.conj().T @ b * np.exp(-1j * phi)
    m = hop + hop.conj().T
    return Operator(m, f"N-(phi={phi:.6g})", space, hermitian=True)


def exact_moment_check(state: QuantumState, phi: float) -> float:
    """Largest discrepancy between pmf moments and direct operator moments."""
    dist = outcome_distribution(state, phi)
    op = difference_operator(state.space, phi)
    sq = Operator(op.matrix @ op.matrix, "N-^2", state.space, hermitian=False)
    a = annihilation(state.space, "a").matrix
    b = annihilation(state.space, "b").matrix
    n_plus = Operator(a.conj().T @ a + b.conj().T @ b, "N+", state.space)
    direct = [expectation(state, op).real, expectation(state, sq).real, expectation(state, n_plus).real]
    return float(np.max(np.abs(dist.moments - np.array(direct))))


def sample_shots(dist: OutcomeDistribution, n_shots: int, seed: int) -> ShotRecord:
    """Draw `n_shots` independent outcomes with a PCG64 generator seeded by `seed`."""
    if int(n_shots) != n_shots or n_shots < 1:
        raise ValueError(f"n_shots must be a positive integer, got {n_shots!r}")
    n_shots = int(n_shots)
    p = np.clip(dist.probs, 0.0, None)
    p = p / p.sum()
    rng = np.random.default_rng(seed)
    counts = rng.multinomial(n_shots, p)

    values = _moment_vectors(dist.outcomes)
    weights = counts / n_shots
    means = weights @ values
    if n_shots > 1:
        centered = values - means
        sample_cov = (centered * counts[:, None]).T @ centered / (n_shots - 1)
    else:
        sample_cov = np.zeros((3, 3))
    return ShotRecord(
        phi=dist.phi,
        n_shots=n_shots,
        outcomes=dist.outcomes,
        counts=counts,
        seed=int(seed),
        space=dist.space,
        moments=means,
        moment_cov=sample_cov / n_shots,
    )


def _match_settings(records) -> dict[int, object]:
    found: dict[int, object] = {}
    for rec in records:
        for i, target in enumerate(PROTOCOL_PHASES):
            if abs(reduce_phase(rec.phi - target)) <= PHASE_MATCH_TOL:
                found[i] = rec
                break
    missing = [PROTOCOL_PHASES[i] for i in range(4) if i not in found]
    if missing:
        raise MissingPhaseSetting(f"no record for phase setting(s) {missing}")
    spaces = {found[i].space for i in found}
    if len(spaces) != 1:
        raise InconsistentSpace("records come from different Fock spaces")
    return found


def reconstruct(records: Iterable) -> CovarianceRecord:
    """Estimate the covariance record from the four phase settings.

    `records` may hold ShotRecords or exact OutcomeDistributions (the
    infinite-shot limit). Standard errors follow from first-order
    propagation of the per-setting moment covariances; settings are
    sampled independently.
    """
    s = _match_settings(records)
    r0, r90, r45, rm45 = s[0], s[1], s[2], s[3]

    m1_0, m2_0, n_0 = r0.moments
    m1_90, m2_90 = r90.moments[:2]
    m2_45, m2_m45 = r45.moments[1], rm45.moments[1]

    mean_jx = m1_0 / 2
    mean_jy = m1_90 / 2
    values = dict(
        mean_jx=mean_jx,
        mean_jy=mean_jy,
        var_jx=m2_0 / 4 - mean_jx**2,
        var_jy=m2_90 / 4 - mean_jy**2,
        cov_xy=(m2_45 - m2_m45) / 8 - mean_jx * mean_jy,
        mean_n=n_0,
    )

    # raw moments: m1_0, m2_0, n_0, m1_90, m2_90, m2_45, m2_m45
    raw_cov = np.zeros((7, 7))
    raw_cov[:3, :3] = r0.moment_cov
    raw_cov[3:5, 3:5] = r90.moment_cov[:2, :2]
    raw_cov[5, 5] = r45.moment_cov[1, 1]
    raw_cov[6, 6] = rm45.moment_cov[1, 1]

    jac = np.zeros((6, 7))
    jac[0, 0] = 0.5
    jac[1, 3] = 0.5
    jac[2, 0], jac[2, 1] = -mean_jx, 0.25
    jac[3, 3], jac[3, 4] = -mean_jy, 0.25
    jac[4, 0], jac[4, 3], jac[4, 5], jac[4, 6] = -mean_jy / 2, -mean_jx / 2, 0.125, -0.125
    jac[5, 2] = 1.0

    tainted = any(getattr(r, "tainted", False) for r in (r0, r90, r45, rm45))
    return CovarianceRecord(
        **{k: float(v) for k, v in values.items()},
        provenance="estimated",
        field_cov=jac @ raw_cov @ jac.T,
        tainted=tainted,
    )


def protocol_distributions(state: QuantumState) -> list[OutcomeDistribution]:
    return [outcome_distribution(state, phi) for phi in PROTOCOL_PHASES]


def setting_seeds(seed: int) -> list[int]:
    """Independent per-setting seeds derived from one master seed."""
    return [int(x) for x in np.random.SeedSequence(seed).generate_state(len(PROTOCOL_PHASES))]


def simulate_protocol(state: QuantumState, n_shots: int, seed: int) -> list[ShotRecord]:
    return [
        sample_shots(dist, n_shots, s)
        for dist, s in zip(protocol_distributions(state), setting_seeds(seed))
    ]


def estimated_report(
    recon: CovarianceRecord, tol: float = config.EQUALITY_TOL, z_threshold: float = config.Z_THRESHOLD
) -> CriterionReport:
    if recon.provenance != "estimated":
        raise ValueError("estimated_report needs an estimated record")
    return report_from_record(recon, tol, z_threshold)
