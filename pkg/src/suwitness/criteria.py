"""Uncertainty margins, J-covariance statistics and the separability witnesses.

Witnesses are signed as ``LHS - RHS`` of the separability inequality, so a
negative value certifies entanglement. A non-negative value never certifies
separability; the verdict vocabulary is detected / not-detected / boundary.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

import numpy as np

from . import config
from .algebra import OperatorSet
from .errors import NonHermitianInput, RepresentationError, SpaceMismatch
from .fock import Operator, QuantumState, as_density, expectation, partial_transpose, tail_mass

RECORD_FIELDS = ("mean_jx", "mean_jy", "var_jx", "var_jy", "cov_xy", "mean_n")
WITNESSES = ("w9", "w12", "w14")

DETECTED = "detected"
NOT_DETECTED = "not-detected"
BOUNDARY = "boundary"


@dataclass(frozen=True)
class CovarianceRecord:
    """First and second moments of (Jx, Jy) plus <N+>.

    For ``provenance == "estimated"`` records, ``field_cov`` is the 6x6
    covariance of the estimates in ``RECORD_FIELDS`` order.
    """

    mean_jx: float
    mean_jy: float
    var_jx: float
    var_jy: float
    cov_xy: float
    mean_n: float
    provenance: str = "exact"
    field_cov: np.ndarray | None = field(default=None, compare=False, repr=False)
    tail_mass: float = 0.0
    tainted: bool = False

    def __post_init__(self):
        if self.provenance not in ("exact", "estimated"):
            raise ValueError(f"unknown provenance {self.provenance!r}")

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.var_jx, self.cov_xy], [self.cov_xy, self.var_jy]])

    def values(self) -> np.ndarray:
        return np.array([getattr(self, f) for f in RECORD_FIELDS])

    def stderr(self) -> dict[str, float] | None:
        if self.field_cov is None:
            return None
        se = np.sqrt(np.clip(np.diag(self.field_cov), 0.0, None))
        return dict(zip(RECORD_FIELDS, map(float, se)))


@dataclass(frozen=True)
class CriterionReport:
    w9: float
    w12: float
    w14: float
    verdicts: dict[str, str]
    tol: float
    guard_clean: bool
    tail_mass: float
    record: CovarianceRecord
    stderr: dict[str, float] | None = None
    zscore: dict[str, float] | None = None
    z_threshold: float | None = None

    def witnesses(self) -> dict[str, float]:
        return {"w9": self.w9, "w12": self.w12, "w14": self.w14}


def _check_pair(state: QuantumState, *ops: Operator) -> None:
    for op in ops:
        if op.space != state.space:
            raise SpaceMismatch(f"operator {op.label!r} lives on {op.space}, state on {state.space}")
        if not op.hermitian:
            raise NonHermitianInput(f"operator {op.label!r} is not flagged hermitian")


def _expect_product(state: QuantumState, x: np.ndarray, y: np.ndarray) -> complex:
    if state.is_pure:
        psi = state.data
        return complex(np.vdot(x.conj().T @ psi, y @ psi))
    return complex(np.sum((state.data @ x) * y.T))


def sym_covariance(state: QuantumState, a: Operator, b: Operator) -> float:
    """Symmetrized central cross moment 1/2<AB + BA> - <A><B>."""
    _check_pair(state, a, b)
    ab = _expect_product(state, a.matrix, b.matrix)
    ba = _expect_product(state, b.matrix, a.matrix)
    mean_a = expectation(state, a)
    mean_b = expectation(state, b)
    return float(np.real(0.5 * (ab + ba) - mean_a * mean_b))


def hur_margin(state: QuantumState, a: Operator, b: Operator) -> float:
    _check_pair(state, a, b)
    comm = _expect_product(state, a.matrix, b.matrix) - _expect_product(state, b.matrix, a.matrix)
    return sym_covariance(state, a, a) * sym_covariance(state, b, b) - 0.25 * abs(comm) ** 2


def srr_margin(state: QuantumState, a: Operator, b: Operator) -> float:
    return hur_margin(state, a, b) - sym_covariance(state, a, b) ** 2


def covariance_record(state: QuantumState, ops: OperatorSet) -> CovarianceRecord:
    if state.space != ops.space:
        raise SpaceMismatch(f"state space {state.space} != operator space {ops.space}")
    mass = _moment_tail(state)
    return CovarianceRecord(
        mean_jx=float(expectation(state, ops.jx).real),
        mean_jy=float(expectation(state, ops.jy).real),
        var_jx=sym_covariance(state, ops.jx, ops.jx),
        var_jy=sym_covariance(state, ops.jy, ops.jy),
        cov_xy=sym_covariance(state, ops.jx, ops.jy),
        mean_n=float(expectation(state, ops.n_plus).real),
        provenance="exact",
        tail_mass=mass,
        tainted=mass > config.GUARD_TOL,
    )


def _moment_tail(state: QuantumState) -> float:
    if config.MOMENT_GUARD >= min(state.space.shape):
        return 1.0
    return tail_mass(state, config.MOMENT_GUARD)


def witness_w9(rec: CovarianceRecord) -> float:
    return (0.25 + rec.var_jx) * (0.25 + rec.var_jy) - (1.0 + rec.mean_n) ** 2 / 16.0


def witness_w12(rec: CovarianceRecord) -> float:
    return witness_w9(rec) - rec.cov_xy**2


def witness_w14(rec: CovarianceRecord) -> float:
    c = rec.matrix
    n = rec.mean_n
    return float(np.linalg.det(c) + np.trace(c) / 4.0 - (n * n + 2.0 * n) / 16.0)


def _rhs(rec: CovarianceRecord) -> dict[str, float]:
    n = rec.mean_n
    return {
        "w9": (1.0 + n) ** 2 / 16.0,
        "w12": (1.0 + n) ** 2 / 16.0 + rec.cov_xy**2,
        "w14": (n * n + 2.0 * n) / 16.0,
    }


def witness_gradients(rec: CovarianceRecord) -> dict[str, np.ndarray]:
    """Gradients of each witness with respect to the record fields (RECORD_FIELDS order)."""
    vx, vy, c, n = rec.var_jx, rec.var_jy, rec.cov_xy, rec.mean_n
    g9 = np.array([0.0, 0.0, 0.25 + vy, 0.25 + vx, 0.0, -(1.0 + n) / 8.0])
    g12 = g9.copy()
    g12[4] = -2.0 * c
    return {"w9": g9, "w12": g12, "w14": g12.copy()}


def classify(value: float, tol: float, scale: float = 1.0) -> str:
    eff = tol * max(1.0, abs(scale))
    if abs(value) <= eff:
        return BOUNDARY
    return DETECTED if value < 0 else NOT_DETECTED


def report_from_record(
    rec: CovarianceRecord, tol: float = config.EQUALITY_TOL, z_threshold: float = config.Z_THRESHOLD
) -> CriterionReport:
    if tol <= 0:
        raise ValueError("tol must be positive")
    values = {"w9": witness_w9(rec), "w12": witness_w12(rec), "w14": witness_w14(rec)}
    rhs = _rhs(rec)
    verdicts = {k: classify(v, tol, rhs[k]) for k, v in values.items()}
    stderr = zscore = None
    z_used = None
    if rec.provenance == "estimated":
        cov = rec.field_cov if rec.field_cov is not None else np.zeros((6, 6))
        grads = witness_gradients(rec)
        stderr, zscore = {}, {}
        for k, v in values.items():
            se = float(np.sqrt(max(grads[k] @ cov @ grads[k], 0.0)))
            stderr[k] = se
            if se > 0:
                zscore[k] = abs(v) / se
            else:
                zscore[k] = float("inf") if verdicts[k] != BOUNDARY else 0.0
            # an estimate below zero is only a detection if it is significant
            if verdicts[k] == DETECTED and zscore[k] < z_threshold:
                verdicts[k] = BOUNDARY
        z_used = z_threshold
    return CriterionReport(
        w9=values["w9"],
        w12=values["w12"],
        w14=values["w14"],
        verdicts=verdicts,
        tol=tol,
        guard_clean=not rec.tainted,
        tail_mass=rec.tail_mass,
        record=rec,
        stderr=stderr,
        zscore=zscore,
        z_threshold=z_used,
    )


def evaluate(state: QuantumState, ops: OperatorSet, tol: float = config.EQUALITY_TOL) -> CriterionReport:
    return report_from_record(covariance_record(state, ops), tol)


@dataclass(frozen=True)
class CheckResult:
    """Outcome of a numerical identity check; `tainted` marks a guard violation."""

    residual: float
    tainted: bool
    components: dict[str, float] = field(default_factory=dict)

    def passed(self, tol: float) -> bool:
        return self.residual <= tol and not self.tainted


def _guard_taint(state: QuantumState, order: int) -> bool:
    k = max(order, 1)
    if k >= min(state.space.shape):
        return True
    return tail_mass(state, k) > config.GUARD_TOL


def verify_pt_moments(state: QuantumState, max_order: int) -> CheckResult:
    """Compare normal-ordered moments of rho^PT with b-exponent-swapped moments of rho."""
    if state.is_pure:
        raise RepresentationError("verify_pt_moments needs a density matrix")
    ca, cb = state.space.shape
    pt = partial_transpose(state)

    def local_powers(cutoff):
        low = np.diag(np.sqrt(np.arange(1, cutoff, dtype=float)), 1)
        pows = [np.eye(cutoff)]
        for _ in range(max_order):
            pows.append(pows[-1] @ low)
        return pows

    a_pows, b_pows = local_powers(ca), local_powers(cb)

    def tr(rho, m, n, p, q):
        # Tr[rho (a^dag^m a^n) (x) (b^dag^p b^q)] with the two modes kept as separate factors
        op_a = a_pows[m].T @ a_pows[n]
        op_b = b_pows[p].T @ b_pows[q]
        return complex(np.einsum("ijkl,ki,lj->", rho.reshape(ca, cb, ca, cb), op_a, op_b))

    components = {}
    worst = 0.0
    for m, n, p, q in product(range(max_order + 1), repeat=4):
        if m + n + p + q > max_order:
            continue
        lhs = tr(pt.data, m, n, p, q)
        rhs = tr(state.data, m, n, q, p)
        diff = abs(lhs - rhs)
        components[f"{m}{n}{p}{q}"] = diff
        worst = max(worst, diff)
    return CheckResult(worst, _guard_taint(state, max_order), components)


def verify_pt_covariance(state: QuantumState, ops: OperatorSet) -> CheckResult:
    """Check the K-under-PT / J moment bridge component by component."""
    rho = as_density(state)
    pt = partial_transpose(rho)
    comps = {
        "cov_KxKy_PT-cov_JxJy": sym_covariance(pt, ops.kx, ops.ky) - sym_covariance(rho, ops.jx, ops.jy),
        "var_Kx_PT-(1/4+var_Jx)": sym_covariance(pt, ops.kx, ops.kx) - (0.25 + sym_covariance(rho, ops.jx, ops.jx)),
        "var_Ky_PT-(1/4+var_Jy)": sym_covariance(pt, ops.ky, ops.ky) - (0.25 + sym_covariance(rho, ops.jy, ops.jy)),
        "mean_Kz_PT-(1+N)/2": float(expectation(pt, ops.kz).real)
        - 0.5 * (1.0 + float(expectation(rho, ops.n_plus).real)),
    }
    comps = {k: abs(v) for k, v in comps.items()}
    return CheckResult(max(comps.values()), _guard_taint(rho, 2), comps)
