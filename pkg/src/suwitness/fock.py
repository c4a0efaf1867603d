"""Two-mode truncated Fock space: basis bookkeeping, states, operators.

Basis states |n_a, n_b> are stored row-major with n_a outer, so the flat
index is ``n_a * cutoff_b + n_b`` and every operator on mode a is
``kron(op, I_b)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from . import config
from .errors import (
    InvalidState,
    OutOfRangeIndex,
    RepresentationError,
    SpaceMismatch,
    ZeroNorm,
)


@dataclass(frozen=True)
class FockSpace:
    cutoff_a: int
    cutoff_b: int

    def __post_init__(self):
        for name in ("cutoff_a", "cutoff_b"):
            value = getattr(self, name)
            if int(value) != value or value < 1:
                raise ValueError(f"{name} must be a positive integer, got {value!r}")
        if self.cutoff_a * self.cutoff_b > config.MAX_DIM:
            raise ValueError(
                f"dimension {self.cutoff_a * self.cutoff_b} exceeds {config.MAX_DIM}"
            )

    @property
    def dim(self) -> int:
        return self.cutoff_a * self.cutoff_b

    @property
    def shape(self) -> tuple[int, int]:
        return (self.cutoff_a, self.cutoff_b)

    def index(self, n_a: int, n_b: int) -> int:
        if not (0 <= n_a < self.cutoff_a and 0 <= n_b < self.cutoff_b):
            raise OutOfRangeIndex(
                f"|{n_a},{n_b}> outside cutoffs ({self.cutoff_a},{self.cutoff_b})"
            )
        return n_a * self.cutoff_b + n_b

    def levels(self, index: int) -> tuple[int, int]:
        if not 0 <= index < self.dim:
            raise OutOfRangeIndex(f"flat index {index} outside [0, {self.dim})")
        return divmod(index, self.cutoff_b)

    def occupations(self) -> tuple[np.ndarray, np.ndarray]:
        """Arrays (n_a, n_b) of occupation numbers for every flat index."""
        n_a, n_b = np.divmod(np.arange(self.dim), self.cutoff_b)
        return n_a, n_b

    def guarded_mask(self, guard: int) -> np.ndarray:
        """Boolean mask of basis states with both modes at least `guard` below the top."""
        n_a, n_b = self.occupations()
        return (n_a <= self.cutoff_a - 1 - guard) & (n_b <= self.cutoff_b - 1 - guard)


def build_space(cutoff_a: int, cutoff_b: int) -> FockSpace:
    return FockSpace(int(cutoff_a), int(cutoff_b))


@dataclass(frozen=True, eq=False)
class Operator:
    matrix: np.ndarray
    label: str
    space: FockSpace
    hermitian: bool = False

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (self.space.dim, self.space.dim):
            raise SpaceMismatch(
                f"operator {self.label!r} has shape {m.shape}, space dim is {self.space.dim}"
            )
        if self.hermitian and np.max(np.abs(m - m.conj().T), initial=0.0) > config.HERMITIAN_TOL:
            raise ValueError(f"operator {self.label!r} flagged hermitian but is not")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dag(self) -> "Operator":
        return Operator(self.matrix.conj().T, f"({self.label})^dag", self.space, self.hermitian)


def _single_mode_lowering(cutoff: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, cutoff, dtype=float)), 1)


def annihilation(space: FockSpace, mode: str) -> Operator:
    if mode == "a":
        m = np.kron(_single_mode_lowering(space.cutoff_a), np.eye(space.cutoff_b))
    elif mode == "b":
        m = np.kron(np.eye(space.cutoff_a), _single_mode_lowering(space.cutoff_b))
    else:
        raise ValueError(f"mode must be 'a' or 'b', got {mode!r}")
    return Operator(m, mode, space)


def creation(space: FockSpace, mode: str) -> Operator:
    return Operator(annihilation(space, mode).matrix.T, f"{mode}^dag", space)


@dataclass(frozen=True, eq=False)
class QuantumState:
    """Pure amplitude vector (1-d) or density matrix (2-d) on a FockSpace.

    Construction checks normalization and Hermiticity only; positivity is
    checked on demand with :meth:`min_eigenvalue`, since partial transposes
    are legitimately allowed to be non-positive.
    """

    data: np.ndarray
    space: FockSpace
    tail_guard: int = config.DEFAULT_GUARD
    discarded_mass: float = 0.0
    label: str = field(default="")

    def __post_init__(self):
        d = np.array(self.data, dtype=complex)
        dim = self.space.dim
        if d.ndim == 1:
            if d.shape != (dim,):
                raise SpaceMismatch(f"amplitude vector length {d.shape[0]} != dim {dim}")
            if abs(np.linalg.norm(d) - 1.0) > config.TRACE_TOL:
                raise InvalidState("pure state is not normalized")
        elif d.ndim == 2:
            if d.shape != (dim, dim):
                raise SpaceMismatch(f"density matrix shape {d.shape} != ({dim}, {dim})")
            if np.max(np.abs(d - d.conj().T)) > config.HERMITIAN_TOL:
                raise InvalidState("density matrix is not Hermitian")
            if abs(np.trace(d) - 1.0) > config.TRACE_TOL:
                raise InvalidState("density matrix does not have unit trace")
        else:
            raise InvalidState("state data must be a vector or a square matrix")
        d.setflags(write=False)
        object.__setattr__(self, "data", d)

    @property
    def is_pure(self) -> bool:
        return self.data.ndim == 1

    def density(self) -> np.ndarray:
        if self.is_pure:
            return np.outer(self.data, self.data.conj())
        return self.data

    def populations(self) -> np.ndarray:
        if self.is_pure:
            return np.abs(self.data) ** 2
        return self.data.diagonal().real

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.density())[0])

    def purity(self) -> float:
        rho = self.density()
        return float(np.real(np.vdot(rho.conj().T, rho)))

    def is_guard_clean(self, k: int | None = None, tol: float = config.GUARD_TOL) -> bool:
        k = self.tail_guard if k is None else k
        return tail_mass(self, k) <= tol

    def _replace(self, data: np.ndarray, label: str | None = None) -> "QuantumState":
        return QuantumState(
            data,
            self.space,
            tail_guard=self.tail_guard,
            discarded_mass=self.discarded_mass,
            label=self.label if label is None else label,
        )


def pure_state(
    space: FockSpace,
    amplitudes: Iterable[tuple[tuple[int, int], complex]],
    tail_guard: int = config.DEFAULT_GUARD,
    label: str = "",
) -> QuantumState:
    vec = np.zeros(space.dim, dtype=complex)
    for (n_a, n_b), amp in amplitudes:
        vec[space.index(n_a, n_b)] += amp
    norm = np.linalg.norm(vec)
    if norm == 0.0:
        raise ZeroNorm("amplitude vector is zero")
    return QuantumState(vec / norm, space, tail_guard=tail_guard, label=label)


def density_from_pure(state: QuantumState) -> QuantumState:
    if not state.is_pure:
        raise RepresentationError("state is already a density matrix")
    return state._replace(state.density())


def as_density(state: QuantumState) -> QuantumState:
    return density_from_pure(state) if state.is_pure else state


def expectation(state: QuantumState, op: Operator) -> complex:
    if state.space != op.space:
        raise SpaceMismatch(f"state space {state.space} != operator space {op.space}")
    if state.is_pure:
        psi = state.data
        return complex(np.vdot(psi, op.matrix @ psi))
    # Tr(rho M) without forming the product
    return complex(np.sum(state.data * op.matrix.T))


def partial_transpose(state: QuantumState) -> QuantumState:
    """Transpose the mode-b indices: <n_a,n_b|rho^PT|m_a,m_b> = <n_a,m_b|rho|m_a,n_b>."""
    if state.is_pure:
        raise RepresentationError("partial_transpose needs a density matrix")
    ca, cb = state.space.shape
    rho = state.data.reshape(ca, cb, ca, cb)
    pt = rho.transpose(0, 3, 2, 1).reshape(state.space.dim, state.space.dim)
    return state._replace(pt, label=f"PT[{state.label}]" if state.label else "")


def tail_mass(state: QuantumState, k: int) -> float:
    """Population on basis states with either mode in its top `k` levels."""
    ca, cb = state.space.shape
    if not 0 <= k < min(ca, cb):
        raise ValueError(f"guard k={k} must satisfy 0 <= k < {min(ca, cb)}")
    outside = ~state.space.guarded_mask(k)
    return float(np.clip(state.populations()[outside].sum(), 0.0, 1.0))
