"""Parameterized reference states.

Family names and parameter keys are also the vocabulary of the CLI config:

=====================  ==========================================
family                 parameters
=====================  ==========================================
two-photon-theta       theta
single-photon-theta    theta
noon                   n
tmsv                   r
fock-product           n_a, n_b
coherent-product       alpha, beta
mixed-product          weights, components (list of [alpha, beta])
=====================  ==========================================
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from scipy.special import gammainc

from . import config
from .errors import InsufficientCutoff, ParameterOutOfRange
from .fock import FockSpace, QuantumState, build_space, pure_state

FAMILIES = (
    "two-photon-theta",
    "single-photon-theta",
    "noon",
    "tmsv",
    "fock-product",
    "coherent-product",
    "mixed-product",
)

_DEFAULTS: dict[str, dict[str, Any]] = {
    "two-photon-theta": {"theta": math.pi / 4},
    "single-photon-theta": {"theta": math.pi / 4},
    "noon": {"n": 2},
    "tmsv": {"r": 0.3},
    "fock-product": {"n_a": 0, "n_b": 0},
    "coherent-product": {"alpha": 1.0, "beta": 1.0},
    "mixed-product": {"weights": [0.5, 0.5], "components": [[1.0, 0.0], [0.0, 1.0]]},
}


@dataclass(frozen=True)
class StateSpec:
    family: str
    params: dict[str, Any] = field(default_factory=dict)
    cutoffs: tuple[int, int] = (config.DEFAULT_CUTOFF, config.DEFAULT_CUTOFF)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ParameterOutOfRange(f"unknown family {self.family!r}; choose from {FAMILIES}")
        unknown = set(self.params) - set(_DEFAULTS[self.family])
        if unknown:
            raise ParameterOutOfRange(f"{self.family} does not take parameters {sorted(unknown)}")

    def param(self, key: str):
        return self.params.get(key, _DEFAULTS[self.family][key])

    def resolved_params(self) -> dict[str, Any]:
        return {k: self.param(k) for k in _DEFAULTS[self.family]}


def _coherent_amplitudes(alpha: complex, cutoff: int) -> tuple[np.ndarray, float]:
    """Truncated, renormalized coherent amplitudes and the discarded probability."""
    n = np.arange(cutoff)
    log_fact = np.array([math.lgamma(k + 1) for k in n])
    if alpha == 0:
        amp = (n == 0).astype(complex)
    else:
        amp = np.exp(-abs(alpha) ** 2 / 2 + n * np.log(complex(alpha)) - log_fact / 2)
    kept = float(np.sum(np.abs(amp) ** 2))
    # Poisson tail P(n >= cutoff), accurate far below float epsilon
    return amp / math.sqrt(kept), float(gammainc(cutoff, abs(alpha) ** 2))


def _check_coherent(value, name, space: FockSpace):
    if abs(value) > 2:
        raise ParameterOutOfRange(f"|{name}| = {abs(value):.3g} exceeds 2")
    if abs(value) > 0 and min(space.shape) < 16:
        raise ParameterOutOfRange(f"nonzero {name} requires cutoffs >= 16")


def _as_complex(value) -> complex:
    if isinstance(value, (list, tuple)):
        return complex(value[0], value[1])
    return complex(value)


def _check_discarded(mass: float, family: str) -> None:
    if mass > config.GUARD_TOL:
        raise InsufficientCutoff(
            f"{family}: truncation discards probability {mass:.3g} > {config.GUARD_TOL:g}"
        )


def realize(spec: StateSpec, space: FockSpace | None = None) -> QuantumState:
    space = build_space(*spec.cutoffs) if space is None else space
    fam = spec.family
    ca, cb = space.shape

    if fam in ("two-photon-theta", "single-photon-theta"):
        theta = float(spec.param("theta"))
        if not 0 <= theta < 2 * math.pi:
            raise ParameterOutOfRange(f"theta={theta} outside [0, 2pi)")
        if fam == "two-photon-theta":
            if min(ca, cb) < 3:
                raise InsufficientCutoff("two-photon-theta needs cutoffs >= 3")
            terms = [((2, 0), math.cos(theta)), ((0, 2), 1j * math.sin(theta))]
        else:
            if min(ca, cb) < 2:
                raise InsufficientCutoff("single-photon-theta needs cutoffs >= 2")
            terms = [((1, 0), math.cos(theta)), ((0, 1), math.sin(theta))]
        return pure_state(space, [t for t in terms if t[1] != 0], label=f"{fam}(theta={theta:.6g})")

    if fam == "noon":
        n = int(spec.param("n"))
        if not 1 <= n <= min(ca, cb) - 3:
            raise ParameterOutOfRange(f"noon n={n} must lie in [1, cutoff-3]")
        return pure_state(space, [((n, 0), 1.0), ((0, n), 1.0)], label=f"noon(n={n})")

    if fam == "fock-product":
        n_a, n_b = int(spec.param("n_a")), int(spec.param("n_b"))
        if not (0 <= n_a <= ca - 3 and 0 <= n_b <= cb - 3):
            raise ParameterOutOfRange(f"fock-product ({n_a},{n_b}) must lie below cutoff-2")
        return pure_state(space, [((n_a, n_b), 1.0)], label=f"fock({n_a},{n_b})")

    if fam == "tmsv":
        r = float(spec.param("r"))
        if not 0 <= r <= 0.8:
            raise ParameterOutOfRange(f"tmsv r={r} outside [0, 0.8]")
        n = np.arange(min(ca, cb))
        amp = np.tanh(r) ** n / math.cosh(r)
        kept = float(np.sum(amp**2))
        # geometric tail sum, exact where 1 - kept would round to zero
        discarded = math.tanh(r) ** (2 * n.size)
        _check_discarded(discarded, fam)
        vec = np.zeros(space.dim, dtype=complex)
        vec[n * cb + n] = amp / math.sqrt(kept)
        return QuantumState(vec, space, discarded_mass=discarded, label=f"tmsv(r={r:.6g})")

    if fam == "coherent-product":
        alpha, beta = _as_complex(spec.param("alpha")), _as_complex(spec.param("beta"))
        _check_coherent(alpha, "alpha", space)
        _check_coherent(beta, "beta", space)
        amp_a, lost_a = _coherent_amplitudes(alpha, ca)
        amp_b, lost_b = _coherent_amplitudes(beta, cb)
        discarded = 1.0 - (1.0 - lost_a) * (1.0 - lost_b)
        _check_discarded(discarded, fam)
        return QuantumState(np.kron(amp_a, amp_b), space, discarded_mass=discarded, label=f"coherent({alpha},{beta})")

    # mixed-product: convex mixture of coherent products
    weights = np.asarray(spec.param("weights"), dtype=float)
    comps = spec.param("components")
    if len(weights) != len(comps) or len(weights) == 0:
        raise ParameterOutOfRange("mixed-product needs one weight per component")
    if np.any(weights < 0) or weights.sum() <= 0:
        raise ParameterOutOfRange("mixture weights must be non-negative with positive sum")
    weights = weights / weights.sum()
    rho = np.zeros((space.dim, space.dim), dtype=complex)
    discarded = 0.0
    for w, (alpha, beta) in zip(weights, comps):
        sub = realize(StateSpec("coherent-product", {"alpha": alpha, "beta": beta}, spec.cutoffs), space)
        rho += w * np.outer(sub.data, sub.data.conj())
        discarded = max(discarded, sub.discarded_mass)
    rho = (rho + rho.conj().T) / 2
    return QuantumState(rho, space, discarded_mass=discarded, label="mixed-product")


def two_photon_theta(theta: float, space: FockSpace | None = None) -> QuantumState:
    theta = theta % (2 * math.pi)
    space = space or build_space(config.DEFAULT_CUTOFF, config.DEFAULT_CUTOFF)
    return realize(StateSpec("two-photon-theta", {"theta": theta}, space.shape), space)


def _random_local(rng: np.random.Generator, levels: int, cutoff: int) -> np.ndarray:
    vec = np.zeros(cutoff, dtype=complex)
    vec[:levels] = rng.normal(size=levels) + 1j * rng.normal(size=levels)
    return vec / np.linalg.norm(vec)


def random_product_mixture(
    rng: np.random.Generator, space: FockSpace, n_components: int, levels: int
) -> QuantumState:
    """Mixture of random pure product states supported on the lowest `levels` of each mode."""
    weights = rng.dirichlet(np.ones(n_components))
    rho = np.zeros((space.dim, space.dim), dtype=complex)
    for w in weights:
        psi = np.kron(_random_local(rng, levels, space.cutoff_a), _random_local(rng, levels, space.cutoff_b))
        rho += w * np.outer(psi, psi.conj())
    rho = (rho + rho.conj().T) / 2
    return QuantumState(rho / np.trace(rho).real, space, label="random-separable")


def catalog_separable_suite(
    count: int, seed: int, space: FockSpace | None = None, guard: int = config.DEFAULT_GUARD
) -> list[QuantumState]:
    """Deterministic list of random separable mixtures with 2-5 product components."""
    if count < 1:
        raise ValueError("count must be >= 1")
    space = space or build_space(8, 8)
    levels = min(space.shape) - guard
    if levels < 1:
        raise InsufficientCutoff(f"cutoffs {space.shape} leave no room below guard {guard}")
    rng = np.random.default_rng(seed)
    return [
        random_product_mixture(rng, space, int(rng.integers(2, 6)), levels)
        for _ in range(count)
    ]


def random_guarded_state(
    rng: np.random.Generator,
    space: FockSpace,
    guard: int = config.DEFAULT_GUARD,
    rank: int | None = None,
) -> QuantumState:
    """Random (generally entangled) mixed state supported on the guarded subspace."""
    keep = np.flatnonzero(space.guarded_mask(guard))
    if keep.size == 0:
        raise InsufficientCutoff(f"cutoffs {space.shape} leave no room below guard {guard}")
    rank = rank or int(rng.integers(1, 4))
    g = np.zeros((space.dim, rank), dtype=complex)
    g[keep] = rng.normal(size=(keep.size, rank)) + 1j * rng.normal(size=(keep.size, rank))
    rho = g @ g.conj().T
    rho = (rho + rho.conj().T) / 2
    return QuantumState(rho / np.trace(rho).real, space, tail_guard=guard, label="random-guarded")
