"""Measurement statistics for GHZ-family resources and no-signalling boxes.

Outcome strings ``m`` use the same index convention as inputs: m_1 is the
least significant bit of the outcome index.  Site j measures
``cos(a_j) X + sin(a_j) Y``; outcome bit 0 is the +1 eigenvalue.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .boolfn import BitString, BooleanFunction, index_of

MAX_ANALYTIC_QUBITS = 24
MAX_STATEVECTOR_QUBITS = 14


@dataclass(frozen=True)
class GhzResource:
    """(|u> + e^{i phase} |~u>) / sqrt(2) on N qubits."""

    N: int
    flip: tuple[int, ...] = None
    phase: float = 0.0

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("N must be positive")
        flip = (0,) * self.N if self.flip is None else tuple(int(b) for b in self.flip)
        if len(flip) != self.N or any(b not in (0, 1) for b in flip):
            raise ValueError("flip pattern must be N bits")
        object.__setattr__(self, "flip", flip)
        object.__setattr__(self, "phase", float(self.phase))

    @property
    def signs(self) -> np.ndarray:
        return np.array([-1.0 if b else 1.0 for b in self.flip])

    def statevector(self) -> np.ndarray:
        if self.N > MAX_STATEVECTOR_QUBITS:
            raise ValueError(f"statevector limited to {MAX_STATEVECTOR_QUBITS} qubits")
        u = index_of(self.flip)
        ubar = u ^ ((1 << self.N) - 1)
        psi = np.zeros(1 << self.N, dtype=complex)
        psi[u] += 1 / math.sqrt(2)
        psi[ubar] += np.exp(1j * self.phase) / math.sqrt(2)
        return psi

    def to_json(self) -> dict:
        return {"type": "ghz", "N": self.N, "flip": list(self.flip), "phase": self.phase}


@dataclass(frozen=True)
class NsBoxResource:
    """No-signalling box: output parity equals f(s); every proper subset of outputs is uniform."""

    f: BooleanFunction

    @property
    def sites(self) -> int:
        return self.f.n

    def to_json(self) -> dict:
        return {"type": "nsbox", "f": self.f.to_json()}


def resource_from_json(obj: Mapping):
    kind = obj.get("type")
    if kind == "ghz":
        return GhzResource(int(obj["N"]), tuple(obj["flip"]), float(obj.get("phase", 0.0)))
    if kind == "nsbox":
        return NsBoxResource(BooleanFunction.from_json(obj["f"]))
    raise ValueError(f"unknown resource type {kind!r}")


def _check_angles(r: GhzResource, alphas: Sequence[float]) -> np.ndarray:
    alphas = np.asarray(alphas, dtype=float)
    if alphas.shape != (r.N,):
        raise ValueError(f"expected {r.N} angles, got {alphas.shape}")
    return alphas


def ghz_parity_expectation(r: GhzResource, alphas: Sequence[float]) -> float:
    alphas = _check_angles(r, alphas)
    return math.cos(float(r.signs @ alphas) - r.phase)


def _parity_signs(N: int) -> np.ndarray:
    idx = np.arange(1 << N)
    w = np.zeros_like(idx)
    for j in range(N):
        w += (idx >> j) & 1
    return 1.0 - 2.0 * (w & 1)


def outcome_distribution(r: GhzResource, alphas: Sequence[float]) -> np.ndarray:
    """Probability of every outcome string, indexed by outcome index."""
    if r.N > MAX_ANALYTIC_QUBITS:
        raise ValueError(f"distribution limited to {MAX_ANALYTIC_QUBITS} qubits")
    corr = ghz_parity_expectation(r, alphas)
    return (1.0 + _parity_signs(r.N) * corr) / (1 << r.N)


def statevector_distribution(state: Sequence[complex], alphas: Sequence[float]) -> np.ndarray:
    """Born-rule distribution for product x-y plane measurements on an arbitrary pure state."""
    psi = np.asarray(state, dtype=complex)
    N = int(round(math.log2(psi.size))) if psi.size else 0
    if psi.size != 1 << N or N < 1:
        raise ValueError("state length must be a power of two")
    if N > MAX_STATEVECTOR_QUBITS:
        raise ValueError(f"statevector limited to {MAX_STATEVECTOR_QUBITS} qubits")
    if abs(np.vdot(psi, psi).real - 1.0) > 1e-10:
        raise ValueError("state is not normalized")
    alphas = np.asarray(alphas, dtype=float)
    if alphas.shape != (N,):
        raise ValueError(f"expected {N} angles")
    # C-order reshape puts qubit N on axis 0, qubit 1 on the last axis
    t = psi.reshape((2,) * N)
    for j, a in enumerate(alphas):
        rows = np.array([[1, np.exp(-1j * a)], [1, -np.exp(-1j * a)]]) / math.sqrt(2)
        axis = N - 1 - j
        t = np.moveaxis(np.tensordot(rows, t, axes=([1], [axis])), 0, axis)
    return np.abs(t.reshape(-1)) ** 2


def parity_correlator(dist: np.ndarray) -> float:
    N = int(round(math.log2(dist.size)))
    return float(_parity_signs(N) @ dist)


def setting_angles(protocol, x: int) -> np.ndarray:
    s = protocol.P.apply(x)
    return np.array([math.pi * float(a) if (s >> j) & 1 else 0.0
                     for j, a in enumerate(protocol.angles)])


def _check_dims(protocol, resource, f: BooleanFunction) -> None:
    if protocol.n != f.n:
        raise ValueError("protocol and function arity differ")
    sites = resource.N if isinstance(resource, GhzResource) else resource.sites
    if sites != protocol.sites:
        raise ValueError(f"resource has {sites} sites, protocol uses {protocol.sites}")


def success_probability(protocol, resource, f: BooleanFunction, w: Sequence | None = None) -> float:
    """Mean probability that the output parity (plus post bit) equals f(x) under prior w."""
    _check_dims(protocol, resource, f)
    size = 1 << f.n
    weights = [1.0 / size] * size if w is None else [float(v) for v in getattr(w, "weights", w)]
    if len(weights) != size:
        raise ValueError("prior has the wrong length")
    total = 0.0
    for x in range(size):
        if weights[x] == 0:
            continue
        target = f.table[x] ^ protocol.post_bit
        if isinstance(resource, GhzResource):
            corr = ghz_parity_expectation(resource, setting_angles(protocol, x))
            p = (1.0 + (1 - 2 * target) * corr) / 2.0
        else:
            s = protocol.P.apply(x)
            p = 1.0 if resource.f.table[s] == target else 0.0
        total += weights[x] * p
    return total


def _parity_probability(protocol, resource, x: int) -> tuple[float, int]:
    """Return (probability that the raw outcome parity is 0, number of sites)."""
    if isinstance(resource, GhzResource):
        corr = ghz_parity_expectation(resource, setting_angles(protocol, x))
        return (1.0 + corr) / 2.0, resource.N
    s = protocol.P.apply(x)
    return (1.0 if resource.f.table[s] == 0 else 0.0), resource.sites


def sample_run(protocol, resource, x: Sequence[int], seed) -> tuple[BitString, int]:
    """Draw one outcome string for input x; returns (m, protocol output)."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    xi = index_of(x)
    p0, N = _parity_probability(protocol, resource, xi)
    parity = 0 if rng.random() < p0 else 1
    rest = rng.integers(0, 2, size=N - 1)
    m = tuple(int(b) for b in rest) + ((int(rest.sum()) & 1) ^ parity,)
    return m, parity ^ protocol.post_bit


def sample_runs(protocol, resource, x: Sequence[int], shots: int, seed) -> np.ndarray:
    """Vectorized version of sample_run returning an array of protocol outputs."""
    rng = np.random.default_rng(seed)
    p0, _ = _parity_probability(protocol, resource, index_of(x))
    parity = (rng.random(shots) >= p0).astype(int)
    return parity ^ protocol.post_bit
