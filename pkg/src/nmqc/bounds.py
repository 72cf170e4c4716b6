"""Full-correlator Bell functionals, their games, and classical / quantum bounds.

A functional assigns a coefficient beta(s) to every setting string s; its
value on correlators eps(s) is sum_s beta(s) eps(s).  The quantum bound is
estimated from the variational form

    q = sup_phi | sum_s beta(s) exp(i phi . s) |

by multi-start gradient ascent; the classical bound is exact.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .boolfn import BooleanFunction, bits_of, fwht

TWO_PI = 2.0 * math.pi


def _as_fraction(v) -> Fraction:
    if isinstance(v, str):
        return Fraction(v.strip())
    return Fraction(v)


def format_fraction(v: Fraction) -> str:
    v = Fraction(v)
    return f"{v.numerator}/{v.denominator}"


@dataclass(frozen=True)
class PriorDistribution:
    n: int
    weights: tuple[Fraction, ...]

    def __post_init__(self):
        w = tuple(_as_fraction(v) for v in self.weights)
        if len(w) != 1 << self.n:
            raise ValueError("prior needs 2**n weights")
        if any(v < 0 for v in w) or sum(w) != 1:
            raise ValueError("prior weights must be non-negative and sum to 1")
        object.__setattr__(self, "weights", w)

    @classmethod
    def uniform(cls, n: int) -> PriorDistribution:
        return cls(n, (Fraction(1, 1 << n),) * (1 << n))

    @classmethod
    def point_mass(cls, n: int, s: int) -> PriorDistribution:
        return cls(n, tuple(Fraction(int(i == s)) for i in range(1 << n)))

    def to_json(self) -> dict:
        return {"n": self.n, "weights": [format_fraction(v) for v in self.weights]}

    @classmethod
    def from_json(cls, obj: Mapping) -> PriorDistribution:
        return cls(int(obj["n"]), tuple(_as_fraction(v) for v in obj["weights"]))


@dataclass(frozen=True)
class BellFunctional:
    n: int
    beta: tuple[Fraction, ...]

    def __post_init__(self):
        b = tuple(_as_fraction(v) for v in self.beta)
        if len(b) != 1 << self.n:
            raise ValueError("functional needs 2**n coefficients")
        object.__setattr__(self, "beta", b)

    @property
    def l1_norm(self) -> Fraction:
        return sum((abs(v) for v in self.beta), Fraction(0))

    def is_normalized(self) -> bool:
        return self.l1_norm == 1

    def normalized(self) -> BellFunctional:
        norm = self.l1_norm
        if norm == 0:
            raise ValueError("zero functional cannot be normalized")
        return BellFunctional(self.n, tuple(v / norm for v in self.beta))

    def scaled(self, factor) -> BellFunctional:
        factor = _as_fraction(factor)
        return BellFunctional(self.n, tuple(v * factor for v in self.beta))

    def permuted(self, perm: Sequence[int]) -> BellFunctional:
        """Relabel parties: new party j is old party perm[j]."""
        out = [Fraction(0)] * (1 << self.n)
        for s in range(1 << self.n):
            t = sum(((s >> perm[j]) & 1) << j for j in range(self.n))
            out[t] = self.beta[s]
        return BellFunctional(self.n, tuple(out))

    def value(self, correlators: Sequence[float]) -> float:
        return float(sum(float(b) * e for b, e in zip(self.beta, correlators)))

    def to_json(self) -> dict:
        return {"n": self.n, "beta": [format_fraction(v) for v in self.beta]}

    @classmethod
    def from_json(cls, obj: Mapping) -> BellFunctional:
        return cls(int(obj["n"]), tuple(_as_fraction(v) for v in obj["beta"]))


def functional_from_game(f: BooleanFunction, w: PriorDistribution | None = None) -> BellFunctional:
    w = PriorDistribution.uniform(f.n) if w is None else w
    if w.n != f.n:
        raise ValueError("prior and function arity differ")
    return BellFunctional(f.n, tuple(-p if v else p for p, v in zip(w.weights, f.table)))


def game_from_functional(beta: BellFunctional) -> tuple[BooleanFunction, PriorDistribution]:
    if not beta.is_normalized():
        raise ValueError("functional must satisfy sum |beta| = 1")
    f = BooleanFunction(beta.n, tuple(int(v < 0) for v in beta.beta))
    return f, PriorDistribution(beta.n, tuple(abs(v) for v in beta.beta))


def mean_success_from_bound(u):
    if not -1 <= u <= 1:
        raise ValueError("bound must lie in [-1, 1]")
    if isinstance(u, (int, Fraction)):
        return (Fraction(u) + 1) / 2
    return (u + 1) / 2


# --- classical bound ----------------------------------------------------------

def _integer_coefficients(beta: BellFunctional) -> tuple[list[int], int]:
    den = math.lcm(*(v.denominator for v in beta.beta))
    return [int(v * den) for v in beta.beta], den


def classical_bound(beta: BellFunctional) -> Fraction:
    """max_b |sum_s beta(s) (-1)^(b.s)|, the best deterministic local strategy."""
    ints, den = _integer_coefficients(beta)
    return Fraction(max(abs(v) for v in fwht(ints, beta.n)), den)


def classical_bound_bruteforce(beta: BellFunctional) -> Fraction:
    """Enumerate all 4**n local output tables (party j outputs o_j(s_j))."""
    n = beta.n
    if n > 6:
        raise ValueError("brute force limited to n <= 6")
    ints, den = _integer_coefficients(beta)
    # sign of party j for setting bit v under local table t in 0..3
    local = [(1, 1), (-1, 1), (1, -1), (-1, -1)]
    best = 0
    for tables in itertools.product(range(4), repeat=n):
        total = 0
        for s, coef in enumerate(ints):
            if coef:
                sign = 1
                for j in range(n):
                    sign *= local[tables[j]][(s >> j) & 1]
                total += sign * coef
        best = max(best, abs(total))
    return Fraction(best, den)


# --- quantum bound -------------------------------------------------------------

@dataclass
class OptimizerConfig:
    restarts: int | None = None  # None -> max(100, 25 n)
    max_iter: int = 10_000
    grad_tol: float = 1e-10
    min_step: float = 1e-15
    corner_cap_n: int = 16
    corner_samples: int = 1 << 16
    seed: int = 0

    def restarts_for(self, n: int) -> int:
        return max(100, 25 * n) if self.restarts is None else self.restarts


@dataclass
class BoundsReport:
    classical: Fraction
    quantum: float
    restarts: int
    argmax_angles: tuple[float, ...]
    gradient_norm: float = 0.0
    corners: int = 0

    @property
    def mean_success_classical(self) -> Fraction:
        return mean_success_from_bound(self.classical)

    @property
    def mean_success_quantum(self) -> float:
        return (self.quantum + 1) / 2

    def to_json(self) -> dict:
        return {
            "classical": format_fraction(self.classical),
            "quantum": self.quantum,
            "restarts": self.restarts,
            "argmax_angles": list(self.argmax_angles),
            "gradient_norm": self.gradient_norm,
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> BoundsReport:
        return cls(_as_fraction(obj["classical"]), float(obj["quantum"]), int(obj["restarts"]),
                   tuple(float(a) for a in obj["argmax_angles"]), float(obj.get("gradient_norm", 0.0)))


def setting_matrix(n: int) -> np.ndarray:
    """Row s holds the bits of setting string s."""
    return np.array([bits_of(s, n) for s in range(1 << n)], dtype=float).reshape(1 << n, n)


def functional_value(beta: Sequence[float] | BellFunctional, phi: Sequence[float]) -> float:
    """|sum_s beta(s) exp(i phi . s)| for one angle vector."""
    if isinstance(beta, BellFunctional):
        beta = [float(v) for v in beta.beta]
    beta = np.asarray(beta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    n = phi.size
    z = np.exp(1j * (setting_matrix(n) @ phi)) @ beta
    return float(abs(z))


def objective_and_gradient(beta: np.ndarray, S: np.ndarray, phi: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """G^2 = |Z|^2 and its gradient for a batch of angle vectors (rows of phi)."""
    W = np.exp(1j * (phi @ S.T)) * beta  # (batch, 2^n)
    Z = W.sum(axis=1)
    dZ = 1j * (W @ S)  # dZ/dphi_k = i sum_{s_k = 1} beta(s) e^{i phi.s}
    grad = 2.0 * np.real(np.conj(Z)[:, None] * dZ)
    return np.abs(Z) ** 2, grad


def wrap_angles(phi: np.ndarray) -> np.ndarray:
    """Map angles into (-pi, pi]."""
    return math.pi - np.mod(math.pi - phi, TWO_PI)


def _ascend(beta: np.ndarray, S: np.ndarray, phi: np.ndarray, cfg: OptimizerConfig):
    """Normalized-gradient ascent with a per-start adaptive step length."""
    phi = wrap_angles(phi.copy())
    val, grad = objective_and_gradient(beta, S, phi)
    gnorm = np.linalg.norm(grad, axis=1)
    step = np.full(len(phi), 0.5)
    active = (gnorm >= cfg.grad_tol)
    for _ in range(cfg.max_iter):
        idx = np.nonzero(active)[0]
        if idx.size == 0:
            break
        direction = grad[idx] / gnorm[idx, None]
        trial = wrap_angles(phi[idx] + step[idx, None] * direction)
        tval, tgrad = objective_and_gradient(beta, S, trial)
        better = tval > val[idx]
        up, down = idx[better], idx[~better]
        phi[up], val[up], grad[up] = trial[better], tval[better], tgrad[better]
        gnorm[up] = np.linalg.norm(tgrad[better], axis=1)
        step[up] = np.minimum(step[up] * 2.0, math.pi)
        step[down] *= 0.5
        active[idx] = (gnorm[idx] >= cfg.grad_tol) & (step[idx] >= cfg.min_step)
    return phi, val, gnorm


def _corner_candidates(ints: list[int], n: int, cfg: OptimizerConfig, rng) -> tuple[np.ndarray, np.ndarray]:
    if n <= cfg.corner_cap_n:
        corners = np.arange(1 << n)
        walsh = np.abs(np.array(fwht(ints, n), dtype=float))
    else:
        corners = rng.integers(0, 1 << n, size=cfg.corner_samples)
        S = setting_matrix(n)
        signs = 1.0 - 2.0 * np.mod(S @ ((corners[:, None] >> np.arange(n)) & 1).T, 2)
        walsh = np.abs(np.asarray(ints, dtype=float) @ signs)
    angles = math.pi * ((corners[:, None] >> np.arange(n)) & 1).astype(float)
    return angles, walsh


def quantum_bound(beta: BellFunctional, cfg: OptimizerConfig | None = None) -> BoundsReport:
    """Estimate the quantum bound; never below the classical bound (all corners are seeds)."""
    cfg = OptimizerConfig() if cfg is None else cfg
    n = beta.n
    c = classical_bound(beta)
    norm = beta.l1_norm
    restarts = cfg.restarts_for(n)
    if norm == 0:
        return BoundsReport(c, 0.0, restarts, (0.0,) * n, 0.0, 0)

    unit = beta.normalized()
    ints, den = _integer_coefficients(unit)
    rng = np.random.default_rng(cfg.seed)

    # corners are stationary points of G^2, so they need no ascent
    corner_phi, corner_val = _corner_candidates(ints, n, cfg, rng)
    corner_val = corner_val / den

    S = setting_matrix(n)
    b = np.array([float(v) for v in unit.beta])
    start = rng.uniform(-math.pi, math.pi, size=(restarts, n))
    phi, val2, gnorm = _ascend(b, S, start, cfg)
    rand_val = np.sqrt(val2)

    values = np.concatenate([corner_val, rand_val])
    angles = np.vstack([corner_phi, phi])
    norms = np.concatenate([np.zeros(len(corner_val)), gnorm])
    best = values.max()
    tied = np.nonzero(values >= best - 1e-12)[0]
    pick = min(tied, key=lambda i: tuple(np.round(angles[i], 12)))
    return BoundsReport(
        classical=c,
        quantum=float(values[pick]) * float(norm),
        restarts=restarts,
        argmax_angles=tuple(float(a) for a in angles[pick]),
        gradient_norm=float(norms[pick]),
        corners=len(corner_val),
    )


# --- n-tuple AND analysis ---------------------------------------------------------

def gn_product_objective(phi: Sequence[float], n: int) -> float:
    """Factorized |sum_s beta(s) e^{i phi.s}| for the uniform n-tuple AND functional."""
    phi = np.asarray(phi, dtype=float)
    if phi.shape != (n,):
        raise ValueError(f"expected {n} angles")
    prod = float(np.prod(np.cos(phi / 2.0)))
    half = float(phi.sum()) / 2.0
    return abs((1 << n) * prod - 2.0 * complex(math.cos(half), math.sin(half))) / (1 << n)


def appendix_c_window(n: int) -> bool:
    """Whether cos(pi / 2n) > 1 - 2**(2 - n), the condition that leaves room for a violation."""
    if n < 2:
        raise ValueError("n must be at least 2")
    return math.cos(math.pi / (2 * n)) > 1.0 - 2.0 ** (2 - n)
