"""Deterministic protocol synthesis and exact feasibility decisions.

A protocol computes f when, for every input x with settings s = (P x) mod 2,

    sum_j s_j * angle_j  ==  f(x) + post_bit   (mod 2)

where angle_j is the measurement angle as a multiple of pi.  All checks are
exact over dyadic rationals.
"""

from __future__ import annotations

import itertools
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

from .boolfn import (ArityError, BooleanFunction, dot2, parity_coefficients,
                     parity_decomposition, popcount)
from .dyadic import Dyadic
from .gf2 import (Gf2Matrix, apply_preprocessing, general_linear_group,  # noqa: F401
                  group_closure, permutation_matrices)
from .lattice import IntegerSolver, left_kernel_basis, matvec
from .sim import GhzResource


class EquivalenceError(ValueError):
    """Raised when a matrix offered as a symmetry of f does not preserve f."""


class SearchLimitExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class Protocol:
    n: int
    P: Gf2Matrix
    angles: tuple[Dyadic, ...]
    post_bit: int = 0

    def __post_init__(self):
        if self.P.ncols != self.n:
            raise ArityError(f"P has {self.P.ncols} columns, arity is {self.n}")
        angles = tuple(Dyadic.coerce(a) for a in self.angles)
        if len(angles) != self.P.nrows:
            raise ValueError("one angle per row of P is required")
        if self.post_bit not in (0, 1):
            raise ValueError("post_bit must be 0 or 1")
        # a site whose setting never varies is dropped
        keep = [j for j, r in enumerate(self.P.rows) if r]
        object.__setattr__(self, "P", Gf2Matrix(tuple(self.P.rows[j] for j in keep), self.n))
        object.__setattr__(self, "angles", tuple(angles[j].reduce_mod2() for j in keep))

    @property
    def sites(self) -> int:
        return self.P.nrows

    def angles_radians(self) -> list[float]:
        return [3.141592653589793 * float(a) for a in self.angles]

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "sites": self.sites,
            "P": self.P.to_lists(),
            "angles": [a.to_json() for a in self.angles],
            "post_bit": self.post_bit,
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> Protocol:
        n = int(obj["n"])
        P = Gf2Matrix.from_lists(obj["P"], n)
        proto = cls(n, P, tuple(Dyadic.from_json(a) for a in obj["angles"]), int(obj["post_bit"]))
        if "sites" in obj and int(obj["sites"]) != proto.sites:
            raise ValueError("site count does not match P")
        return proto


@dataclass(frozen=True)
class Certificate:
    kind: str  # "lattice" or "alternating_sum"
    witnesses: dict

    def to_json(self) -> dict:
        return {"kind": self.kind, "witnesses": self.witnesses}


@dataclass(frozen=True)
class FeasibilityVerdict:
    status: str
    P: Gf2Matrix
    witness: Protocol | None = None
    certificate: Certificate | None = None

    @property
    def feasible(self) -> bool:
        return self.status == "feasible"

    @property
    def witness_angles(self) -> tuple[Dyadic, ...] | None:
        return None if self.witness is None else self.witness.angles

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "n": self.P.ncols,
            "P": self.P.to_lists(),
            "witness_angles": None if self.witness is None else [a.to_json() for a in self.witness.angles],
            "post_bit": None if self.witness is None else self.witness.post_bit,
            "certificate": None if self.certificate is None else self.certificate.to_json(),
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> FeasibilityVerdict:
        n = int(obj["n"])
        P = Gf2Matrix.from_lists(obj["P"], n)
        witness = None
        if obj.get("witness_angles") is not None:
            angles = tuple(Dyadic.from_json(a) for a in obj["witness_angles"])
            witness = Protocol(n, P, angles, int(obj["post_bit"]))
        cert = obj.get("certificate")
        certificate = None if cert is None else Certificate(cert["kind"], cert["witnesses"])
        return cls(obj["status"], P, witness, certificate)


# --- synthesis and verification ---------------------------------------------

def synthesize_protocol(f: BooleanFunction) -> Protocol:
    """Full parity-basis protocol on a GHZ state with at most 2**n - 1 sites."""
    theta = parity_decomposition(f).theta
    sites = [a for a in range(1, 1 << f.n) if not theta[a].is_even_integer()]
    P = Gf2Matrix(tuple(sites), f.n)
    # theta_0 = f(0) is an integer; its parity becomes the post-processing flip
    post_bit = theta[0].num & 1
    return Protocol(f.n, P, tuple(theta[a] for a in sites), post_bit)


def _phase_sums(p: Protocol, flip: Sequence[int] | None = None) -> list[Dyadic]:
    signs = [1] * p.sites if flip is None else [(-1) ** b for b in flip]
    if len(signs) != p.sites:
        raise ValueError("flip pattern length must equal the number of sites")
    out = []
    for x in range(1 << p.n):
        s = p.P.apply(x)
        total = Dyadic(0)
        for j, a in enumerate(p.angles):
            if (s >> j) & 1:
                total = total + a * signs[j]
        out.append(total)
    return out


def verify_deterministic(p: Protocol, f: BooleanFunction, flip: Sequence[int] | None = None) -> bool:
    """Exact check that the output parity equals f(x) for every x.

    ``flip`` is the GHZ flip pattern of the resource; sites with a flipped
    qubit contribute their angle with a minus sign.
    """
    if p.n != f.n:
        raise ArityError("protocol and function arity differ")
    for x, total in enumerate(_phase_sums(p, flip)):
        if not (total - f.table[x] - p.post_bit).is_even_integer():
            return False
    return True


# --- P-matrix equivalence ----------------------------------------------------

def compose(f: BooleanFunction, M: Gf2Matrix) -> BooleanFunction:
    """The function x -> f(M x)."""
    return BooleanFunction(f.n, tuple(f.table[M.apply(x)] for x in range(1 << f.n)))


def preserves(f: BooleanFunction, M: Gf2Matrix) -> bool:
    return M.is_invertible() and compose(f, M) == f


def has_full_stabilizer(f: BooleanFunction) -> bool:
    """True when f is constant on all nonzero inputs, so every invertible M preserves it."""
    return len(set(f.table[1:])) <= 1


def is_symmetric(f: BooleanFunction) -> bool:
    return all(preserves(f, M) for M in _permutation_generators(f.n))


def _permutation_generators(n: int) -> list[Gf2Matrix]:
    if n == 1:
        return [Gf2Matrix.identity(1)]
    swap = [1 << j for j in range(n)]
    swap[0], swap[1] = swap[1], swap[0]
    cycle = [1 << ((j + 1) % n) for j in range(n)]
    return [Gf2Matrix(tuple(swap), n), Gf2Matrix(tuple(cycle), n)]


def stabilizer_group(f: BooleanFunction, generators: Sequence[Gf2Matrix] | None = None,
                     max_full_n: int = 3) -> list[Gf2Matrix] | None:
    """Enumerate a group of symmetries {M : f(Mx) = f(x)} usable for pruning.

    With explicit generators each one is checked.  Otherwise the full linear
    group is used for functions constant off zero (n <= max_full_n), the
    permutation group for symmetric functions, and None is returned when no
    safe group is known.
    """
    if generators is not None:
        for M in generators:
            if not preserves(f, M):
                raise EquivalenceError("generator does not preserve f")
        return group_closure(list(generators), f.n)
    if has_full_stabilizer(f) and f.n <= max_full_n:
        return list(general_linear_group(f.n))
    if is_symmetric(f):
        return list(permutation_matrices(f.n))
    return None


def dedupe_rows(P: Gf2Matrix) -> Gf2Matrix:
    seen = []
    for r in P.rows:
        if r and r not in seen:
            seen.append(r)
    return Gf2Matrix(tuple(seen), P.ncols)


def canonicalize_p(P: Gf2Matrix, f: BooleanFunction, M: Gf2Matrix | None = None,
                   generators: Sequence[Gf2Matrix] | None = None) -> tuple[Gf2Matrix, Gf2Matrix]:
    """Bring P to an equivalent matrix P M with merged rows and, when possible, no all-ones row.

    Returns (P', M).  An explicit M must preserve f.
    """
    n = f.n
    if P.ncols != n:
        raise ArityError("P and f have different arity")
    if M is not None:
        if not preserves(f, M):
            raise EquivalenceError("M does not preserve f")
        return dedupe_rows(P @ M), M

    Q = dedupe_rows(P)
    ident = Gf2Matrix.identity(n)
    ones = (1 << n) - 1
    if ones not in Q.rows or Q.nrows >= ones:
        return Q, ident

    missing = next(w for w in range(1, ones + 1) if w not in Q.rows)
    if generators is None and has_full_stabilizer(f):
        M = _map_to_ones(missing, n)
        return dedupe_rows(Q @ M), M

    group = stabilizer_group(f, generators)
    for G in group or ():
        Q2 = Q @ G
        if ones not in Q2.rows:
            return dedupe_rows(Q2), G
    return Q, ident


def _map_to_ones(w: int, n: int) -> Gf2Matrix:
    """Invertible M with w M = (1, ..., 1)."""
    lead = (w & -w).bit_length() - 1
    rows = [1 << j for j in range(n)]
    others = w & ~(1 << lead)
    rows[lead] = ((1 << n) - 1) ^ others
    return Gf2Matrix(tuple(rows), n)


def alternating_sum_certificate(P: Gf2Matrix) -> list[int]:
    """v_j = sum_x (-1)^W(x) (P x)_j; nonzero only for all-ones rows."""
    v = [0] * P.nrows
    for x in range(1 << P.ncols):
        sign = -1 if popcount(x) & 1 else 1
        for j, r in enumerate(P.rows):
            if dot2(r, x):
                v[j] += sign
    return v


def alternating_sum(f: BooleanFunction) -> int:
    return sum(-v if popcount(x) & 1 else v for x, v in enumerate(f.table))


# --- feasibility --------------------------------------------------------------

@dataclass(frozen=True)
class _LatticeData:
    kernel: tuple[tuple[int, ...], ...]
    solver: IntegerSolver = field(compare=False)


@lru_cache(maxsize=4096)
def _lattice_data(rows: tuple[int, ...], n: int) -> _LatticeData:
    A = [[dot2(r, x) for r in rows] for x in range(1 << n)]
    R = [tuple(r) for r in left_kernel_basis(A)]
    return _LatticeData(tuple(R), IntegerSolver(R, 1 << n))


def decide_feasibility(f: BooleanFunction, P: Gf2Matrix) -> FeasibilityVerdict:
    """Decide whether some real angles and post bit make P compute f deterministically.

    With A[x, j] = (P x)_j, we need rational u and integer t with
    A u = f + c + 2 t.  For an integer basis R of the left kernel of A this
    holds iff R (f + c) is even and -R (f + c) / 2 lies in the lattice R Z^N.
    """
    n = f.n
    if P.ncols != n:
        raise ArityError("P and f have different arity")
    Q = dedupe_rows(P)
    data = _lattice_data(Q.rows, n)
    R = data.kernel
    odd_rows = {}
    for c in (0, 1):
        b = [v ^ c for v in f.table]
        Rb = matvec(R, b)
        odd = next((i for i, v in enumerate(Rb) if v % 2), None)
        if odd is not None:
            odd_rows[c] = list(R[odd])
            continue
        t = data.solver.solve([-v // 2 for v in Rb])
        if t is None:
            # unreachable: an even R b always lies in the image lattice
            odd_rows[c] = None
            continue
        target = [bv + 2 * tv for bv, tv in zip(b, t)]
        theta = parity_coefficients(target, n)
        angles = tuple(theta[r] for r in Q.rows)
        witness = Protocol(n, Q, angles, c)
        if not verify_deterministic(witness, f):
            raise AssertionError("feasibility witness failed verification")
        return FeasibilityVerdict("feasible", Q, witness=witness)

    row_sums = alternating_sum_certificate(Q)
    S = alternating_sum(f)
    if not any(row_sums) and S % 2:
        cert = Certificate("alternating_sum", {"row_sums": row_sums, "alternating_sum": S})
    else:
        cert = Certificate("lattice", {"kernel_vectors": [odd_rows[0], odd_rows[1]]})
    return FeasibilityVerdict("infeasible", Q, certificate=cert)


def check_certificate(f: BooleanFunction, verdict: FeasibilityVerdict) -> bool:
    """Independently re-check an infeasibility certificate."""
    cert = verdict.certificate
    if verdict.feasible or cert is None:
        return False
    P = verdict.P
    if cert.kind == "alternating_sum":
        return (not any(alternating_sum_certificate(P))) and alternating_sum(f) % 2 == 1
    for c, r in zip((0, 1), cert.witnesses["kernel_vectors"]):
        if r is None:
            return False
        # r annihilates every column of A and has odd inner product with f + c
        for row in P.rows:
            if sum(r[x] for x in range(1 << f.n) if dot2(row, x)) != 0:
                return False
        if sum(rv * (fv ^ c) for rv, fv in zip(r, f.table)) % 2 == 0:
            return False
    return True


# --- minimal site search ------------------------------------------------------

def _canonical_rows(rows: tuple[int, ...], group: Sequence[Gf2Matrix]) -> tuple[int, ...]:
    best = rows
    for G in group:
        img = tuple(sorted(G.row_times(r) for r in rows))
        if img < best:
            best = img
    return best


def _first_feasible(args) -> tuple[int, ...] | None:
    f, combos = args
    for rows in combos:
        if decide_feasibility(f, Gf2Matrix(rows, f.n)).feasible:
            return rows
    return None


def _worker_count() -> int:
    try:
        return max(1, int(os.environ.get("NMQC_THREADS", "1")))
    except ValueError:
        return 1


def minimal_sites_search(f: BooleanFunction, m_max: int | None = None,
                         generators: Sequence[Gf2Matrix] | None = None,
                         use_symmetry: bool = True, cutoff: int = 200_000,
                         workers: int | None = None) -> tuple[int, Protocol] | None:
    """Smallest number of distinct nonzero rows for which some P is feasible.

    Row sets are enumerated in lexicographic order, so the returned witness
    uses the lexicographically smallest feasible row set.  Returns None when
    no P with at most m_max rows works.
    """
    n = f.n
    full = (1 << n) - 1
    m_max = full if m_max is None else m_max
    if m_max > full:
        raise ValueError(f"m_max cannot exceed {full}")
    if not any(f.table[x] ^ f.table[0] for x in range(1 << n)):
        # constant: zero sites, answer is the post bit
        return 0, Protocol(n, Gf2Matrix((), n), (), f.table[0])
    group = stabilizer_group(f, generators) if use_symmetry else None
    workers = _worker_count() if workers is None else workers
    checked = 0
    for m in range(1, m_max + 1):
        combos = []
        for rows in itertools.combinations(range(1, full + 1), m):
            if group is not None and _canonical_rows(rows, group) != rows:
                continue
            combos.append(rows)
        checked += len(combos)
        if checked > cutoff:
            raise SearchLimitExceeded(f"more than {cutoff} row sets at m = {m}")
        found = _search_batch(f, combos, workers)
        if found is not None:
            verdict = decide_feasibility(f, Gf2Matrix(found, n))
            return m, verdict.witness
    return None


def _search_batch(f: BooleanFunction, combos: list, workers: int):
    if workers <= 1 or len(combos) < 64:
        return _first_feasible((f, combos))
    size = -(-len(combos) // workers)
    chunks = [(f, combos[i:i + size]) for i in range(0, len(combos), size)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(_first_feasible, chunks))
    # chunks are in lexicographic order; the first hit is the smallest
    return next((r for r in results if r is not None), None)


# --- pairwise AND construction -------------------------------------------------

def build_pairwise_and_protocol(n: int) -> tuple[Protocol, GhzResource]:
    """n + 1 site protocol for the pairwise AND function.

    Sites 1..n read x_j, site n+1 reads the parity of x; every site measures
    X for setting 0 and Y for setting 1 on the state (|0..01> + |1..10>)/sqrt(2).
    """
    if n < 2:
        raise ValueError("pairwise AND needs n >= 2")
    rows = tuple(1 << j for j in range(n)) + ((1 << n) - 1,)
    proto = Protocol(n, Gf2Matrix(rows, n), (Dyadic(1, 1),) * (n + 1), 0)
    resource = GhzResource(n + 1, (0,) * n + (1,), 0.0)
    return proto, resource


def iter_row_sets(n: int, m: int) -> Iterable[Gf2Matrix]:
    for rows in itertools.combinations(range(1, 1 << n), m):
        yield Gf2Matrix(rows, n)
