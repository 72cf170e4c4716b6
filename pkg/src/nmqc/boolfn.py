"""Boolean functions on n bits: truth tables, ANF, Walsh spectrum and parity decomposition.

Bit strings are tuples of 0/1 with ``x[0]`` being x_1.  A string maps to the
integer index ``sum(x_j << (j - 1))`` so x_1 is the least significant bit.
The same index is used for truth tables, priors, Bell coefficients and for
the bitmask form of parity vectors ``a``.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .dyadic import Dyadic

BitString = tuple[int, ...]


class ArityError(ValueError):
    pass


class AnfParseError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


def popcount(v: int) -> int:
    return bin(v).count("1")


def index_of(bits: Sequence[int]) -> int:
    idx = 0
    for j, b in enumerate(bits):
        if b not in (0, 1):
            raise ValueError(f"bit values must be 0 or 1, got {b!r}")
        idx |= b << j
    return idx


def bits_of(index: int, n: int) -> BitString:
    return tuple((index >> j) & 1 for j in range(n))


def hamming_weight(bits: Sequence[int] | int) -> int:
    if isinstance(bits, int):
        return popcount(bits)
    return sum(bits)


def dot2(a: int, x: int) -> int:
    """Inner product a.x mod 2 on bitmask indices."""
    return popcount(a & x) & 1


def format_bits(bits: Sequence[int]) -> str:
    return "".join(str(b) for b in bits)


@dataclass(frozen=True)
class BooleanFunction:
    n: int
    table: tuple[int, ...]

    def __post_init__(self):
        if self.n < 1:
            raise ArityError("arity must be positive")
        table = tuple(int(v) for v in self.table)
        if len(table) != 1 << self.n:
            raise ArityError(f"table has {len(table)} entries, expected {1 << self.n}")
        if any(v not in (0, 1) for v in table):
            raise ValueError("table entries must be 0 or 1")
        object.__setattr__(self, "table", table)

    @classmethod
    def from_callable(cls, n: int, fn) -> BooleanFunction:
        return cls(n, tuple(int(fn(bits_of(i, n))) & 1 for i in range(1 << n)))

    def __call__(self, x: Sequence[int]) -> int:
        return eval_function(self, x)

    def at(self, index: int) -> int:
        return self.table[index]

    def complement(self) -> BooleanFunction:
        return BooleanFunction(self.n, tuple(1 - v for v in self.table))

    def to_json(self) -> dict:
        return {"n": self.n, "table": list(self.table)}

    @classmethod
    def from_json(cls, obj: Mapping) -> BooleanFunction:
        return cls(int(obj["n"]), tuple(obj["table"]))

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def eval_function(f: BooleanFunction, x: Sequence[int]) -> int:
    if len(x) != f.n:
        raise ArityError(f"input has length {len(x)}, function arity is {f.n}")
    return f.table[index_of(x)]


def constant(n: int, value: int) -> BooleanFunction:
    return BooleanFunction(n, (value,) * (1 << n))


def parity_function(n: int, a: int) -> BooleanFunction:
    return BooleanFunction(n, tuple(dot2(a, x) for x in range(1 << n)))


# --- algebraic normal form -------------------------------------------------

@dataclass(frozen=True)
class AnfPolynomial:
    """Mod-2 polynomial; each monomial is the bitmask of its variables (0 is the constant 1)."""

    n: int
    monomials: frozenset[int]

    @property
    def degree(self) -> int:
        return max((popcount(a) for a in self.monomials), default=0)

    def terms(self) -> list[BitString]:
        return [bits_of(a, self.n) for a in sorted(self.monomials)]

    def truth_table(self) -> BooleanFunction:
        coeffs = [0] * (1 << self.n)
        for a in self.monomials:
            coeffs[a] = 1
        return BooleanFunction(self.n, tuple(_moebius(coeffs, self.n)))

    def to_expr(self) -> str:
        if not self.monomials:
            return "0"
        parts = []
        for a in sorted(self.monomials, key=lambda m: (popcount(m), m)):
            if a == 0:
                parts.append("1")
            else:
                parts.append("*".join(f"x{j + 1}" for j in range(self.n) if (a >> j) & 1))
        return " + ".join(parts)


def _moebius(values: list[int], n: int) -> list[int]:
    out = list(values)
    for j in range(n):
        bit = 1 << j
        for i in range(1 << n):
            if i & bit:
                out[i] ^= out[i ^ bit]
    return out


def anf_of(f: BooleanFunction) -> AnfPolynomial:
    coeffs = _moebius(list(f.table), f.n)
    return AnfPolynomial(f.n, frozenset(a for a, c in enumerate(coeffs) if c))


def degree(f: BooleanFunction) -> int:
    return anf_of(f).degree


_TOKEN = re.compile(r"\s*(?:(\+)|(\*)|(1)|x(\d+)|(\S))")


def parse_anf(text: str, n: int) -> BooleanFunction:
    """Parse ``"x1*x2 + x3 + 1"`` style input into a truth table.

    Terms are separated by '+', factors by '*'; a factor is '1' or 'xK' with
    1 <= K <= n.  Repeated terms cancel (mod 2).
    """
    if n < 1:
        raise ArityError("arity must be positive")
    if not text.strip():
        raise AnfParseError("empty expression", 0)

    monomials: set[int] = set()
    term = 0
    expect_factor = True
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        start = m.start() + (len(m.group(0)) - len(m.group(0).lstrip()))
        plus, star, one, var, bad = m.groups()
        if bad is not None:
            raise AnfParseError(f"unexpected character {bad!r}", start)
        if plus or star:
            if expect_factor:
                raise AnfParseError(f"expected a factor before {(plus or star)!r}", start)
            if plus:
                monomials ^= {term}
                term = 0
            expect_factor = True
        else:
            if not expect_factor:
                raise AnfParseError("missing operator between factors", start)
            if var is not None:
                k = int(var)
                if k < 1 or k > n:
                    raise AnfParseError(f"variable x{k} outside x1..x{n}", start)
                term |= 1 << (k - 1)
            expect_factor = False
        pos = m.end()
    if expect_factor:
        raise AnfParseError("expression ends with an operator", len(text))
    monomials ^= {term}
    return AnfPolynomial(n, frozenset(monomials)).truth_table()


# --- Walsh spectrum and parity decomposition -------------------------------

def fwht(values: Sequence[int], n: int) -> list:
    """Unnormalized Walsh-Hadamard transform: out[a] = sum_x v[x] (-1)^(a.x)."""
    out = list(values)
    h = 1
    while h < (1 << n):
        for i in range(0, 1 << n, h << 1):
            for j in range(i, i + h):
                u, v = out[j], out[j + h]
                out[j], out[j + h] = u + v, u - v
        h <<= 1
    return out


@dataclass(frozen=True)
class WalshSpectrum:
    n: int
    coefficients: tuple[Dyadic, ...]

    def __getitem__(self, a: int) -> Dyadic:
        return self.coefficients[a]

    def inverse(self) -> tuple[Dyadic, ...]:
        """f(x) = sum_a c_a (-1)^(a.x), evaluated exactly."""
        scaled = [c.num << (self.n - c.k) for c in self.coefficients]
        return tuple(Dyadic(v, self.n) for v in fwht(scaled, self.n))


def walsh_spectrum(f: BooleanFunction) -> WalshSpectrum:
    raw = fwht(f.table, f.n)
    return WalshSpectrum(f.n, tuple(Dyadic(v, f.n) for v in raw))


@dataclass(frozen=True)
class ParityDecomposition:
    """f(x) = theta[0] + sum_{a != 0} theta[a] * (a.x mod 2), exactly."""

    n: int
    theta: tuple[Dyadic, ...]

    def __getitem__(self, a: int) -> Dyadic:
        return self.theta[a]

    def evaluate(self, x: int) -> Dyadic:
        total = self.theta[0]
        for a in range(1, 1 << self.n):
            if dot2(a, x):
                total = total + self.theta[a]
        return total

    def support(self) -> list[int]:
        return [a for a in range(1, 1 << self.n) if self.theta[a] != 0]


def parity_coefficients(values: Sequence[int], n: int) -> tuple[Dyadic, ...]:
    """Parity-basis coefficients of an arbitrary integer-valued function on n bits."""
    raw = fwht(values, n)
    theta = [Dyadic(values[0])]
    theta += [Dyadic(-raw[a], n - 1) if n >= 1 else Dyadic(0) for a in range(1, 1 << n)]
    return tuple(theta)


def parity_decomposition(f: BooleanFunction) -> ParityDecomposition:
    # theta_a = -2 c_a for a != 0 and theta_0 = sum_a c_a = f(0)
    return ParityDecomposition(f.n, parity_coefficients(f.table, f.n))


def all_functions(n: int) -> Iterable[BooleanFunction]:
    size = 1 << n
    for code in range(1 << size):
        yield BooleanFunction(n, tuple((code >> i) & 1 for i in range(size)))
