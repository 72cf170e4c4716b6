"""Exact dyadic rationals, numbers of the form num / 2**k."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction


def _normalize(num: int, k: int) -> tuple[int, int]:
    if num == 0:
        return 0, 0
    while k > 0 and num % 2 == 0:
        num //= 2
        k -= 1
    while k < 0:
        num *= 2
        k += 1
    return num, k


@dataclass(frozen=True, order=False)
class Dyadic:
    """Value ``num / 2**k`` kept in canonical form (odd numerator or zero with k = 0)."""

    num: int
    k: int = 0

    def __post_init__(self):
        if self.k < 0:
            raise ValueError("exponent must be non-negative")
        num, k = _normalize(int(self.num), int(self.k))
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "k", k)

    @classmethod
    def from_fraction(cls, value) -> Dyadic:
        value = Fraction(value)
        den = value.denominator
        if den & (den - 1):
            raise ValueError(f"{value} is not dyadic")
        return cls(value.numerator, den.bit_length() - 1)

    @classmethod
    def coerce(cls, value) -> Dyadic:
        if isinstance(value, Dyadic):
            return value
        return cls.from_fraction(value)

    def to_fraction(self) -> Fraction:
        return Fraction(self.num, 1 << self.k)

    def __float__(self) -> float:
        return self.num / (1 << self.k)

    def _align(self, other: Dyadic) -> tuple[int, int, int]:
        k = max(self.k, other.k)
        return self.num << (k - self.k), other.num << (k - other.k), k

    def __add__(self, other):
        if not isinstance(other, Dyadic):
            if isinstance(other, int):
                other = Dyadic(other)
            else:
                return NotImplemented
        a, b, k = self._align(other)
        return Dyadic(a + b, k)

    __radd__ = __add__

    def __neg__(self) -> Dyadic:
        return Dyadic(-self.num, self.k)

    def __sub__(self, other):
        if isinstance(other, int):
            other = Dyadic(other)
        if not isinstance(other, Dyadic):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            return Dyadic(self.num * other, self.k)
        if isinstance(other, Dyadic):
            return Dyadic(self.num * other.num, self.k + other.k)
        return NotImplemented

    __rmul__ = __mul__

    def half(self) -> Dyadic:
        if self.num == 0:
            return self
        return Dyadic(self.num, self.k + 1)

    def is_integer(self) -> bool:
        return self.k == 0

    def is_even_integer(self) -> bool:
        return self.k == 0 and self.num % 2 == 0

    def reduce_mod2(self) -> Dyadic:
        """Representative of self modulo 2 in the half-open interval (-1, 1]."""
        period = 2 << self.k
        r = self.num % period  # in [0, 2**(k+1))
        if r > (1 << self.k):
            r -= period
        return Dyadic(r, self.k)

    def __lt__(self, other):
        return self.to_fraction() < Fraction(other.to_fraction() if isinstance(other, Dyadic) else other)

    def __le__(self, other):
        return self == other or self < other

    def __eq__(self, other):
        if isinstance(other, Dyadic):
            return self.num == other.num and self.k == other.k
        if isinstance(other, (int, Fraction)):
            return self.to_fraction() == other
        return NotImplemented

    def __hash__(self):
        return hash(self.to_fraction())

    def __repr__(self):
        return f"Dyadic({self.num}/2^{self.k})"

    def __str__(self):
        return str(self.to_fraction())

    def to_json(self) -> dict:
        return {"num": self.num, "den_pow2": self.k}

    @classmethod
    def from_json(cls, obj: dict) -> Dyadic:
        return cls(int(obj["num"]), int(obj["den_pow2"]))


ZERO = Dyadic(0)
ONE = Dyadic(1)
