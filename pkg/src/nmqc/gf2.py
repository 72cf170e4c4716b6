"""Binary matrices stored as row bitmasks (bit k of a row is column k + 1)."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Sequence

from .boolfn import dot2, index_of, bits_of


@dataclass(frozen=True)
class Gf2Matrix:
    rows: tuple[int, ...]
    ncols: int

    def __post_init__(self):
        rows = tuple(int(r) for r in self.rows)
        if self.ncols < 0 or any(r < 0 or r >> self.ncols for r in rows):
            raise ValueError("row entries exceed the column count")
        object.__setattr__(self, "rows", rows)

    @classmethod
    def from_lists(cls, rows: Sequence[Sequence[int]], ncols: int | None = None) -> Gf2Matrix:
        if ncols is None:
            if not rows:
                raise ValueError("ncols is required for an empty matrix")
            ncols = len(rows[0])
        if any(len(r) != ncols for r in rows):
            raise ValueError("ragged matrix")
        return cls(tuple(index_of(r) for r in rows), ncols)

    @classmethod
    def identity(cls, n: int) -> Gf2Matrix:
        return cls(tuple(1 << j for j in range(n)), n)

    @property
    def nrows(self) -> int:
        return len(self.rows)

    def to_lists(self) -> list[list[int]]:
        return [list(bits_of(r, self.ncols)) for r in self.rows]

    def entry(self, i: int, j: int) -> int:
        return (self.rows[i] >> j) & 1

    def apply(self, x: int) -> int:
        """(P x) mod 2 with x and the result as bitmask indices."""
        out = 0
        for j, r in enumerate(self.rows):
            out |= dot2(r, x) << j
        return out

    def row_times(self, v: int) -> int:
        """Row vector v (length nrows) times this matrix."""
        out = 0
        for j, r in enumerate(self.rows):
            if (v >> j) & 1:
                out ^= r
        return out

    def __matmul__(self, other: Gf2Matrix) -> Gf2Matrix:
        if self.ncols != other.nrows:
            raise ValueError("dimension mismatch")
        return Gf2Matrix(tuple(other.row_times(r) for r in self.rows), other.ncols)

    def rank(self) -> int:
        return gf2_rank(self.rows)

    def is_invertible(self) -> bool:
        return self.nrows == self.ncols and self.rank() == self.ncols

    def inverse(self) -> Gf2Matrix:
        n = self.ncols
        if self.nrows != n:
            raise ValueError("matrix is not square")
        work = [(r, 1 << i) for i, r in enumerate(self.rows)]
        for col in range(n):
            pivot = next((i for i in range(col, n) if (work[i][0] >> col) & 1), None)
            if pivot is None:
                raise ValueError("matrix is singular")
            work[col], work[pivot] = work[pivot], work[col]
            pr, pa = work[col]
            for i in range(n):
                if i != col and (work[i][0] >> col) & 1:
                    work[i] = (work[i][0] ^ pr, work[i][1] ^ pa)
        return Gf2Matrix(tuple(a for _, a in work), n)

    def transpose(self) -> Gf2Matrix:
        cols = []
        for k in range(self.ncols):
            cols.append(sum(((r >> k) & 1) << j for j, r in enumerate(self.rows)))
        return Gf2Matrix(tuple(cols), self.nrows)


def apply_preprocessing(P: Gf2Matrix, x: Sequence[int]) -> tuple[int, ...]:
    if len(x) != P.ncols:
        raise ValueError(f"input has length {len(x)}, P has {P.ncols} columns")
    return bits_of(P.apply(index_of(x)), P.nrows)


def gf2_rank(rows: Sequence[int]) -> int:
    # basis keyed by leading bit
    basis: dict[int, int] = {}
    for r in rows:
        while r:
            lead = r.bit_length() - 1
            if lead not in basis:
                basis[lead] = r
                break
            r ^= basis[lead]
    return len(basis)


def general_linear_group(n: int) -> Iterator[Gf2Matrix]:
    """All invertible n x n binary matrices (168 for n = 3, 20160 for n = 4)."""
    for rows in itertools.product(range(1, 1 << n), repeat=n):
        if gf2_rank(rows) == n:
            yield Gf2Matrix(rows, n)


def permutation_matrices(n: int) -> Iterator[Gf2Matrix]:
    for perm in itertools.permutations(range(n)):
        yield Gf2Matrix(tuple(1 << p for p in perm), n)


def group_closure(generators: Sequence[Gf2Matrix], n: int, limit: int = 200_000) -> list[Gf2Matrix]:
    ident = Gf2Matrix.identity(n)
    seen = {ident.rows: ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for g in frontier:
            for h in generators:
                prod = g @ h
                if prod.rows not in seen:
                    seen[prod.rows] = prod
                    nxt.append(prod)
                    if len(seen) > limit:
                        raise ValueError("group too large to enumerate")
        frontier = nxt
    return list(seen.values())
