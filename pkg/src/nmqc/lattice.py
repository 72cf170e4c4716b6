"""Integer row reduction (Hermite form) and lattice membership over Python ints."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

Matrix = list[list[int]]


@dataclass(frozen=True)
class HermiteForm:
    """``U @ A == H`` with U unimodular and H in row echelon form.

    Pivots are positive and the entries above each pivot are reduced into
    [0, pivot).  ``pivots[i]`` is the pivot column of row i for i < rank.
    """

    H: tuple[tuple[int, ...], ...]
    U: tuple[tuple[int, ...], ...]
    pivots: tuple[int, ...]

    @property
    def rank(self) -> int:
        return len(self.pivots)


def _axpy(dst: list[int], src: list[int], q: int) -> None:
    # dst -= q * src
    if q:
        for k, v in enumerate(src):
            if v:
                dst[k] -= q * v


def hermite_form(A: Sequence[Sequence[int]], ncols: int | None = None) -> HermiteForm:
    H = [list(map(int, row)) for row in A]
    m = len(H)
    n = len(H[0]) if m else (ncols or 0)
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    pivots = []
    r = 0
    for c in range(n):
        if r == m:
            break
        while True:
            nz = [i for i in range(r, m) if H[i][c]]
            if not nz:
                break
            p = min(nz, key=lambda i: abs(H[i][c]))
            if p != r:
                H[r], H[p] = H[p], H[r]
                U[r], U[p] = U[p], U[r]
            done = True
            for i in range(r + 1, m):
                if H[i][c]:
                    q = H[i][c] // H[r][c]
                    _axpy(H[i], H[r], q)
                    _axpy(U[i], U[r], q)
                    if H[i][c]:
                        done = False
            if done:
                break
        if H[r][c] == 0:
            continue
        if H[r][c] < 0:
            H[r] = [-v for v in H[r]]
            U[r] = [-v for v in U[r]]
        piv = H[r][c]
        for i in range(r):
            q = H[i][c] // piv
            _axpy(H[i], H[r], q)
            _axpy(U[i], U[r], q)
        pivots.append(c)
        r += 1
    return HermiteForm(tuple(map(tuple, H)), tuple(map(tuple, U)), tuple(pivots))


def left_kernel_basis(A: Sequence[Sequence[int]]) -> list[tuple[int, ...]]:
    """Integer basis of the lattice {r : r A = 0}."""
    hf = hermite_form(A)
    return [hf.U[i] for i in range(hf.rank, len(hf.U))]


def transpose(A: Sequence[Sequence[int]], nrows: int | None = None) -> Matrix:
    if not A:
        return [[] for _ in range(nrows or 0)]
    return [list(col) for col in zip(*A)]


class IntegerSolver:
    """Solve ``M t = d`` over the integers for a fixed M and many right-hand sides."""

    def __init__(self, M: Sequence[Sequence[int]], ncols: int):
        self.nrows = len(M)
        self.ncols = ncols
        # column operations on M are row operations on M^T
        self._hf = hermite_form(transpose(M, ncols) if M else [[] for _ in range(ncols)], self.nrows)

    def solve(self, d: Sequence[int]) -> list[int] | None:
        if len(d) != self.nrows:
            raise ValueError("right-hand side has the wrong length")
        hf = self._hf
        residual = list(map(int, d))
        t = [0] * self.ncols
        for i, p in enumerate(hf.pivots):
            row = hf.H[i]
            if residual[p] % row[p]:
                return None
            y = residual[p] // row[p]
            if y:
                _axpy(residual, list(row), y)
                for k, v in enumerate(hf.U[i]):
                    t[k] += y * v
        if any(residual):
            return None
        return t


def solve_integer(M: Sequence[Sequence[int]], d: Sequence[int], ncols: int) -> list[int] | None:
    return IntegerSolver(M, ncols).solve(d)


def matvec(M: Sequence[Sequence[int]], v: Sequence[int]) -> list[int]:
    return [sum(a * b for a, b in zip(row, v)) for row in M]
