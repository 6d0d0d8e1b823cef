"""Dense linear algebra over a prime field GF(p).

Matrices are stored as read-only ``int64`` numpy arrays holding residues in
``[0, p)``. With ``p <= 65521`` every product of two residues fits in 32 bits,
so a row update never overflows ``int64``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

DEFAULT_PRIME = 65521


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    k = 3
    while k * k <= n:
        if n % k == 0:
            return False
        k += 2
    return True


@dataclass(frozen=True)
class FieldConfig:
    """Prime modulus of the coding field."""

    p: int = DEFAULT_PRIME

    def __post_init__(self) -> None:
        if not _is_prime(self.p):
            raise ValueError(f"field modulus must be prime, got {self.p}")
        if self.p > 2**31:
            raise ValueError("modulus too large for int64 row reduction")


class FieldMatrix:
    """Immutable dense matrix over GF(p)."""

    __slots__ = ("_a", "p")

    def __init__(self, entries, p: int, shape: tuple[int, int] | None = None):
        a = np.array(entries, dtype=np.int64)
        if shape is not None:
            a = a.reshape(shape)
        elif a.ndim == 1:
            # a bare sequence is a column
            a = a.reshape(-1, 1)
        elif a.ndim != 2:
            raise ValueError(f"expected a 2-d array, got ndim={a.ndim}")
        a %= p
        a.flags.writeable = False
        self._a = a
        self.p = p

    @classmethod
    def zeros(cls, rows: int, cols: int, p: int) -> FieldMatrix:
        return cls(np.zeros((rows, cols), dtype=np.int64), p)

    @classmethod
    def identity(cls, n: int, p: int) -> FieldMatrix:
        return cls(np.eye(n, dtype=np.int64), p)

    @property
    def array(self) -> np.ndarray:
        return self._a

    @property
    def rows(self) -> int:
        return self._a.shape[0]

    @property
    def cols(self) -> int:
        return self._a.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self._a.shape

    @property
    def entries(self) -> tuple[int, ...]:
        return tuple(int(x) for x in self._a.ravel())

    @property
    def T(self) -> FieldMatrix:
        return FieldMatrix(self._a.T, self.p)

    def tolist(self) -> list[list[int]]:
        return self._a.tolist()

    def is_zero(self) -> bool:
        return not self._a.any()

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> FieldMatrix:
        return FieldMatrix(self._a[np.ix_(list(rows), list(cols))].reshape(len(rows), len(cols)), self.p)

    def column(self, j: int) -> FieldMatrix:
        return FieldMatrix(self._a[:, [j]], self.p)

    def __getitem__(self, idx):
        return int(self._a[idx])

    def __eq__(self, other) -> bool:
        if not isinstance(other, FieldMatrix):
            return NotImplemented
        return self.p == other.p and self.shape == other.shape and np.array_equal(self._a, other._a)

    def __hash__(self) -> int:
        return hash((self.p, self.shape, self._a.tobytes()))

    def __repr__(self) -> str:
        return f"FieldMatrix(p={self.p}, {self._a.tolist()})"


def _check_same_field(*ms: FieldMatrix) -> int:
    ps = {m.p for m in ms}
    if len(ps) != 1:
        raise ValueError(f"matrices over different fields: {sorted(ps)}")
    return ps.pop()


def hstack(blocks: Iterable[FieldMatrix], rows: int | None = None, p: int | None = None) -> FieldMatrix:
    """Concatenate column blocks. ``rows``/``p`` are needed only when every block is absent."""
    blocks = list(blocks)
    if not blocks:
        if rows is None or p is None:
            raise ValueError("empty hstack needs rows and p")
        return FieldMatrix.zeros(rows, 0, p)
    p = _check_same_field(*blocks)
    heights = {b.rows for b in blocks}
    if len(heights) != 1:
        raise ValueError(f"hstack row mismatch: {sorted(heights)}")
    return FieldMatrix(np.hstack([b.array for b in blocks]), p)


def vstack(blocks: Iterable[FieldMatrix]) -> FieldMatrix:
    blocks = list(blocks)
    p = _check_same_field(*blocks)
    widths = {b.cols for b in blocks}
    if len(widths) != 1:
        raise ValueError(f"vstack column mismatch: {sorted(widths)}")
    return FieldMatrix(np.vstack([b.array for b in blocks]), p)


def _row_echelon(a: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form of a copy of ``a``; returns (rref, pivot columns)."""
    a = a.copy() % p
    nrows, ncols = a.shape
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        nz = np.flatnonzero(a[r:, c])
        if nz.size == 0:
            continue
        k = r + int(nz[0])
        if k != r:
            a[[r, k]] = a[[k, r]]
        inv = pow(int(a[r, c]), -1, p)
        a[r] = (a[r] * inv) % p
        others = np.flatnonzero(a[:, c])
        others = others[others != r]
        if others.size:
            a[others] = (a[others] - np.outer(a[others, c], a[r])) % p
        pivots.append(c)
        r += 1
    return a, pivots


def rank(m: FieldMatrix) -> int:
    """Dimension of the column span of ``m``."""
    if m.rows == 0 or m.cols == 0:
        return 0
    # eliminate along the shorter side
    a = m.array if m.rows <= m.cols else m.array.T
    return len(_row_echelon(a, m.p)[1])


def nullspace_basis(m: FieldMatrix) -> FieldMatrix:
    """Columns spanning ``{x : m x = 0}``; width is ``cols(m) - rank(m)``."""
    p = m.p
    n = m.cols
    if m.rows == 0:
        return FieldMatrix.identity(n, p)
    rref, pivots = _row_echelon(m.array, p)
    free = [c for c in range(n) if c not in set(pivots)]
    basis = np.zeros((n, len(free)), dtype=np.int64)
    for k, fc in enumerate(free):
        basis[fc, k] = 1
        for r, pc in enumerate(pivots):
            basis[pc, k] = (-rref[r, fc]) % p
    return FieldMatrix(basis, p)


def in_colspan(m: FieldMatrix, v: FieldMatrix) -> bool:
    """True iff every column of ``v`` lies in the column span of ``m``."""
    if m.rows != v.rows:
        raise ValueError(f"row mismatch: {m.rows} vs {v.rows}")
    if v.cols == 0 or v.is_zero():
        return True
    return rank(hstack([m, v])) == rank(m)


def random_column(rows: int, rng: np.random.Generator, p: int = DEFAULT_PRIME) -> FieldMatrix:
    """Column of ``rows`` entries drawn uniformly from GF(p)."""
    return random_matrix(rows, 1, rng, p)


def random_matrix(rows: int, cols: int, rng: np.random.Generator, p: int = DEFAULT_PRIME) -> FieldMatrix:
    return FieldMatrix(rng.integers(0, p, size=(rows, cols), dtype=np.int64), p)


def mul(a: FieldMatrix, b: FieldMatrix) -> FieldMatrix:
    if a.cols != b.rows:
        raise ValueError(f"cannot multiply {a.shape} by {b.shape}")
    p = _check_same_field(a, b)
    if a.cols == 0:
        return FieldMatrix.zeros(a.rows, b.cols, p)
    # chunk the inner dimension so partial sums stay below 2**63
    per = max(1, (2**62) // ((p - 1) ** 2 or 1))
    out = np.zeros((a.rows, b.cols), dtype=np.int64)
    for k in range(0, a.cols, per):
        out = (out + a.array[:, k : k + per] @ b.array[k : k + per]) % p
    return FieldMatrix(out, p)


def add(a: FieldMatrix, b: FieldMatrix) -> FieldMatrix:
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    return FieldMatrix(a.array + b.array, _check_same_field(a, b))


def scale(c: int, a: FieldMatrix) -> FieldMatrix:
    return FieldMatrix((int(c) % a.p) * a.array, a.p)


def sub(a: FieldMatrix, b: FieldMatrix) -> FieldMatrix:
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    return FieldMatrix(a.array - b.array, _check_same_field(a, b))


def is_unitriangular(u: FieldMatrix) -> bool:
    a = u.array
    return u.rows == u.cols and bool(np.all(np.diag(a) == 1)) and not np.tril(a, -1).any()


def is_strictly_upper(f: FieldMatrix) -> bool:
    return f.rows == f.cols and not np.tril(f.array).any()


def inv_unitriangular(u: FieldMatrix) -> FieldMatrix:
    """Inverse of an upper unitriangular matrix by back-substitution."""
    if not is_unitriangular(u):
        raise ValueError("matrix is not upper unitriangular")
    p = u.p
    n = u.rows
    a = u.array
    x = np.eye(n, dtype=np.int64)
    # column j of the inverse: x_j = e_j - sum_{k<j} x_k * a[k, j]
    for j in range(n):
        ks = np.flatnonzero(a[:j, j])
        if ks.size:
            x[:, j] = (x[:, j] - x[:, ks] @ a[ks, j]) % p
    return FieldMatrix(x, p)
