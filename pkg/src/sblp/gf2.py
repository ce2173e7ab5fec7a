"""Binary (GF(2)) vectors and matrices.

Vectors are plain ``numpy.uint8`` arrays of 0/1 entries. Matrices are wrapped
in :class:`BinaryMatrix`, which keeps a dense view, a per-row sparse view and a
bit-packed row view (Python ints) used for elimination.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence

import numpy as np


def as_bits(v, length: int | None = None) -> np.ndarray:
    """Coerce ``v`` to a 1-D uint8 array of 0/1 entries."""
    arr = np.asarray(v)
    if arr.ndim != 1:
        raise ValueError(f"expected a 1-D binary vector, got shape {arr.shape}")
    if arr.size and not np.isin(arr, (0, 1)).all():
        raise ValueError("binary vector entries must be 0 or 1")
    arr = arr.astype(np.uint8, copy=False)
    if length is not None and arr.size != length:
        raise ValueError(f"vector length {arr.size} does not match expected {length}")
    return arr


def _row_to_int(row: np.ndarray) -> int:
    # bit c of the integer holds column c
    out = 0
    for c in np.flatnonzero(row):
        out |= 1 << int(c)
    return out


class BinaryMatrix:
    """Immutable m x n matrix over GF(2)."""

    __slots__ = ("_dense", "_rows", "_packed")

    def __init__(self, data) -> None:
        arr = np.array(data, dtype=np.int64, ndmin=2, copy=True)
        if arr.ndim != 2:
            raise ValueError(f"expected a 2-D matrix, got shape {arr.shape}")
        if arr.size and not np.isin(arr, (0, 1)).all():
            raise ValueError("matrix entries must be 0 or 1")
        dense = arr.astype(np.uint8)
        dense.setflags(write=False)
        self._dense = dense
        rows = []
        for r in dense:
            idx = np.flatnonzero(r).astype(np.int64)
            idx.setflags(write=False)
            rows.append(idx)
        self._rows = tuple(rows)
        self._packed = tuple(_row_to_int(r) for r in dense)

    @classmethod
    def from_rows(cls, rows: Sequence[Iterable[int]], n_cols: int) -> BinaryMatrix:
        """Build from per-row column index lists."""
        dense = np.zeros((len(rows), n_cols), dtype=np.uint8)
        for i, cols in enumerate(rows):
            cols = list(cols)
            if len(set(cols)) != len(cols):
                raise ValueError(f"duplicate column index in row {i}")
            for c in cols:
                if not 0 <= c < n_cols:
                    raise ValueError(f"column index {c} out of range in row {i}")
                dense[i, c] = 1
        return cls(dense)

    @classmethod
    def zeros(cls, m: int, n: int) -> BinaryMatrix:
        return cls(np.zeros((m, n), dtype=np.uint8))

    @classmethod
    def identity(cls, n: int) -> BinaryMatrix:
        return cls(np.eye(n, dtype=np.uint8))

    @property
    def shape(self) -> tuple[int, int]:
        return self._dense.shape  # type: ignore[return-value]

    @property
    def m(self) -> int:
        return self._dense.shape[0]

    @property
    def n(self) -> int:
        return self._dense.shape[1]

    @property
    def dense(self) -> np.ndarray:
        """Read-only uint8 array."""
        return self._dense

    @property
    def rows(self) -> tuple[np.ndarray, ...]:
        """Sorted column indices of the ones in each row."""
        return self._rows

    @property
    def packed(self) -> tuple[int, ...]:
        """Each row as a Python int bitset (bit c = column c)."""
        return self._packed

    @property
    def nnz(self) -> int:
        return int(self._dense.sum())

    @property
    def T(self) -> BinaryMatrix:
        return BinaryMatrix(self._dense.T)

    def __matmul__(self, other: BinaryMatrix) -> BinaryMatrix:
        if not isinstance(other, BinaryMatrix):
            return NotImplemented
        if self.n != other.m:
            raise ValueError(f"shape mismatch: {self.shape} @ {other.shape}")
        prod = self._dense.astype(np.int64) @ other._dense.astype(np.int64)
        return BinaryMatrix(prod & 1)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BinaryMatrix):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self._dense, other._dense))

    def __hash__(self) -> int:
        return hash((self.shape, self._packed))

    def __repr__(self) -> str:
        return f"BinaryMatrix(m={self.m}, n={self.n}, nnz={self.nnz})"

    def is_zero(self) -> bool:
        return not any(self._packed)


def syndrome(e, H: BinaryMatrix) -> np.ndarray:
    """Return e H^T over GF(2).

    ``e`` may be a single vector of length n or a (batch, n) array; the result
    has the matching leading shape.
    """
    arr = np.asarray(e)
    if arr.shape[-1:] != (H.n,):
        raise ValueError(f"error length {arr.shape[-1:]} does not match H with {H.n} columns")
    return ((arr.astype(np.int64) @ H.dense.T.astype(np.int64)) & 1).astype(np.uint8)


def _eliminate(rows: list[int]) -> list[int]:
    """Echelon basis of the span of ``rows``, keyed by lowest set bit."""
    basis: dict[int, int] = {}
    for r in rows:
        while r:
            low = r & -r
            piv = basis.get(low)
            if piv is None:
                basis[low] = r
                break
            r ^= piv
    return list(basis.values())


def _reduce(v: int, basis: dict[int, int]) -> int:
    while v:
        low = v & -v
        piv = basis.get(low)
        if piv is None:
            return v
        v ^= piv
    return 0


def rank(M: BinaryMatrix) -> int:
    """GF(2) row rank. The input is not modified."""
    return len(_eliminate(list(M.packed)))


def in_row_space(v, M: BinaryMatrix) -> bool:
    """True iff ``v`` is a GF(2) combination of the rows of ``M``."""
    v = as_bits(v, M.n)
    basis = {b & -b: b for b in _eliminate(list(M.packed))}
    return _reduce(_row_to_int(v), basis) == 0


class RowSpace:
    """Reusable membership test against the row space of a fixed matrix.

    Elimination is done once; each query then costs at most rank(M) XORs.
    """

    def __init__(self, M: BinaryMatrix) -> None:
        self.n = M.n
        self._basis = {b & -b: b for b in _eliminate(list(M.packed))}

    @property
    def rank(self) -> int:
        return len(self._basis)

    def __contains__(self, v) -> bool:
        return _reduce(_row_to_int(as_bits(v, self.n)), self._basis) == 0


def hamming_distance(a, b) -> int:
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"length mismatch: {a.shape} vs {b.shape}")
    return int(np.count_nonzero(a != b))


def kron(A: BinaryMatrix, B: BinaryMatrix) -> BinaryMatrix:
    return BinaryMatrix(np.kron(A.dense, B.dense))


def hstack(*blocks: BinaryMatrix) -> BinaryMatrix:
    return BinaryMatrix(np.hstack([b.dense for b in blocks]))
