"""Exact linear algebra over Q and F_p on numpy object arrays.

Matrices hold raw field values (``Fraction`` or ``int``).  Elimination runs on
sparse row dicts since most matrices that show up here are very sparse;
products take an int64 fast path whenever that cannot overflow.
"""

from __future__ import annotations

import heapq
import numpy as np

from .scalars import Field, PrimeField

_INT64_SAFE = 2**62


def zeros(F: Field, rows: int, cols: int) -> np.ndarray:
    out = np.empty((rows, cols), dtype=object)
    out.fill(F.zero)
    return out


def identity(F: Field, n: int) -> np.ndarray:
    out = zeros(F, n, n)
    for i in range(n):
        out[i, i] = F.one
    return out


def as_matrix(F: Field, data, shape=None) -> np.ndarray:
    arr = np.array(data, dtype=object)
    if shape is not None:
        arr = arr.reshape(shape)
    if arr.ndim == 1 and shape is None:
        arr = arr.reshape(1, -1) if arr.size else arr.reshape(0, 0)
    out = np.empty(arr.shape, dtype=object)
    for idx, v in np.ndenumerate(arr):
        out[idx] = F.convert(v)
    return out


def diag(F: Field, values) -> np.ndarray:
    values = list(values)
    out = zeros(F, len(values), len(values))
    for i, v in enumerate(values):
        out[i, i] = F.convert(v)
    return out


def is_zero(A: np.ndarray) -> bool:
    return A.size == 0 or np.count_nonzero(A) == 0


def matmul(F: Field, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    if A.shape[1] != B.shape[0]:
        raise ValueError(f"shape mismatch {A.shape} x {B.shape}")
    if A.shape[0] == 0 or B.shape[1] == 0 or A.shape[1] == 0:
        return zeros(F, A.shape[0], B.shape[1])
    if isinstance(F, PrimeField):
        ia, ib = A.astype(np.int64), B.astype(np.int64)
        if (F.p - 1) ** 2 * A.shape[1] < _INT64_SAFE:
            return np.array(((ia @ ib) % F.p).tolist(), dtype=object)
        return F.reduce_array(A.dot(B))
    # sparse product: one row operation per nonzero entry of A
    out = zeros(F, A.shape[0], B.shape[1])
    rows, cols = np.nonzero(A != 0)
    for i, k in zip(rows.tolist(), cols.tolist()):
        out[i] += A[i, k] * B[k]
    return out


def add(F: Field, A, B):
    out = A + B
    return F.reduce_array(out) if isinstance(F, PrimeField) else out


def sub(F: Field, A, B):
    out = A - B
    return F.reduce_array(out) if isinstance(F, PrimeField) else out


def scale(F: Field, c, A):
    out = A * F.convert(c)
    return F.reduce_array(out) if isinstance(F, PrimeField) else out


def kron(F: Field, A, B):
    out = np.kron(A, B)
    if out.dtype != object:
        out = out.astype(object)
    return F.reduce_array(out) if isinstance(F, PrimeField) else out


# sparse elimination ---------------------------------------------------------

def _rows_of(A: np.ndarray):
    rows = []
    for i in range(A.shape[0]):
        nz = np.flatnonzero(A[i] != 0) if A.shape[1] else []
        rows.append({int(j): A[i, j] for j in nz})
    return rows


def _reduce_row(row, pivots, F, full=False):
    """Eliminate pivot columns from ``row``; returns the lead column or None."""
    heap = list(row)
    heapq.heapify(heap)
    lead = None
    while heap:
        c = heapq.heappop(heap)
        v = row.get(c)
        if v is None:
            continue
        prow = pivots.get(c)
        if prow is None:
            if lead is None:
                lead = c
                if not full:
                    return lead
            continue
        for j, w in prow.items():
            old = row.get(j)
            nv = F.neg(F.mul(v, w)) if old is None else F.sub(old, F.mul(v, w))
            if nv == 0:
                row.pop(j, None)
            else:
                if old is None:
                    heapq.heappush(heap, j)
                row[j] = nv
    return lead


def echelon(F: Field, rows):
    """Monic pivot rows keyed by lead column (not back-substituted)."""
    pivots = {}
    for r in rows:
        r = dict(r)
        lead = _reduce_row(r, pivots, F)
        if lead is None:
            continue
        inv = F.inv(r[lead])
        pivots[lead] = {j: F.mul(v, inv) for j, v in r.items()}
    return pivots


def reduced_echelon(F: Field, rows):
    pivots = echelon(F, rows)
    done = {}
    for lead in sorted(pivots, reverse=True):
        r = pivots[lead]
        tail = {j: v for j, v in r.items() if j != lead}
        _reduce_row(tail, done, F, full=True)
        tail[lead] = F.one
        done[lead] = tail
    return done


def rank(F: Field, A: np.ndarray) -> int:
    if A.size == 0:
        return 0
    # eliminate along the shorter side
    M = A if A.shape[0] <= A.shape[1] else A.T
    return len(echelon(F, _rows_of(M)))


def rref(F: Field, A: np.ndarray):
    """(R, pivot columns) with R the reduced row echelon form (nonzero rows only)."""
    piv = reduced_echelon(F, _rows_of(A))
    cols = sorted(piv)
    R = zeros(F, len(cols), A.shape[1])
    for i, c in enumerate(cols):
        for j, v in piv[c].items():
            R[i, j] = v
    return R, cols


def nullspace(F: Field, A: np.ndarray) -> np.ndarray:
    """Columns form a basis of {x : A x = 0}."""
    n = A.shape[1]
    piv = reduced_echelon(F, _rows_of(A)) if A.shape[0] else {}
    free = [j for j in range(n) if j not in piv]
    N = zeros(F, n, len(free))
    for k, f in enumerate(free):
        N[f, k] = F.one
        for c, r in piv.items():
            v = r.get(f)
            if v is not None:
                N[c, k] = F.neg(v)
    return N


def column_space(F: Field, A: np.ndarray) -> np.ndarray:
    """Columns form a basis of the column space (reduced, so canonical)."""
    piv = reduced_echelon(F, _rows_of(A.T))
    cols = sorted(piv)
    B = zeros(F, A.shape[0], len(cols))
    for k, c in enumerate(cols):
        for j, v in piv[c].items():
            B[j, k] = v
    return B


def solve(F: Field, A: np.ndarray, B: np.ndarray):
    """Some X with A X = B, or None if the system is inconsistent."""
    m, n = A.shape
    if B.ndim == 1:
        B = B.reshape(-1, 1)
    aug = np.concatenate([A, B], axis=1) if A.size or B.size else zeros(F, m, n + B.shape[1])
    piv = reduced_echelon(F, _rows_of(aug))
    if any(c >= n for c in piv):
        return None
    X = zeros(F, n, B.shape[1])
    for c, r in piv.items():
        for j, v in r.items():
            if j >= n:
                X[c, j - n] = v
    return X


class Coordinates:
    """Coordinates of vectors in the span of fixed (independent) columns."""

    def __init__(self, F: Field, basis: np.ndarray):
        self.F = F
        self.basis = basis
        self.dim = basis.shape[1]
        aug_rows = _rows_of(np.concatenate([basis.T, identity(F, self.dim)], axis=1))
        self.n = basis.shape[0]
        self._piv = echelon(F, aug_rows)

    def __call__(self, v: np.ndarray):
        """Coordinate column of ``v`` (1-d or column); raises if not in the span."""
        F = self.F
        v = np.asarray(v, dtype=object).ravel()
        row = {int(j): v[j] for j in np.flatnonzero(v != 0)}
        coords = zeros(F, self.dim, 1)
        # row-reduce [v | 0] against [basis^T | I]: the identity block records
        # the combination used, with the sign flipped
        for c in sorted(self._piv):
            if c >= self.n:
                break
            x = row.get(c)
            if x is None:
                continue
            for j, w in self._piv[c].items():
                nv = F.sub(row.get(j, F.zero), F.mul(x, w))
                if nv == 0:
                    row.pop(j, None)
                else:
                    row[j] = nv
        if any(j < self.n for j in row):
            raise ValueError("vector is not in the span")
        for j, w in row.items():
            coords[j - self.n, 0] = F.neg(w)
        return coords
