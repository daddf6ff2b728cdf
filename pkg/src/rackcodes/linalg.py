"""Dense linear algebra over a finite field.

Matrices are 2-D ``int64`` numpy arrays whose entries lie in ``[0, q)``; the
field is passed explicitly.  Elimination always takes the first nonzero pivot
in column order, so every result is deterministic.
"""

from __future__ import annotations

from collections.abc import Callable, Sequence

import numpy as np

from .errors import InconsistentSystemError, SingularMatrixError
from .gf import Field


def vandermonde(field: Field, locators: Sequence[int], row_exponents: Sequence[int]) -> np.ndarray:
    """Entry (i, j) is ``locators[j] ** row_exponents[i]``."""
    locs = np.asarray(locators, dtype=np.int64)
    if len(set(locs.tolist())) != len(locs):
        raise ValueError("vandermonde locators must be pairwise distinct")
    out = np.empty((len(row_exponents), len(locs)), dtype=np.int64)
    for i, t in enumerate(row_exponents):
        out[i] = field.pow(locs, int(t))
    return out


def rref(field: Field, A) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form and the pivot column of each nonzero row."""
    R = np.array(A, dtype=np.int64, copy=True)
    rows, cols = R.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(R[r:, c])[0]
        if nz.size == 0:
            continue
        p = r + int(nz[0])
        if p != r:
            R[[r, p]] = R[[p, r]]
        R[r] = field.mul(R[r], field.inv(int(R[r, c])))
        factors = R[:, c].copy()
        factors[r] = 0
        hit = np.nonzero(factors)[0]
        if hit.size:
            R[hit] = field.sub(R[hit], field.mul(factors[hit, None], R[r][None, :]))
        pivots.append(c)
        r += 1
    return R, pivots


def rank(field: Field, A) -> int:
    A = np.asarray(A)
    if A.size == 0:
        return 0
    return len(rref(field, A)[1])


def solve(field: Field, A, b) -> np.ndarray:
    """Return X with ``A @ X == b`` for square invertible or consistent overdetermined A.

    A 1-D ``b`` gives a 1-D solution.
    """
    A = np.asarray(A, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    vector = b.ndim == 1
    if vector:
        b = b[:, None]
    m, k = A.shape
    if b.shape[0] != m:
        raise ValueError(f"shape mismatch: A is {A.shape}, b has {b.shape[0]} rows")
    if k == 0:
        if np.any(b):
            raise InconsistentSystemError("empty system with nonzero right-hand side")
        X = np.zeros((0, b.shape[1]), dtype=np.int64)
        return X[:, 0] if vector else X
    R, pivots = rref(field, np.hstack([A, b]))
    if len([p for p in pivots if p < k]) < k:
        raise SingularMatrixError(f"coefficient matrix has rank < {k}")
    if any(p >= k for p in pivots):
        raise InconsistentSystemError("system is inconsistent")
    X = R[:k, k:]
    return X[:, 0] if vector else X


def inverse(field: Field, A) -> np.ndarray:
    A = np.asarray(A, dtype=np.int64)
    if A.shape[0] != A.shape[1]:
        raise SingularMatrixError("only square matrices are invertible")
    return solve(field, A, field.eye(A.shape[0]))


def nullspace(field: Field, A) -> np.ndarray:
    """Rows spanning ``{x : A x = 0}``; row j is 1 at the j-th free column, 0 at the others."""
    A = np.asarray(A, dtype=np.int64)
    cols = A.shape[1]
    if A.shape[0] == 0:
        return field.eye(cols)
    R, pivots = rref(field, A)
    free = [c for c in range(cols) if c not in pivots]
    basis = np.zeros((len(free), cols), dtype=np.int64)
    for j, f in enumerate(free):
        basis[j, f] = 1
        for r, p in enumerate(pivots):
            basis[j, p] = int(field.neg(R[r, f]))
    return basis


def partial_identity_transform(field: Field, V, target_cols: Sequence[int], zero_cols: Sequence[int]) -> np.ndarray:
    """Matrix A (h x rows(V)) with ``A V`` equal to I_h on target_cols and 0 on zero_cols.

    target_cols and zero_cols together must select an invertible square
    submatrix of V; A is then its inverse restricted to the first h rows, which
    has rank h.
    """
    V = np.asarray(V, dtype=np.int64)
    cols = list(target_cols) + list(zero_cols)
    if len(cols) != V.shape[0] or len(set(cols)) != len(cols):
        raise ValueError(
            f"need {V.shape[0]} distinct target+zero columns, got {len(cols)}"
        )
    h = len(target_cols)
    Q = V[:, cols]
    try:
        Qinv = inverse(field, Q)
    except SingularMatrixError as exc:
        raise SingularMatrixError("selected columns are rank deficient") from exc
    return Qinv[:h]


def linear_map_matrix(field: Field, fn: Callable[[np.ndarray], np.ndarray], in_dim: int) -> np.ndarray:
    """Matrix M with ``fn(x) == x @ M`` for a linear ``fn`` on row vectors."""
    rows = []
    for j in range(in_dim):
        e = np.zeros(in_dim, dtype=np.int64)
        e[j] = 1
        rows.append(np.asarray(fn(e), dtype=np.int64).ravel())
    if not rows:
        return np.zeros((0, 0), dtype=np.int64)
    return np.vstack(rows)
