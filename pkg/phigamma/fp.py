"""Exact linear algebra over the prime field GF(p) on numpy int64 arrays."""

from __future__ import annotations

import numpy as np
from numpy.typing import NDArray

IntArray = NDArray[np.int64]


class NoSolution(ValueError):
    pass


def mod_p(a: IntArray | list[int], p: int) -> IntArray:
    return np.asarray(np.asarray(a, dtype=np.int64) % p, dtype=np.int64)


def inv_mod_scalar(a: int | np.integer, p: int) -> int:
    if int(a) % p == 0:
        raise ZeroDivisionError(f"{a} is not invertible mod {p}")
    return pow(int(a) % p, p - 2, p)


def rref_mod(a: IntArray, p: int) -> tuple[IntArray, list[int]]:
    """Reduced row echelon form over GF(p) and its pivot columns."""
    r_mat = mod_p(a, p).copy()
    m, n = r_mat.shape
    row = 0
    pivots: list[int] = []
    for col in range(n):
        if row >= m:
            break
        nonzero = np.nonzero(r_mat[row:, col])[0]
        if not len(nonzero):
            continue
        piv = row + int(nonzero[0])
        if piv != row:
            r_mat[[row, piv]] = r_mat[[piv, row]]
        r_mat[row] = (r_mat[row] * inv_mod_scalar(r_mat[row, col], p)) % p
        factors = r_mat[:, col].copy()
        factors[row] = 0
        hit = np.nonzero(factors)[0]
        if len(hit):
            r_mat[hit] = (
                r_mat[hit] - np.outer(factors[hit], r_mat[row])
            ) % p
        pivots.append(col)
        row += 1
    return r_mat, pivots


def rank_mod(a: IntArray, p: int) -> int:
    if a.size == 0:
        return 0
    return len(rref_mod(a, p)[1])


def nullspace_mod(a: IntArray, p: int) -> IntArray:
    """Right nullspace of ``a``; the rows of the result form a basis."""
    m, n = a.shape
    if m == 0:
        return np.eye(n, dtype=np.int64)
    r_mat, pivots = rref_mod(a, p)
    free = [j for j in range(n) if j not in set(pivots)]
    basis = np.zeros((len(free), n), dtype=np.int64)
    for k, f in enumerate(free):
        basis[k, f] = 1
        for i, pc in enumerate(pivots):
            basis[k, pc] = (-r_mat[i, f]) % p
    return basis


def solve_mod(a: IntArray, b: IntArray, p: int) -> IntArray:
    """One solution of ``a @ x = b`` with free variables set to zero."""
    m, n = a.shape
    b = mod_p(b, p)
    single = b.ndim == 1
    if single:
        b = b.reshape(m, 1)
    if m == 0:
        x0 = np.zeros((n, b.shape[1]), dtype=np.int64)
        return x0[:, 0] if single else x0
    r_mat, pivots = rref_mod(np.concatenate([a, b], axis=1), p)
    if any(pc >= n for pc in pivots):
        raise NoSolution("No solution to linear system over GF(p)")
    x = np.zeros((n, b.shape[1]), dtype=np.int64)
    for i, pc in enumerate(pivots):
        x[pc] = r_mat[i, n:]
    return x[:, 0] if single else x


def inv_mod_mat(a: IntArray, p: int) -> IntArray:
    n = a.shape[0]
    aug = np.concatenate([mod_p(a, p), np.eye(n, dtype=np.int64)], axis=1)
    r_mat, _ = rref_mod(aug, p)
    if not np.array_equal(r_mat[:, :n], np.eye(n, dtype=np.int64)):
        raise NoSolution("Matrix not invertible mod p")
    return r_mat[:, n:]


def row_basis(a: IntArray, p: int) -> IntArray:
    """Rows spanning the row space of ``a`` in reduced echelon form."""
    if a.size == 0:
        return np.zeros((0, a.shape[1]), dtype=np.int64)
    r_mat, pivots = rref_mod(a, p)
    return r_mat[: len(pivots)]


def extend_independent(
    base: IntArray, candidates: IntArray, p: int
) -> list[int]:
    """Indices of candidate rows that greedily extend the span of ``base``."""
    chosen: list[int] = []
    current = base
    rank = rank_mod(current, p) if current.size else 0
    for i, row in enumerate(candidates):
        trial = np.vstack([current, row[None, :]]) if current.size else (
            row[None, :]
        )
        new_rank = rank_mod(trial, p)
        if new_rank > rank:
            chosen.append(i)
            current, rank = trial, new_rank
    return chosen
