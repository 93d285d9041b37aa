"""Dense linear algebra over GF(2) on ``uint8`` numpy arrays."""

import numpy as np


def as_gf2(a) -> np.ndarray:
    return (np.asarray(a, dtype=np.int64) & 1).astype(np.uint8)


def matmul(a, b) -> np.ndarray:
    """Product over GF(2). Counts are accumulated in float64 so BLAS does the work."""
    prod = np.asarray(a, dtype=np.float64) @ np.asarray(b, dtype=np.float64)
    return (prod.astype(np.int64) & 1).astype(np.uint8)


def row_reduce(a):
    """Reduced row echelon form.

    Returns ``(R, pivots)`` where ``R`` is a copy of ``a`` in RREF and
    ``pivots`` lists the pivot column of each nonzero row of ``R``.
    """
    R = as_gf2(a).copy()
    if R.ndim != 2:
        raise ValueError("expected a 2-d array")
    m, n = R.shape
    pivots = []
    r = 0
    for c in range(n):
        if r >= m:
            break
        hits = np.flatnonzero(R[r:, c])
        if hits.size == 0:
            continue
        p = r + hits[0]
        if p != r:
            R[[r, p]] = R[[p, r]]
        ones = np.flatnonzero(R[:, c])
        ones = ones[ones != r]
        if ones.size:
            R[ones] ^= R[r]
        pivots.append(c)
        r += 1
    return R, pivots


def rank(a) -> int:
    a = as_gf2(a)
    if a.size == 0:
        return 0
    return len(row_reduce(a)[1])


def nullspace(a) -> np.ndarray:
    """Basis of {x : a x = 0}, one vector per row."""
    a = as_gf2(a)
    m, n = a.shape
    if m == 0:
        return np.eye(n, dtype=np.uint8)
    R, pivots = row_reduce(a)
    free = [c for c in range(n) if c not in set(pivots)]
    basis = np.zeros((len(free), n), dtype=np.uint8)
    for i, f in enumerate(free):
        basis[i, f] = 1
        for row, p in enumerate(pivots):
            if R[row, f]:
                basis[i, p] = 1
    return basis


def solve(a, b):
    """One solution of ``a x = b`` or ``None`` when the system is inconsistent."""
    a = as_gf2(a)
    b = as_gf2(b).reshape(-1)
    m, n = a.shape
    aug = np.concatenate([a, b[:, None]], axis=1)
    R, pivots = row_reduce(aug)
    if n in pivots:
        return None
    x = np.zeros(n, dtype=np.uint8)
    for row, p in enumerate(pivots):
        x[p] = R[row, n]
    return x


def inverse(a) -> np.ndarray:
    a = as_gf2(a)
    k = a.shape[0]
    if a.shape != (k, k):
        raise ValueError("inverse needs a square matrix")
    R, pivots = row_reduce(np.concatenate([a, np.eye(k, dtype=np.uint8)], axis=1))
    if pivots[:k] != list(range(k)):
        raise np.linalg.LinAlgError("matrix is singular over GF(2)")
    return R[:, k:]


def independent_rows(base, candidates) -> np.ndarray:
    """Rows of ``candidates`` that extend the row space of ``base``, greedily in order.

    The pivot columns of the transposed stack [base; candidates] pick the
    first maximal independent set of its rows.
    """
    candidates = as_gf2(candidates)
    n = candidates.shape[1]
    base = as_gf2(base).reshape(-1, n)
    m = base.shape[0]
    stacked = np.concatenate([base, candidates], axis=0)
    if stacked.shape[0] == 0:
        return candidates[:0]
    _, pivots = row_reduce(stacked.T)
    return candidates[[p - m for p in pivots if p >= m]]
