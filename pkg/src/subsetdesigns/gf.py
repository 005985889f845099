"""Small linear algebra over a prime field F_p, on numpy int64 arrays."""

from __future__ import annotations

import numpy as np

from .errors import DomainError, ResourceError


def _inverses(p: int) -> np.ndarray:
    inv = np.zeros(p, dtype=np.int64)
    for a in range(1, p):
        inv[a] = pow(a, -1, p)
    return inv


def row_reduce(M, p: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form of ``M`` mod ``p`` and its pivot columns."""
    A = np.array(M, dtype=np.int64) % p
    if A.ndim != 2:
        raise DomainError("row_reduce expects a matrix")
    rows, cols = A.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(A[r:, c])[0]
        if len(nz) == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            A[[r, i]] = A[[i, r]]
        A[r] = A[r] * pow(int(A[r, c]), -1, p) % p
        for j in range(rows):
            if j != r and A[j, c]:
                A[j] = (A[j] - A[j, c] * A[r]) % p
        pivots.append(c)
        r += 1
    return A, pivots


def rank_mod_p(M, p: int) -> int:
    return len(row_reduce(M, p)[1])


def kernel_vector(M, p: int) -> np.ndarray:
    """A nonzero ``v`` with ``M @ v = 0 (mod p)``."""
    R, pivots = row_reduce(M, p)
    cols = R.shape[1]
    free = [c for c in range(cols) if c not in pivots]
    if not free:
        raise DomainError("matrix has trivial kernel")
    f = free[0]
    v = np.zeros(cols, dtype=np.int64)
    v[f] = 1
    for r, c in enumerate(pivots):
        v[c] = (-R[r, f]) % p
    return v


def batched_singular(A: np.ndarray, p: int) -> np.ndarray:
    """For a stack of square matrices ``A[b]``, whether each is singular mod ``p``."""
    A = np.array(A, dtype=np.int64) % p
    if A.ndim != 3 or A.shape[1] != A.shape[2]:
        raise DomainError("expected shape (batch, k, k)")
    B, k, _ = A.shape
    inv = _inverses(p)
    singular = np.zeros(B, dtype=bool)
    batch = np.arange(B)
    for c in range(k):
        nz = A[:, c:, c] != 0
        has = nz.any(axis=1)
        singular |= ~has
        piv = c + np.argmax(nz, axis=1)
        top = A[batch, c].copy()
        A[batch, c] = A[batch, piv]
        A[batch, piv] = top
        scale = inv[A[:, c, c]]  # zero where no pivot; those rows are already flagged
        for r in range(c + 1, k):
            f = A[:, r, c] * scale % p
            A[:, r, :] = (A[:, r, :] - f[:, None] * A[:, c, :]) % p
    return singular


def min_weight_exhaustive(Gm, p: int, budget: int = 10**6, chunk: int = 1 << 16) -> int:
    """Minimum Hamming weight over all nonzero codewords ``m @ Gm``.

    Visits all ``p**k`` messages; raises :class:`ResourceError` above ``budget``.
    """
    Gm = np.array(Gm, dtype=np.int64) % p
    k, n = Gm.shape
    total = p**k
    if total > budget:
        raise ResourceError(f"{p}^{k} = {total} messages exceed the budget {budget}")
    best = n + 1
    powers = p ** np.arange(k - 1, -1, -1, dtype=np.int64)
    for start in range(1, total, chunk):
        idx = np.arange(start, min(total, start + chunk), dtype=np.int64)
        msgs = (idx[:, None] // powers) % p
        words = msgs @ Gm % p
        w = int(np.count_nonzero(words, axis=1).min())
        best = min(best, w)
    return best
