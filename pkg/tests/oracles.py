"""Slow, obviously-correct reference implementations used as test oracles."""

from __future__ import annotations

import itertools
import math

import numpy as np


def spc_max_brute(x, parity: int) -> float:
    """Enumerate every binary vector of the requested weight parity."""
    best = -math.inf
    for bits in itertools.product((0, 1), repeat=len(x)):
        if sum(bits) % 2 != parity:
            continue
        # accumulate selected entries left to right, like the fast routine
        val = 0.0
        for b, xk in zip(bits, x):
            if b:
                val += xk
        best = max(best, val)
    return best


def cn_brute(v, s_i: int) -> list[float]:
    """Check-to-variable min-sum messages straight from the definition."""
    out = []
    for j in range(len(v)):
        others = [v[k] for k in range(len(v)) if k != j]
        sign = -1.0 if s_i else 1.0
        for x in others:
            sign *= 1.0 if x > 0 else -1.0
        out.append(sign * min((abs(x) for x in others), default=math.inf))
    return out


def lp_iteration_brute(ub: dict, lam, s, H: np.ndarray, alpha1: float):
    """One parallel LP edge update by enumerating the local parity codes."""
    m, n = H.shape
    new = {}
    for (i, j) in ub:
        S = lam[j] + sum(ub[(i2, j)] for i2 in range(m) if H[i2, j] and i2 != i)
        nbrs = [jj for jj in range(n) if H[i, jj]]
        best = {0: -math.inf, 1: -math.inf}
        for bits in itertools.product((0, 1), repeat=len(nbrs)):
            if sum(bits) % 2 != s[i]:
                continue
            bj = bits[nbrs.index(j)]
            val = sum(ub[(i, jj)] * b for jj, b in zip(nbrs, bits) if jj != j)
            best[bj] = max(best[bj], val)
        new[(i, j)] = alpha1 / 2 * (best[0] - best[1] - S)
    post = [lam[j] + sum(new[(i, j)] for i in range(m) if H[i, j]) for j in range(n)]
    return new, np.array([0 if x > 0 else 1 for x in post], dtype=np.uint8)


def rank_naive(M: np.ndarray) -> int:
    A = (np.array(M, dtype=np.uint8) & 1).copy()
    r = 0
    for c in range(A.shape[1]):
        piv = next((i for i in range(r, A.shape[0]) if A[i, c]), None)
        if piv is None:
            continue
        A[[r, piv]] = A[[piv, r]]
        for i in range(A.shape[0]):
            if i != r and A[i, c]:
                A[i] ^= A[r]
        r += 1
    return r


def row_space_set(H: np.ndarray) -> set[tuple[int, ...]]:
    """All GF(2) combinations of the rows (only for small matrices)."""
    rows = [np.asarray(r, dtype=np.uint8) for r in H]
    out = set()
    for coeffs in itertools.product((0, 1), repeat=len(rows)):
        v = np.zeros(H.shape[1], dtype=np.uint8)
        for c, r in zip(coeffs, rows):
            if c:
                v ^= r
        out.add(tuple(v.tolist()))
    return out


def wilson(k: int, n: int, z: float = 1.95996) -> tuple[float, float]:
    p = k / n
    d = 1 + z * z / n
    c = p + z * z / (2 * n)
    h = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n))
    return (c - h) / d, (c + h) / d
