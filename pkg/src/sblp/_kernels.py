"""Compiled inner loops of the decoders.

Graph arguments are the CSR-style arrays of :class:`sblp.codes.TannerGraph`:
edges of check i are ``check_ptr[i]:check_ptr[i+1]`` (contiguous, since edges
are numbered check-major) and edges of variable j are
``var_edges[var_ptr[j]:var_ptr[j+1]]``. Every sum runs left to right over
these ranges and no fast-math flags are used, so results are bit-identical
from run to run and independent of how trials are batched.
"""

from __future__ import annotations

import numpy as np
from numba import njit

MODE_MS, MODE_LP, MODE_COMBINED, MODE_COMBINED_NO_ES = 0, 1, 2, 3


@njit(cache=True)
def _clip(x, cap):
    if cap > 0.0:
        if x > cap:
            return cap
        if x < -cap:
            return -cap
    return x


@njit(cache=True)
def cn_minsum(v, a, b, s_i, u, cap):
    """Min-sum messages of one check with edges a..b-1, written into u.

    u[e] = (-1)^s_i * prod_{f != e} sgn(v[f]) * min_{f != e} |v[f]|, where
    sgn(0) = -1. An empty "others" set gives magnitude +inf.
    """
    parity = s_i
    min1 = np.inf
    min2 = np.inf
    at = -1
    for e in range(a, b):
        x = v[e]
        if not x > 0.0:
            parity += 1
        ax = abs(x)
        if ax < min1:
            min2 = min1
            min1 = ax
            at = e
        elif ax < min2:
            min2 = ax
    for e in range(a, b):
        p = parity if v[e] > 0.0 else parity - 1
        mag = min2 if e == at else min1
        u[e] = _clip(-mag if p & 1 else mag, cap)


@njit(cache=True, inline="always")
def _sum_toggled(x, a, b, skip, k):
    acc = 0.0
    for f in range(a, b):
        if f == skip:
            continue
        sel = x[f] > 0.0
        if f == k:
            sel = not sel
        if sel:
            acc += x[f]
    return acc


@njit(cache=True, inline="always")
def spc_both(x, a, b, skip):
    """(even, odd): max of sum(x[k] * y[k]) over binary y on a..b-1 minus
    ``skip``, restricted to even / odd weight.

    The positive entries form the best unconstrained selection; the other
    parity toggles an entry of least magnitude. Selected entries are summed
    in index order. When several entries are (within rounding) tied for the
    least magnitude, every such toggle is summed and the largest float result
    is kept, so the value equals exhaustive enumeration bit for bit. An odd
    selection of nothing is -inf.
    """
    count = 0
    amin = np.inf
    kmin = -1
    total = 0.0
    matched = 0.0
    for f in range(a, b):
        if f == skip:
            continue
        xf = x[f]
        if xf > 0.0:
            count += 1
            matched += xf
        ax = abs(xf)
        total += ax
        if ax < amin:
            amin = ax
            kmin = f
    flipped = -np.inf
    if kmin >= 0:
        tol = 8.0 * 2.220446049250313e-16 * total
        flipped = _sum_toggled(x, a, b, skip, kmin)
        for k in range(kmin + 1, b):
            if k != skip and abs(x[k]) - amin <= tol:
                cand = _sum_toggled(x, a, b, skip, k)
                if cand > flipped:
                    flipped = cand
    if count & 1:
        return flipped, matched
    return matched, flipped


@njit(cache=True)
def _decide(buf, lam, scale, var_ptr, var_edges, edge_var, check_ptr, e_hat, s_hat):
    n = len(var_ptr) - 1
    for j in range(n):
        acc = 0.0
        for t in range(var_ptr[j], var_ptr[j + 1]):
            acc += buf[var_edges[t]]
        e_hat[j] = 0 if lam[j] + scale * acc > 0.0 else 1
    m = len(check_ptr) - 1
    for i in range(m):
        par = 0
        for e in range(check_ptr[i], check_ptr[i + 1]):
            par ^= e_hat[edge_var[e]]
        s_hat[i] = par


@njit(cache=True)
def ms_pass(u, v, lam, s, alpha, cap, check_ptr, edge_var, var_ptr, var_edges, e_hat, s_hat):
    """One flooding min-sum iteration, in place on u, v, e_hat, s_hat."""
    n = len(var_ptr) - 1
    for j in range(n):
        a = var_ptr[j]
        b = var_ptr[j + 1]
        for t in range(a, b):
            acc = 0.0
            for r in range(a, b):
                if r != t:
                    acc += u[var_edges[r]]
            v[var_edges[t]] = _clip(lam[j] + alpha * acc, cap)
    m = len(check_ptr) - 1
    for i in range(m):
        cn_minsum(v, check_ptr[i], check_ptr[i + 1], s[i], u, cap)
    _decide(u, lam, alpha, var_ptr, var_edges, edge_var, check_ptr, e_hat, s_hat)


@njit(cache=True)
def lp_pass(ub, out, lam, s, alpha1, cap, check_ptr, edge_var, var_ptr, var_edges, var_slot,
            e_hat, s_hat):
    """One parallel LP iteration: reads ub only, writes every edge of out."""
    m = len(check_ptr) - 1
    half = alpha1 / 2.0
    for i in range(m):
        a = check_ptr[i]
        b = check_ptr[i + 1]
        for e in range(a, b):
            j = edge_var[e]
            S = 0.0
            for r in range(var_ptr[j], var_ptr[j + 1]):
                if r != var_slot[e]:
                    S += ub[var_edges[r]]
            S = lam[j] + S
            even, odd = spc_both(ub, a, b, e)
            if s[i]:
                t0, t1 = odd, even
            else:
                t0, t1 = even, odd
            out[e] = _clip(half * (t0 - t1 - S), cap)
    _decide(out, lam, 1.0, var_ptr, var_edges, edge_var, check_ptr, e_hat, s_hat)


@njit(cache=True)
def _matches(s, s_hat):
    for i in range(len(s)):
        if s[i] != s_hat[i]:
            return False
    return True


@njit(cache=True)
def _unmatched(s, s_hat):
    c = 0
    for i in range(len(s)):
        if s[i] != s_hat[i]:
            c += 1
    return c


@njit(cache=True)
def decode_rows(mode, S, lam, alpha, alpha1, ims_max, ilp_max, threshold, cap, cold_handoff, init_ub,
                check_ptr, edge_var, var_ptr, var_edges, var_slot,
                e_hat, s_hat, ms_iters, lp_iters, early, trace):
    """Decode each row of S; outputs are written into the preallocated arrays.

    ``init_ub`` is either empty (cold start) or (B, E). ``trace`` has shape
    (B, T) with T = 0 when tracing is off; entries beyond the last executed
    iteration stay as the caller initialised them. With ``cold_handoff`` the LP
    stage of the combined modes starts from zero instead of u + v.
    """
    B = S.shape[0]
    E = len(edge_var)
    tw = trace.shape[1]
    for r in range(B):
        s = S[r]
        lr = lam[r]
        eh = e_hat[r]
        sh = s_hat[r]
        u = np.zeros(E)
        v = np.zeros(E)
        pos = 0
        if mode == MODE_MS:
            while not _matches(s, sh) and ms_iters[r] < ims_max:
                ms_pass(u, v, lr, s, alpha, cap, check_ptr, edge_var, var_ptr, var_edges, eh, sh)
                ms_iters[r] += 1
                if pos < tw:
                    trace[r, pos] = _unmatched(s, sh)
                    pos += 1
            continue
        ub = np.zeros(E)
        if mode == MODE_LP:
            if init_ub.shape[0] > 0:
                ub[:] = init_ub[r]
        else:
            if ims_max > 0:
                s_pre = np.empty_like(sh)
                while True:
                    s_pre[:] = sh
                    ms_pass(u, v, lr, s, alpha, cap, check_ptr, edge_var, var_ptr, var_edges, eh, sh)
                    ms_iters[r] += 1
                    if pos < tw:
                        trace[r, pos] = _unmatched(s, sh)
                        pos += 1
                    if _matches(s, sh) or ms_iters[r] >= ims_max:
                        break
                    if mode == MODE_COMBINED:
                        d = 0
                        for i in range(len(sh)):
                            if sh[i] != s_pre[i]:
                                d += 1
                        if d <= threshold:
                            early[r] = True
                            break
            if _matches(s, sh):
                continue
            if not cold_handoff:
                for e in range(E):
                    ub[e] = u[e] + v[e]
        out = np.empty(E)
        while not _matches(s, sh) and lp_iters[r] < ilp_max:
            lp_pass(ub, out, lr, s, alpha1, cap, check_ptr, edge_var, var_ptr, var_edges, var_slot, eh, sh)
            ub, out = out, ub
            lp_iters[r] += 1
            if pos < tw:
                trace[r, pos] = _unmatched(s, sh)
                pos += 1
