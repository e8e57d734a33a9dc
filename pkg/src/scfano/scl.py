"""SC-List decoding with the exact log-probability path metric."""

from __future__ import annotations

import numpy as np
from numba import njit

from .polar import PolarCode
from .sc import DecodeResult, _leaf_llr, _log_probs, prepare_llr


@njit(cache=True)
def _scl_kernel(ch_rev, info_mask, L, min_sum, u_out, hist_metric, hist_parent, record):
    N = ch_rev.size
    n = 0
    while (1 << n) < N:
        n += 1
    llr = np.zeros((L, 2 * N))
    llr[0, N:] = ch_rev
    u = np.zeros((L, N), dtype=np.uint8)
    metric = np.zeros(L)
    llr2 = np.zeros((L, 2 * N))
    u2 = np.zeros((L, N), dtype=np.uint8)
    metric2 = np.zeros(L)
    cand = np.zeros(2 * L)
    lp = np.zeros((L, 2))
    active = 1
    visits = 0
    for i in range(N):
        for p in range(active):
            a, b = _log_probs(_leaf_llr(llr[p], u[p], i, i - 1, n, min_sum))
            lp[p, 0] = a
            lp[p, 1] = b
        if not info_mask[i]:
            for p in range(active):
                u[p, i] = 0
                metric[p] += lp[p, 0]
                if record:
                    hist_parent[i, p] = p
        else:
            nc = 2 * active
            for p in range(active):
                cand[2 * p] = metric[p] + lp[p, 0]
                cand[2 * p + 1] = metric[p] + lp[p, 1]
            if nc <= L:
                keep = np.arange(nc)
            else:
                # stable sort: equal metrics keep (parent, bit) order
                keep = np.sort(np.argsort(-cand[:nc], kind="mergesort")[:L])
            for k in range(keep.size):
                c = keep[k]
                p = c // 2
                llr2[k, :] = llr[p, :]
                u2[k, :] = u[p, :]
                u2[k, i] = c % 2
                metric2[k] = cand[c]
                if record:
                    hist_parent[i, k] = p
            llr, llr2 = llr2, llr
            u, u2 = u2, u
            metric, metric2 = metric2, metric
            active = keep.size
        if record:
            for p in range(active):
                hist_metric[i, p] = metric[p]
        visits += active
    best = 0
    for p in range(1, active):
        if metric[p] > metric[best]:
            best = p
    u_out[:] = u[best]
    return visits, metric[best]


def scl_decode(channel_llr, code: PolarCode, list_size: int, min_sum: bool = False,
               history: bool = False) -> DecodeResult:
    """
    SC-List decoding.

    Every information bit doubles each surviving path; the ``list_size``
    children with the largest cumulative ``log Pr(u_1^i | y)`` survive. The
    returned path is the most probable survivor after the last bit.

    With ``history=True`` the result's ``state`` holds per-bit arrays
    ``metric`` and ``parent`` of shape ``(N, list_size)`` (NaN / -1 where a
    slot is unused).
    """
    if int(list_size) < 1:
        raise ValueError(f"list size must be at least 1, got {list_size}")
    L = int(list_size)
    ch = prepare_llr(channel_llr, code)
    N = code.N
    u = np.zeros(N, dtype=np.uint8)
    shape = (N, L) if history else (1, 1)
    hist_metric = np.full(shape, np.nan)
    hist_parent = np.full(shape, -1, dtype=np.int64)
    visits, metric = _scl_kernel(ch, code.info_mask, L, min_sum, u, hist_metric, hist_parent, history)
    state = {"metric": hist_metric, "parent": hist_parent} if history else None
    return DecodeResult(u_hat=u, visits=int(visits), metric=float(metric), state=state)
