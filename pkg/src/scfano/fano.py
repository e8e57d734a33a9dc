"""
SC-Fano decoding: Fano sequential search over the SC code tree.

The path metric is the SC log-probability of the partial path normalised by
the per-channel "typical" success probability::

    P(u_1^i) = P(u_1^{i-1}) + log(Pr(u_i | u_1^{i-1}, y) / (1 - pe_i))

so that a correct path hovers around zero whatever its length. Information
bits are searched with a dynamic threshold ``T`` moved in steps of ``delta``;
frozen bits are decided as zero and their increments folded into the metric.

The normaliser only approximates the best achievable path probability, so a
confident path can score slightly above zero. By default the threshold logic
sees the metric saturated at zero: ``T`` then never rises above zero and a
huge ``delta`` reproduces SC exactly. Stored and traced metrics are exact.

Bit indices in traces and in :class:`FanoState` are 1-based.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import CodeParameterError
from .polar import PolarCode
from .sc import DecodeResult, _leaf_llr, _log_probs, prepare_llr

EV_FORWARD, EV_BACKWARD, EV_THRESHOLD_DOWN, EV_THRESHOLD_UP = 0, 1, 2, 3
EVENT_NAMES = ("forward", "backward", "threshold_down", "threshold_up")

DEFAULT_VISIT_FACTOR = 200


@dataclass
class FanoState:
    """Search state left behind by :func:`fano_decode` (1-based ``i``)."""

    T: float
    delta: float
    i: int
    j: int
    B: int
    beta: np.ndarray
    gamma: np.ndarray
    visits: int


def metric_step(prev: float, branch_logp: float, pe_i: float) -> float:
    """One step of the normalised path metric."""
    if not 0.0 <= pe_i < 1.0:
        raise CodeParameterError(f"channel error probability must lie in [0, 1), got {pe_i}")
    return prev + branch_logp - math.log1p(-pe_i)


@njit(cache=True)
def _threshold_update(T, delta, tau):
    while T + delta < tau:
        T += delta
    return T


def threshold_update(T: float, delta: float, tau: float) -> float:
    """Raise ``T`` in steps of ``delta`` while ``T + delta < tau``."""
    if delta <= 0:
        raise ValueError(f"delta must be positive, got {delta}")
    if math.isinf(T) or math.isinf(tau):
        return T
    return float(_threshold_update(float(T), float(delta), float(tau)))


@njit(cache=True)
def _rec(trace, ntr, on, ev, i, j, T, metric, bit, to):
    if on and ntr < trace.shape[0]:
        trace[ntr, 0] = ev
        trace[ntr, 1] = i
        trace[ntr, 2] = j
        trace[ntr, 3] = T
        trace[ntr, 4] = metric
        trace[ntr, 5] = bit
        trace[ntr, 6] = to
    return ntr + 1 if on else ntr


@njit(cache=True)
def _backward(beta, gamma, j, T, delta, cap, info_pos, origin, trace, ntr, on):
    # origin and info_pos are 0-based bit positions; trace stores 1-based ones
    while True:
        if j == 0:
            # the root has no parent to retreat to: only the threshold can move
            T -= delta
            ntr = _rec(trace, ntr, on, EV_THRESHOLD_DOWN, origin + 1, j, T, 0.0, -1, -1)
            return T, j, 0, ntr
        mu = 0.0 if j == 1 else beta[j - 2]
        if min(mu, cap) >= T:
            j -= 1
            ntr = _rec(trace, ntr, on, EV_BACKWARD, origin + 1, j, T, mu, -1, info_pos[j] + 1)
            origin = info_pos[j]
            if gamma[j] == 0:
                return T, j, 1, ntr
        else:
            T -= delta
            ntr = _rec(trace, ntr, on, EV_THRESHOLD_DOWN, origin + 1, j, T, mu, -1, -1)
            return T, j, 0, ntr


def backward_move(beta, j: int, T: float, gamma, delta: float) -> tuple[float, int, int]:
    """
    Retreat towards the root.

    Parameters
    ----------
    beta, gamma : array-like
        Checkpointed metrics and bad-branch flags of the decided information bits.
    j : int
        Number of information bits currently decided.
    T, delta : float
        Threshold and its step.

    Returns
    -------
    (T, j, B)
        New threshold, information-bit count and direction flag. ``B = 1``
        means the search resumes at information bit ``j + 1`` coming back from
        its child; ``B = 0`` means the threshold was lowered instead.
    """
    beta = np.asarray(beta, dtype=np.float64)
    gamma = np.asarray(gamma, dtype=np.int8)
    info_pos = np.arange(max(len(beta), 1), dtype=np.int64)
    dummy = np.zeros((0, 7))
    T, j, B, _ = _backward(beta, gamma, int(j), float(T), float(delta), np.inf, info_pos, 0, dummy,
                           0, False)
    return float(T), int(j), int(B)


@njit(cache=True)
def _fano_kernel(ch_rev, info_mask, info_pos, norm, delta, max_visits, frozen_metric, cap,
                 min_sum, u, pm, beta, gamma, trace, on, out_state):
    N = ch_rev.size
    n = 0
    while (1 << n) < N:
        n += 1
    llr = np.zeros(2 * N)
    llr[N:] = ch_rev
    T = 0.0
    B = 0
    i = 0
    j = 0
    visits = 0
    truncated = False
    last = -1
    ntr = 0
    iters = 0
    max_iters = 64 * max_visits + 1024
    pm[0] = 0.0
    while i < N:
        iters += 1
        if not truncated and (visits >= max_visits or iters > max_iters):
            # finish greedily: nothing can fall below an infinite threshold
            truncated = True
            T = -np.inf
            B = 0
        L = _leaf_llr(llr, u, i, last, n, min_sum)
        last = i
        lp0, lp1 = _log_probs(L)
        if not info_mask[i]:
            u[i] = 0
            pm[i + 1] = pm[i] + (lp0 + norm[i] if frozen_metric else 0.0)
            i += 1
            visits += 1
            ntr = _rec(trace, ntr, on, EV_FORWARD, i, j, T, pm[i], 0, -1)
            continue
        m0 = pm[i] + lp0 + norm[i]
        m1 = pm[i] + lp1 + norm[i]
        if m0 >= m1:
            mx, mn, bmax = m0, m1, 0
        else:
            mx, mn, bmax = m1, m0, 1
        if min(mx, cap) > T:
            if B == 0:
                u[i] = bmax
                beta[j] = mx
                gamma[j] = 0
                mu = 0.0 if j == 0 else beta[j - 1]
                if min(mu, cap) < T + delta:
                    T_new = _threshold_update(T, delta, min(mx, cap))
                    if T_new != T:
                        T = T_new
                        ntr = _rec(trace, ntr, on, EV_THRESHOLD_UP, i + 1, j, T, mx, -1, -1)
                pm[i + 1] = mx
                i += 1
                j += 1
                visits += 1
                ntr = _rec(trace, ntr, on, EV_FORWARD, i, j, T, mx, bmax, -1)
            elif min(mn, cap) > T:
                u[i] = 1 - bmax
                beta[j] = mn
                gamma[j] = 1
                pm[i + 1] = mn
                i += 1
                j += 1
                B = 0
                visits += 1
                ntr = _rec(trace, ntr, on, EV_FORWARD, i, j, T, mn, 1 - bmax, -1)
            elif j == 0:
                T -= delta
                B = 0
                ntr = _rec(trace, ntr, on, EV_THRESHOLD_DOWN, i + 1, j, T, mx, -1, -1)
            else:
                T, j, B, ntr = _backward(beta, gamma, j, T, delta, cap, info_pos, i, trace, ntr, on)
                i = info_pos[j]
        elif j == 0:
            T -= delta
            ntr = _rec(trace, ntr, on, EV_THRESHOLD_DOWN, i + 1, j, T, mx, -1, -1)
        else:
            T, j, B, ntr = _backward(beta, gamma, j, T, delta, cap, info_pos, i, trace, ntr, on)
            i = info_pos[j]
    out_state[0] = T
    out_state[1] = B
    out_state[2] = j
    return visits, truncated, ntr


def _decode_trace(rows: np.ndarray) -> list[dict]:
    events = []
    for ev, i, j, T, metric, bit, to in rows:
        rec = {"event": EVENT_NAMES[int(ev)], "i": int(i), "j": int(j),
               "T": float(T), "metric": float(metric)}
        if ev == EV_FORWARD:
            rec["bit"] = int(bit)
        elif ev == EV_BACKWARD:
            rec["to"] = int(to)
        events.append(rec)
    return events


def fano_decode(channel_llr, code: PolarCode, delta: float, max_visits: int | None = None,
                trace: bool = False, frozen_metric: bool = True, saturate: bool = True,
                min_sum: bool = False) -> DecodeResult:
    """
    SC-Fano decoding of one frame.

    Parameters
    ----------
    channel_llr : array-like
        Length-N channel LLRs, positive favouring bit 0.
    code : PolarCode
        Code whose ``pe`` vector normalises the path metric.
    delta : float
        Threshold step; small values search harder, very large values reduce
        to plain SC.
    max_visits : int, optional
        Cap on decoded-bit events, ``200 * N`` by default. When it is hit the
        remaining bits are decoded greedily and the result is flagged
        ``truncated``.
    trace : bool
        Attach the list of search events to the result.
    frozen_metric : bool
        Accumulate frozen-bit increments into the metric (default). Disable
        for the ablation that scores information bits only.
    saturate : bool
        Compare ``min(metric, 0)`` against the threshold (default). Disable to
        compare raw metrics, which lets ``T`` climb above zero.

    Returns
    -------
    DecodeResult
        ``visits`` counts every bit advance, repeats after a retreat included.
    """
    if not delta > 0:
        raise ValueError(f"delta must be positive, got {delta}")
    N = code.N
    if max_visits is None:
        max_visits = DEFAULT_VISIT_FACTOR * N
    if max_visits < N:
        raise ValueError(f"max_visits must be at least N={N}, got {max_visits}")
    ch = prepare_llr(channel_llr, code)
    info_mask = code.info_mask
    info_pos = np.flatnonzero(info_mask).astype(np.int64)
    norm = -np.log1p(-code.pe)
    K = code.K
    size = 4 * max_visits if trace else 0
    while True:
        u = np.zeros(N, dtype=np.uint8)
        pm = np.zeros(N + 1)
        beta = np.zeros(K)
        gamma = np.zeros(K, dtype=np.int8)
        rows = np.zeros((size, 7))
        st = np.zeros(3)
        visits, truncated, ntr = _fano_kernel(
            ch, info_mask, info_pos, norm, float(delta), int(max_visits), frozen_metric,
            0.0 if saturate else np.inf, min_sum, u, pm, beta, gamma, rows, trace, st)
        if ntr <= size:
            break
        size = ntr
    state = FanoState(T=float(st[0]), delta=float(delta), i=N + 1, j=int(st[2]), B=int(st[1]),
                      beta=beta, gamma=gamma, visits=int(visits))
    return DecodeResult(
        u_hat=u,
        visits=int(visits),
        truncated=bool(truncated),
        metric=float(pm[N]),
        trace=_decode_trace(rows[:ntr]) if trace else None,
        state=state,
    )
