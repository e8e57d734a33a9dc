"""
Successive-cancellation kernel: LLR recursion, branch probabilities, SC decoding.

The trellis stores one LLR block per stage in a flat array of length 2N:
stage ``s`` (blocks of size ``2**s``) lives at ``[2**s, 2**(s+1))`` and the
channel LLRs, already bit-reversed, occupy stage ``n`` at ``[N, 2N)``. A stage
is recomputed only when the block index of the requested leaf differs from the
block cached there, so moving the cursor backwards costs nothing until the next
LLR is requested.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any

import numpy as np
from numba import njit

from .errors import DecoderStateError, InputShapeError
from .polar import PolarCode, bit_reversal_permutation

LLR_CLAMP = 40.0


@dataclass
class DecodeResult:
    """
    Output of any decoder.

    Attributes
    ----------
    u_hat : ndarray of uint8
        Estimated length-N message vector, frozen positions included.
    visits : int
        Decoded-bit events spent on this frame.
    truncated : bool
        True when the visit cap stopped the search early.
    metric : float or None
        Path metric of the returned path, in the decoder's own units.
    """

    u_hat: np.ndarray
    visits: int
    truncated: bool = False
    metric: float | None = None
    trace: list[dict] | None = field(default=None, repr=False)
    state: Any = field(default=None, repr=False)


@njit(cache=True)
def _f(a, b, min_sum):
    s = 1.0 if (a >= 0.0) == (b >= 0.0) else -1.0
    m = min(abs(a), abs(b))
    if min_sum:
        return s * m
    return s * m + math.log1p(math.exp(-abs(a + b))) - math.log1p(math.exp(-abs(a - b)))


@njit(cache=True)
def _log_probs(L):
    if L > LLR_CLAMP:
        L = LLR_CLAMP
    elif L < -LLR_CLAMP:
        L = -LLR_CLAMP
    if L >= 0.0:
        lp0 = -math.log1p(math.exp(-L))
        return lp0, lp0 - L
    lp1 = -math.log1p(math.exp(L))
    return lp1 + L, lp1


@njit(cache=True)
def _reencode(u, start, h):
    c = u[start:start + h].copy()
    d = 1
    while d < h:
        for blk in range(0, h, 2 * d):
            for k in range(d):
                c[blk + k] ^= c[blk + k + d]
        d *= 2
    return c


@njit(cache=True)
def _leaf_llr(llr, u, i, last, n, min_sum):
    """Decision LLR of bit ``i`` (0-based) given ``u[:i]``; ``last`` is the previous leaf or -1."""
    for s in range(n - 1, -1, -1):
        if last >= 0 and (i >> s) == (last >> s):
            continue
        h = 1 << s
        par = h << 1
        b = i >> s
        if b & 1 == 0:
            for k in range(h):
                llr[h + k] = _f(llr[par + k], llr[par + h + k], min_sum)
        else:
            ps = _reencode(u, (b - 1) * h, h)
            for k in range(h):
                if ps[k]:
                    llr[h + k] = llr[par + h + k] - llr[par + k]
                else:
                    llr[h + k] = llr[par + h + k] + llr[par + k]
    return llr[1]


@njit(cache=True)
def _sc_kernel(ch_rev, info_mask, min_sum, u):
    N = ch_rev.size
    n = 0
    while (1 << n) < N:
        n += 1
    llr = np.zeros(2 * N)
    llr[N:] = ch_rev
    for i in range(N):
        L = _leaf_llr(llr, u, i, i - 1, n, min_sum)
        u[i] = 1 if (info_mask[i] and L < 0.0) else 0


@lru_cache(maxsize=32)
def _perm0(n: int) -> np.ndarray:
    p = bit_reversal_permutation(n) - 1
    p.setflags(write=False)
    return p


def _log2_exact(N: int) -> int:
    n = N.bit_length() - 1
    if N < 1 or (1 << n) != N:
        raise InputShapeError(f"LLR vector length must be a power of two, got {N}")
    return n


def prepare_llr(channel_llr, code: PolarCode | None = None) -> np.ndarray:
    """Validate channel LLRs and return them in trellis (bit-reversed) order."""
    llr = np.asarray(channel_llr, dtype=np.float64)
    if llr.ndim != 1:
        raise InputShapeError(f"LLR vector must be one-dimensional, got shape {llr.shape}")
    if code is not None and llr.size != code.N:
        raise InputShapeError(f"LLR vector must have length {code.N}, got {llr.size}")
    n = _log2_exact(llr.size)
    return np.ascontiguousarray(llr[_perm0(n)])


def f_minus(a: float, b: float, min_sum: bool = False) -> float:
    """Check-node combination ``2 atanh(tanh(a/2) tanh(b/2))``."""
    return float(_f(float(a), float(b), min_sum))


def g_plus(a: float, b: float, u: int) -> float:
    """Variable-node combination ``b + (1 - 2u) a``."""
    return float(b + (1 - 2 * int(u)) * a)


def branch_log_probs(decision_llr: float) -> tuple[float, float]:
    """
    ``(log Pr(bit=0), log Pr(bit=1))`` for a decision LLR.

    The LLR is clamped to +/-40 first so both values stay finite.
    """
    lp0, lp1 = _log_probs(float(decision_llr))
    return float(lp0), float(lp1)


class ScTrellis:
    """
    Stateful SC trellis over one received frame.

    Bits are decided in order with :meth:`decide`; :meth:`rewind` drops the
    decisions from a given position on. LLRs are recomputed lazily, so a
    rewind followed by re-decoding the same prefix reproduces an uninterrupted
    decode exactly.
    """

    def __init__(self, channel_llr, min_sum: bool = False):
        ch = prepare_llr(channel_llr)
        self.N = ch.size
        self.n = self.N.bit_length() - 1
        self.min_sum = min_sum
        self._llr = np.zeros(2 * self.N)
        self._llr[self.N:] = ch
        self._u = np.zeros(self.N, dtype=np.uint8)
        self._cursor = 0
        self._last = -1

    @property
    def cursor(self) -> int:
        """Number of bits decided so far (the next bit is ``cursor + 1``, 1-based)."""
        return self._cursor

    @property
    def prefix(self) -> np.ndarray:
        return self._u[:self._cursor].copy()

    def stage_llrs(self, s: int) -> np.ndarray:
        """LLR block cached at stage ``s`` (length ``2**s``)."""
        return self._llr[1 << s:2 << s].copy()

    def decision_llr(self) -> float:
        if self._cursor >= self.N:
            raise DecoderStateError("all bits already decided")
        L = _leaf_llr(self._llr, self._u, self._cursor, self._last, self.n, self.min_sum)
        self._last = self._cursor
        return float(L)

    def decide(self, bit: int) -> None:
        if self._cursor >= self.N:
            raise DecoderStateError("all bits already decided")
        if bit not in (0, 1):
            raise ValueError(f"bit must be 0 or 1, got {bit!r}")
        if self._last != self._cursor:
            # cached stages must describe this leaf before the prefix changes
            self.decision_llr()
        self._u[self._cursor] = bit
        self._cursor += 1

    def rewind(self, cursor: int) -> None:
        """Keep only the first ``cursor`` decisions."""
        if not 0 <= cursor <= self._cursor:
            raise DecoderStateError(f"cannot rewind to {cursor} from {self._cursor}")
        self._cursor = cursor


def bit_llr(channel_llr, prefix, min_sum: bool = False) -> float:
    """SC decision LLR of the bit following ``prefix`` (computed from scratch)."""
    t = ScTrellis(channel_llr, min_sum=min_sum)
    prefix = np.asarray(prefix, dtype=np.int64)
    if prefix.size >= t.N:
        raise DecoderStateError("prefix already covers every bit")
    for b in prefix:
        t.decision_llr()
        t.decide(int(b))
    return t.decision_llr()


def sc_decode(channel_llr, code: PolarCode, min_sum: bool = False) -> DecodeResult:
    """Plain SC decoding: hard decisions on information bits, zeros on frozen bits."""
    ch = prepare_llr(channel_llr, code)
    u = np.zeros(code.N, dtype=np.uint8)
    _sc_kernel(ch, code.info_mask, min_sum, u)
    return DecodeResult(u_hat=u, visits=code.N)
