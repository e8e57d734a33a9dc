"""
Polar code construction and encoding.

Codes follow the convention ``x = u B_N G_N`` where ``G_N`` is the n-fold
Kronecker power of ``[[1, 0], [1, 1]]`` and ``B_N`` is the bit-reversal
permutation. Information sets are 1-based, message and codeword arrays are
ordinary 0-based numpy vectors.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

import numpy as np

from .errors import CodeParameterError, InputShapeError

PHI_INV_TOL = 1e-9


def bit_reversal_permutation(n: int) -> np.ndarray:
    """
    Bit-reversal permutation of ``{1, ..., 2**n}``.

    Parameters
    ----------
    n : int
        Exponent, ``n >= 0``.

    Returns
    -------
    perm : ndarray of int
        1-based permutation; ``perm[k - 1]`` is the image of ``k``.
    """
    if n < 0:
        raise CodeParameterError(f"exponent must be non-negative, got {n}")
    N = 1 << n
    idx = np.arange(N)
    rev = np.zeros(N, dtype=np.int64)
    for b in range(n):
        rev |= ((idx >> b) & 1) << (n - 1 - b)
    return rev + 1


def polar_transform(v: np.ndarray) -> np.ndarray:
    """Multiply ``v`` by ``G_N`` over GF(2) (no bit reversal)."""
    c = np.array(v, dtype=np.uint8) & 1
    N = c.size
    d = 1
    while d < N:
        c = c.reshape(-1, 2, d)
        c[:, 0, :] ^= c[:, 1, :]
        c = c.reshape(N)
        d *= 2
    return c


@dataclass(frozen=True, eq=False)
class PolarCode:
    """
    Polar code parameters.

    Attributes
    ----------
    n : int
        Exponent, the code length is ``N = 2**n``.
    K : int
        Number of information bits.
    info_set : tuple of int
        Sorted 1-based information indices.
    pe : ndarray
        Error probability of each synthesized channel, ``pe[j - 1]`` for channel j.
    design_snr_db : float or None
        Eb/N0 the reliabilities were computed for.
    """

    n: int
    K: int
    info_set: tuple[int, ...]
    pe: np.ndarray = field(repr=False)
    design_snr_db: float | None = None

    def __post_init__(self):
        if self.n < 0:
            raise CodeParameterError(f"n must be non-negative, got {self.n}")
        N = 1 << self.n
        info = tuple(int(a) for a in self.info_set)
        object.__setattr__(self, "info_set", info)
        pe = np.asarray(self.pe, dtype=float)
        object.__setattr__(self, "pe", pe)
        if not 0 <= self.K <= N:
            raise CodeParameterError(f"K={self.K} outside [0, {N}]")
        if len(info) != self.K:
            raise CodeParameterError(f"|info_set|={len(info)} but K={self.K}")
        if any(a < 1 or a > N for a in info):
            raise CodeParameterError(f"info_set indices must lie in 1..{N}")
        if any(b <= a for a, b in zip(info, info[1:])):
            raise CodeParameterError("info_set must be strictly increasing")
        if pe.shape != (N,):
            raise CodeParameterError(f"pe must have length {N}, got shape {pe.shape}")
        if np.any(pe < 0) or np.any(pe >= 1) or not np.all(np.isfinite(pe)):
            raise CodeParameterError("channel error probabilities must lie in [0, 1)")

    @property
    def N(self) -> int:
        return 1 << self.n

    @property
    def rate(self) -> float:
        return self.K / self.N

    @property
    def info_mask(self) -> np.ndarray:
        """Boolean mask over 0-based positions, True on information bits."""
        mask = np.zeros(self.N, dtype=bool)
        mask[np.asarray(self.info_set, dtype=np.int64) - 1] = True
        return mask

    def message(self, info_bits) -> np.ndarray:
        """Place ``info_bits`` on the information positions, zeros elsewhere."""
        info_bits = np.asarray(info_bits, dtype=np.uint8)
        if info_bits.shape != (self.K,):
            raise InputShapeError(f"expected {self.K} information bits, got {info_bits.shape}")
        u = np.zeros(self.N, dtype=np.uint8)
        u[self.info_mask] = info_bits
        return u

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "K": self.K,
            "design_snr_db": self.design_snr_db,
            "info_set": list(self.info_set),
            "pe": [float(p) for p in self.pe],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PolarCode":
        return cls(
            n=int(d["n"]),
            K=int(d["K"]),
            info_set=tuple(d["info_set"]),
            pe=np.asarray(d["pe"], dtype=float),
            design_snr_db=d.get("design_snr_db"),
        )

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2))

    @classmethod
    def load(cls, path) -> "PolarCode":
        return cls.from_dict(json.loads(Path(path).read_text()))


def encode(u, code: PolarCode) -> np.ndarray:
    """
    Polar-encode a length-N message vector: ``x = u B_N G_N`` over GF(2).

    Frozen positions of ``u`` must be zero.
    """
    u = np.asarray(u, dtype=np.uint8)
    if u.shape != (code.N,):
        raise InputShapeError(f"message must have length {code.N}, got shape {u.shape}")
    if np.any(u[~code.info_mask]):
        raise InputShapeError("frozen positions of the message must be 0")
    perm = bit_reversal_permutation(code.n) - 1
    return polar_transform(u[perm])


# Gaussian approximation density evolution. The phi-function is the
# three-piece approximation (the small-mean segment keeps phi(0) = 1 so very
# bad channels keep polarising towards zero), evaluated in the log domain so
# large mean LLRs do not underflow.
_PHI_KNEE = 0.867861


def _log_phi(x: float) -> float:
    if x <= 0.0:
        return 0.0
    if x < _PHI_KNEE:
        return 0.0564 * x * x - 0.48560 * x
    if x < 10.0:
        return -0.4527 * x**0.86 + 0.0218
    return 0.5 * math.log(math.pi / x) - x / 4.0 + math.log1p(-10.0 / (7.0 * x))


def _phi_inv(log_y: float) -> float:
    if log_y >= 0.0:
        return 0.0
    lo, hi = 0.0, 1.0
    while _log_phi(hi) > log_y:
        lo, hi = hi, 2.0 * hi
    while hi - lo > PHI_INV_TOL:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            # float spacing exceeds the tolerance at very large means
            break
        if _log_phi(mid) > log_y:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _check_node_mean(m: float) -> float:
    # 1 - (1 - phi)^2 == phi * (2 - phi)
    lp = _log_phi(m)
    return _phi_inv(lp + math.log(2.0 - math.exp(lp)))


def ga_mean_llrs(n: int, channel_mean: float) -> np.ndarray:
    """
    Mean LLR of every synthesized channel under the Gaussian approximation.

    Index ``j - 1`` holds channel j; the pair (2i - 1, 2i) at each step is
    (check-node, variable-node) of channel i of the half-length code.
    """
    means = [float(channel_mean)]
    for _ in range(n):
        nxt = []
        for m in means:
            nxt.append(_check_node_mean(m))
            nxt.append(2.0 * m)
        means = nxt
    return np.asarray(means)


def mean_to_error_prob(m) -> np.ndarray:
    """Error probability ``Q(sqrt(m / 2))`` of a consistent Gaussian LLR with mean ``m``."""
    m = np.asarray(m, dtype=float)
    return 0.5 * np.vectorize(math.erfc)(np.sqrt(np.maximum(m, 0.0)) / 2.0)


def select_info_set(pe, K: int) -> tuple[int, ...]:
    """The K indices with smallest ``pe``; ties go to the larger index."""
    pe = np.asarray(pe, dtype=float)
    idx = np.arange(pe.size)
    order = np.lexsort((-idx, pe))
    return tuple(sorted(int(i) + 1 for i in order[:K]))


@lru_cache(maxsize=256)
def _construct(n: int, K: int, design_snr_db: float) -> PolarCode:
    N = 1 << n
    rate = K / N
    mean0 = 4.0 * rate * 10.0 ** (design_snr_db / 10.0)
    pe = mean_to_error_prob(ga_mean_llrs(n, mean0))
    pe.setflags(write=False)
    return PolarCode(n=n, K=K, info_set=select_info_set(pe, K), pe=pe,
                     design_snr_db=float(design_snr_db))


def construct_code(n: int, K: int, design_snr_db: float) -> PolarCode:
    """
    Build a polar code by Gaussian-approximation density evolution.

    The BI-AWGN channel at Eb/N0 ``design_snr_db`` (rate K/N) has mean LLR
    ``4 R 10**(snr/10)``; the K most reliable synthesized channels carry data.
    """
    if n < 0:
        raise CodeParameterError(f"n must be non-negative, got {n}")
    if not 0 <= K <= (1 << n):
        raise CodeParameterError(f"K={K} outside [0, {1 << n}]")
    return _construct(int(n), int(K), float(design_snr_db))
