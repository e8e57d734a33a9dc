"""BPSK over AWGN: modulation, noise, and channel LLRs."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ChannelParams:
    """
    AWGN operating point for unit-energy BPSK.

    ``snr_db`` is Eb/N0 by default; with ``convention="esn0"`` it is taken as
    Es/N0 and the code rate drops out of the noise variance.
    """

    snr_db: float
    rate: float = 1.0
    convention: str = "ebn0"

    def __post_init__(self):
        if self.convention not in ("ebn0", "esn0"):
            raise ValueError(f"unknown SNR convention {self.convention!r}")
        if self.convention == "ebn0" and not self.rate > 0:
            raise ValueError(f"rate must be positive, got {self.rate}")

    @property
    def sigma2(self) -> float:
        snr = 10.0 ** (self.snr_db / 10.0)
        if self.convention == "ebn0":
            return 1.0 / (2.0 * self.rate * snr)
        return 1.0 / (2.0 * snr)


def modulate_bpsk(x) -> np.ndarray:
    """Map bit 0 to +1 and bit 1 to -1."""
    return 1.0 - 2.0 * np.asarray(x, dtype=float)


def awgn_transmit(s, params: ChannelParams, rng: np.random.Generator) -> np.ndarray:
    s = np.asarray(s, dtype=float)
    return s + rng.normal(0.0, np.sqrt(params.sigma2), size=s.shape)


def channel_llr(y, params: ChannelParams | float) -> np.ndarray:
    """``2 y / sigma2``; positive values favour bit 0. Accepts a bare noise variance."""
    sigma2 = params.sigma2 if isinstance(params, ChannelParams) else float(params)
    if not sigma2 > 0:
        raise ValueError(f"noise variance must be positive, got {sigma2}")
    return 2.0 * np.asarray(y, dtype=float) / sigma2


def frame_rng(seed: int, *key: int) -> np.random.Generator:
    """
    Independent Philox stream for one frame.

    The stream depends only on ``(seed, *key)``, so frames can be generated in
    any order or on any worker and still reproduce bit-exactly.
    """
    return np.random.Generator(np.random.Philox(np.random.SeedSequence((seed, *key))))
