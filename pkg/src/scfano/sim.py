"""
Monte Carlo FER / complexity experiments.

Frame ``f`` at Eb/N0 ``snr`` draws its message and noise from
``frame_rng(seed, snr_key(snr), f)``. Every decoder at a given SNR therefore
sees the same noise realisations, and the outcome of a cell does not depend on
how frames are batched or spread over worker processes.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from statistics import NormalDist

import numpy as np

from .channel import ChannelParams, awgn_transmit, channel_llr, frame_rng, modulate_bpsk
from .errors import ConfigError
from .fano import DEFAULT_VISIT_FACTOR, fano_decode
from .polar import PolarCode, construct_code, encode
from .sc import sc_decode
from .scl import scl_decode

log = logging.getLogger(__name__)

CSV_FIELDS = ("decoder", "parameter", "snr_db", "frames", "frame_errors", "fer",
              "avg_visits", "chi", "wall_seconds")
DEFAULT_SNR_GRID = (1.0, 1.5, 2.0, 2.5, 3.0, 3.5)

_KINDS = {"sc": "SC", "fano": "SC-Fano", "sc-fano": "SC-Fano", "scl": "SCL"}


@dataclass(frozen=True)
class DecoderSpec:
    """A decoder and its parameter: ``delta`` for SC-Fano, list size for SCL."""

    kind: str
    param: float | None = None

    def __post_init__(self):
        if self.kind not in ("SC", "SC-Fano", "SCL"):
            raise ConfigError(f"unknown decoder kind {self.kind!r}")
        if self.kind == "SC-Fano" and not (self.param is not None and self.param > 0):
            raise ConfigError(f"SC-Fano needs delta > 0, got {self.param}")
        if self.kind == "SCL":
            if self.param is None or self.param < 1 or int(self.param) != self.param:
                raise ConfigError(f"SCL needs an integer list size >= 1, got {self.param}")
            object.__setattr__(self, "param", int(self.param))
        if self.kind == "SC":
            object.__setattr__(self, "param", None)

    @classmethod
    def parse(cls, text: str) -> "DecoderSpec":
        """Parse ``sc``, ``fano:DELTA`` or ``scl:L``."""
        name, _, arg = text.strip().partition(":")
        kind = _KINDS.get(name.lower())
        if kind is None:
            raise ConfigError(f"unknown decoder {text!r}; use sc, fano:DELTA or scl:L")
        if kind == "SC":
            if arg:
                raise ConfigError("sc takes no parameter")
            return cls("SC")
        if not arg:
            raise ConfigError(f"{name} needs a parameter, e.g. {name}:{'1' if kind == 'SC-Fano' else '16'}")
        try:
            value = float(arg)
        except ValueError:
            raise ConfigError(f"bad decoder parameter in {text!r}") from None
        return cls(kind, value)

    def __str__(self):
        if self.kind == "SC":
            return "sc"
        return f"{'fano' if self.kind == 'SC-Fano' else 'scl'}:{_fmt(self.param)}"


@dataclass
class SimConfig:
    n: int = 7
    K: int = 64
    snr_points_db: list[float] = field(default_factory=lambda: list(DEFAULT_SNR_GRID))
    decoders: list[DecoderSpec] = field(default_factory=lambda: [DecoderSpec("SC")])
    construction_snr_db: float | None = None
    min_frame_errors: int = 100
    max_frames: int = 10**6
    seed: int = 0
    workers: int = 1
    output_path: str | None = None
    output_format: str = "csv"
    snr_convention: str = "ebn0"
    max_visits_factor: int = DEFAULT_VISIT_FACTOR
    batch_size: int = 256
    timing: bool = False

    def validate(self) -> None:
        if self.n < 0:
            raise ConfigError(f"n must be non-negative, got {self.n}")
        if not 0 < self.K <= (1 << self.n):
            raise ConfigError(f"K must lie in 1..{1 << self.n}, got {self.K}")
        if not self.snr_points_db:
            raise ConfigError("at least one SNR point is required")
        if not self.decoders:
            raise ConfigError("at least one decoder is required")
        if self.min_frame_errors < 1:
            raise ConfigError("min_frame_errors must be at least 1")
        if self.max_frames < self.min_frame_errors:
            raise ConfigError("max_frames must be at least min_frame_errors")
        if self.workers < 1:
            raise ConfigError("workers must be at least 1")
        if self.batch_size < 1:
            raise ConfigError("batch_size must be at least 1")
        if self.max_visits_factor < 1:
            raise ConfigError("max_visits_factor must be at least 1")
        if self.output_format not in ("csv", "json"):
            raise ConfigError(f"output format must be csv or json, got {self.output_format!r}")
        if self.snr_convention not in ("ebn0", "esn0"):
            raise ConfigError(f"SNR convention must be ebn0 or esn0, got {self.snr_convention!r}")
        if self.seed < 0:
            raise ConfigError("seed must be non-negative")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["decoders"] = [str(s) for s in self.decoders]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "SimConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        d = dict(d)
        if "decoders" in d:
            d["decoders"] = [s if isinstance(s, DecoderSpec) else DecoderSpec.parse(s)
                             for s in d["decoders"]]
        if "snr_points_db" in d:
            d["snr_points_db"] = [float(s) for s in d["snr_points_db"]]
        return cls(**d)


@dataclass
class SimRecord:
    decoder: str
    parameter: float | None
    snr_db: float
    frames: int
    frame_errors: int
    fer: float
    avg_visits: float
    chi: float
    wall_seconds: float


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".6g")


def _round6(x):
    if x is None or isinstance(x, (int, np.integer)):
        return x
    return float(format(float(x), ".6g"))


def snr_key(snr_db: float) -> int:
    """Non-negative integer identifying an SNR point (milli-dB, offset)."""
    return int(round(snr_db * 1000)) + 1_000_000


def estimate_fer(errors: int, frames: int, confidence: float = 0.95) -> tuple[float, float, float]:
    """Point estimate and Wilson score interval of a frame error rate."""
    if frames < 1 or not 0 <= errors <= frames:
        raise ValueError(f"need 0 <= errors <= frames and frames >= 1, got {errors}/{frames}")
    z = NormalDist().inv_cdf(0.5 + confidence / 2)
    p = errors / frames
    denom = 1 + z * z / frames
    center = (p + z * z / (2 * frames)) / denom
    half = z * math.sqrt(p * (1 - p) / frames + z * z / (4 * frames * frames)) / denom
    return p, max(0.0, center - half), min(1.0, center + half)


def decode_with(spec: DecoderSpec, llr, code: PolarCode, max_visits_factor: int = DEFAULT_VISIT_FACTOR):
    if spec.kind == "SC":
        return sc_decode(llr, code)
    if spec.kind == "SC-Fano":
        return fano_decode(llr, code, spec.param, max_visits=max_visits_factor * code.N)
    return scl_decode(llr, code, spec.param)


def make_frame(code: PolarCode, params: ChannelParams, seed: int, snr_db: float, frame: int):
    """Random message and its channel LLRs for one frame."""
    rng = frame_rng(seed, snr_key(snr_db), frame)
    u = code.message(rng.integers(0, 2, code.K, dtype=np.uint8))
    y = awgn_transmit(modulate_bpsk(encode(u, code)), params, rng)
    return u, channel_llr(y, params)


def _run_batch(code_dict, specs, snr_db, convention, seed, start, stop, max_visits_factor, timing):
    code = PolarCode.from_dict(code_dict)
    params = ChannelParams(snr_db, code.rate, convention)
    count = stop - start
    errors = np.zeros((len(specs), count), dtype=bool)
    visits = np.zeros((len(specs), count), dtype=np.int64)
    seconds = np.zeros(len(specs))
    for k, f in enumerate(range(start, stop)):
        u, llr = make_frame(code, params, seed, snr_db, f)
        for d, spec in enumerate(specs):
            t0 = time.perf_counter() if timing else 0.0
            res = decode_with(spec, llr, code, max_visits_factor)
            if timing:
                seconds[d] += time.perf_counter() - t0
            errors[d, k] = bool(np.any(res.u_hat != u))
            visits[d, k] = res.visits
    return errors, visits, seconds


def _check_writable(path) -> None:
    p = Path(path)
    parent = p.parent if str(p.parent) else Path(".")
    if p.is_dir():
        raise OSError(f"output path {p} is a directory")
    if not parent.is_dir() or not os.access(parent, os.W_OK):
        raise OSError(f"cannot write output to {p}: directory {parent} is missing or read-only")
    if p.exists() and not os.access(p, os.W_OK):
        raise OSError(f"cannot write output to {p}: file is read-only")


class _Cell:
    def __init__(self):
        self.frames = 0
        self.errors = 0
        self.visits = 0
        self.seconds = 0.0
        self.done = False


def _simulate_snr(cfg: SimConfig, snr_db: float, pool) -> list[_Cell]:
    design = cfg.construction_snr_db if cfg.construction_snr_db is not None else snr_db
    code = construct_code(cfg.n, cfg.K, design)
    code_dict = code.to_dict()
    cells = [_Cell() for _ in cfg.decoders]
    next_frame = 0
    wave = cfg.workers
    while not all(c.done for c in cells) and next_frame < cfg.max_frames:
        active = [d for d, c in enumerate(cells) if not c.done]
        specs = [cfg.decoders[d] for d in active]
        bounds = []
        for _ in range(wave):
            if next_frame >= cfg.max_frames:
                break
            stop = min(next_frame + cfg.batch_size, cfg.max_frames)
            bounds.append((next_frame, stop))
            next_frame = stop
        args = [(code_dict, specs, snr_db, cfg.snr_convention, cfg.seed, a, b,
                 cfg.max_visits_factor, cfg.timing) for a, b in bounds]
        if pool is None:
            results = [_run_batch(*a) for a in args]
        else:
            results = list(pool.map(_run_batch, *zip(*args)))
        for errors, visits, seconds in results:
            for row, d in enumerate(active):
                cell = cells[d]
                if cell.done:
                    continue
                cell.seconds += seconds[row]
                for e, v in zip(errors[row], visits[row]):
                    cell.frames += 1
                    cell.errors += int(e)
                    cell.visits += int(v)
                    if cell.errors >= cfg.min_frame_errors or cell.frames >= cfg.max_frames:
                        cell.done = True
                        break
        for d in active:
            c = cells[d]
            log.info("snr=%g %s: %d/%d errors after %d frames", snr_db, cfg.decoders[d],
                     c.errors, cfg.min_frame_errors, c.frames)
    return cells


def run_experiment(cfg: SimConfig) -> list[SimRecord]:
    """
    Run every (decoder, SNR) cell of ``cfg``.

    A cell stops at the frame where its error count reaches
    ``min_frame_errors`` or after ``max_frames`` frames. Records come back in
    decoder order, then ascending SNR. When ``cfg.output_path`` is set the
    table is also written there.
    """
    cfg.validate()
    if cfg.output_path is not None:
        _check_writable(cfg.output_path)
    snrs = sorted(set(float(s) for s in cfg.snr_points_db))
    N = 1 << cfg.n
    pool = ProcessPoolExecutor(cfg.workers) if cfg.workers > 1 else None
    try:
        by_snr = {s: _simulate_snr(cfg, s, pool) for s in snrs}
    finally:
        if pool is not None:
            pool.shutdown()
    records = []
    for d, spec in enumerate(cfg.decoders):
        for s in snrs:
            c = by_snr[s][d]
            avg = c.visits / c.frames
            records.append(SimRecord(
                decoder=spec.kind,
                parameter=spec.param,
                snr_db=s,
                frames=c.frames,
                frame_errors=c.errors,
                fer=c.errors / c.frames,
                avg_visits=avg,
                chi=avg / N,
                wall_seconds=c.seconds if cfg.timing else 0.0,
            ))
    if cfg.output_path is not None:
        emit_results(records, cfg.output_format, cfg.output_path)
    return records


def format_results(records: list[SimRecord], fmt: str = "csv") -> str:
    if not records:
        raise ValueError("no records to write")
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_FIELDS)
        for r in records:
            w.writerow([_fmt(getattr(r, k)) if k != "decoder" else r.decoder for k in CSV_FIELDS])
        return buf.getvalue()
    if fmt == "json":
        rows = [{k: (getattr(r, k) if k == "decoder" else _round6(getattr(r, k))) for k in CSV_FIELDS}
                for r in records]
        return json.dumps(rows, indent=2) + "\n"
    raise ValueError(f"unknown format {fmt!r}")


def emit_results(records: list[SimRecord], fmt: str, path) -> None:
    """Write records as CSV or JSON; I/O errors name the offending path."""
    text = format_results(records, fmt)
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise OSError(f"failed to write results to {path}: {exc}") from exc


def read_results(path) -> list[dict]:
    """Load a CSV or JSON results table written by :func:`emit_results`."""
    text = Path(path).read_text()
    if text.lstrip().startswith("["):
        return json.loads(text)
    rows = []
    for row in csv.DictReader(io.StringIO(text)):
        rows.append({
            "decoder": row["decoder"],
            "parameter": float(row["parameter"]) if row["parameter"] else None,
            "snr_db": float(row["snr_db"]),
            "frames": int(row["frames"]),
            "frame_errors": int(row["frame_errors"]),
            "fer": float(row["fer"]),
            "avg_visits": float(row["avg_visits"]),
            "chi": float(row["chi"]),
            "wall_seconds": float(row["wall_seconds"]),
        })
    return rows
