"""Command-line entry point: ``scfano`` / ``python -m scfano``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .channel import ChannelParams, channel_llr
from .errors import ConfigError
from .fano import fano_decode
from .polar import PolarCode, construct_code, encode
from .sc import sc_decode
from .sim import DecoderSpec, SimConfig, format_results, make_frame, run_experiment

# N=4 worked example: received samples, noise variance, threshold step, and
# the design SNR that makes the search retreat at bit 3 (see README).
EXAMPLE1_Y = (1.4137, -1.5069, 2.3165, 1.3098)
EXAMPLE1_MESSAGE = (0, 1, 0, 1)
EXAMPLE1_SIGMA2 = 1.0
EXAMPLE1_DELTA = 3.0
EXAMPLE1_DESIGN_SNR_DB = 10.0


def example1_code() -> PolarCode:
    return construct_code(2, 3, EXAMPLE1_DESIGN_SNR_DB)


def run_example1() -> dict:
    """Decode the N=4 example with SC and SC-Fano and return both results."""
    code = example1_code()
    llr = channel_llr(np.asarray(EXAMPLE1_Y), EXAMPLE1_SIGMA2)
    sc = sc_decode(llr, code)
    fano = fano_decode(llr, code, EXAMPLE1_DELTA, trace=True)
    return {
        "info_set": list(code.info_set),
        "codeword": encode(np.asarray(EXAMPLE1_MESSAGE), code).tolist(),
        "sc": sc.u_hat.tolist(),
        "sc_fano": fano.u_hat.tolist(),
        "sc_fano_visits": fano.visits,
        "trace": fano.trace,
    }


def _csv_floats(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of numbers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="scfano",
        description="Monte Carlo FER and complexity of SC, SC-Fano and SC-List polar decoders.",
    )
    p.add_argument("--config", type=Path, help="JSON file with SimConfig fields; flags override it")
    p.add_argument("--n", type=int, help="log2 of the code length (default 7)")
    p.add_argument("--k", type=int, help="information bits (default 64)")
    p.add_argument("--snr", type=_csv_floats, help="comma-separated Eb/N0 points in dB")
    p.add_argument("--decoder", action="append", metavar="SPEC",
                   help="sc, fano:DELTA or scl:L; repeatable")
    p.add_argument("--construction-snr", type=float, help="design SNR for code construction (dB)")
    p.add_argument("--min-errors", type=int, help="frame errors that end a cell (default 100)")
    p.add_argument("--max-frames", type=int, help="frame cap per cell (default 1e6)")
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--out", help="output file; the table goes to stdout when omitted")
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--convention", choices=("ebn0", "esn0"), help="SNR convention (default ebn0)")
    p.add_argument("--timing", action="store_true",
                   help="record decoder wall time (makes output non-reproducible)")
    p.add_argument("--trace", metavar="PATH",
                   help="decode frame 0 of the single SNR point with the single SC-Fano decoder "
                        "and write its search events as JSON lines")
    p.add_argument("--example1", action="store_true",
                   help="run the built-in N=4 example and print the decision trace")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def config_from_args(args) -> SimConfig:
    base = {}
    if args.config is not None:
        try:
            base = json.loads(args.config.read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
    overrides = {
        "n": args.n,
        "K": args.k,
        "snr_points_db": args.snr,
        "decoders": args.decoder,
        "construction_snr_db": args.construction_snr,
        "min_frame_errors": args.min_errors,
        "max_frames": args.max_frames,
        "seed": args.seed,
        "workers": args.workers,
        "output_path": args.out,
        "output_format": args.format,
        "snr_convention": args.convention,
    }
    base.update({k: v for k, v in overrides.items() if v is not None})
    if args.timing:
        base["timing"] = True
    try:
        cfg = SimConfig.from_dict(base)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
    cfg.validate()
    return cfg


def _write_trace(cfg: SimConfig, path: str) -> None:
    fano = [d for d in cfg.decoders if d.kind == "SC-Fano"]
    if len(fano) != 1 or len(cfg.snr_points_db) != 1:
        raise ConfigError("--trace needs exactly one fano decoder and one SNR point")
    snr = cfg.snr_points_db[0]
    design = cfg.construction_snr_db if cfg.construction_snr_db is not None else snr
    code = construct_code(cfg.n, cfg.K, design)
    params = ChannelParams(snr, code.rate, cfg.snr_convention)
    u, llr = make_frame(code, params, cfg.seed, snr, 0)
    res = fano_decode(llr, code, fano[0].param, max_visits=cfg.max_visits_factor * code.N, trace=True)
    lines = [json.dumps(ev) for ev in res.trace]
    try:
        Path(path).write_text("\n".join(lines) + "\n")
    except OSError as exc:
        raise OSError(f"failed to write trace to {path}: {exc}") from exc
    ok = "correct" if np.array_equal(res.u_hat, u) else "frame error"
    print(f"{len(lines)} events, {res.visits} visits, {ok}")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(asctime)s %(levelname)s %(message)s")
    if args.example1:
        res = run_example1()
        print(f"info set {res['info_set']}, codeword {res['codeword']}")
        print(f"SC      -> {res['sc']}")
        print(f"SC-Fano -> {res['sc_fano']} ({res['sc_fano_visits']} visits)")
        for ev in res["trace"]:
            print(json.dumps(ev))
        return 0
    try:
        cfg = config_from_args(args)
        if args.trace:
            _write_trace(cfg, args.trace)
            return 0
        records = run_experiment(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 3
    if cfg.output_path is None:
        sys.stdout.write(format_results(records, cfg.output_format))
    return 0


if __name__ == "__main__":
    sys.exit(main())
