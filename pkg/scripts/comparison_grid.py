"""
Run the N=128, R=1/2 comparison grid and write it as CSV.

SC, SC-Fano with delta in {1, 5, 10, 20} and SC-List with L in {8, 16} over
Eb/N0 = 1.0 ... 3.5 dB. Every decoder sees the same noise at a given SNR.

    python scripts/comparison_grid.py --out grid.csv --workers 8
"""

import argparse
import logging

from scfano import DecoderSpec, SimConfig, run_experiment
from scfano.sim import format_results

DECODERS = ["sc", "fano:1", "fano:5", "fano:10", "fano:20", "scl:8", "scl:16"]


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[1])
    p.add_argument("--out", default="grid.csv")
    p.add_argument("--snr", default="1.0,1.5,2.0,2.5,3.0,3.5")
    p.add_argument("--min-errors", type=int, default=100)
    p.add_argument("--max-frames", type=int, default=10**6)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(asctime)s %(message)s")
    cfg = SimConfig(
        n=7, K=64,
        snr_points_db=[float(s) for s in args.snr.split(",")],
        decoders=[DecoderSpec.parse(d) for d in DECODERS],
        min_frame_errors=args.min_errors,
        max_frames=args.max_frames,
        seed=args.seed,
        workers=args.workers,
        output_path=args.out,
    )
    records = run_experiment(cfg)
    print(format_results(records, "csv"), end="")


if __name__ == "__main__":
    main()
