import numpy as np
import pytest

from scfano import ChannelParams, construct_code
from scfano.sim import make_frame

_CRITERIA = []


def report_criterion(number, ok, detail=""):
    line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    _CRITERIA.append((number, line))
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(_CRITERIA):
            terminalreporter.write_line(line)


def frames(n, K, snr_db, count, seed=0):
    """Yield (code, u, llr) for ``count`` random frames at Eb/N0 ``snr_db``."""
    code = construct_code(n, K, snr_db)
    params = ChannelParams(snr_db, code.rate)
    for f in range(count):
        u, llr = make_frame(code, params, seed, snr_db, f)
        yield code, u, llr


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


GRID_DECODERS = ["sc", "fano:1", "fano:5", "fano:10", "fano:20", "scl:8", "scl:16"]


@pytest.fixture(scope="session")
def comparison_grid():
    """The N=128, R=1/2 comparison grid at four SNR points, 100 errors per cell."""
    from scfano import DecoderSpec, SimConfig, run_experiment

    cfg = SimConfig(
        n=7, K=64,
        snr_points_db=[1.5, 2.0, 2.5, 3.0],
        decoders=[DecoderSpec.parse(d) for d in GRID_DECODERS],
        min_frame_errors=100,
        max_frames=200_000,
        seed=2024,
    )
    records = run_experiment(cfg)
    return {(r.decoder, r.parameter, r.snr_db): r for r in records}, records
