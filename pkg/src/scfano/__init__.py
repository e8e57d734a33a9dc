"""Polar codes with SC, SC-List and SC-Fano decoding."""

from .channel import ChannelParams, awgn_transmit, channel_llr, frame_rng, modulate_bpsk
from .errors import CodeParameterError, ConfigError, DecoderStateError, InputShapeError
from .fano import FanoState, backward_move, fano_decode, metric_step, threshold_update
from .polar import PolarCode, bit_reversal_permutation, construct_code, encode
from .sc import DecodeResult, ScTrellis, bit_llr, branch_log_probs, f_minus, g_plus, sc_decode
from .scl import scl_decode
from .sim import DecoderSpec, SimConfig, SimRecord, emit_results, estimate_fer, run_experiment

__all__ = [
    "ChannelParams", "awgn_transmit", "channel_llr", "frame_rng", "modulate_bpsk",
    "CodeParameterError", "ConfigError", "DecoderStateError", "InputShapeError",
    "FanoState", "backward_move", "fano_decode", "metric_step", "threshold_update",
    "PolarCode", "bit_reversal_permutation", "construct_code", "encode",
    "DecodeResult", "ScTrellis", "bit_llr", "branch_log_probs", "f_minus", "g_plus", "sc_decode",
    "scl_decode",
    "DecoderSpec", "SimConfig", "SimRecord", "emit_results", "estimate_fer", "run_experiment",
]
