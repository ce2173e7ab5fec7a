"""Syndrome-based min-sum and linear-programming decoders for quantum LDPC codes."""

from .channel import DepolarizingChannel, make_rng, prior_llr
from .codes import CssCode, TannerGraph, build_tanner, load_code
from .decoders import DecoderConfig, decode, decode_batch
from .gf2 import BinaryMatrix, in_row_space, rank, syndrome
from .simulator import StopRule, classify_outcome, run_point, sweep, wilson_interval

__all__ = [
    "BinaryMatrix", "CssCode", "DecoderConfig", "DepolarizingChannel", "StopRule", "TannerGraph",
    "build_tanner", "classify_outcome", "decode", "decode_batch", "in_row_space", "load_code",
    "make_rng", "prior_llr", "rank", "run_point", "sweep", "syndrome", "wilson_interval",
]
