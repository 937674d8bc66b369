"""Rate-compatible Kite LDPC codes over AWGN channels."""

from .channel import Constellation, constellation, demap_llr, modulate, awgn
from .codec import decode_bp, encode, syndrome
from .construction import CodeSpec, SparseParityCheck, build_mother_code
from .harq import HarqConfig, run_session, throughput_curve
from .profile import QProfile, formula_profile, q_from_formula, q_from_table
from .rates import boundaries

__all__ = [
    "CodeSpec", "Constellation", "HarqConfig", "QProfile", "SparseParityCheck",
    "awgn", "boundaries", "build_mother_code", "constellation", "decode_bp", "demap_llr",
    "encode", "formula_profile", "modulate", "q_from_formula", "q_from_table", "run_session",
    "syndrome", "throughput_curve",
]
