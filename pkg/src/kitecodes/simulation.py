"""Fixed-rate Monte Carlo BER simulation of a prefix code."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.stats import binomtest

from . import rng as rngmod
from .channel import Constellation, awgn, constellation, demap_llr, ebn0_to_sigma2, modulate
from .codec import MESSAGE_CLAMP, decode_bp, encode
from .construction import SparseParityCheck


@dataclass(frozen=True)
class BerPoint:
    rate: float
    ebn0_db: float
    frames: int
    bits: int
    bit_errors: int
    frame_errors: int
    ci_low: float
    ci_high: float
    mean_iterations: float

    @property
    def ber(self) -> float:
        return self.bit_errors / self.bits if self.bits else 0.0

    @property
    def fer(self) -> float:
        return self.frame_errors / self.frames if self.frames else 0.0


def wilson_interval(errors: int, trials: int, confidence: float = 0.95) -> tuple[float, float]:
    if trials == 0:
        return 0.0, 1.0
    ci = binomtest(int(errors), int(trials)).proportion_ci(confidence, method="wilson")
    return float(ci.low), float(ci.high)


def frame_llr(H: SparseParityCheck, v: np.ndarray, const: Constellation, sigma2: float,
              rng: np.random.Generator):
    """Encode ``v``, transmit over AWGN and return ``(codeword bits, LLRs)``.

    A zero ``sigma2`` gives saturated noiseless LLRs.
    """
    c = encode(H, v).bits
    pad = (-c.size) % const.b
    tx = np.concatenate([c, np.zeros(pad, dtype=np.uint8)]) if pad else c
    x = modulate(tx, const)
    if sigma2 == 0:
        llr = np.where(tx == 0, MESSAGE_CLAMP, -MESSAGE_CLAMP).astype(np.float64)
    else:
        llr = demap_llr(awgn(x, sigma2, rng, real=const.real), const, sigma2)
    return c, llr[: c.size]


def run_frame(H, const, sigma2, max_iter, g, min_sum=False):
    v = g.integers(0, 2, H.k, dtype=np.uint8)
    _, llr = frame_llr(H, v, const, sigma2, g)
    res = decode_bp(H, llr, max_iter, min_sum=min_sum)
    return int(np.count_nonzero(res.bits[: H.k] != v)), res.iterations


def simulate_ber(H: SparseParityCheck, ebn0_db_list, frames: int, seed: int = 0,
                 const: Constellation | None = None, max_iter: int = 50,
                 threads: int = 1, min_sum: bool = False) -> list[BerPoint]:
    """Information-bit error rate of ``H`` at each Eb/N0 (dB; ``inf`` = noiseless).

    Frame ``f`` at grid point ``p`` draws its information bits and noise from
    stream ``(BER, p, f)``, so results do not depend on ``threads``.
    """
    if frames < 1:
        raise ValueError("frames must be at least 1")
    const = const or constellation("bpsk")
    out = []
    for p, ebn0 in enumerate(ebn0_db_list):
        sigma2 = 0.0 if math.isinf(ebn0) and ebn0 > 0 else ebn0_to_sigma2(ebn0, H.rate, const.b)

        def one(f, p=p, sigma2=sigma2):
            return run_frame(H, const, sigma2, max_iter, rngmod.stream(seed, rngmod.BER, p, f), min_sum)

        if threads > 1:
            with ThreadPoolExecutor(threads) as ex:
                res = list(ex.map(one, range(frames)))
        else:
            res = [one(f) for f in range(frames)]
        errs = np.array([r[0] for r in res])
        total = frames * H.k
        lo, hi = wilson_interval(int(errs.sum()), total)
        out.append(BerPoint(H.rate, float(ebn0), frames, total, int(errs.sum()),
                            int(np.count_nonzero(errs)), lo, hi,
                            float(np.mean([r[1] for r in res]))))
    return out


def uncoded_ber(ebn0_db: float, nbits: int, seed: int = 0) -> tuple[int, int]:
    """Bit errors of uncoded BPSK hard decisions over ``nbits`` bits."""
    g = rngmod.stream(seed, rngmod.BER, 0, 0)
    const = constellation("bpsk")
    bits = g.integers(0, 2, nbits, dtype=np.uint8)
    sigma2 = ebn0_to_sigma2(ebn0_db, 1.0, 1)
    llr = demap_llr(awgn(modulate(bits, const), sigma2, g, real=True), const, sigma2)
    return int(np.count_nonzero((llr < 0).astype(np.uint8) != bits)), nbits
