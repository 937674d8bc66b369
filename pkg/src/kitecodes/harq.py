"""Incremental-redundancy HARQ over the prefix codes of one mother code.

The transmitter sends whole symbols only. The receiver first decodes once it
holds at least ``start_length`` code bits (``n_18`` by default), and after
every failure asks for another increment of parity. The channel is realized
once per bit, so LLRs already received are reused unchanged.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import rng as rngmod
from .channel import Constellation, awgn, constrained_capacity, demap_llr, esn0_to_sigma2, modulate
from .codec import DEFAULT_MAX_ITER, decode_bp, encode
from .construction import SparseParityCheck
from .rates import boundary

SCHEDULES = ("fixed", "boundary")


def _round_up(x: int, b: int) -> int:
    return -(-x // b) * b


@dataclass(frozen=True, eq=False)
class HarqConfig:
    code: SparseParityCheck
    const: Constellation
    sigma2: float
    start_length: int | None = None
    step: int | None = None
    schedule: str = "fixed"
    max_iter: int = DEFAULT_MAX_ITER

    def __post_init__(self):
        if self.sigma2 <= 0:
            raise ValueError("noise variance must be positive")
        if self.schedule not in SCHEDULES:
            raise ValueError(f"schedule must be one of {SCHEDULES}")
        if self.start_length is not None and not self.code.k <= self.start_length <= self.code.n:
            raise ValueError("start length must lie in [k, n_1]")
        if self.step is not None and self.step < self.const.b:
            raise ValueError("increment must be at least one symbol")

    @property
    def max_length(self) -> int:
        return (self.code.n // self.const.b) * self.const.b

    @property
    def increment(self) -> int:
        step = self.step if self.step is not None else math.ceil(self.code.k / 100)
        return _round_up(step, self.const.b)

    def lengths(self) -> list[int]:
        """Code lengths at which the receiver attempts to decode."""
        k, b, top = self.code.k, self.const.b, self.max_length
        start = self.start_length if self.start_length is not None else boundary(k, 18)
        first = min(_round_up(start, b), top)
        if self.schedule == "boundary":
            marks = [first] + [min(_round_up(boundary(k, ell), b), top) for ell in range(17, 0, -1)]
            out = []
            for n in marks:
                if n >= first and (not out or n > out[-1]):
                    out.append(n)
            return out
        out = list(range(first, top + 1, self.increment))
        if out[-1] != top:
            out.append(top)
        return out


@dataclass(frozen=True)
class HarqTrace:
    n: int
    success: bool
    undetected: bool
    attempts: int
    eta: float


def run_session(v, cfg: HarqConfig, rng: np.random.Generator) -> HarqTrace:
    """One IR-HARQ session for information bits ``v``.

    A session that reaches ``n_1`` without converging reports
    ``success=False`` and ``eta=0``.
    """
    H = cfg.code
    v = np.asarray(v, dtype=np.uint8)
    b = cfg.const.b
    top = cfg.max_length
    c = encode(H, v).bits[:top]
    y = awgn(modulate(c, cfg.const), cfg.sigma2, rng, real=cfg.const.real)
    llr = demap_llr(y, cfg.const, cfg.sigma2)
    attempts = 0
    n = top
    for n in cfg.lengths():
        attempts += 1
        res = decode_bp(H.prefix(n), llr[:n], cfg.max_iter)
        if res.converged:
            wrong = bool(np.any(res.bits[: H.k] != v))
            return HarqTrace(n, True, wrong, attempts, H.k * b / n)
    return HarqTrace(n, False, False, attempts, 0.0)


@dataclass(frozen=True)
class ThroughputPoint:
    esn0_db: float
    frames: int
    mean_eta: float
    half_width: float
    failure_rate: float
    undetected: int
    capacity: float


def throughput_curve(code: SparseParityCheck, const: Constellation, esn0_db_list, frames: int,
                     seed: int = 0, threads: int = 1, start_length: int | None = None,
                     step: int | None = None, schedule: str = "fixed",
                     max_iter: int = DEFAULT_MAX_ITER, noiseless_sigma2: float = 1e-6):
    """Average decoding spectral efficiency at each Es/N0 (dB).

    Session ``f`` at grid point ``p`` uses stream ``(HARQ, p, f)`` for its
    information bits and noise. An Es/N0 of ``inf`` runs with
    ``noiseless_sigma2``. Returns ``(points, traces)`` where ``traces[p]`` lists
    the per-session traces.
    """
    if frames < 1:
        raise ValueError("frames must be at least 1")
    points, traces = [], []
    for p, snr in enumerate(esn0_db_list):
        sigma2 = noiseless_sigma2 if math.isinf(snr) else esn0_to_sigma2(snr)
        cfg = HarqConfig(code, const, sigma2, start_length, step, schedule, max_iter)

        def one(f, p=p, cfg=cfg):
            g = rngmod.stream(seed, rngmod.HARQ, p, f)
            v = g.integers(0, 2, code.k, dtype=np.uint8)
            return run_session(v, cfg, g)

        if threads > 1:
            with ThreadPoolExecutor(threads) as ex:
                tr = list(ex.map(one, range(frames)))
        else:
            tr = [one(f) for f in range(frames)]
        eta = np.array([t.eta for t in tr])
        hw = 1.96 * eta.std(ddof=1) / math.sqrt(frames) if frames > 1 else 0.0
        points.append(ThroughputPoint(
            float(snr), frames, float(eta.mean()), float(hw),
            float(np.mean([not t.success for t in tr])),
            int(sum(t.undetected for t in tr)),
            constrained_capacity(const, sigma2),
        ))
        traces.append(tr)
    return points, traces


CSV_COLUMNS = ("kind", "seed", "esn0_db", "b", "n", "attempts", "success", "undetected",
               "eta", "frames", "half_width", "failure_rate", "capacity")


def write_csv(fh, points, traces, seed: int, b: int) -> None:
    """One ``session`` row per trace, then one ``summary`` row per grid point.

    Summary rows carry the mean efficiency in ``eta`` and the undetected-error
    count in ``undetected``; per-session columns are left empty.
    """
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for pt, tr in zip(points, traces):
        for t in tr:
            w.writerow(["session", seed, pt.esn0_db, b, t.n, t.attempts, int(t.success),
                        int(t.undetected), repr(t.eta), "", "", "", ""])
    for pt in points:
        w.writerow(["summary", seed, pt.esn0_db, b, "", "", "", pt.undetected, repr(pt.mean_eta),
                    pt.frames, repr(pt.half_width), repr(pt.failure_rate), repr(pt.capacity)])
