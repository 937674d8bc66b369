"""Greedy per-subinterval design of the q-profile.

``q_19`` is chosen first on the prefix of length ``n_19``, then ``q_18`` with
``q_19`` fixed on ``n_18``, and so on down to ``q_1``. Each choice is a
golden-section search over a simulated BER.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from . import rng as rngmod
from .channel import constellation, constrained_capacity, ebn0_to_sigma2
from .construction import CodeSpec, ProgressiveBuilder
from .profile import QProfile
from .rates import NUM_SUBINTERVALS, boundary
from .simulation import run_frame, wilson_interval

log = logging.getLogger(__name__)

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass
class SearchStep:
    a: float
    b: float
    c: float
    d: float
    fc: object
    fd: object


@dataclass
class SearchResult:
    x: float
    evaluations: int
    exhausted: bool
    steps: list[SearchStep] = field(default_factory=list)


def golden_search(f, lo: float, hi: float, tol: float, max_evals: int | None = None) -> SearchResult:
    """Minimize ``f`` on ``[lo, hi]`` by golden-section search.

    Iterates until the bracket is narrower than ``tol`` and returns its
    midpoint. ``f`` may return any orderable value (tuples compare
    lexicographically). With fewer than two evaluations allowed the initial
    midpoint is returned and ``exhausted`` is set.
    """
    if not lo < hi:
        raise ValueError("bracket must satisfy lo < hi")
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    a, b = float(lo), float(hi)
    res = SearchResult((a + b) / 2, 0, False)
    if b - a < tol:
        return res
    if max_evals is not None and max_evals < 2:
        res.exhausted = True
        return res
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    evals = 2
    res.steps.append(SearchStep(a, b, c, d, fc, fd))
    while b - a >= tol:
        if max_evals is not None and evals >= max_evals:
            res.exhausted = True
            break
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
        evals += 1
        res.steps.append(SearchStep(a, b, c, d, fc, fd))
    res.x = (a + b) / 2
    res.evaluations = evals
    return res


def shannon_limit_ebn0_db(rate: float) -> float:
    """Eb/N0 (dB) at which BPSK-constrained capacity equals ``rate``."""
    bpsk = constellation("bpsk")
    esn0 = brentq(lambda s: constrained_capacity(bpsk, 1.0 / (2.0 * 10 ** (s / 10))) - rate, -30.0, 30.0)
    return esn0 - 10 * math.log10(rate)


@dataclass(frozen=True)
class ObjectiveConfig:
    """Settings for the simulated design objective.

    ``target_ebn0_db`` maps ``ell`` to an operating point; missing entries
    default to the BPSK limit of the prefix rate plus ``margin_db``. The
    bracket and tolerance default to ``(1/(10k), 0.2)`` and ``0.1/k``.
    """

    frames: int = 20
    margin_db: float = 1.0
    target_ebn0_db: dict | None = None
    bracket: tuple[float, float] | None = None
    tolerance: float | None = None
    max_evals: int | None = None
    max_iter: int = 50
    seed: int = 0

    def __post_init__(self):
        if self.frames < 1:
            raise ValueError("frames must be at least 1")
        if self.bracket is not None and not 0 < self.bracket[0] < self.bracket[1] <= 0.5:
            raise ValueError("bracket must satisfy 0 < lo < hi <= 0.5")

    def bracket_for(self, k: int) -> tuple[float, float]:
        return self.bracket if self.bracket is not None else (1.0 / (10 * k), 0.2)

    def tolerance_for(self, k: int) -> float:
        return self.tolerance if self.tolerance is not None else 0.1 / k

    def target(self, k: int, ell: int) -> float:
        if self.target_ebn0_db and ell in self.target_ebn0_db:
            return float(self.target_ebn0_db[ell])
        return shannon_limit_ebn0_db(k / boundary(k, ell)) + self.margin_db


@dataclass(frozen=True, order=True)
class CandidateScore:
    """Ordered by BER, then by mean decoder iterations as a tie-break."""

    ber: float
    mean_iterations: float
    half_width: float = field(compare=False)
    q: float = field(compare=False)


def evaluate_candidate(builder: ProgressiveBuilder, ell: int, q: float, cfg: ObjectiveConfig) -> CandidateScore:
    """Simulated BER of the length-``n_ell`` prefix with ``q`` in block ``ell``.

    ``builder`` holds the committed blocks ``19..ell+1`` and is left unchanged.
    Frames use streams ``(OPTIMIZER, ell, f)``, shared by every candidate.
    """
    lo, hi = cfg.bracket_for(builder.spec.k)
    if not lo <= q <= hi:
        raise ValueError(f"candidate {q} outside bracket [{lo}, {hi}]")
    block, _, _ = builder.make_block(ell, q)
    H = builder.matrix(block)
    bpsk = constellation("bpsk")
    sigma2 = ebn0_to_sigma2(cfg.target(H.k, ell), H.rate, 1)
    errors, iters = 0, 0
    for f in range(cfg.frames):
        e, it = run_frame(H, bpsk, sigma2, cfg.max_iter,
                          rngmod.stream(cfg.seed, rngmod.OPTIMIZER, ell, f))
        errors += e
        iters += it
    bits = cfg.frames * H.k
    lo_ci, hi_ci = wilson_interval(errors, bits)
    return CandidateScore(errors / bits, iters / cfg.frames, (hi_ci - lo_ci) / 2, q)


@dataclass
class DesignResult:
    profile: QProfile
    searches: dict[int, SearchResult]
    exhausted: bool


def greedy_design(k: int, cfg: ObjectiveConfig, variant: str = "improved") -> DesignResult:
    """Choose ``q_19, q_18, ..., q_1`` one at a time."""
    spec = CodeSpec(k, variant, cfg.seed)
    builder = ProgressiveBuilder(spec)
    lo, hi = cfg.bracket_for(k)
    q = [0.0] * NUM_SUBINTERVALS
    searches = {}
    exhausted = False
    for ell in range(NUM_SUBINTERVALS, 0, -1):
        res = golden_search(lambda x, ell=ell: evaluate_candidate(builder, ell, x, cfg),
                            lo, hi, cfg.tolerance_for(k), cfg.max_evals)
        if res.exhausted:
            log.warning("evaluation budget exhausted for ell=%d; using %.6g", ell, res.x)
            exhausted = True
        q[ell - 1] = res.x
        searches[ell] = res
        builder.add_block(res.x)
        log.info("ell=%d q=%.6g (%d evaluations)", ell, res.x, res.evaluations)
    return DesignResult(QProfile(k, tuple(q), "custom"), searches, exhausted)


def write_trace_csv(fh, result: DesignResult) -> None:
    import csv

    w = csv.writer(fh, lineterminator="\n")
    w.writerow(("ell", "step", "a", "b", "c", "d", "ber_c", "ber_d", "iters_c", "iters_d"))
    for ell in sorted(result.searches, reverse=True):
        for i, s in enumerate(result.searches[ell].steps):
            w.writerow((ell, i, repr(s.a), repr(s.b), repr(s.c), repr(s.d),
                        repr(s.fc.ber), repr(s.fd.ber), repr(s.fc.mean_iterations),
                        repr(s.fd.mean_iterations)))
