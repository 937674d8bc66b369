"""Systematic encoding and sum-product decoding for any prefix code.

LLR convention throughout: ``llr = log P(bit=0) / P(bit=1)``, so a positive
value favours bit 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .construction import SparseParityCheck

MESSAGE_CLAMP = 30.0
DEFAULT_MAX_ITER = 50


@dataclass(frozen=True)
class Codeword:
    v: np.ndarray
    w: np.ndarray

    @property
    def n(self) -> int:
        return self.v.size + self.w.size

    @property
    def bits(self) -> np.ndarray:
        return np.concatenate([self.v, self.w])


@dataclass(frozen=True)
class DecodeResult:
    converged: bool
    bits: np.ndarray
    iterations: int

    @property
    def status(self) -> str:
        return "converged" if self.converged else "failure"


@njit(cache=True, nogil=True)
def _encode(hv_ptr, hv_idx, hw_ptr, hw_idx, v, w):
    for t in range(w.size):
        acc = 0
        for e in range(hv_ptr[t], hv_ptr[t + 1]):
            acc ^= v[hv_idx[e]]
        # H_w row t: columns s < t plus the diagonal (always last, rows sorted)
        for e in range(hw_ptr[t], hw_ptr[t + 1] - 1):
            acc ^= w[hw_idx[e]]
        w[t] = acc


def encode(H: SparseParityCheck, v) -> Codeword:
    """Forward substitution through the unit lower-triangular ``H_w``."""
    v = np.asarray(v, dtype=np.uint8)
    if v.shape != (H.k,):
        raise ValueError(f"expected {H.k} information bits, got shape {v.shape}")
    w = np.zeros(H.r, dtype=np.uint8)
    _encode(H.hv_indptr, H.hv_indices, H.hw_indptr, H.hw_indices, v, w)
    return Codeword(v.copy(), w)


@njit(cache=True, nogil=True)
def _syndrome(indptr, indices, c, out):
    for t in range(out.size):
        acc = 0
        for e in range(indptr[t], indptr[t + 1]):
            acc ^= c[indices[e]]
        out[t] = acc


def syndrome(H: SparseParityCheck, c) -> np.ndarray:
    c = np.asarray(c, dtype=np.uint8)
    if c.shape != (H.n,):
        raise ValueError(f"expected {H.n} code bits, got shape {c.shape}")
    out = np.zeros(H.r, dtype=np.uint8)
    indptr, indices = H.edges
    _syndrome(indptr, indices, c, out)
    return out


@njit(cache=True, inline="always")
def _clamp(x, lim):
    if x > lim:
        return lim
    if x < -lim:
        return -lim
    return x


@njit(cache=True, inline="always")
def _boxplus(a, b):
    """Pairwise box-plus, reference form (signed log domain)."""
    aa = abs(a)
    ab = abs(b)
    m = min(aa, ab) + np.log1p(np.exp(-(aa + ab))) - np.log1p(np.exp(-abs(aa - ab)))
    if (a < 0.0) != (b < 0.0):
        return -m
    return m


@njit(cache=True, inline="always")
def _boxplus_mag(ea, eb):
    # box-plus of magnitudes carried as exp(-|L|):
    # exp(-(|a| [+] |b|)) = (ea + eb) / (1 + ea eb)
    return (ea + eb) / (1.0 + ea * eb)


@njit(cache=True, inline="always")
def _minsum_mag(ea, eb):
    return max(ea, eb)


@njit(cache=True, nogil=True)
def _bp_flooding(indptr, indices, llr, max_iter, lim, min_sum, bits):
    m = indptr.size - 1
    n = llr.size
    E = indptr[m]
    maxdeg = 1
    for c in range(m):
        maxdeg = max(maxdeg, indptr[c + 1] - indptr[c])
    ex = np.empty(maxdeg)
    neg = np.empty(maxdeg, dtype=np.bool_)
    fwd = np.empty(maxdeg)
    bwd = np.empty(maxdeg)
    v2c = np.empty(E)
    c2v = np.empty(E)
    total = np.empty(n)
    floor = np.exp(-lim)
    for e in range(E):
        v2c[e] = _clamp(llr[indices[e]], lim)
    for it in range(1, max_iter + 1):
        for c in range(m):
            s = indptr[c]
            d = indptr[c + 1] - s
            if d == 1:
                c2v[s] = lim
                continue
            parity = False
            for i in range(d):
                x = v2c[s + i]
                neg[i] = x < 0.0
                parity ^= neg[i]
                ex[i] = np.exp(-abs(x))
            fwd[0] = ex[0]
            bwd[d - 1] = ex[d - 1]
            for i in range(1, d):
                j = d - 1 - i
                if min_sum:
                    fwd[i] = _minsum_mag(fwd[i - 1], ex[i])
                    bwd[j] = _minsum_mag(ex[j], bwd[j + 1])
                else:
                    fwd[i] = _boxplus_mag(fwd[i - 1], ex[i])
                    bwd[j] = _boxplus_mag(ex[j], bwd[j + 1])
            for i in range(d):
                if i == 0:
                    e_out = bwd[1]
                elif i == d - 1:
                    e_out = fwd[d - 2]
                elif min_sum:
                    e_out = _minsum_mag(fwd[i - 1], bwd[i + 1])
                else:
                    e_out = _boxplus_mag(fwd[i - 1], bwd[i + 1])
                mag = lim if e_out <= floor else -np.log(e_out)
                c2v[s + i] = -mag if parity != neg[i] else mag
        for j in range(n):
            total[j] = llr[j]
        for e in range(E):
            total[indices[e]] += c2v[e]
        # an exactly-zero posterior is an erasure and blocks convergence
        erased = False
        for j in range(n):
            bits[j] = 1 if total[j] < 0.0 else 0
            if total[j] == 0.0:
                erased = True
        ok = not erased
        if ok:
            for c in range(m):
                acc = 0
                for e in range(indptr[c], indptr[c + 1]):
                    acc ^= bits[indices[e]]
                if acc:
                    ok = False
                    break
        if ok:
            return it, True
        for e in range(E):
            v2c[e] = _clamp(total[indices[e]] - c2v[e], lim)
    return max_iter, False


def decode_bp(H: SparseParityCheck, llr, max_iter: int = DEFAULT_MAX_ITER,
              min_sum: bool = False, clamp: float = MESSAGE_CLAMP) -> DecodeResult:
    """Flooding sum-product decoding with exact box-plus check updates.

    Each check node combines its incoming messages pairwise with forward and
    backward box-plus passes. Magnitudes are carried as ``exp(-|L|)``, where
    box-plus is the rational map ``(a + b) / (1 + a b)``; signs are combined
    separately. This is the exact sum-product rule, not an approximation.

    Parameters
    ----------
    H : SparseParityCheck
        Parity-check matrix of the prefix being decoded.
    llr : array_like
        Channel LLRs, one per code bit, positive favouring 0.
    max_iter : int
        Iteration cap; decoding stops early once the hard decision has zero
        syndrome.
    min_sum : bool
        Replace box-plus with the min-sum approximation.
    clamp : float
        Magnitude limit applied to every message.
    """
    llr = np.asarray(llr, dtype=np.float64)
    if llr.shape != (H.n,):
        raise ValueError(f"expected {H.n} LLRs, got shape {llr.shape}")
    if not np.all(np.isfinite(llr)):
        raise ValueError("LLRs must be finite")
    if max_iter < 1:
        raise ValueError("max_iter must be at least 1")
    bits = np.zeros(H.n, dtype=np.uint8)
    indptr, indices = H.edges
    iters, ok = _bp_flooding(indptr, indices, llr, int(max_iter), float(clamp), bool(min_sum), bits)
    return DecodeResult(bool(ok), bits, int(iters))
