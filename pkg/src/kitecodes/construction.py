"""Parity-check matrices for original and improved Kite codes.

The mother code has ``r = n_1 - k`` parity rows. ``H = (H_v, H_w)`` where
``H_v`` (``r x k``) is filled block by block, one block of rows per rate
subinterval from ``ell = 19`` down to ``ell = 1``, and ``H_w`` (``r x r``) is
unit lower triangular. Any prefix of length ``n`` is obtained by keeping the
first ``n - k`` rows.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.sparse as sp
from numba import njit

from . import rng as rngmod
from .profile import QProfile
from .rates import NUM_SUBINTERVALS, block_of_row, block_rows, boundaries, boundary

VARIANTS = ("original", "improved")


@dataclass(frozen=True)
class CodeSpec:
    k: int
    variant: str = "improved"
    seed: int = 0

    def __post_init__(self):
        if self.k < 20:
            raise ValueError(f"k must be at least 20, got {self.k}")
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}, got {self.variant!r}")
        if not 0 <= self.seed < 1 << 64:
            raise ValueError("seed must be an unsigned 64-bit integer")

    @property
    def boundaries(self) -> list[int]:
        """``[n_1, ..., n_20]``."""
        return boundaries(self.k)

    @property
    def n1(self) -> int:
        return 20 * self.k

    def to_dict(self) -> dict:
        return {"k": self.k, "variant": self.variant, "seed": self.seed,
                "boundaries": self.boundaries}

    @classmethod
    def from_dict(cls, d: dict) -> "CodeSpec":
        spec = cls(int(d["k"]), d.get("variant", "improved"), int(d.get("seed", 0)))
        if "boundaries" in d and list(d["boundaries"]) != spec.boundaries:
            raise ValueError("stored boundaries disagree with k")
        return spec

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "CodeSpec":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True, eq=False)
class SparseParityCheck:
    """``H = (H_v, H_w)`` stored as two CSR index structures.

    Row ``t`` of ``H_v`` has sorted column indices
    ``hv_indices[hv_indptr[t]:hv_indptr[t+1]]`` (0..k-1); likewise ``H_w``
    with parity-column indices 0..r-1. In the full matrix, parity column
    ``s`` sits at position ``k + s``.
    """

    k: int
    hv_indptr: np.ndarray
    hv_indices: np.ndarray
    hw_indptr: np.ndarray
    hw_indices: np.ndarray
    variant: str | None = None

    def __post_init__(self):
        if self.hv_indptr.size != self.hw_indptr.size:
            raise ValueError("H_v and H_w must have the same number of rows")
        for a in (self.hv_indptr, self.hv_indices, self.hw_indptr, self.hw_indices):
            a.setflags(write=False)

    @property
    def r(self) -> int:
        return self.hv_indptr.size - 1

    @property
    def n(self) -> int:
        return self.k + self.r

    @property
    def rate(self) -> float:
        return self.k / self.n

    @property
    def num_edges(self) -> int:
        return int(self.hv_indptr[-1] + self.hw_indptr[-1])

    def hv_row(self, t: int) -> np.ndarray:
        return self.hv_indices[self.hv_indptr[t]:self.hv_indptr[t + 1]]

    def hw_row(self, t: int) -> np.ndarray:
        return self.hw_indices[self.hw_indptr[t]:self.hw_indptr[t + 1]]

    def hv_row_weights(self) -> np.ndarray:
        return np.diff(self.hv_indptr)

    def hv_column_weights(self) -> np.ndarray:
        return np.bincount(self.hv_indices, minlength=self.k)

    def hw_column_weights(self) -> np.ndarray:
        return np.bincount(self.hw_indices, minlength=self.r)

    @cached_property
    def edges(self) -> tuple[np.ndarray, np.ndarray]:
        """CSR ``(indptr, indices)`` of the full ``r x n`` matrix, int64."""
        indptr = (self.hv_indptr + self.hw_indptr).astype(np.int64)
        indices = np.empty(indptr[-1], dtype=np.int64)
        _merge_rows(self.hv_indptr, self.hv_indices, self.hw_indptr, self.hw_indices,
                    self.k, indices)
        return indptr, indices

    def csr(self) -> sp.csr_matrix:
        indptr, indices = self.edges
        data = np.ones(indices.size, dtype=np.uint8)
        return sp.csr_matrix((data, indices, indptr), shape=(self.r, self.n))

    def to_dense(self) -> np.ndarray:
        return self.csr().toarray()

    def prefix(self, n: int) -> "SparseParityCheck":
        """Parity-check matrix of the length-``n`` prefix code (first ``n-k`` rows)."""
        if not self.k <= n <= self.n:
            raise ValueError(f"prefix length must lie in [{self.k}, {self.n}], got {n}")
        m = n - self.k
        return SparseParityCheck(
            self.k,
            self.hv_indptr[: m + 1].copy(),
            self.hv_indices[: self.hv_indptr[m]].copy(),
            self.hw_indptr[: m + 1].copy(),
            self.hw_indices[: self.hw_indptr[m]].copy(),
            self.variant,
        )

    def digest(self) -> str:
        """SHA-256 over the index arrays; identical matrices give identical digests."""
        h = hashlib.sha256()
        h.update(np.array([self.k, self.r], dtype="<i8").tobytes())
        for a in (self.hv_indptr, self.hv_indices, self.hw_indptr, self.hw_indices):
            h.update(np.ascontiguousarray(a, dtype="<i8").tobytes())
        return h.hexdigest()

    def same_as(self, other: "SparseParityCheck") -> bool:
        return (
            self.k == other.k
            and np.array_equal(self.hv_indptr, other.hv_indptr)
            and np.array_equal(self.hv_indices, other.hv_indices)
            and np.array_equal(self.hw_indptr, other.hw_indptr)
            and np.array_equal(self.hw_indices, other.hw_indices)
        )

    @classmethod
    def from_dense(cls, H: np.ndarray, k: int, variant: str | None = None) -> "SparseParityCheck":
        H = np.asarray(H)
        r = H.shape[0]
        if H.shape[1] != k + r:
            raise ValueError(f"expected {k + r} columns, got {H.shape[1]}")
        hv = sp.csr_matrix(H[:, :k].astype(np.uint8))
        hw = sp.csr_matrix(H[:, k:].astype(np.uint8))
        hv.sort_indices()
        hw.sort_indices()
        return cls(k, hv.indptr.astype(np.int64), hv.indices.astype(np.int64),
                   hw.indptr.astype(np.int64), hw.indices.astype(np.int64), variant)


@njit(cache=True)
def _merge_rows(hv_ptr, hv_idx, hw_ptr, hw_idx, k, out):
    pos = 0
    for t in range(hv_ptr.size - 1):
        for e in range(hv_ptr[t], hv_ptr[t + 1]):
            out[pos] = hv_idx[e]
            pos += 1
        for e in range(hw_ptr[t], hw_ptr[t + 1]):
            out[pos] = k + hw_idx[e]
            pos += 1


# ---------------------------------------------------------------------------
# H_v blocks
# ---------------------------------------------------------------------------

def _bernoulli_positions(total: int, q: float, rng: np.random.Generator) -> np.ndarray:
    """Sorted flat positions of ones among ``total`` i.i.d. Bernoulli(q) trials."""
    if total == 0:
        return np.empty(0, dtype=np.int64)
    mean = total * q
    batch = int(mean + 6.0 * math.sqrt(mean) + 16)
    chunks = []
    last = -1
    while True:
        pos = last + np.cumsum(rng.geometric(q, size=batch))
        keep = pos[pos < total]
        chunks.append(keep)
        if keep.size < batch:
            break
        last = int(pos[-1])
    return np.concatenate(chunks)


def generate_hv_block(k: int, rows: int, q: float, rng: np.random.Generator) -> sp.csr_matrix:
    """A ``rows x k`` block with i.i.d. Bernoulli(``q``) entries, as sorted CSR."""
    if not 0.0 < q < 1.0:
        raise ValueError(f"q must lie strictly between 0 and 1, got {q}")
    if rows < 0 or k < 1:
        raise ValueError("block dimensions must be non-negative")
    pos = _bernoulli_positions(rows * k, q, rng)
    row_of = pos // k
    indptr = np.zeros(rows + 1, dtype=np.int64)
    np.cumsum(np.bincount(row_of, minlength=rows), out=indptr[1:])
    data = np.ones(pos.size, dtype=np.uint8)
    return sp.csr_matrix((data, pos % k, indptr), shape=(rows, k))


@njit(cache=True, inline="always")
def _better(vals, sign, a, b):
    # larger sign*value wins; ties go to the lower index; -1 marks padding
    if a < 0:
        return b
    if b < 0:
        return a
    va = sign * vals[a]
    vb = sign * vals[b]
    if va > vb:
        return a
    if vb > va:
        return b
    return a if a < b else b


@njit(cache=True)
def _tree_build(vals, sign):
    size = 1
    while size < vals.size:
        size *= 2
    tree = np.full(2 * size, -1, dtype=np.int64)
    for i in range(vals.size):
        tree[size + i] = i
    for p in range(size - 1, 0, -1):
        tree[p] = _better(vals, sign, tree[2 * p], tree[2 * p + 1])
    return tree


@njit(cache=True)
def _tree_update(tree, vals, sign, i):
    p = (tree.size // 2 + i) // 2
    while p >= 1:
        tree[p] = _better(vals, sign, tree[2 * p], tree[2 * p + 1])
        p //= 2


@njit(cache=True)
def _concentrate(cols, wt, colw):
    """Row-weight concentration on a padded row-list block; returns swap count.

    ``cols[t, :wt[t]]`` are the column indices of ones in block row ``t``;
    ``colw`` holds column weights over every row built so far, block included.
    """
    rows = wt.size
    if rows == 0:
        return 0
    wtf = wt.astype(np.float64)
    cwf = colw.astype(np.float64)
    big = float(rows + 1) * 4.0 + cwf.max() + 1.0
    rmax = _tree_build(wtf, 1.0)
    rmin = _tree_build(wtf, -1.0)
    cmin = _tree_build(cwf, -1.0)
    swaps = 0
    while True:
        t1 = rmax[1]
        t0 = rmin[1]
        if wt[t1] - wt[t0] <= 1:
            break
        # j1: a one in row t1 whose column is heaviest (lowest index on ties)
        j1 = -1
        p1 = -1
        for p in range(wt[t1]):
            j = cols[t1, p]
            if j1 < 0 or colw[j] > colw[j1] or (colw[j] == colw[j1] and j < j1):
                j1 = j
                p1 = p
        # j0: a zero in row t0 whose column is lightest; mask row t0's ones
        for p in range(wt[t0]):
            j = cols[t0, p]
            cwf[j] += big
            _tree_update(cmin, cwf, -1.0, j)
        j0 = cmin[1]
        for p in range(wt[t0]):
            j = cols[t0, p]
            cwf[j] -= big
            _tree_update(cmin, cwf, -1.0, j)
        # move the one
        cols[t1, p1] = cols[t1, wt[t1] - 1]
        wt[t1] -= 1
        cols[t0, wt[t0]] = j0
        wt[t0] += 1
        colw[j1] -= 1
        colw[j0] += 1
        wtf[t1] = wt[t1]
        wtf[t0] = wt[t0]
        cwf[j1] = colw[j1]
        cwf[j0] = colw[j0]
        _tree_update(rmax, wtf, 1.0, t1)
        _tree_update(rmax, wtf, 1.0, t0)
        _tree_update(rmin, wtf, -1.0, t1)
        _tree_update(rmin, wtf, -1.0, t0)
        _tree_update(cmin, cwf, -1.0, j1)
        _tree_update(cmin, cwf, -1.0, j0)
        swaps += 1
    return swaps


def row_weight_concentrate(block: sp.csr_matrix, column_weights: np.ndarray):
    """Swap ones inside ``block`` until its row weights differ by at most one.

    Parameters
    ----------
    block : csr_matrix
        The newly generated rows of H_v for one subinterval.
    column_weights : ndarray
        Column weights of every H_v row built so far, *including* ``block``.

    Returns
    -------
    block : csr_matrix
        Modified block with sorted indices.
    column_weights : ndarray
        Updated column weights (a new array).
    swaps : int
        Number of swaps performed.

    Ties among rows or columns are broken toward the lowest index.
    """
    rows, k = block.shape
    colw = np.array(column_weights, dtype=np.int64, copy=True)
    if colw.size != k:
        raise ValueError("column_weights length must equal the block width")
    if rows == 0:
        return block.copy(), colw, 0
    wt = np.diff(block.indptr).astype(np.int64)
    cap = max(int(wt.max()), 1)
    cols = np.zeros((rows, cap), dtype=np.int64)
    mask = np.arange(cap)[None, :] < wt[:, None]
    cols[mask] = block.indices
    swaps = _concentrate(cols, wt, colw)
    mask = np.arange(cap)[None, :] < wt[:, None]
    indptr = np.zeros(rows + 1, dtype=np.int64)
    np.cumsum(wt, out=indptr[1:])
    out = sp.csr_matrix((np.ones(indptr[-1], dtype=np.uint8), cols[mask], indptr),
                        shape=(rows, k))
    out.sort_indices()
    return out, colw, int(swaps)


# ---------------------------------------------------------------------------
# H_w
# ---------------------------------------------------------------------------

def accumulator_targets(k: int, r: int, variant: str, rng: np.random.Generator | None = None):
    """Row of the off-diagonal one in each H_w column ``t = 0..r-2``.

    For the original code this is the dual-diagonal ``t + 1``. For the improved
    code it is uniform on ``[t + 1, T]`` where ``T`` is the last row of the
    block holding row ``t + 1``, so the extra one never leaves that block.
    """
    if r < 1:
        return np.empty(0, dtype=np.int64)
    t = np.arange(r - 1, dtype=np.int64)
    if variant == "original":
        return t + 1
    if rng is None:
        raise ValueError("improved accumulator needs a random generator")
    ends = np.empty(r - 1, dtype=np.int64)
    for ell in range(1, NUM_SUBINTERVALS + 1):
        lo, hi = block_rows(k, ell)
        # columns t whose row t+1 lies in [lo, hi)
        a, b = max(lo - 1, 0), min(hi - 1, r - 1)
        if a < b:
            ends[a:b] = min(hi - 1, r - 1)
    return rng.integers(t + 1, ends + 1)


def _hw_from_targets(r: int, targets: np.ndarray):
    rows = np.concatenate([np.arange(r, dtype=np.int64), targets])
    cols = np.concatenate([np.arange(r, dtype=np.int64), np.arange(targets.size, dtype=np.int64)])
    order = np.lexsort((cols, rows))
    indptr = np.zeros(r + 1, dtype=np.int64)
    np.cumsum(np.bincount(rows, minlength=r), out=indptr[1:])
    return indptr, cols[order]


def accumulator_randomize(r: int, spec: CodeSpec, rng: np.random.Generator) -> sp.csr_matrix:
    """Randomized accumulator ``H_w`` (``r x r``, unit lower triangular)."""
    if r < 1 or spec.k + r > spec.n1:
        raise ValueError(f"parity count must lie in [1, {spec.n1 - spec.k}], got {r}")
    indptr, indices = _hw_from_targets(r, accumulator_targets(spec.k, r, "improved", rng))
    return sp.csr_matrix((np.ones(indices.size, dtype=np.uint8), indices, indptr), shape=(r, r))


# ---------------------------------------------------------------------------
# Progressive construction
# ---------------------------------------------------------------------------

class ProgressiveBuilder:
    """Adds H_v blocks for ``ell = 19, 18, ...`` and assembles prefix matrices.

    Block ``ell`` draws from its own stream ``(CONSTRUCTION, ell)`` and H_w
    from ``(CONSTRUCTION, 0)``, so halting after any block reproduces the
    leading rows of the full mother code bit for bit.
    """

    def __init__(self, spec: CodeSpec):
        self.spec = spec
        self.blocks: list[sp.csr_matrix] = []
        self.column_weights = np.zeros(spec.k, dtype=np.int64)
        self.next_ell = NUM_SUBINTERVALS
        self.swaps: dict[int, int] = {}

    def make_block(self, ell: int, q: float):
        """Build block ``ell`` on top of the committed rows without committing it."""
        if ell != self.next_ell:
            raise ValueError(f"next block is {self.next_ell}, not {ell}")
        k = self.spec.k
        lo, hi = block_rows(k, ell)
        block = generate_hv_block(k, hi - lo, q, rngmod.stream(self.spec.seed, rngmod.CONSTRUCTION, ell))
        colw = self.column_weights + np.bincount(block.indices, minlength=k)
        swaps = 0
        if self.spec.variant == "improved":
            block, colw, swaps = row_weight_concentrate(block, colw)
        return block, colw, swaps

    def add_block(self, q: float, trial=None) -> None:
        ell = self.next_ell
        block, colw, swaps = trial if trial is not None else self.make_block(ell, q)
        self.blocks.append(block)
        self.column_weights = colw
        self.swaps[ell] = swaps
        self.next_ell -= 1

    def matrix(self, extra_block: sp.csr_matrix | None = None) -> SparseParityCheck:
        """Parity-check matrix of every committed block (plus an optional trial block)."""
        blocks = self.blocks + ([extra_block] if extra_block is not None else [])
        k = self.spec.k
        if blocks:
            hv = sp.vstack(blocks, format="csr")
            hv.sort_indices()
            hv_indptr, hv_indices = hv.indptr.astype(np.int64), hv.indices.astype(np.int64)
        else:
            hv_indptr, hv_indices = np.zeros(1, np.int64), np.empty(0, np.int64)
        r = hv_indptr.size - 1
        if self.spec.variant == "improved":
            g = rngmod.stream(self.spec.seed, rngmod.CONSTRUCTION, 0)
            targets = accumulator_targets(k, r, "improved", g)
        else:
            targets = accumulator_targets(k, r, "original")
        hw_indptr, hw_indices = _hw_from_targets(r, targets)
        return SparseParityCheck(k, hv_indptr, hv_indices, hw_indptr, hw_indices, self.spec.variant)


def build_mother_code(spec: CodeSpec, profile: QProfile, halt_ell: int = 1) -> SparseParityCheck:
    """Construct ``H`` for blocks ``19..halt_ell``; ``halt_ell = 1`` gives the mother code.

    Improved codes get row-weight concentration on every block and a randomized
    accumulator; original codes keep the raw Bernoulli rows and the
    dual-diagonal accumulator.
    """
    if profile.k != spec.k:
        raise ValueError(f"profile is for k={profile.k}, spec has k={spec.k}")
    if not 1 <= halt_ell <= NUM_SUBINTERVALS:
        raise ValueError("halt_ell must lie in [1, 19]")
    b = ProgressiveBuilder(spec)
    for ell in range(NUM_SUBINTERVALS, halt_ell - 1, -1):
        b.add_block(profile[ell])
    H = b.matrix()
    assert H.n == boundary(spec.k, halt_ell)
    return H


def prefix(H: SparseParityCheck, n: int) -> SparseParityCheck:
    return H.prefix(n)


def subinterval_rows(k: int, r: int) -> np.ndarray:
    """Block index ``ell`` of each parity row ``0..r-1``."""
    return np.array([block_of_row(k, t) for t in range(r)], dtype=np.int64)
