"""MacKay alist reader/writer for :class:`SparseParityCheck`.

Layout::

    n m
    max_col_degree max_row_degree
    <n column degrees>
    <m row degrees>
    <n lines: 1-based row indices per column, zero-padded>
    <m lines: 1-based column indices per row, zero-padded>
"""

from __future__ import annotations

import io
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from .construction import SparseParityCheck


def _line(values) -> str:
    return " ".join(str(int(x)) for x in values)


def dumps(H: SparseParityCheck) -> str:
    indptr, indices = H.edges
    m, n = H.r, H.n
    csr = sp.csr_matrix((np.ones(indices.size, dtype=np.uint8), indices, indptr), shape=(m, n))
    csc = csr.tocsc()
    csc.sort_indices()
    col_deg = np.diff(csc.indptr)
    row_deg = np.diff(indptr)
    max_c = int(col_deg.max()) if n else 0
    max_r = int(row_deg.max()) if m else 0
    out = io.StringIO()
    out.write(f"{n} {m}\n{max_c} {max_r}\n")
    out.write(_line(col_deg) + "\n")
    out.write(_line(row_deg) + "\n")
    for j in range(n):
        rows = csc.indices[csc.indptr[j]:csc.indptr[j + 1]] + 1
        out.write(_line(np.pad(rows, (0, max_c - rows.size))) + "\n")
    for t in range(m):
        cols = indices[indptr[t]:indptr[t + 1]] + 1
        out.write(_line(np.pad(cols, (0, max_r - cols.size))) + "\n")
    return out.getvalue()


def loads(text: str, variant: str | None = None) -> SparseParityCheck:
    """Parse alist text; ``k = n - m`` and the last ``m`` columns become ``H_w``."""
    body = text[:-1] if text.endswith("\n") else text
    lines = [ln.split() for ln in body.split("\n")]
    n, m = (int(x) for x in lines[0])
    max_c, max_r = (int(x) for x in lines[1])
    if n <= m:
        raise ValueError(f"alist declares {n} columns and {m} rows; need n > m")
    col_deg = np.array(lines[2], dtype=np.int64)
    row_deg = np.array(lines[3], dtype=np.int64) if m else np.empty(0, np.int64)
    if col_deg.size != n or row_deg.size != m:
        raise ValueError("degree lists do not match the declared dimensions")
    col_start = 4
    if len(lines) < col_start + n + m:
        raise ValueError("alist is truncated")
    rows = np.empty(int(row_deg.sum()), dtype=np.int64)
    cols = np.empty_like(rows)
    pos = 0
    for t in range(m):
        entries = [int(x) for x in lines[col_start + n + t]]
        nz = [x for x in entries if x]
        if len(nz) != row_deg[t] or len(entries) != max_r:
            raise ValueError(f"row {t + 1} disagrees with its declared degree")
        rows[pos:pos + len(nz)] = t
        cols[pos:pos + len(nz)] = np.array(nz) - 1
        pos += len(nz)
    # cross-check the column section
    H = sp.csr_matrix((np.ones(rows.size, dtype=np.uint8), (rows, cols)), shape=(m, n))
    csc = H.tocsc()
    csc.sort_indices()
    for j in range(n):
        entries = [int(x) for x in lines[col_start + j]]
        nz = [x - 1 for x in entries if x]
        if len(entries) != max_c or not np.array_equal(nz, csc.indices[csc.indptr[j]:csc.indptr[j + 1]]):
            raise ValueError(f"column {j + 1} disagrees with the row lists")
    k = n - m
    hv = H[:, :k].tocsr()
    hw = H[:, k:].tocsr()
    hv.sort_indices()
    hw.sort_indices()
    return SparseParityCheck(k, hv.indptr.astype(np.int64), hv.indices.astype(np.int64),
                             hw.indptr.astype(np.int64), hw.indices.astype(np.int64), variant)


def write(H: SparseParityCheck, path) -> None:
    Path(path).write_text(dumps(H))


def read(path, variant: str | None = None) -> SparseParityCheck:
    return loads(Path(path).read_text(), variant)
