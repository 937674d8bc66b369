import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from kitecodes import rng as rngmod
from kitecodes.construction import (
    CodeSpec,
    ProgressiveBuilder,
    accumulator_randomize,
    accumulator_targets,
    build_mother_code,
    generate_hv_block,
    row_weight_concentrate,
    SparseParityCheck,
)
from kitecodes.profile import formula_profile, q_from_table
from kitecodes.rates import block_of_row, block_rows, boundaries


def concentrate_reference(prior, block):
    """Row-weight concentration written out step by step on dense arrays."""
    prior = np.asarray(prior, dtype=np.int64).reshape(-1, block.shape[1])
    B = np.array(block, dtype=np.int64)
    while True:
        w = B.sum(axis=1)
        t1 = int(np.argmax(w))  # argmax/argmin return the lowest index on ties
        t0 = int(np.argmin(w))
        if w[t1] - w[t0] <= 1:
            return B
        colw = prior.sum(axis=0) + B.sum(axis=0)
        ones = np.flatnonzero(B[t1] == 1)
        j1 = int(ones[np.argmax(colw[ones])])
        zeros = np.flatnonzero(B[t0] == 0)
        j0 = int(zeros[np.argmin(colw[zeros])])
        B[t1, j1], B[t0, j0] = B[t0, j0], B[t1, j1]


def _colw(prior, block):
    return np.asarray(prior).sum(axis=0) + np.asarray(block).sum(axis=0)


def test_concentrate_hand_trace():
    block = np.array([[0, 0, 0], [1, 1, 1]])
    out, colw, swaps = row_weight_concentrate(sp.csr_matrix(block), block.sum(axis=0))
    assert out.toarray().tolist() == [[1, 0, 0], [0, 1, 1]]
    assert swaps == 1
    assert colw.tolist() == [1, 1, 1]


def test_concentrate_equal_weights_unchanged():
    block = np.array([[1, 0, 1, 0], [0, 1, 0, 1], [1, 1, 0, 0]])
    out, _, swaps = row_weight_concentrate(sp.csr_matrix(block), block.sum(axis=0))
    assert swaps == 0
    assert np.array_equal(out.toarray(), block)


def test_concentrate_empty_block():
    out, colw, swaps = row_weight_concentrate(sp.csr_matrix((0, 5), dtype=np.uint8), np.arange(5))
    assert out.shape == (0, 5) and swaps == 0 and colw.tolist() == list(range(5))


@settings(max_examples=150, deadline=None)
@given(
    st.integers(1, 8), st.integers(1, 10), st.integers(0, 4),
    st.floats(0.05, 0.9), st.integers(0, 2**32 - 1),
)
def test_concentrate_matches_reference(rows, k, prior_rows, density, seed):
    g = np.random.default_rng(seed)
    prior = (g.random((prior_rows, k)) < 0.3).astype(np.int64)
    block = (g.random((rows, k)) < density).astype(np.int64)
    out, colw, _ = row_weight_concentrate(sp.csr_matrix(block), _colw(prior, block))
    expect = concentrate_reference(prior, block)
    got = out.toarray()
    assert np.array_equal(got, expect)
    w = got.sum(axis=1)
    assert w.max() - w.min() <= 1
    assert got.sum() == block.sum()
    assert np.array_equal(colw, _colw(prior, got))


def test_generate_block_degenerate_probabilities(rng):
    assert generate_hv_block(1890, 50, 1e-12, rng).nnz == 0
    assert generate_hv_block(4, 1, 1 - 1e-12, rng).toarray().tolist() == [[1, 1, 1, 1]]


def test_generate_block_density(rng):
    rows, k, q = 1000, 1890, 0.0017
    block = generate_hv_block(k, rows, q, rng)
    sigma = np.sqrt(q * (1 - q) / (rows * k))
    assert abs(block.nnz / (rows * k) - q) < 3 * sigma
    assert block.has_sorted_indices


def test_generate_block_rejects_bad_q(rng):
    for q in (0.0, 1.0, -0.1):
        with pytest.raises(ValueError):
            generate_hv_block(10, 10, q, rng)


def test_generate_block_is_seeded():
    a = generate_hv_block(300, 40, 0.02, np.random.default_rng(3))
    b = generate_hv_block(300, 40, 0.02, np.random.default_rng(3))
    assert (a != b).nnz == 0


def _hw_dense(H):
    return H.to_dense()[:, H.k:]


def test_accumulator_first_column_range_k1890():
    spec = CodeSpec(1890, "improved", 0)
    seen = set()
    for seed in range(3000):
        t = accumulator_targets(1890, 200, "improved", rngmod.stream(seed, 9))
        seen.add(int(t[0]))
    assert min(seen) == 1 and max(seen) == 98
    assert boundaries(1890)[18] - 1890 - 1 == 98  # last row of block 19
    assert spec.k == 1890


def test_accumulator_last_column_forced():
    k = 60
    r = 20 * k - k
    t = accumulator_targets(k, r, "improved", rngmod.stream(1, 9))
    assert t[r - 2] == r - 1


def test_accumulator_targets_stay_in_block_of_next_row():
    k = 97
    r = 19 * k
    targets = accumulator_targets(k, r, "improved", rngmod.stream(4, 9))
    for t, i1 in enumerate(targets):
        assert t + 1 <= i1
        assert block_of_row(k, int(i1)) == block_of_row(k, t + 1)


def test_accumulator_uniform():
    # column 0 of k=1890: uniform on [1, 98]; chi-square against the flat law
    from scipy.stats import chisquare

    draws = np.array([accumulator_targets(1890, 120, "improved", rngmod.stream(s, 9))[0]
                      for s in range(4900)])
    counts = np.bincount(draws, minlength=99)[1:]
    assert chisquare(counts).pvalue > 1e-3


def test_accumulator_randomize_matrix():
    spec = CodeSpec(40, "improved", 2)
    Hw = accumulator_randomize(spec.n1 - spec.k, spec, rngmod.stream(2, 0)).toarray()
    r = Hw.shape[0]
    assert np.array_equal(np.diag(Hw), np.ones(r))
    assert not np.triu(Hw, 1).any()
    assert (Hw.sum(axis=0)[:-1] == 2).all() and Hw.sum(axis=0)[-1] == 1
    with pytest.raises(ValueError):
        accumulator_randomize(spec.n1, spec, rngmod.stream(2, 0))


@pytest.mark.parametrize("k", [20, 57, 189])
def test_improved_structure(k):
    H = build_mother_code(CodeSpec(k, "improved", 3), formula_profile(k))
    assert H.r == 19 * k
    Hw = _hw_dense(H)
    assert np.array_equal(np.diag(Hw), np.ones(H.r))
    assert not np.triu(Hw, 1).any()
    cw = Hw.sum(axis=0)
    assert (cw[:-1] == 2).all() and cw[-1] == 1
    w = H.hv_row_weights()
    for ell in range(1, 20):
        lo, hi = block_rows(k, ell)
        assert w[lo:hi].max() - w[lo:hi].min() <= 1
        # every boundary prefix keeps column weight 2 except its last column
        m = hi
        pw = Hw[:m, :m].sum(axis=0)
        assert (pw[:-1] == 2).all() and pw[-1] == 1


def test_original_is_dual_diagonal(code1890_original):
    H = code1890_original
    r = H.r
    for t in (0, 1, 500, r - 1):
        expected = [t] if t == 0 else [t - 1, t]
        assert H.hw_row(t).tolist() == expected
    assert np.array_equal(H.hw_column_weights()[:-1], np.full(r - 1, 2))


def test_mother_code_size(code1890):
    assert code1890.r == 35910 and code1890.n == 37800
    w = code1890.hv_row_weights()
    for ell in range(1, 20):
        lo, hi = block_rows(1890, ell)
        assert w[lo:hi].max() - w[lo:hi].min() <= 1


def test_concentration_conserves_ones():
    spec_i = CodeSpec(189, "improved", 8)
    spec_o = CodeSpec(189, "original", 8)
    p = formula_profile(189)
    hi = build_mother_code(spec_i, p)
    ho = build_mother_code(spec_o, p)
    # both variants draw the same raw blocks; concentration only relocates ones
    for ell in range(1, 20):
        lo, up = block_rows(189, ell)
        assert hi.hv_indptr[up] - hi.hv_indptr[lo] == ho.hv_indptr[up] - ho.hv_indptr[lo]


def test_deterministic():
    a = build_mother_code(CodeSpec(189, "improved", 99), formula_profile(189))
    b = build_mother_code(CodeSpec(189, "improved", 99), formula_profile(189))
    c = build_mother_code(CodeSpec(189, "improved", 100), formula_profile(189))
    assert a.same_as(b) and a.digest() == b.digest()
    assert not a.same_as(c)


@pytest.mark.parametrize("variant", ["improved", "original"])
def test_prefix_matches_halted_construction(variant):
    spec = CodeSpec(150, variant, 21)
    p = formula_profile(150)
    full = build_mother_code(spec, p)
    for ell in (19, 12, 5, 2):
        halted = build_mother_code(spec, p, halt_ell=ell)
        assert full.prefix(boundaries(150)[ell - 1]).same_as(halted)


def test_prefix_examples(code1890):
    H = code1890
    empty = H.prefix(1890)
    assert empty.r == 0 and empty.n == 1890
    assert H.prefix(37800).same_as(H)
    half = H.prefix(3780)
    assert (half.r, half.n) == (1890, 3780)
    assert half.rate == 0.5
    with pytest.raises(ValueError):
        H.prefix(1889)
    with pytest.raises(ValueError):
        H.prefix(37801)


def test_prefix_keeps_lower_triangular(code189):
    P = code189.prefix(500)
    Hw = P.to_dense()[:, P.k:]
    assert np.array_equal(np.diag(Hw), np.ones(P.r)) and not np.triu(Hw, 1).any()


def test_no_duplicate_indices(code189):
    for t in range(code189.r):
        row = code189.hv_row(t)
        assert np.all(np.diff(row) > 0)


def test_builder_order_enforced():
    b = ProgressiveBuilder(CodeSpec(40, "improved", 0))
    with pytest.raises(ValueError):
        b.make_block(18, 0.1)


def test_spec_validation_and_json():
    with pytest.raises(ValueError):
        CodeSpec(19)
    with pytest.raises(ValueError):
        CodeSpec(100, "fancy")
    s = CodeSpec(1890, "original", 2**63)
    assert CodeSpec.from_json(s.to_json()) == s
    assert s.boundaries[0] == 37800
    with pytest.raises(ValueError):
        build_mother_code(CodeSpec(189), q_from_table(1890))


def test_from_dense_round_trip(code189):
    P = code189.prefix(300)
    assert SparseParityCheck.from_dense(P.to_dense(), P.k).same_as(P)
