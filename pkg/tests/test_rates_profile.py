from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from kitecodes.profile import (
    QProfile,
    UnsupportedLengthError,
    formula_profile,
    q_from_formula,
    q_from_table,
)
from kitecodes.rates import (
    RateSubinterval,
    block_of_row,
    block_rows,
    boundaries,
    boundary,
    subinterval_of_rate,
)


def formula_exact(k, ell):
    # independent evaluation in exact rationals
    base = Fraction(3, 2) - Fraction(ell, 20)
    return float((Fraction(165, 100) / base**6 + 2) / k)


@pytest.mark.parametrize(
    "k, ell, expected",
    [(1890, 19, 0.0380), (3780, 1, 0.0004), (1890, 10, 0.0017)],
)
def test_table_values(k, ell, expected):
    assert q_from_table(k)[ell] == expected


def test_table_is_complete_and_tagged():
    for k in (1890, 3780):
        p = q_from_table(k)
        assert p.source == "table" and len(p.q) == 19
        # published densities never increase as the rate drops
        assert all(a <= b for a, b in zip(p.q, p.q[1:]))


def test_table_rejects_other_lengths():
    with pytest.raises(UnsupportedLengthError):
        q_from_table(1000)


@pytest.mark.parametrize(
    "k, ell, expected",
    [(1890, 18, 0.019770), (1890, 10, 3.65 / 1890), (3780, 19, 0.016298)],
)
def test_formula_examples(k, ell, expected):
    assert q_from_formula(k, ell) == pytest.approx(formula_exact(k, ell), rel=1e-12)
    assert q_from_formula(k, ell) == pytest.approx(expected, rel=5e-5)


@pytest.mark.parametrize("ell", [0, 20, -1])
def test_formula_rejects_bad_ell(ell):
    with pytest.raises(ValueError):
        q_from_formula(1890, ell)


def test_formula_clamps_small_k():
    assert q_from_formula(1, 19) == 0.5


@given(st.integers(min_value=128, max_value=10**6))
def test_formula_increasing_and_scales_as_inverse_k(k):
    q = formula_profile(k).q
    assert all(a < b for a, b in zip(q, q[1:]))
    for ell in (1, 7, 19):
        assert k * q_from_formula(k, ell) == pytest.approx(1890 * q_from_formula(1890, ell), rel=1e-12)


def test_profile_json_round_trip():
    p = q_from_table(3780)
    assert QProfile.from_json(p.to_json()) == p


def test_profile_validation():
    with pytest.raises(ValueError):
        QProfile(10, (0.1,) * 18)
    with pytest.raises(ValueError):
        QProfile(10, (0.0,) + (0.1,) * 18)


@pytest.mark.parametrize("ell, expected", [(20, 1890), (19, 1989), (1, 37800), (10, 3780)])
def test_boundaries_examples(ell, expected):
    assert boundary(1890, ell) == expected
    assert boundaries(1890)[ell - 1] == expected


@given(st.integers(min_value=20, max_value=10**5))
def test_boundaries_monotone(k):
    n = boundaries(k)
    assert n[19] == k and n[0] == 20 * k
    assert all(a > b for a, b in zip(n, n[1:]))


def test_boundaries_reject_small_k():
    with pytest.raises(ValueError):
        boundaries(19)


@given(st.integers(min_value=20, max_value=3000), st.data())
def test_block_of_row_matches_block_ranges(k, data):
    t = data.draw(st.integers(min_value=0, max_value=19 * k - 1))
    ell = block_of_row(k, t)
    lo, hi = block_rows(k, ell)
    assert lo <= t < hi
    # exact rational statement of the block rule
    assert ell * (k + t + 1) <= 20 * k < (ell + 1) * (k + t + 1)


def test_subintervals_tile():
    # every rate k/n in (0.05, 1] lands in exactly one subinterval
    k = 37
    for n in range(k, 20 * k):
        hits = [ell for ell in range(1, 20) if RateSubinterval(ell).contains(k, n)]
        assert hits == [subinterval_of_rate(k, n).ell]
    assert RateSubinterval(10).lower == Fraction(1, 2)
    assert RateSubinterval(10).upper == Fraction(11, 20)


def test_subinterval_edge_is_exact():
    # rate exactly 0.5 belongs to (0.45, 0.50], not (0.50, 0.55]
    assert subinterval_of_rate(1890, 3780).ell == 9
    assert subinterval_of_rate(1890, 3779).ell == 10
