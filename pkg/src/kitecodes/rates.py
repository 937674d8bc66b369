"""Rate subintervals and prefix-length boundaries.

Code rates in (0.05, 1] are split into 19 equal subintervals
``(ell/20, (ell+1)/20]`` for ``ell = 1..19``. All membership tests here use
integer cross-multiplication so that boundary cases are decided exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

NUM_SUBINTERVALS = 19
MIN_K = 20


@dataclass(frozen=True)
class RateSubinterval:
    """The half-open rate interval ``(ell/20, (ell+1)/20]``."""

    ell: int

    def __post_init__(self):
        if not 1 <= self.ell <= NUM_SUBINTERVALS:
            raise ValueError(f"ell must lie in [1, 19], got {self.ell}")

    @property
    def lower(self) -> Fraction:
        return Fraction(self.ell, 20)

    @property
    def upper(self) -> Fraction:
        return Fraction(self.ell + 1, 20)

    def contains(self, k: int, n: int) -> bool:
        """True when the rate ``k/n`` lies in this subinterval."""
        return self.ell * n < 20 * k <= (self.ell + 1) * n


def subinterval_of_rate(k: int, n: int) -> RateSubinterval:
    """Subinterval containing the rate ``k/n`` (``n >= k``, rate > 0.05)."""
    if n < k or 20 * k <= n:
        raise ValueError(f"rate {k}/{n} outside (0.05, 1]")
    # smallest ell with 20k <= (ell+1) n
    ell = -(-20 * k // n) - 1
    return RateSubinterval(ell)


def boundaries(k: int) -> list[int]:
    """Prefix lengths ``n_ell = floor(20 k / ell)`` for ``ell = 1..20``.

    Returns a list indexed so that ``boundaries(k)[ell - 1] == n_ell``.
    """
    if k < MIN_K:
        raise ValueError(f"k must be at least {MIN_K}, got {k}")
    return [(20 * k) // ell for ell in range(1, 21)]


def boundary(k: int, ell: int) -> int:
    if not 1 <= ell <= 20:
        raise ValueError(f"ell must lie in [1, 20], got {ell}")
    return (20 * k) // ell


def block_rows(k: int, ell: int) -> tuple[int, int]:
    """Half-open parity-row range ``[n_{ell+1} - k, n_ell - k)`` of block ``ell``."""
    if not 1 <= ell <= NUM_SUBINTERVALS:
        raise ValueError(f"ell must lie in [1, 19], got {ell}")
    return boundary(k, ell + 1) - k, boundary(k, ell) - k


def block_of_row(k: int, t: int) -> int:
    """Index ``ell`` of the block holding parity row ``t``.

    Row ``t`` is the last row of the prefix of length ``k + t + 1``; it
    belongs to block ``ell`` iff ``n_{ell+1} <= k + t < n_ell``, i.e.
    ``ell (k+t+1) <= 20k < (ell+1)(k+t+1)``.
    """
    m = k + t + 1
    if t < 0 or m > 20 * k:
        raise ValueError(f"row {t} outside the mother code for k={k}")
    ell = (20 * k) // m
    return min(ell, NUM_SUBINTERVALS)
