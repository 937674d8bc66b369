"""Per-subinterval Bernoulli densities (the q-profile) for the H_v part."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .rates import NUM_SUBINTERVALS

# Published optimized densities, listed from ell = 19 (rates (0.95, 1]) down to ell = 1.
_TABLE = {
    1890: (
        0.0380, 0.0200, 0.0130, 0.0072, 0.0046, 0.0038, 0.0030, 0.0028, 0.0018, 0.0017,
        0.0015, 0.0014, 0.0013, 0.0012, 0.0012, 0.0012, 0.0011, 0.0011, 0.0011,
    ),
    3780: (
        0.0170, 0.0110, 0.0050, 0.0039, 0.0023, 0.0020, 0.0016, 0.0013, 0.0010, 0.0009,
        0.0007, 0.0007, 0.0006, 0.0006, 0.0005, 0.0005, 0.0005, 0.0004, 0.0004,
    ),
}

TABLE_KS = tuple(sorted(_TABLE))
FORMULA_CLAMP = 0.5


class UnsupportedLengthError(ValueError):
    """No published profile exists for the requested data length."""


@dataclass(frozen=True)
class QProfile:
    """Bernoulli densities ``q_1..q_19`` for a data length ``k``.

    ``q[ell - 1]`` is the density used for parity rows in rate subinterval ``ell``.
    """

    k: int
    q: tuple[float, ...]
    source: str = "custom"

    def __post_init__(self):
        object.__setattr__(self, "q", tuple(float(x) for x in self.q))
        if len(self.q) != NUM_SUBINTERVALS:
            raise ValueError(f"expected 19 densities, got {len(self.q)}")
        if not all(0.0 < x < 1.0 for x in self.q):
            raise ValueError("every density must lie strictly between 0 and 1")
        if self.source not in ("table", "formula", "custom"):
            raise ValueError(f"unknown profile source {self.source!r}")

    def __getitem__(self, ell: int) -> float:
        if not 1 <= ell <= NUM_SUBINTERVALS:
            raise IndexError(f"ell must lie in [1, 19], got {ell}")
        return self.q[ell - 1]

    def with_value(self, ell: int, value: float) -> "QProfile":
        q = list(self.q)
        q[ell - 1] = value
        return QProfile(self.k, tuple(q), "custom")

    def to_dict(self) -> dict:
        return {"k": self.k, "source": self.source, "q": list(self.q)}

    @classmethod
    def from_dict(cls, d: dict) -> "QProfile":
        return cls(int(d["k"]), tuple(d["q"]), d.get("source", "custom"))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_json(cls, text: str) -> "QProfile":
        return cls.from_dict(json.loads(text))


def q_from_table(k: int) -> QProfile:
    """Return the published profile for ``k`` in {1890, 3780}."""
    try:
        desc = _TABLE[k]
    except KeyError:
        raise UnsupportedLengthError(
            f"no tabulated profile for k={k}; use q_from_formula"
        ) from None
    return QProfile(k, tuple(reversed(desc)), "table")


def q_from_formula(k: int, ell: int) -> float:
    """Empirical density ``(1.65 / (1.5 - 0.05 ell)^6 + 2) / k``, capped at 0.5."""
    if k < 1:
        raise ValueError(f"k must be positive, got {k}")
    if not 1 <= ell <= NUM_SUBINTERVALS:
        raise ValueError(f"ell must lie in [1, 19], got {ell}")
    q = (1.65 / (1.5 - 0.05 * ell) ** 6 + 2.0) / k
    return min(q, FORMULA_CLAMP)


def formula_profile(k: int) -> QProfile:
    return QProfile(
        k, tuple(q_from_formula(k, ell) for ell in range(1, NUM_SUBINTERVALS + 1)), "formula"
    )
