"""BPSK and Gray-mapped square QAM over AWGN, with exact bit LLRs.

Symbols have unit average energy. ``sigma2`` is the noise variance per real
dimension, so ``Es/N0 = 1 / (2 sigma2)``. BPSK uses the real axis only.
Within a symbol, label bits are ordered most significant first, I-axis bits
before Q-axis bits. Bit 0 maps toward the positive side of each axis.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

NAMES = {"bpsk": 1, "qpsk": 2, "16qam": 4, "64qam": 6}


def _gray(i):
    return i ^ (i >> 1)


def _pam_levels(bits: int) -> tuple[np.ndarray, np.ndarray]:
    """Amplitudes and Gray labels of a 2**bits PAM axis, largest amplitude first."""
    L = 1 << bits
    idx = np.arange(L)
    amp = (L - 1 - 2 * idx).astype(np.float64)
    return amp, _gray(idx)


@dataclass(frozen=True, eq=False)
class Constellation:
    """``2**b`` unit-energy points; ``labels[i]`` is the b-bit label of ``points[i]``."""

    b: int
    points: np.ndarray
    labels: np.ndarray
    name: str = ""
    real: bool = False
    _lookup: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        lookup = np.empty(1 << self.b, dtype=np.int64)
        lookup[self.labels] = np.arange(self.labels.size)
        object.__setattr__(self, "_lookup", lookup)

    @property
    def size(self) -> int:
        return 1 << self.b

    def label_bits(self) -> np.ndarray:
        """``(2**b, b)`` array of label bits, most significant first."""
        shifts = np.arange(self.b - 1, -1, -1)
        return ((self.labels[:, None] >> shifts[None, :]) & 1).astype(np.uint8)

    def point_for_label(self, label: int) -> complex:
        return complex(self.points[self._lookup[label]])

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "b": self.b,
            "points": [[float(p.real), float(p.imag)] for p in self.points],
            "labels": [format(int(x), f"0{self.b}b") for x in self.labels],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def constellation(name: str | int) -> Constellation:
    """Return ``bpsk``, ``qpsk``, ``16qam`` or ``64qam`` (or look up by bits/symbol)."""
    if isinstance(name, (int, np.integer)):
        matches = [k for k, v in NAMES.items() if v == name]
        if not matches:
            raise ValueError(f"no constellation with {name} bits per symbol")
        name = matches[0]
    name = name.lower()
    if name not in NAMES:
        raise ValueError(f"unknown constellation {name!r}; choose from {sorted(NAMES)}")
    b = NAMES[name]
    if b == 1:
        return Constellation(1, np.array([1.0 + 0j, -1.0 + 0j]), np.array([0, 1]), name, real=True)
    half = b // 2
    amp, lab = _pam_levels(half)
    L = amp.size
    scale = np.sqrt(2.0 * (L * L - 1) / 3.0)
    I, Q = np.meshgrid(np.arange(L), np.arange(L), indexing="ij")
    points = ((amp[I] + 1j * amp[Q]) / scale).ravel()
    labels = ((lab[I] << half) | lab[Q]).ravel()
    return Constellation(b, points, labels, name)


def modulate(bits, const: Constellation) -> np.ndarray:
    bits = np.asarray(bits, dtype=np.int64)
    if bits.size % const.b:
        raise ValueError(f"bit count {bits.size} is not a multiple of {const.b}")
    groups = bits.reshape(-1, const.b)
    weights = 1 << np.arange(const.b - 1, -1, -1)
    return const.points[const._lookup[groups @ weights]]


def awgn(symbols, sigma2: float, rng: np.random.Generator, real: bool = False) -> np.ndarray:
    """Add zero-mean Gaussian noise of variance ``sigma2`` per real dimension."""
    if sigma2 < 0:
        raise ValueError("noise variance must be non-negative")
    x = np.asarray(symbols, dtype=np.complex128)
    if sigma2 == 0:
        return x.copy()
    sd = np.sqrt(sigma2)
    if real:
        return x + sd * rng.standard_normal(x.shape)
    noise = rng.standard_normal((2,) + x.shape)
    return x + sd * (noise[0] + 1j * noise[1])


def demap_llr(y, const: Constellation, sigma2: float) -> np.ndarray:
    """Exact per-bit LLRs ``log sum_{x: bit=0} p(y|x) - log sum_{x: bit=1} p(y|x)``.

    The ``|y|^2`` term common to every hypothesis is dropped before the
    log-sum-exp, leaving ``(2 Re(y x*) - |x|^2) / (2 sigma2)``.
    """
    if sigma2 <= 0:
        raise ValueError("noise variance must be positive")
    y = np.asarray(y, dtype=np.complex128).ravel()
    if const.real:
        y = y.real.astype(np.complex128)
    pts = const.points
    metric = (2.0 * (y[:, None] * np.conj(pts)[None, :]).real - (np.abs(pts) ** 2)[None, :]) / (2.0 * sigma2)
    lb = const.label_bits()
    out = np.empty((y.size, const.b))
    for j in range(const.b):
        zero = lb[:, j] == 0
        out[:, j] = logsumexp(metric[:, zero], axis=1) - logsumexp(metric[:, ~zero], axis=1)
    return out.ravel()


@dataclass(frozen=True)
class ChannelConfig:
    """AWGN parameters with ``Es = 1``: ``sigma2 = N0 / 2``."""

    sigma2: float

    def __post_init__(self):
        if not self.sigma2 > 0:
            raise ValueError("noise variance must be positive")

    @classmethod
    def from_esn0_db(cls, esn0_db: float) -> "ChannelConfig":
        return cls(esn0_to_sigma2(esn0_db))

    @classmethod
    def from_ebn0_db(cls, ebn0_db: float, rate: float, b: int) -> "ChannelConfig":
        return cls(ebn0_to_sigma2(ebn0_db, rate, b))

    @property
    def esn0_db(self) -> float:
        return float(10 * np.log10(1.0 / (2.0 * self.sigma2)))

    def ebn0_db(self, rate: float, b: int) -> float:
        return self.esn0_db - float(10 * np.log10(rate * b))


def esn0_to_sigma2(esn0_db: float) -> float:
    return 1.0 / (2.0 * 10 ** (esn0_db / 10))


def ebn0_to_sigma2(ebn0_db: float, rate: float, b: int) -> float:
    return esn0_to_sigma2(ebn0_db + 10 * np.log10(rate * b))


def constrained_capacity(const: Constellation, sigma2: float, nodes: int = 96) -> float:
    """Equiprobable-input mutual information in bits/symbol, by Gauss-Hermite quadrature.

    Square QAM splits into two independent PAM axes, so the integral is one
    dimensional per axis.
    """
    if sigma2 <= 0:
        raise ValueError("noise variance must be positive")
    if const.real:
        amp = np.array([1.0, -1.0])
        return _pam_capacity(amp, sigma2, nodes)
    half = const.b // 2
    amp, _ = _pam_levels(half)
    amp = amp / np.sqrt(2.0 * (amp.size ** 2 - 1) / 3.0)
    return 2.0 * _pam_capacity(amp, sigma2, nodes)


def _pam_capacity(amp: np.ndarray, sigma2: float, nodes: int) -> float:
    x, w = np.polynomial.hermite.hermgauss(nodes)
    z = np.sqrt(2.0 * sigma2) * x
    w = w / np.sqrt(np.pi)
    M = amp.size
    diff = amp[:, None] - amp[None, :]  # (i, j)
    # exponent for transmitted i, hypothesis j, noise z: -((d + z)^2 - z^2) / (2 sigma2)
    expo = -((diff[:, :, None] + z[None, None, :]) ** 2 - z[None, None, :] ** 2) / (2.0 * sigma2)
    inner = logsumexp(expo, axis=1) / np.log(2.0)  # (i, z)
    return float(np.log2(M) - np.mean(inner @ w))
