"""Entropy bookkeeping in units of k (natural log)."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

# Exact by the 2019 SI definition.
BOLTZMANN_K = 1.380649e-23  # J/K

LN2 = math.log(2.0)


@dataclass(frozen=True, order=True)
class EntropyValue:
    nats: float

    def __post_init__(self):
        if not math.isfinite(self.nats):
            raise ValueError(f"entropy must be finite, got {self.nats}")

    @property
    def bits(self) -> float:
        return self.nats / LN2

    @property
    def si(self) -> float:
        return to_si(self)

    def __float__(self) -> float:
        return float(self.nats)

    def as_fields(self, prefix: str = "entropy") -> dict[str, float]:
        return {
            f"{prefix}_nats": self.nats,
            f"{prefix}_bits": self.bits,
            f"{prefix}_si_J_per_K": self.si,
        }


def boltzmann_entropy(count: int) -> EntropyValue:
    """ln(count): the entropy of a macrostate holding ``count`` microstates."""
    if isinstance(count, bool) or int(count) != count or count < 1:
        raise ValueError(f"microstate count must be a positive integer, got {count!r}")
    return EntropyValue(math.log(int(count)))


def shannon_entropy(p: Sequence[float], atol: float = 1e-12) -> EntropyValue:
    p = np.asarray(p, dtype=float)
    if p.ndim != 1 or p.size == 0:
        raise ValueError("probability vector must be one-dimensional and non-empty")
    if np.any(p < 0):
        raise ValueError(f"negative probability in {p.tolist()}")
    if abs(p.sum() - 1.0) > atol:
        raise ValueError(f"probabilities sum to {p.sum()!r}, not 1")
    nz = p[p > 0]
    return EntropyValue(float(-np.sum(nz * np.log(nz))) + 0.0)


def landauer_delta(N: int, F: int) -> EntropyValue:
    """ln F - ln N for an environment moving from an N- to an F-state macrostate.

    The ratio is reduced exactly before the log, so F = 2N yields ln 2 to the
    last bit however large N is.
    """
    for name, v in (("N", N), ("F", F)):
        if isinstance(v, bool) or int(v) != v or v < 1:
            raise ValueError(f"{name} must be a positive integer, got {v!r}")
    r = Fraction(int(F), int(N))
    if r.denominator == 1:
        return EntropyValue(math.log(r.numerator))
    return EntropyValue(math.log1p((r.numerator - r.denominator) / r.denominator))


def to_si(e: EntropyValue | float) -> float:
    return BOLTZMANN_K * float(e)
