"""Weighted Hamming metrics and the protected-set metric class.

A protected set ``T`` induces weights ``1`` on ``T`` and ``1/n`` elsewhere.
The perturbation budget is normalized to 1 and is strict: a perturbation is
admissible iff its distance is ``< 1``.  Distances are exact rationals.

Feature indices are 0-based throughout the package.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence


class DimensionMismatch(ValueError):
    pass


def _features(x) -> Sequence:
    return x.features if hasattr(x, "features") else x


def differing_indices(x, z) -> list[int]:
    """Indices where two instances differ (ciphertexts compared by value,
    which is equivalent to comparing their canonical serialization)."""
    fx, fz = _features(x), _features(z)
    if len(fx) != len(fz):
        raise DimensionMismatch(f"feature counts differ: {len(fx)} vs {len(fz)}")
    return [i for i, (a, b) in enumerate(zip(fx, fz)) if a != b]


@dataclass(frozen=True)
class WeightVector:
    weights: tuple[Fraction, ...]

    def __post_init__(self):
        if any(w <= 0 for w in self.weights):
            raise ValueError("weights must be strictly positive")

    @classmethod
    def of(cls, weights: Iterable) -> "WeightVector":
        return cls(tuple(Fraction(w) for w in weights))

    def __len__(self) -> int:
        return len(self.weights)

    def dist(self, x, z) -> Fraction:
        if len(_features(x)) != len(self.weights):
            raise DimensionMismatch("instance length differs from weight vector")
        return sum((self.weights[i] for i in differing_indices(x, z)), Fraction(0))


@dataclass(frozen=True)
class PerturbationDelta:
    protected_diffs: int
    unprotected_diffs: int
    n: int

    @property
    def distance(self) -> Fraction:
        return self.protected_diffs + Fraction(self.unprotected_diffs, self.n)


@dataclass(frozen=True)
class ProtectedMetric:
    n: int
    T: frozenset[int]

    def __init__(self, n: int, T: Iterable[int]):
        T = frozenset(int(i) for i in T)
        if n < 1:
            raise ValueError("n must be positive")
        if any(not 0 <= i < n for i in T):
            raise ValueError(f"protected indices must lie in [0, {n})")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "T", T)

    def weights(self) -> WeightVector:
        small = Fraction(1, self.n)
        return WeightVector(tuple(Fraction(1) if i in self.T else small for i in range(self.n)))

    def delta(self, x, z) -> PerturbationDelta:
        if len(_features(x)) != self.n:
            raise DimensionMismatch(f"expected {self.n} features, got {len(_features(x))}")
        diffs = differing_indices(x, z)
        prot = sum(1 for i in diffs if i in self.T)
        return PerturbationDelta(prot, len(diffs) - prot, self.n)

    def dist(self, x, z) -> Fraction:
        return self.delta(x, z).distance

    def is_admissible(self, x, x_tilde) -> bool:
        d = self.delta(x, x_tilde)
        return d.protected_diffs == 0 and d.unprotected_diffs < self.n

    def to_json(self) -> str:
        return json.dumps({"n": self.n, "T": sorted(self.T)}, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "ProtectedMetric":
        obj = json.loads(text)
        return cls(obj["n"], obj["T"])


def dist(m: ProtectedMetric, x, z) -> Fraction:
    return m.dist(x, z)


def is_admissible(m: ProtectedMetric, x, x_tilde) -> bool:
    return m.is_admissible(x, x_tilde)


def default_t_class(n: int) -> int:
    return n // 2 + 1


def metric_class_contains(n: int, t_class: int, T: Iterable[int]) -> bool:
    T = set(T)
    return len(T) == t_class and all(isinstance(i, int) and 0 <= i < n for i in T)
