"""Learners, models and classifiers.

Every model is a bit string whose length is its declared size.  Payload
layout (most significant bit first):

* ``known-metric``: one index (``ceil(log2 n)`` bits) then that key.
* ``all-keys``: the n keys in index order.
* ``partial-keys``: the index list (``ceil(log2 n)`` bits each) then the
  keys for those indices.

Serialized model: kind byte || n (u32) || ell (u32) || key count (u32) ||
payload bit length (u64) || payload bytes (big-endian, ceil(bits / 8)).
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterable, Sequence

from . import bigkey
from .field import decode_state, field_for, interpolate
from .task import AugmentedInstance, Instance, ProblemState

KNOWN_METRIC = "known-metric"
ALL_KEYS = "all-keys"
PARTIAL_KEYS = "partial-keys"

_KIND_CODES = {KNOWN_METRIC: 1, ALL_KEYS: 2, PARTIAL_KEYS: 3}
_CODE_KINDS = {v: k for k, v in _KIND_CODES.items()}
_MODEL_HDR = struct.Struct(">BIIIQ")


class LearnError(ValueError):
    pass


class EmptyProtectedSet(LearnError):
    pass


class MalformedModel(LearnError):
    pass


class InsufficientSamples(LearnError):
    pass


def index_bits(n: int) -> int:
    return (n - 1).bit_length()


@dataclass(frozen=True)
class Model:
    kind: str
    payload: int
    declared_bits: int
    n: int
    ell: int
    count: int

    def __post_init__(self):
        if self.payload.bit_length() > self.declared_bits:
            raise MalformedModel("payload longer than declared size")

    def to_bytes(self) -> bytes:
        nbytes = (self.declared_bits + 7) // 8
        return (_MODEL_HDR.pack(_KIND_CODES[self.kind], self.n, self.ell, self.count, self.declared_bits)
                + self.payload.to_bytes(nbytes, "big"))

    @classmethod
    def from_bytes(cls, data: bytes) -> "Model":
        code, n, ell, count, bits = _MODEL_HDR.unpack_from(data)
        if code not in _CODE_KINDS:
            raise MalformedModel(f"unknown model kind code {code}")
        body = data[_MODEL_HDR.size:]
        if len(body) != (bits + 7) // 8:
            raise MalformedModel("payload length disagrees with header")
        model = cls(_CODE_KINDS[code], int.from_bytes(body, "big"), bits, n, ell, count)
        if layout_bits(model.kind, n, ell, count) != bits:
            raise MalformedModel("declared size disagrees with layout")
        return model


def layout_bits(kind: str, n: int, ell: int, count: int) -> int:
    if kind == ALL_KEYS:
        return count * ell
    return count * (ell + index_bits(n))


def serialized_model_bits(data: bytes) -> int:
    """Model size re-derived from a serialized model's layout fields."""
    code, n, ell, count, _ = _MODEL_HDR.unpack_from(data)
    if code not in _CODE_KINDS:
        raise MalformedModel(f"unknown model kind code {code}")
    return layout_bits(_CODE_KINDS[code], n, ell, count)


def _pack(kind: str, st: ProblemState, indices: Sequence[int]) -> Model:
    ib = index_bits(st.n)
    payload = 0
    bits = 0
    if kind != ALL_KEYS:
        for i in indices:
            payload = (payload << ib) | i
            bits += ib
    for i in indices:
        payload = (payload << st.ell) | int.from_bytes(st.keys[i].sk, "big")
        bits += st.ell
    return Model(kind, payload, bits, st.n, st.ell, len(indices))


@lru_cache(maxsize=256)
def _unpack(h: Model) -> tuple[tuple[int, ...], tuple[bytes, ...]]:
    ib = index_bits(h.n)
    k = h.count
    if h.declared_bits != layout_bits(h.kind, h.n, h.ell, k):
        raise MalformedModel("declared size disagrees with layout")
    key_bits = k * h.ell
    keys_int = h.payload & ((1 << key_bits) - 1)
    kb = h.ell // 8
    raw = keys_int.to_bytes(k * kb, "big")
    keys = tuple(raw[j * kb:(j + 1) * kb] for j in range(k))
    if h.kind == ALL_KEYS:
        indices = tuple(range(k))
    else:
        idx_int = h.payload >> key_bits
        indices = tuple((idx_int >> (ib * (k - 1 - j))) & ((1 << ib) - 1) for j in range(k))
    if any(i >= h.n for i in indices):
        raise MalformedModel("index outside feature range")
    return indices, keys


def model_keys(h: Model) -> dict[int, bytes]:
    """Index -> raw key mapping stored in ``h``."""
    indices, keys = _unpack(h)
    return dict(zip(indices, keys))


def learn_known_metric(T: Iterable[int], st: ProblemState) -> Model:
    """Store the key of the smallest protected index."""
    T = sorted(T)
    if not T:
        raise EmptyProtectedSet("protected set is empty")
    return _pack(KNOWN_METRIC, st, [T[0]])


def learn_all(st: ProblemState) -> Model:
    return _pack(ALL_KEYS, st, list(range(st.n)))


def learn_partial(st: ProblemState, S: Iterable[int]) -> Model:
    S = sorted(set(S))
    if any(not 0 <= i < st.n for i in S):
        raise LearnError(f"key subset {S} outside [0, {st.n})")
    return _pack(PARTIAL_KEYS, st, S)


def classify_small(h: Model, x: Instance) -> int:
    if h.kind != KNOWN_METRIC or h.count != 1:
        raise MalformedModel(f"expected a known-metric model, got {h.kind}")
    (i,), (sk,) = _unpack(h)
    return bigkey.dec(sk, x.features[i])


def classify_majority(h: Model, x: Instance) -> int:
    """1 iff strictly more than half of the decryptable features give 1."""
    if h.kind not in (ALL_KEYS, PARTIAL_KEYS):
        raise MalformedModel(f"expected a key-set model, got {h.kind}")
    indices, keys = _unpack(h)
    ones = sum(bigkey.dec(sk, x.features[i]) for i, sk in zip(indices, keys))
    return 1 if 2 * ones > len(indices) else 0


def classifier_for(h: Model) -> Callable[[Instance], int]:
    """Classification function with the model decoded once up front."""
    if h.kind == KNOWN_METRIC:
        if h.count != 1:
            raise MalformedModel("known-metric model must hold exactly one key")
        (i,), (sk,) = _unpack(h)
        return lambda x: bigkey.dec(sk, x.features[i])
    if h.kind not in (ALL_KEYS, PARTIAL_KEYS):
        raise MalformedModel(f"unknown model kind {h.kind}")
    pairs = tuple(zip(*_unpack(h)))
    half = len(pairs)
    dec = bigkey.dec

    def classify(x: Instance) -> int:
        feats = x.features
        return 1 if 2 * sum(dec(sk, feats[i]) for i, sk in pairs) > half else 0

    return classify


class ClassifierOracle:
    """Query-counting black-box access to a classifier."""

    def __init__(self, classify: Callable[[Instance], int], randomized: bool = False):
        self._classify = classify
        self.randomized = randomized
        self.query_count = 0

    @classmethod
    def for_model(cls, h: Model) -> "ClassifierOracle":
        return cls(classifier_for(h))

    def classify(self, x: Instance) -> int:
        self.query_count += 1
        return self._classify(x)

    __call__ = classify


def learn_from_shares(samples: Sequence, t: int) -> ProblemState:
    """Rebuild the state by interpolating the first ``t`` share pairs.

    ``samples`` holds :class:`AugmentedInstance` objects, optionally as
    ``(instance, label)`` pairs.
    """
    aug = [s[0] if not isinstance(s, AugmentedInstance) else s for s in samples]
    if len(aug) < t:
        raise InsufficientSamples(f"need {t} samples, got {len(aug)}")
    F = field_for(aug[0].base.features[0].lam)
    coeffs = interpolate(F, [(a.z, a.gamma) for a in aug[:t]], t)
    return ProblemState.from_bytes(decode_state(F, coeffs))


def model_size_ok(h: Model, bound_bits: int) -> bool:
    return h.declared_bits <= bound_bits
