"""The classification task: state generation, class and hybrid samplers,
and the share-augmented sampler that makes the task learnable from samples.

Binary layouts (big-endian):

* ``ProblemState``: n (u32) || ell (u32) || lam (u32) || n serialized keys.
* ``Instance``: n (u32) || lam (u16) || trailer flag (u8, 0) || n ciphertexts.
* ``AugmentedInstance``: same header with flag 1, then z || gamma as
  lam-bit field elements.  The trailer adds exactly ``2 * lam`` bits.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, NamedTuple, Sequence

from . import bigkey
from .bigkey import BigKey, Ciphertext, EncHandle, KeyTable
from .field import BinaryField, encode_state, encoded_length, field_for, poly_eval

_STATE_HDR = struct.Struct(">III")
_INST_HDR = struct.Struct(">IHB")


class TaskError(ValueError):
    pass


class BadParams(TaskError):
    pass


class IndexOutOfRange(TaskError, IndexError):
    pass


class Instance(NamedTuple):
    features: tuple[Ciphertext, ...]

    @property
    def n(self) -> int:
        return len(self.features)

    def bit_size(self) -> int:
        return sum(c.bit_size() for c in self.features)

    def to_bytes(self) -> bytes:
        lam = self.features[0].lam if self.features else 0
        return _INST_HDR.pack(len(self.features), lam, 0) + b"".join(c.to_bytes() for c in self.features)

    @classmethod
    def from_bytes(cls, data: bytes) -> "Instance":
        inst, z_gamma = _parse_instance(data)
        if z_gamma is not None:
            raise TaskError("encoding carries a share trailer; use AugmentedInstance")
        return inst


class AugmentedInstance(NamedTuple):
    base: Instance
    z: int
    gamma: int

    def bit_size(self) -> int:
        lam = self.base.features[0].lam
        return self.base.bit_size() + 2 * lam

    def to_bytes(self) -> bytes:
        lam = self.base.features[0].lam
        w = lam // 8
        body = b"".join(c.to_bytes() for c in self.base.features)
        return (_INST_HDR.pack(len(self.base.features), lam, 1) + body
                + self.z.to_bytes(w, "big") + self.gamma.to_bytes(w, "big"))

    @classmethod
    def from_bytes(cls, data: bytes) -> "AugmentedInstance":
        inst, z_gamma = _parse_instance(data)
        if z_gamma is None:
            raise TaskError("encoding has no share trailer")
        return cls(inst, *z_gamma)


def _parse_instance(data: bytes):
    n, lam, flag = _INST_HDR.unpack_from(data)
    w = lam // 8
    off = _INST_HDR.size
    feats = []
    for _ in range(n):
        feats.append(Ciphertext.from_bytes(data[off:off + w + 1]))
        off += w + 1
    z_gamma = None
    if flag == 1:
        z_gamma = (int.from_bytes(data[off:off + w], "big"), int.from_bytes(data[off + w:off + 2 * w], "big"))
        off += 2 * w
    elif flag != 0:
        raise TaskError(f"unknown trailer flag {flag}")
    if off != len(data):
        raise TaskError("trailing bytes after instance")
    return Instance(tuple(feats)), z_gamma


@dataclass(frozen=True)
class ProblemState:
    n: int
    ell: int
    lam: int
    entries: tuple[tuple[EncHandle, BigKey], ...]

    @property
    def handles(self) -> tuple[EncHandle, ...]:
        return tuple(h for h, _ in self.entries)

    @property
    def keys(self) -> tuple[BigKey, ...]:
        return tuple(k for _, k in self.entries)

    @property
    def field(self) -> BinaryField:
        return field_for(self.lam)

    def to_bytes(self) -> bytes:
        return _STATE_HDR.pack(self.n, self.ell, self.lam) + b"".join(k.to_bytes() for k in self.keys)

    @classmethod
    def from_bytes(cls, data: bytes) -> "ProblemState":
        n, ell, lam = _STATE_HDR.unpack_from(data)
        size = bigkey.KEY_ID_BYTES + ell // 8
        off = _STATE_HDR.size
        if len(data) != off + n * size:
            raise TaskError("state encoding has the wrong length")
        table = KeyTable()
        entries = []
        for i in range(n):
            key = BigKey.from_bytes(data[off + i * size:off + (i + 1) * size], lam)
            entries.append((table.register(key), key))
        return cls(n, ell, lam, tuple(entries))

    @cached_property
    def share_poly(self) -> list[int]:
        """Coefficients of the share polynomial: the encoded serialized state."""
        return encode_state(self.field, self.to_bytes())

    @property
    def t(self) -> int:
        return len(self.share_poly)


def share_count(n: int, ell: int, lam: int = 128) -> int:
    """Shares needed to reconstruct a state with these public parameters."""
    nbytes = _STATE_HDR.size + n * (bigkey.KEY_ID_BYTES + ell // 8)
    return encoded_length(field_for(lam), nbytes)


def gen(lam: int, ell: int, n: int, rng) -> ProblemState:
    if n < 2:
        raise BadParams(f"need at least 2 features, got n={n}")
    if ell < lam:
        raise BadParams(f"key size ell={ell} below lam={lam}")
    table = KeyTable()
    entries = tuple(bigkey.keygen(lam, ell, rng, table) for _ in range(n))
    return ProblemState(n, ell, lam, entries)


def _check_subset(J: Iterable[int], n: int) -> frozenset[int]:
    J = frozenset(J)
    bad = [i for i in J if not 0 <= i < n]
    if bad:
        raise IndexOutOfRange(f"indices {sorted(bad)} outside [0, {n})")
    return J


def hybrid_batch(handles: Sequence[EncHandle], J: Iterable[int], b: int, count: int, rng) -> list[Instance]:
    """``count`` samples where features in ``J`` encrypt ``1 - b`` and the
    rest encrypt ``b``.  Needs only the public handles."""
    n = len(handles)
    J = _check_subset(J, n)
    columns = [bigkey.enc_many(h, [b ^ (i in J)] * count, rng) for i, h in enumerate(handles)]
    return [Instance(row) for row in zip(*columns)]


def samp_hybrid(st: ProblemState, J: Iterable[int], b: int, rng) -> Instance:
    J = _check_subset(J, st.n)
    return Instance(tuple(bigkey.enc(h, b ^ (i in J), rng) for i, h in enumerate(st.handles)))


def samp(st: ProblemState, b: int, rng) -> Instance:
    if b not in (0, 1):
        raise TaskError(f"class bit must be 0 or 1, got {b!r}")
    return samp_hybrid(st, (), b, rng)


def samp_augmented(st: ProblemState, b: int, rng) -> AugmentedInstance:
    base = samp(st, b, rng)
    F = st.field
    z = F.random(rng)
    return AugmentedInstance(base, z, poly_eval(F, st.share_poly, z))


def decrypt_all(st: ProblemState, x: Instance) -> list[int]:
    """Per-feature plaintext bits under the matching keys (ground truth)."""
    return [bigkey.dec(k, c) for k, c in zip(st.keys, x.features)]


def replace_features(x: Instance, new: dict[int, Ciphertext]) -> Instance:
    feats = list(x.features)
    for i, c in new.items():
        feats[i] = c
    return Instance(tuple(feats))
