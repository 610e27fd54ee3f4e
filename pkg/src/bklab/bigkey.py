"""Big-key encryption in the random-oracle style.

A ciphertext of bit ``m`` under key ``sk`` is ``(s, m ^ lsb(H(s || sk)))`` for
a fresh ``lam``-bit nonce ``s``.  The whole key is hashed on every call, so
missing any key bit decorrelates the mask.

Encryption is a capability: an :class:`EncHandle` carries only a key id and
is resolved by the :class:`KeyTable` that issued it.  Holding a handle lets a
party sample ciphertexts without ever seeing key bits.

Serialized layouts (big-endian):

* ``Ciphertext``: ``nonce`` (lam/8 bytes) || payload byte (0x00 or 0x01).
* ``BigKey``: 8-byte key id || raw key bytes (ell/8 bytes).
* ``EncHandle``: 8-byte key id.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import NamedTuple

HASH_NAME = "sha256"
HASH_BITS = 256
KEY_ID_BYTES = 8

PREFIX = "prefix"
RANDOM_SUBSET = "random"
FILL_ZERO = "zero"
FILL_RANDOM = "random"

_H = getattr(hashlib, HASH_NAME)


class BigKeyError(ValueError):
    pass


class BadParams(BigKeyError):
    pass


class UnresolvableHandle(BigKeyError, LookupError):
    pass


class Ciphertext(NamedTuple):
    nonce: bytes
    payload: int

    @property
    def lam(self) -> int:
        return 8 * len(self.nonce)

    def bit_size(self) -> int:
        return 8 * len(self.nonce) + 1

    def to_bytes(self) -> bytes:
        return self.nonce + (b"\x01" if self.payload else b"\x00")

    @classmethod
    def from_bytes(cls, data: bytes) -> "Ciphertext":
        if len(data) < 2 or data[-1] not in (0, 1):
            raise BigKeyError("malformed ciphertext encoding")
        return cls(bytes(data[:-1]), data[-1])


@dataclass(frozen=True)
class BigKey:
    key_id: int
    sk: bytes
    lam: int = 128

    @property
    def ell(self) -> int:
        return 8 * len(self.sk)

    def to_bytes(self) -> bytes:
        return self.key_id.to_bytes(KEY_ID_BYTES, "big") + self.sk

    @classmethod
    def from_bytes(cls, data: bytes, lam: int = 128) -> "BigKey":
        if len(data) <= KEY_ID_BYTES:
            raise BigKeyError("truncated key encoding")
        return cls(int.from_bytes(data[:KEY_ID_BYTES], "big"), bytes(data[KEY_ID_BYTES:]), lam)


class KeyTable:
    """Trusted key store that resolves encryption handles."""

    def __init__(self):
        self._keys: dict[int, BigKey] = {}

    def __len__(self) -> int:
        return len(self._keys)

    def __contains__(self, key_id: int) -> bool:
        return key_id in self._keys

    def register(self, key: BigKey) -> "EncHandle":
        if key.key_id in self._keys and self._keys[key.key_id] != key:
            raise BadParams(f"key id {key.key_id:#x} already registered")
        self._keys[key.key_id] = key
        return EncHandle(key.key_id, self)

    def resolve(self, handle: "EncHandle") -> BigKey:
        try:
            return self._keys[handle.key_id]
        except KeyError:
            raise UnresolvableHandle(f"unknown key id {handle.key_id:#x}") from None


@dataclass(frozen=True)
class EncHandle:
    key_id: int
    table: KeyTable | None = field(default=None, compare=False, repr=False)

    def to_bytes(self) -> bytes:
        return self.key_id.to_bytes(KEY_ID_BYTES, "big")

    def bit_size(self) -> int:
        return 8 * KEY_ID_BYTES

    def detached(self) -> "EncHandle":
        """Same key id with no resolver attached."""
        return EncHandle(self.key_id)


def mask_bit(nonce: bytes, sk: bytes) -> int:
    return _H(nonce + sk).digest()[-1] & 1


def _check_params(lam: int, ell: int) -> None:
    if lam <= 0 or lam % 8:
        raise BadParams(f"lam must be a positive multiple of 8, got {lam}")
    if 2 * lam > HASH_BITS:
        raise BadParams(f"{HASH_NAME} output too short for lam={lam}")
    if ell < lam:
        raise BadParams(f"key size ell={ell} below lam={lam}")
    if ell % 8:
        raise BadParams(f"key size ell={ell} must be a multiple of 8")


def keygen(lam: int, ell: int, rng, table: KeyTable | None = None) -> tuple[EncHandle, BigKey]:
    """Sample a uniform ``ell``-bit key and register it in ``table``
    (a fresh table when none is given)."""
    _check_params(lam, ell)
    if table is None:
        table = KeyTable()
    while True:
        key_id = int.from_bytes(rng.bytes(KEY_ID_BYTES), "big")
        if key_id not in table:
            break
    key = BigKey(key_id, rng.bytes(ell // 8), lam)
    return table.register(key), key


def encrypt_with_key(key: BigKey, m: int, rng, nonce: bytes | None = None) -> Ciphertext:
    if nonce is None:
        nonce = rng.bytes(key.lam // 8)
    return Ciphertext(nonce, (m & 1) ^ mask_bit(nonce, key.sk))


def enc(handle: EncHandle, m: int, rng, nonce: bytes | None = None) -> Ciphertext:
    """Encrypt bit ``m``.  ``nonce`` forces the nonce (testing only)."""
    if handle.table is None:
        raise UnresolvableHandle("handle carries no key table")
    return encrypt_with_key(handle.table.resolve(handle), m, rng, nonce)


def enc_many(handle: EncHandle, bits, rng) -> list[Ciphertext]:
    """Encrypt a sequence of bits with one bulk nonce draw."""
    if handle.table is None:
        raise UnresolvableHandle("handle carries no key table")
    key = handle.table.resolve(handle)
    w = key.lam // 8
    bits = [m & 1 for m in bits]
    buf = rng.bytes(w * len(bits))
    sk = key.sk
    H = _H
    nonces = [buf[i:i + w] for i in range(0, len(buf), w)]
    payloads = [m ^ (H(s + sk).digest()[-1] & 1) for s, m in zip(nonces, bits)]
    return list(map(Ciphertext, nonces, payloads))


def dec(key: BigKey | bytes, ct: Ciphertext) -> int:
    sk = key.sk if isinstance(key, BigKey) else key
    return ct.payload ^ (_H(ct.nonce + sk).digest()[-1] & 1)


@dataclass(frozen=True)
class PartialKey:
    """Key with only some bit positions retained.

    Bit positions index the key big-endian (position 0 is the top bit of the
    first byte).  ``mask`` has a 1 at every retained position and ``value``
    holds the retained bits in place.
    """

    ell: int
    mask: int
    value: int
    policy: str

    @property
    def stored_bits(self) -> int:
        return bin(self.mask).count("1")

    def positions(self) -> list[int]:
        return [p for p in range(self.ell) if (self.mask >> (self.ell - 1 - p)) & 1]


def partial_key(key: BigKey, rho: float, rng=None, policy: str = PREFIX) -> PartialKey:
    """Retain ``floor(rho * ell)`` bits of ``key``, erasing the rest."""
    if not 0.0 <= rho <= 1.0:
        raise BadParams(f"retained fraction must lie in [0, 1], got {rho}")
    ell = key.ell
    keep = int(rho * ell)
    if policy == PREFIX:
        positions = range(keep)
    elif policy == RANDOM_SUBSET:
        if rng is None:
            raise BadParams("random-subset policy needs an rng")
        positions = rng.choice(ell, size=keep, replace=False).tolist()
    else:
        raise BadParams(f"unknown retention policy {policy!r}")
    mask = 0
    for p in positions:
        mask |= 1 << (ell - 1 - p)
    full = int.from_bytes(key.sk, "big")
    return PartialKey(ell, mask, full & mask, policy)


def fill_key(pk: PartialKey, strategy: str = FILL_ZERO, rng=None) -> bytes:
    if strategy == FILL_ZERO:
        filled = pk.value
    elif strategy == FILL_RANDOM:
        if rng is None:
            raise BadParams("random fill needs an rng")
        noise = int.from_bytes(rng.bytes(pk.ell // 8), "big")
        filled = pk.value | (noise & ~pk.mask)
    else:
        raise BadParams(f"unknown fill strategy {strategy!r}")
    return filled.to_bytes(pk.ell // 8, "big")


def dec_attempt(pk: PartialKey, ct: Ciphertext, strategy: str = FILL_ZERO, rng=None) -> int:
    """Guess the plaintext bit using a key whose erased bits are filled in."""
    return dec(fill_key(pk, strategy, rng), ct)
