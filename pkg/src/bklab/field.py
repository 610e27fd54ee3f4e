"""Binary field GF(2^lam) arithmetic and polynomials over it.

Field elements are plain Python ints in ``[0, 2**lam)``; bit ``i`` is the
coefficient of ``X^i``.  Polynomials over the field are lists of elements,
lowest degree first (``coeffs[i]`` multiplies ``X^i``).
"""

from __future__ import annotations

from typing import Iterable, Sequence

ZERO = 0
ONE = 1

# Low-weight irreducible polynomials, written with the leading term.
REDUCTION_POLYS = {
    8: (1 << 8) | 0x1B,  # X^8 + X^4 + X^3 + X + 1
    16: (1 << 16) | 0x2B,  # X^16 + X^5 + X^3 + X + 1
    32: (1 << 32) | 0x8D,  # X^32 + X^7 + X^3 + X^2 + 1
    64: (1 << 64) | 0x1B,  # X^64 + X^4 + X^3 + X + 1
    128: (1 << 128) | 0x87,  # X^128 + X^7 + X^2 + X + 1
}

LENGTH_PREFIX_BYTES = 8


class FieldError(ValueError):
    pass


class ZeroInverse(FieldError, ZeroDivisionError):
    pass


class DuplicateAbscissa(FieldError):
    pass


class ArityMismatch(FieldError):
    pass


class PaddingCorrupt(FieldError):
    pass


def clmul(a: int, b: int) -> int:
    """Carry-less product of two non-negative ints (no reduction)."""
    if a.bit_length() < b.bit_length():
        a, b = b, a
    # 4-bit windows over the shorter operand
    table = [0, a]
    for k in range(2, 16):
        table.append((table[k >> 1] << 1) ^ (a if k & 1 else 0))
    out = 0
    shift = 0
    while b:
        out ^= table[b & 0xF] << shift
        b >>= 4
        shift += 4
    return out


class BinaryField:
    """GF(2^lam) defined by a reduction polynomial of degree ``lam``."""

    def __init__(self, lam: int, modulus: int | None = None):
        if modulus is None:
            try:
                modulus = REDUCTION_POLYS[lam]
            except KeyError:
                raise FieldError(f"no default reduction polynomial for lam={lam}") from None
        if modulus.bit_length() != lam + 1:
            raise FieldError("reduction polynomial must have degree lam")
        self.lam = lam
        self.modulus = modulus
        self.order = 1 << lam
        self.nbytes = (lam + 7) // 8
        self._mask = self.order - 1
        self._tail = modulus ^ (1 << lam)
        self._tail_bits = [i for i in range(lam) if (self._tail >> i) & 1]
        self._exp: list[int] | None = None
        self._log: list[int] | None = None
        if lam <= 16:
            self._build_tables()

    def __repr__(self) -> str:
        return f"BinaryField(lam={self.lam}, modulus={self.modulus:#x})"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, BinaryField) and other.modulus == self.modulus

    def __hash__(self) -> int:
        return hash(("BinaryField", self.modulus))

    def _reduce(self, p: int) -> int:
        lam, mask = self.lam, self._mask
        while p >> lam:
            hi = p >> lam
            p &= mask
            for bit in self._tail_bits:
                p ^= hi << bit
        return p

    def _mul_generic(self, a: int, b: int) -> int:
        return self._reduce(clmul(a, b))

    def _build_tables(self) -> None:
        # Find a generator of the multiplicative group, then tabulate powers.
        q1 = self.order - 1
        primes = _prime_factors(q1)
        for g in range(2, self.order):
            if all(self._pow_generic(g, q1 // p) != 1 for p in primes):
                break
        exp = [0] * (2 * q1)
        log = [0] * self.order
        x = 1
        for i in range(q1):
            exp[i] = x
            log[x] = i
            x = self._mul_generic(x, g)
        for i in range(q1, 2 * q1):
            exp[i] = exp[i - q1]
        self._exp, self._log = exp, log

    def _pow_generic(self, a: int, e: int) -> int:
        result = 1
        while e:
            if e & 1:
                result = self._mul_generic(result, a)
            a = self._mul_generic(a, a)
            e >>= 1
        return result

    def check(self, a: int) -> int:
        if not 0 <= a < self.order:
            raise FieldError(f"{a!r} is not an element of GF(2^{self.lam})")
        return a

    def add(self, a: int, b: int) -> int:
        return a ^ b

    sub = add

    def mul(self, a: int, b: int) -> int:
        if self._exp is not None:
            if a == 0 or b == 0:
                return 0
            return self._exp[self._log[a] + self._log[b]]
        return self._reduce(clmul(a, b))

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            return self.pow(self.inv(a), -e)
        result = 1
        while e:
            if e & 1:
                result = self.mul(result, a)
            a = self.mul(a, a)
            e >>= 1
        return result

    def inv(self, a: int) -> int:
        """Inverse by the extended Euclidean algorithm on GF(2)[X]."""
        if a == 0:
            raise ZeroInverse("zero has no multiplicative inverse")
        r0, r1 = self.modulus, a
        s0, s1 = 0, 1
        while r1 != 1:
            shift = r0.bit_length() - r1.bit_length()
            if shift < 0:
                r0, r1 = r1, r0
                s0, s1 = s1, s0
                continue
            r0 ^= r1 << shift
            s0 ^= s1 << shift
            if r0 == 0:
                raise ZeroInverse("modulus is not irreducible")
            if r0.bit_length() < r1.bit_length():
                r0, r1 = r1, r0
                s0, s1 = s1, s0
        return self._reduce(s1)

    def inv_pow(self, a: int) -> int:
        """Inverse as ``a^(2^lam - 2)``; slower, kept as a cross-check."""
        if a == 0:
            raise ZeroInverse("zero has no multiplicative inverse")
        return self.pow(a, self.order - 2)

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def random(self, rng) -> int:
        """Uniform element drawn from a ``numpy.random.Generator``."""
        return int.from_bytes(rng.bytes(self.nbytes), "big") & self._mask

    def random_nonzero(self, rng) -> int:
        while True:
            a = self.random(rng)
            if a:
                return a

    def to_bytes(self, a: int) -> bytes:
        return a.to_bytes(self.nbytes, "big")

    def from_bytes(self, data: bytes) -> int:
        return self.check(int.from_bytes(data, "big"))


def _prime_factors(n: int) -> list[int]:
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


GF8 = BinaryField(8)
GF128 = BinaryField(128)

_FIELDS: dict[int, BinaryField] = {8: GF8, 128: GF128}


def field_for(lam: int) -> BinaryField:
    """Shared field instance for ``lam`` using the default modulus."""
    if lam not in _FIELDS:
        _FIELDS[lam] = BinaryField(lam)
    return _FIELDS[lam]


def poly_eval(field: BinaryField, coeffs: Sequence[int], z: int) -> int:
    """Horner evaluation of ``sum coeffs[i] * z^i``."""
    acc = 0
    mul = field.mul
    for c in reversed(coeffs):
        acc = mul(acc, z) ^ c
    return acc


def interpolate(field: BinaryField, points: Sequence[tuple[int, int]], t: int) -> list[int]:
    """Coefficients (length ``t``) of the unique polynomial of degree < t
    passing through ``points``, via the Lagrange basis."""
    if len(points) != t:
        raise ArityMismatch(f"expected {t} points, got {len(points)}")
    xs = [z for z, _ in points]
    if len(set(xs)) != len(xs):
        raise DuplicateAbscissa("interpolation points must have distinct abscissae")
    mul = field.mul

    # master(X) = prod (X - z_j), coefficients low-first
    master = [1]
    for z in xs:
        nxt = [0] * (len(master) + 1)
        for k, c in enumerate(master):
            nxt[k + 1] ^= c
            nxt[k] ^= mul(c, z)
        master = nxt

    result = [0] * t
    for zi, yi in points:
        # quotient master / (X - zi) by synthetic division, high to low
        quot = [0] * t
        carry = 0
        for k in range(t, 0, -1):
            carry = master[k] ^ mul(carry, zi) if k < t else master[k]
            quot[k - 1] = carry
        denom = poly_eval(field, quot, zi)
        scale = field.div(yi, denom)
        if scale:
            for k in range(t):
                result[k] ^= mul(quot[k], scale)
    return result


def encode_state(field: BinaryField, data: bytes) -> list[int]:
    """Split ``data`` into field elements behind a 64-bit byte-length prefix,
    zero-padding the tail."""
    w = field.nbytes
    if field.lam % 8:
        raise FieldError("state encoding needs a byte-aligned field")
    buf = len(data).to_bytes(LENGTH_PREFIX_BYTES, "big") + bytes(data)
    buf += bytes(-len(buf) % w)
    return [int.from_bytes(buf[i:i + w], "big") for i in range(0, len(buf), w)]


def decode_state(field: BinaryField, elems: Iterable[int]) -> bytes:
    w = field.nbytes
    try:
        buf = b"".join(field.to_bytes(e) for e in elems)
    except (OverflowError, FieldError) as exc:
        raise PaddingCorrupt(f"element out of range: {exc}") from None
    if len(buf) < LENGTH_PREFIX_BYTES:
        raise PaddingCorrupt("missing length prefix")
    length = int.from_bytes(buf[:LENGTH_PREFIX_BYTES], "big")
    end = LENGTH_PREFIX_BYTES + length
    expected = end + (-end % w)
    if expected != len(buf):
        raise PaddingCorrupt(f"length prefix {length} inconsistent with {len(buf)} encoded bytes")
    if any(buf[end:]):
        raise PaddingCorrupt("nonzero padding")
    return buf[LENGTH_PREFIX_BYTES:end]


def encoded_length(field: BinaryField, nbytes: int) -> int:
    """Number of field elements ``encode_state`` produces for ``nbytes`` of data."""
    total = LENGTH_PREFIX_BYTES + nbytes
    return -(-total // field.nbytes)
