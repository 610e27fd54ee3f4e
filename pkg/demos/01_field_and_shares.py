"""Field arithmetic and secret sharing of a problem state.

Run: python demos/01_field_and_shares.py
"""
import numpy as np

from bklab import field, learn, task

rng = np.random.default_rng(1)
F = field.GF128

# multiplication, inverse, and the two inverse routes agreeing
a, b = F.random(rng), F.random_nonzero(rng)
print("a * b       =", hex(F.mul(a, b)))
print("b * b^-1    =", F.mul(b, F.inv(b)))
print("inv == pow  :", F.inv(b) == F.inv_pow(b))

# the AES field, for a value you can check by hand
print("0x57 * 0x83 =", hex(field.GF8.mul(0x57, 0x83)), "in GF(2^8)")

# a state becomes the coefficients of a polynomial
st = task.gen(128, 1024, 8, rng)
t = task.share_count(8, 1024, 128)
print("\nshares needed for n=8, ell=1024:", t, "(state is", len(st.to_bytes()), "bytes)")

# each augmented sample leaks one point on it, 256 extra bits
samples = [task.samp_augmented(st, int(rng.integers(2)), rng) for _ in range(t)]
s0 = samples[0]
print("sample bits:", s0.base.bit_size(), "->", s0.bit_size())

rec = learn.learn_from_shares(samples, t)
print("state rebuilt bit-exactly:", rec.to_bytes() == st.to_bytes())

# one share short is not enough
try:
    learn.learn_from_shares(samples[:-1], t)
except learn.InsufficientSamples as exc:
    print("with t-1 shares:", exc)
