"""Big keys, compact ciphertexts, and what a partial key buys you.

Run: python demos/02_big_keys.py
"""
import numpy as np

from bklab import bigkey

rng = np.random.default_rng(2)

for ell in (1024, 4096, 65536):
    h, key = bigkey.keygen(128, ell, rng)
    ct = bigkey.enc(h, 1, rng)
    print(f"ell={ell:6d}  key bytes={len(key.sk):5d}  ciphertext bits={ct.bit_size()}  dec={bigkey.dec(key, ct)}")

# encryption needs only the handle, which carries no key bits
h, key = bigkey.keygen(128, 1024, rng)
print("\nhandle:", h, "->", h.to_bytes().hex())

bits = rng.integers(2, size=5000).tolist()
cts = bigkey.enc_many(h, bits, rng)
print(f"\n{'rho':>5} {'kept':>5}  zero-fill  random-fill")
for rho in (0.0, 0.5, 0.9, 0.99, 1.0):
    pk = bigkey.partial_key(key, rho)
    zero = np.mean([bigkey.dec_attempt(pk, c) == m for c, m in zip(cts, bits)])
    rand = np.mean([bigkey.dec_attempt(pk, c, bigkey.FILL_RANDOM, rng) == m for c, m in zip(cts, bits)])
    print(f"{rho:5.2f} {pk.stored_bits:5d}  {zero:9.3f}  {rand:11.3f}")
# anything short of the full key is a coin flip
