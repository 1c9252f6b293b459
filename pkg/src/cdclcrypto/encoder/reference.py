"""Native SHA-1 / SHA-256 with round-reduced compression.

"r rounds" means r compression steps followed by the usual feed-forward of
the chaining value. The message schedule is expanded only as far as step
r - 1 needs. The full-round functions agree with :mod:`hashlib`.
"""
from __future__ import annotations

import struct
from typing import Sequence

M32 = 0xFFFFFFFF

SHA256_K = (
    0x428a2f98, 0x71374491, 0xb5c0fbcf, 0xe9b5dba5, 0x3956c25b, 0x59f111f1, 0x923f82a4, 0xab1c5ed5,
    0xd807aa98, 0x12835b01, 0x243185be, 0x550c7dc3, 0x72be5d74, 0x80deb1fe, 0x9bdc06a7, 0xc19bf174,
    0xe49b69c1, 0xefbe4786, 0x0fc19dc6, 0x240ca1cc, 0x2de92c6f, 0x4a7484aa, 0x5cb0a9dc, 0x76f988da,
    0x983e5152, 0xa831c66d, 0xb00327c8, 0xbf597fc7, 0xc6e00bf3, 0xd5a79147, 0x06ca6351, 0x14292967,
    0x27b70a85, 0x2e1b2138, 0x4d2c6dfc, 0x53380d13, 0x650a7354, 0x766a0abb, 0x81c2c92e, 0x92722c85,
    0xa2bfe8a1, 0xa81a664b, 0xc24b8b70, 0xc76c51a3, 0xd192e819, 0xd6990624, 0xf40e3585, 0x106aa070,
    0x19a4c116, 0x1e376c08, 0x2748774c, 0x34b0bcb5, 0x391c0cb3, 0x4ed8aa4a, 0x5b9cca4f, 0x682e6ff3,
    0x748f82ee, 0x78a5636f, 0x84c87814, 0x8cc70208, 0x90befffa, 0xa4506ceb, 0xbef9a3f7, 0xc67178f2,
)

SHA256_IV = (0x6a09e667, 0xbb67ae85, 0x3c6ef372, 0xa54ff53a,
             0x510e527f, 0x9b05688c, 0x1f83d9ab, 0x5be0cd19)

SHA1_IV = (0x67452301, 0xEFCDAB89, 0x98BADCFE, 0x10325476, 0xC3D2E1F0)
SHA1_K = (0x5A827999, 0x6ED9EBA1, 0x8F1BBCDC, 0xCA62C1D6)

MAX_ROUNDS = {"sha1": 80, "sha256": 64}
DIGEST_WORDS = {"sha1": 5, "sha256": 8}


def rotr(x: int, k: int) -> int:
    return ((x >> k) | (x << (32 - k))) & M32 if k else x


def rotl(x: int, k: int) -> int:
    return rotr(x, (32 - k) % 32)


def ch(x: int, y: int, z: int) -> int:
    return (x & y) ^ (~x & z) & M32


def maj(x: int, y: int, z: int) -> int:
    return (x & y) ^ (x & z) ^ (y & z)


def big_sigma0(x: int) -> int:
    return rotr(x, 2) ^ rotr(x, 13) ^ rotr(x, 22)


def big_sigma1(x: int) -> int:
    return rotr(x, 6) ^ rotr(x, 11) ^ rotr(x, 25)


def small_sigma0(x: int) -> int:
    return rotr(x, 7) ^ rotr(x, 18) ^ (x >> 3)


def small_sigma1(x: int) -> int:
    return rotr(x, 17) ^ rotr(x, 19) ^ (x >> 10)


def pad(message: bytes) -> list[list[int]]:
    """FIPS 180-4 padding, split into 16-word big-endian blocks."""
    ml = len(message) * 8
    data = message + b"\x80" + b"\x00" * ((55 - len(message)) % 64) + struct.pack(">Q", ml)
    return [list(struct.unpack(">16I", data[i:i + 64])) for i in range(0, len(data), 64)]


def _check_rounds(fn: str, rounds: int) -> None:
    if not 1 <= rounds <= MAX_ROUNDS[fn]:
        raise ValueError(f"{fn} rounds must be in 1..{MAX_ROUNDS[fn]}, got {rounds}")


# ---------------------------------------------------------------- SHA-256

def sha256_schedule(block: Sequence[int], rounds: int = 64) -> list[int]:
    w = list(block[:16])
    for t in range(16, rounds):
        w.append((small_sigma1(w[t - 2]) + w[t - 7] + small_sigma0(w[t - 15]) + w[t - 16]) & M32)
    return w


def sha256_step(state: Sequence[int], t: int, w: int) -> tuple[int, ...]:
    a, b, c, d, e, f, g, h = state
    t1 = (h + big_sigma1(e) + ch(e, f, g) + SHA256_K[t] + w) & M32
    t2 = (big_sigma0(a) + maj(a, b, c)) & M32
    return ((t1 + t2) & M32, a, b, c, (d + t1) & M32, e, f, g)


def sha256_rounds(state: Sequence[int], words: dict[int, int] | Sequence[int],
                  start: int, stop: int) -> tuple[int, ...]:
    """Run steps ``start .. stop-1``. ``words[t]`` is the schedule word W_t."""
    st = tuple(state)
    for t in range(start, stop):
        st = sha256_step(st, t, words[t])
    return st


def sha256_compress(block: Sequence[int], iv: Sequence[int] = SHA256_IV,
                    rounds: int = 64, feed_forward: bool = True) -> tuple[int, ...]:
    _check_rounds("sha256", rounds)
    w = sha256_schedule(block, rounds)
    st = sha256_rounds(iv, w, 0, rounds)
    if not feed_forward:
        return st
    return tuple((x + y) & M32 for x, y in zip(iv, st))


def sha256(message: bytes, rounds: int = 64) -> bytes:
    h: Sequence[int] = SHA256_IV
    for block in pad(message):
        h = sha256_compress(block, h, rounds)
    return struct.pack(">8I", *h)


# ------------------------------------------------------------------ SHA-1

def sha1_f(t: int, b: int, c: int, d: int) -> int:
    if t < 20:
        return ch(b, c, d)
    if t < 40 or t >= 60:
        return b ^ c ^ d
    return maj(b, c, d)


def sha1_schedule(block: Sequence[int], rounds: int = 80) -> list[int]:
    w = list(block[:16])
    for t in range(16, rounds):
        w.append(rotl(w[t - 3] ^ w[t - 8] ^ w[t - 14] ^ w[t - 16], 1))
    return w


def sha1_step(state: Sequence[int], t: int, w: int) -> tuple[int, ...]:
    a, b, c, d, e = state
    temp = (rotl(a, 5) + sha1_f(t, b, c, d) + e + SHA1_K[t // 20] + w) & M32
    return (temp, a, rotl(b, 30), c, d)


def sha1_rounds(state: Sequence[int], words: dict[int, int] | Sequence[int],
                start: int, stop: int) -> tuple[int, ...]:
    st = tuple(state)
    for t in range(start, stop):
        st = sha1_step(st, t, words[t])
    return st


def sha1_compress(block: Sequence[int], iv: Sequence[int] = SHA1_IV,
                  rounds: int = 80, feed_forward: bool = True) -> tuple[int, ...]:
    _check_rounds("sha1", rounds)
    w = sha1_schedule(block, rounds)
    st = sha1_rounds(iv, w, 0, rounds)
    if not feed_forward:
        return st
    return tuple((x + y) & M32 for x, y in zip(iv, st))


def sha1(message: bytes, rounds: int = 80) -> bytes:
    h: Sequence[int] = SHA1_IV
    for block in pad(message):
        h = sha1_compress(block, h, rounds)
    return struct.pack(">5I", *h)


def compress(fn: str, block: Sequence[int], iv: Sequence[int] | None = None,
             rounds: int | None = None) -> tuple[int, ...]:
    if fn == "sha256":
        return sha256_compress(block, iv or SHA256_IV, rounds or 64)
    if fn == "sha1":
        return sha1_compress(block, iv or SHA1_IV, rounds or 80)
    raise ValueError(f"unknown function {fn!r}")


def digest_hex(words: Sequence[int]) -> str:
    return "".join(f"{w:08x}" for w in words)
