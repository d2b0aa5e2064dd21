"""Exact integer convolution via number-theoretic transforms.

Coefficients are unbounded Python ints.  The fast path reduces them modulo a
set of word-sized primes p = c*2^e + 1 (p < 2^31 so int64 butterflies never
overflow), runs a vectorized radix-2 transform per prime, and reassembles the
exact signed result by CRT.  A schoolbook convolution is kept as the oracle;
both paths must agree bit for bit.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

__all__ = [
    "is_prime",
    "ntt_primes",
    "primitive_root",
    "convolve_schoolbook",
    "convolve",
    "NTT_MIN_LENGTH",
]

# below this output length the schoolbook path is cheaper than transform setup
NTT_MIN_LENGTH = 256

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, valid for all n < 3.3e24."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _factor_small(n: int) -> list[int]:
    """Distinct prime factors by trial division (n fits well under 2**31)."""
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out.append(n)
    return out


def primitive_root(p: int) -> int:
    """Smallest primitive root modulo prime p."""
    factors = _factor_small(p - 1)
    g = 2
    while True:
        if all(pow(g, (p - 1) // q, p) != 1 for q in factors):
            return g
        g += 1


@lru_cache(maxsize=None)
def ntt_primes(log2_length: int, count: int) -> tuple[tuple[int, int], ...]:
    """`count` primes p = c*2**log2_length + 1 < 2**31, largest first.

    Returns ((p, g), ...) with g a primitive root mod p.
    """
    length = 1 << log2_length
    out = []
    c = (2**31 - 1) // length
    while c >= 1 and len(out) < count:
        p = c * length + 1
        if is_prime(p):
            out.append((p, primitive_root(p)))
        c -= 1
    if len(out) < count:
        raise ValueError(f"not enough transform primes for length 2**{log2_length}")
    return tuple(out)


def _bit_reverse_permutation(logn: int) -> np.ndarray:
    idx = np.arange(1 << logn, dtype=np.int64)
    rev = np.zeros_like(idx)
    for i in range(logn):
        rev |= ((idx >> i) & 1) << (logn - 1 - i)
    return rev


def _twiddles(wm: int, half: int, p: int) -> np.ndarray:
    """[wm**0, ..., wm**(half-1)] mod p, built by doubling."""
    ws = np.ones(1, dtype=np.int64)
    step = wm
    while ws.shape[0] < half:
        ws = np.concatenate([ws, (ws * step) % p])
        step = step * step % p
    return ws[:half]


def _ntt(vec: np.ndarray, p: int, g: int, inverse: bool) -> np.ndarray:
    """In-place-style radix-2 DIT transform of int64 residues mod p."""
    n = vec.shape[0]
    logn = n.bit_length() - 1
    a = vec[_bit_reverse_permutation(logn)].copy()
    for s in range(1, logn + 1):
        m = 1 << s
        half = m >> 1
        wm = pow(g, (p - 1) // m, p)
        if inverse:
            wm = pow(wm, p - 2, p)
        ws = _twiddles(wm, half, p)
        a = a.reshape(-1, m)
        hi = (a[:, half:] * ws) % p
        lo = a[:, :half].copy()
        a[:, :half] = (lo + hi) % p
        a[:, half:] = (lo - hi) % p
        a = a.reshape(-1)
    if inverse:
        n_inv = pow(n, p - 2, p)
        # n_inv < 2**31 and entries < 2**31, so the product fits int64
        a = (a * n_inv) % p
    return a


def _residues_mod(coeffs: list[int], p: int, length: int) -> np.ndarray:
    out = np.zeros(length, dtype=np.int64)
    out[: len(coeffs)] = [c % p for c in coeffs]
    return out


def _crt_signed(residues: list[np.ndarray], primes: list[int]) -> list[int]:
    """Garner reconstruction to centered (signed) integers."""
    k = len(primes)
    digits = [residues[0] % primes[0]]
    for i in range(1, k):
        p = primes[i]
        v = digits[0] % p
        pref = primes[0] % p
        for j in range(1, i):
            v = (v + digits[j] * pref) % p
            pref = pref * primes[j] % p
        inv = pow(pref, p - 2, p)
        digits.append(((residues[i] - v) * inv) % p)
    modulus = math.prod(primes)
    half = modulus // 2
    cols = [d.tolist() for d in digits]
    out = list(cols[0])
    prefix = 1
    for j in range(1, k):
        prefix *= primes[j - 1]
        col = cols[j]
        for t in range(len(out)):
            out[t] += prefix * col[t]
    return [x - modulus if x > half else x for x in out]


def convolve_schoolbook(a: list[int], b: list[int]) -> list[int]:
    """O(len(a)*len(b)) exact convolution; the reference oracle."""
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai == 0:
            continue
        for j, bj in enumerate(b):
            out[i + j] += ai * bj
    return out


def convolve(a: list[int], b: list[int]) -> list[int]:
    """Exact integer convolution, transform-based for long inputs."""
    if not a or not b:
        return []
    out_len = len(a) + len(b) - 1
    if out_len < NTT_MIN_LENGTH:
        return convolve_schoolbook(a, b)
    max_a = max(abs(c) for c in a)
    max_b = max(abs(c) for c in b)
    if max_a == 0 or max_b == 0:
        return [0] * out_len
    bound = 2 * max_a * max_b * min(len(a), len(b)) + 1
    length = 1 << (out_len - 1).bit_length()
    log2_length = length.bit_length() - 1
    count = 1
    while True:
        primes = ntt_primes(log2_length, count)
        if math.prod(p for p, _ in primes) > bound:
            break
        count += 1
    res = []
    for p, g in primes:
        fa = _ntt(_residues_mod(a, p, length), p, g, inverse=False)
        fb = _ntt(_residues_mod(b, p, length), p, g, inverse=False)
        res.append(_ntt(fa * fb % p, p, g, inverse=True))
    return _crt_signed(res, [p for p, _ in primes])[:out_len]
