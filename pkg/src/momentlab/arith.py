"""Exact integer arithmetic helpers: sieves, divisor sums, square-free kernels.

Everything here returns plain Python integers (unbounded) so that callers
never see rounding.  Sieves are built with numpy where values fit in int64
and fall back to multiplicative recurrences otherwise.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = [
    "smallest_prime_factor_sieve",
    "sigma_sieve",
    "divisor_count_sieve",
    "kernel_sieve",
    "primes_up_to",
    "squarefree_kernel",
    "is_perfect_square",
    "fnv64",
]


def smallest_prime_factor_sieve(n_max: int) -> np.ndarray:
    """spf[n] = smallest prime factor of n for 2 <= n <= n_max (spf[0]=spf[1]=0)."""
    spf = np.zeros(n_max + 1, dtype=np.int64)
    if n_max >= 2:
        spf[2::2] = 2
        for p in range(3, math.isqrt(n_max) + 1, 2):
            if spf[p] == 0:
                spf[p * p :: 2 * p] = np.where(spf[p * p :: 2 * p] == 0, p, spf[p * p :: 2 * p])
        odd = np.arange(3, n_max + 1, 2)
        rest = spf[3::2] == 0
        spf[3::2] = np.where(rest, odd, spf[3::2])
    return spf


def sigma_sieve(j: int, n_max: int) -> list[int]:
    """sigma_j(n) = sum of j-th powers of divisors, for n = 1..n_max.

    Returned list is 1-indexed (index 0 unused, set to 0).  Values are exact
    Python ints; computed multiplicatively from the smallest-prime-factor
    sieve so large j (hence >64-bit values) stay exact.
    """
    if j < 1 or n_max < 1:
        raise ValueError("sigma_sieve needs j >= 1 and n_max >= 1")
    spf = smallest_prime_factor_sieve(n_max)
    sig: list[int] = [0] * (n_max + 1)
    # ppow[n] = p^e where p = spf[n] and p^e || n
    ppow = [0] * (n_max + 1)
    sig[1] = 1
    ppow[1] = 1
    for n in range(2, n_max + 1):
        p = int(spf[n])
        m = n // p
        ppow[n] = ppow[m] * p if m % p == 0 else p
        q = ppow[n]
        if q == n:
            # prime power: sigma_j(p^e) = sigma_j(p^(e-1)) + (p^e)^j
            sig[n] = sig[m] + n**j
        else:
            sig[n] = sig[q] * sig[n // q]
    return sig


def divisor_count_sieve(n_max: int) -> np.ndarray:
    """d(n) for n = 1..n_max as int64 (index 0 unused)."""
    d = np.zeros(n_max + 1, dtype=np.int64)
    for k in range(1, n_max + 1):
        d[k::k] += 1
    return d


def kernel_sieve(n_max: int) -> tuple[list[int], list[int]]:
    """Decompose every n <= n_max as n = mult^2 * kernel with kernel square-free.

    Returns (kernel, mult) lists, 1-indexed.
    """
    spf = smallest_prime_factor_sieve(n_max)
    kernel = [0] * (n_max + 1)
    mult = [0] * (n_max + 1)
    kernel[1] = 1
    mult[1] = 1
    for n in range(2, n_max + 1):
        p = int(spf[n])
        p2 = p * p
        if n % p2 == 0:
            r = n // p2
            kernel[n] = kernel[r]
            mult[n] = mult[r] * p
        else:
            r = n // p
            kernel[n] = kernel[r] * p
            mult[n] = mult[r]
    return kernel, mult


def primes_up_to(n_max: int) -> list[int]:
    if n_max < 2:
        return []
    spf = smallest_prime_factor_sieve(n_max)
    idx = np.arange(n_max + 1)
    return [int(p) for p in idx[2:][spf[2:] == idx[2:]]]


def squarefree_kernel(n: int) -> tuple[int, int]:
    """(kernel, mult) with n = mult^2 * kernel, kernel square-free; trial division."""
    if n < 1:
        raise ValueError("n must be positive")
    kernel, mult = 1, 1
    d = 2
    while d * d <= n:
        if n % d == 0:
            e = 0
            while n % d == 0:
                n //= d
                e += 1
            mult *= d ** (e // 2)
            if e % 2:
                kernel *= d
        d += 1 if d == 2 else 2
    return kernel * n, mult


def is_perfect_square(n: int) -> tuple[bool, int]:
    """(True, isqrt(n)) when n is a perfect square, else (False, isqrt(n))."""
    if n < 0:
        return False, 0
    s = math.isqrt(n)
    return s * s == n, s


_FNV64_OFFSET = 0xCBF29CE484222325
_FNV64_PRIME = 0x100000001B3


def fnv64(payload: bytes) -> int:
    """FNV-1a 64-bit hash of a byte string."""
    h = _FNV64_OFFSET
    for b in payload:
        h ^= b
        h = (h * _FNV64_PRIME) & 0xFFFFFFFFFFFFFFFF
    return h
