"""Exact integer power-series prefixes (q-expansions) and the classical forms.

A QSeries stores the first `length` coefficients of a q-expansion as exact
integers.  Products are truncated to the common length; the heavy lifting is
the exact convolution in `ntt`.
"""

from __future__ import annotations

from dataclasses import dataclass

from .arith import sigma_sieve
from .ntt import NTT_MIN_LENGTH, _crt_signed, _ntt, _residues_mod, convolve, ntt_primes

__all__ = [
    "QSeries",
    "SeriesError",
    "EisensteinWeightError",
    "LengthMismatchError",
    "SeriesConsistencyError",
    "eisenstein",
    "multiply",
    "power",
    "subtract",
    "eta_product_24",
    "delta",
    "EISENSTEIN_CONSTANTS",
]


class SeriesError(Exception):
    """Base class for series-arithmetic failures."""


class EisensteinWeightError(SeriesError, ValueError):
    """Requested Eisenstein weight is outside {4, 6, 8, 10, 14}."""


class LengthMismatchError(SeriesError, ValueError):
    """Binary operation on series of different lengths."""


class SeriesConsistencyError(SeriesError):
    """An internal exactness invariant failed (signals a series bug)."""


@dataclass(frozen=True)
class QSeries:
    """Exact integer q-expansion prefix; index n holds the q^n coefficient."""

    coeffs: tuple[int, ...]

    def __post_init__(self):
        if len(self.coeffs) < 1:
            raise ValueError("QSeries needs at least one coefficient")

    @property
    def length(self) -> int:
        return len(self.coeffs)

    def __getitem__(self, n: int) -> int:
        return self.coeffs[n]


EISENSTEIN_CONSTANTS = {4: 240, 6: -504, 8: 480, 10: -264, 14: -24}


def eisenstein(weight: int, n_max: int) -> QSeries:
    """Normalized Eisenstein series 1 + c_w Σ σ_{w−1}(n) q^n, truncated to n_max."""
    if weight not in EISENSTEIN_CONSTANTS:
        raise EisensteinWeightError(f"weight {weight} not in {sorted(EISENSTEIN_CONSTANTS)}")
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    if n_max == 1:
        return QSeries((1,))
    c = EISENSTEIN_CONSTANTS[weight]
    sig = sigma_sieve(weight - 1, n_max - 1)
    return QSeries((1,) + tuple(c * sig[n] for n in range(1, n_max)))


def _check_lengths(a: QSeries, b: QSeries) -> int:
    if a.length != b.length:
        raise LengthMismatchError(f"lengths differ: {a.length} != {b.length}")
    return a.length


def multiply(a: QSeries, b: QSeries) -> QSeries:
    """Exact Cauchy product truncated to the common length."""
    n = _check_lengths(a, b)
    out_len = 2 * n - 1
    if out_len >= NTT_MIN_LENGTH:
        wrapped = _multiply_cyclic(list(a.coeffs), list(b.coeffs))
        if wrapped is not None:
            return QSeries(tuple(wrapped))
    return QSeries(tuple(convolve(list(a.coeffs), list(b.coeffs))[:n]))


def _multiply_cyclic(a: list[int], b: list[int]) -> list[int] | None:
    """Truncated product via a single length-P cyclic transform when the
    wrap-around touches at most a few leading indices (corrected directly).

    Returns None when the shape does not qualify; caller falls back to the
    full linear convolution.
    """
    n = len(a)
    out_len = 2 * n - 1
    p2 = 1 << (n - 1).bit_length()
    excess = out_len - p2  # indices 0..excess-1 receive c_full[i + p2]
    if not 0 <= excess <= 64:
        return None
    max_a = max(abs(c) for c in a)
    max_b = max(abs(c) for c in b)
    if max_a == 0 or max_b == 0:
        return [0] * n
    # cyclic entries hold c_full[i] + c_full[i+p2]: twice the linear bound
    bound = 4 * max_a * max_b * n + 1
    log2_length = p2.bit_length() - 1
    count = 1
    while True:
        primes = ntt_primes(log2_length, count)
        if _prod(p for p, _ in primes) > bound:
            break
        count += 1
    res = []
    for p, g in primes:
        fa = _ntt(_residues_mod(a, p, p2), p, g, inverse=False)
        fb = _ntt(_residues_mod(b, p, p2), p, g, inverse=False)
        res.append(_ntt(fa * fb % p, p, g, inverse=True))
    out = _crt_signed(res, [p for p, _ in primes])
    for i in range(excess):
        # subtract the wrapped tail coefficient c_full[i + p2]
        tail = sum(a[j] * b[i + p2 - j] for j in range(i + p2 - (n - 1), n))
        out[i] -= tail
    return out[:n]


def _prod(xs) -> int:
    out = 1
    for x in xs:
        out *= x
    return out


def power(a: QSeries, e: int) -> QSeries:
    """Exact e-th power (binary exponentiation), truncated to a.length."""
    if e < 1:
        raise ValueError("exponent must be >= 1")
    result: QSeries | None = None
    base = a
    while True:
        if e & 1:
            result = base if result is None else multiply(result, base)
        e >>= 1
        if e == 0:
            break
        base = multiply(base, base)
    assert result is not None
    return result


def subtract(a: QSeries, b: QSeries) -> QSeries:
    _check_lengths(a, b)
    return QSeries(tuple(x - y for x, y in zip(a.coeffs, b.coeffs)))


def eta_product_24(n_max: int) -> QSeries:
    """q·∏_{n≥1}(1−q^n)^24 truncated to n_max coefficients.

    ∏(1−q^n) is expanded by the pentagonal-number theorem, then raised to the
    24th power; the result is the independent route to the discriminant form.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    pent = [0] * n_max
    pent[0] = 1
    k = 1
    while True:
        hit = False
        for g in (k * (3 * k - 1) // 2, k * (3 * k + 1) // 2):
            if g < n_max:
                pent[g] = -1 if k % 2 else 1
                hit = True
        if not hit:
            break
        k += 1
    eta24 = power(QSeries(tuple(pent)), 24)
    return QSeries((0,) + eta24.coeffs[: n_max - 1])


def delta(n_max: int) -> QSeries:
    """Δ = (E₄³ − E₆²)/1728 truncated to n_max; divisibility checked exactly."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    e4 = eisenstein(4, n_max)
    e6 = eisenstein(6, n_max)
    diff = subtract(power(e4, 3), power(e6, 2))
    out = []
    for n, c in enumerate(diff.coeffs):
        q, r = divmod(c, 1728)
        if r != 0:
            raise SeriesConsistencyError(f"E4^3 - E6^2 not divisible by 1728 at q^{n}")
        out.append(q)
    return QSeries(tuple(out))
