"""Exact enumeration of square-root resonances and the singular-series sums.

The solution sets of √n₁+…+√n_ℓ = √n_{ℓ+1}+…+√n_k are classified through
square-free kernels: square roots of distinct square-free integers are
linearly independent over the rationals, so every solution lives either in a
single kernel class or (for the 2+2 pattern) pairs off multiset-equal sides.
A brute-force scan guards the classification in the tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterator, Sequence

import numpy as np
from mpmath import mp, mpf

from .arith import is_perfect_square, kernel_sieve, squarefree_kernel
from .forms import CoefficientTable, TableRangeError
from .precision import check_precision_bits, mpf_from_fraction, round_to, working_bits

__all__ = [
    "SUPPORTED_PATTERNS",
    "UnsupportedPatternError",
    "KernelFamily",
    "SeriesValue",
    "TailFitReport",
    "exact_equal",
    "sqrt_combo_sign",
    "kernel_families",
    "enumerate_solutions",
    "brute_force_solutions",
    "s_trunc",
    "constant_Ck",
    "tail_fit",
]

SUPPORTED_PATTERNS = ((2, 1), (3, 2), (4, 2))


class UnsupportedPatternError(ValueError):
    """(k, l) outside the supported resonance patterns."""


def _check_pattern(k: int, l: int) -> None:
    if (k, l) not in SUPPORTED_PATTERNS:
        raise UnsupportedPatternError(f"(k,l)=({k},{l}) not in {SUPPORTED_PATTERNS}")


def exact_equal(n: int, m: int, k: int, l: int) -> bool:
    """Exact decision of √n+√m = √k+√l over positive integers.

    With D = n+m−k−l: for D=0 equality reduces to nm=kl; otherwise nm must be
    a perfect square s² with 4Ds = 4kl−4nm−D² and D+2s ≥ 0 (the sign condition
    makes the two squarings reversible).
    """
    for v in (n, m, k, l):
        if v < 1:
            raise ValueError("arguments must be positive integers")
    d = n + m - k - l
    if d == 0:
        return n * m == k * l
    square, s = is_perfect_square(n * m)
    if not square:
        return False
    return 4 * d * s == 4 * k * l - 4 * n * m - d * d and d + 2 * s >= 0


def sqrt_combo_sign(terms: Sequence[tuple[Rational | float, int]]) -> int:
    """Exact sign (−1, 0, +1) of Σ cᵢ·√rᵢ with rational cᵢ and integer rᵢ ≥ 0.

    Zero is decided algebraically: grouping by square-free kernel must cancel
    every coefficient.  A nonzero value is certified by evaluating at
    escalating precision until the rounding-error envelope excludes zero.
    """
    groups: dict[int, Fraction] = {}
    for c, r in terms:
        if r < 0:
            raise ValueError("radicands must be nonnegative")
        c = Fraction(c)
        if c == 0 or r == 0:
            continue
        q, mult = squarefree_kernel(r)
        groups[q] = groups.get(q, Fraction(0)) + c * mult
    items = sorted((q, c) for q, c in groups.items() if c != 0)
    if not items:
        return 0
    prec = 64
    guard = 8 + len(items).bit_length()
    while prec <= 1 << 16:
        with mp.workprec(prec):
            total = mpf(0)
            magnitude = mpf(0)
            for q, c in items:
                t = mpf_from_fraction(c) * mp.sqrt(q)
                total += t
                magnitude += abs(t)
            err = magnitude * mpf(2) ** (guard - prec)
            if abs(total) > err:
                return 1 if total > 0 else -1
        prec *= 2
    raise RuntimeError("sign certification exceeded the precision cap")


@dataclass(frozen=True)
class KernelFamily:
    """Same-kernel solution family: entries aᵢ²q with equal multiplier sums."""

    q: int
    left: tuple[int, ...]
    right: tuple[int, ...]

    def __post_init__(self):
        if squarefree_kernel(self.q)[0] != self.q:
            raise ValueError(f"kernel {self.q} is not squarefree")
        if any(v < 1 for v in self.left + self.right):
            raise ValueError("multipliers must be >= 1")
        if sum(self.left) != sum(self.right):
            raise ValueError("multiplier sums must agree")

    def realize(self) -> tuple[int, ...]:
        return tuple(a * a * self.q for a in self.left + self.right)


@dataclass(frozen=True)
class SeriesValue:
    k: int
    l: int
    y: int
    precision_bits: int
    value: mpf


def kernel_families(k: int, l: int, y: int) -> Iterator[KernelFamily]:
    """Same-kernel families with every realized entry ≤ y, kernel ascending."""
    _check_pattern(k, l)
    if y < 1:
        raise ValueError("y must be >= 1")
    kernel, _ = kernel_sieve(y)
    for q in range(1, y + 1):
        if kernel[q] != q:
            continue
        if (k, l) == (2, 1):
            for a in range(1, math.isqrt(y // q) + 1):
                yield KernelFamily(q, (a,), (a,))
        elif (k, l) == (3, 2):
            smax = math.isqrt(y // q)
            for a in range(1, smax):
                for b in range(1, smax - a + 1):
                    yield KernelFamily(q, (a, b), (a + b,))
        else:
            m = math.isqrt(y // q)
            for s in range(2, 2 * m + 1):
                lo, hi = max(1, s - m), min(m, s - 1)
                for a in range(lo, hi + 1):
                    for c in range(lo, hi + 1):
                        yield KernelFamily(q, (a, s - a), (c, s - c))


def enumerate_solutions(k: int, l: int, y: int) -> Iterator[tuple[int, ...]]:
    """All ordered tuples ≤ y solving the square-root equation, no duplicates."""
    _check_pattern(k, l)
    for family in kernel_families(k, l, y):
        yield family.realize()
    if (k, l) == (4, 2):
        # multiset-equal sides with two distinct kernels
        kernel, _ = kernel_sieve(y)
        for n1 in range(1, y + 1):
            for n2 in range(1, y + 1):
                if kernel[n1] != kernel[n2]:
                    yield (n1, n2, n1, n2)
                    yield (n1, n2, n2, n1)


def brute_force_solutions(k: int, l: int, y: int) -> set[tuple[int, ...]]:
    """Oracle: full grid scan with an exact final test.

    A float prefilter keeps only tuples with |defect| < 1e-6; true solutions
    evaluate to < 1e-12 in float64 at these magnitudes, so none are lost, and
    each survivor is confirmed exactly.
    """
    _check_pattern(k, l)
    roots = np.sqrt(np.arange(y + 1, dtype=np.float64))
    out: set[tuple[int, ...]] = set()
    idx = np.arange(1, y + 1)
    if (k, l) == (2, 1):
        for n1 in idx:
            cand = idx[np.abs(roots[n1] - roots[1:]) < 1e-6]
            out.update((int(n1), int(n2)) for n2 in cand if int(n1) == int(n2))
        return out
    if (k, l) == (3, 2):
        pair = roots[1:, None] + roots[None, 1:]
        for n3 in idx:
            hits = np.argwhere(np.abs(pair - roots[n3]) < 1e-6)
            for i, j in hits:
                t = (int(i + 1), int(j + 1), int(n3))
                if sqrt_combo_sign([(1, t[0]), (1, t[1]), (-1, t[2])]) == 0:
                    out.add(t)
        return out
    pair = (roots[1:, None] + roots[None, 1:]).ravel()
    for n1 in idx:
        for n2 in idx:
            s = roots[n1] + roots[n2]
            hits = np.nonzero(np.abs(pair - s) < 1e-6)[0]
            for h in hits:
                n3, n4 = int(h) // y + 1, int(h) % y + 1
                if exact_equal(int(n1), int(n2), n3, n4):
                    out.add((int(n1), int(n2), n3, n4))
    return out


def _weights(table: CoefficientTable, y: int) -> list:
    """w(n) = a(n)/n^(κ/2+1/4) for 1 ≤ n ≤ y at the current mp precision."""
    half = table.weight // 2
    w = [mpf(0)] * (y + 1)
    for n in range(1, y + 1):
        root4 = mp.sqrt(mp.sqrt(mpf(n)))
        w[n] = mpf(table.a[n]) / (mpf(n**half) * root4)
    return w


def _sum_21(w: list, y: int) -> mpf:
    total = mpf(0)
    for n in range(1, y + 1):
        total += w[n] * w[n]
    return total


def _sum_32(w: list, y: int, kernel: list[int]) -> mpf:
    total = mpf(0)
    for q in range(1, y + 1):
        if kernel[q] != q:
            continue
        smax = math.isqrt(y // q)
        for s in range(2, smax + 1):
            conv = mpf(0)
            for a in range(1, s):
                conv += w[a * a * q] * w[(s - a) * (s - a) * q]
            total += conv * w[s * s * q]
    return total


def _sum_42(w: list, y: int, kernel: list[int]) -> mpf:
    same = mpf(0)
    p_all = mpf(0)
    p_sq = mpf(0)
    for q in range(1, y + 1):
        if kernel[q] != q:
            continue
        m = math.isqrt(y // q)
        vals = [w[a * a * q] for a in range(1, m + 1)]
        p_q = mpf(0)
        for v in vals:
            p_q += v * v
        p_all += p_q
        p_sq += p_q * p_q
        for s in range(2, 2 * m + 1):
            lo, hi = max(1, s - m), min(m, s - 1)
            conv = mpf(0)
            for a in range(lo, hi + 1):
                conv += vals[a - 1] * vals[s - a - 1]
            same += conv * conv
    # multiset-equal sides across distinct kernels, two arrangements each
    return same + 2 * (p_all * p_all - p_sq)


def s_trunc(table: CoefficientTable, k: int, l: int, y: int, precision_bits: int) -> SeriesValue:
    """Truncated singular series Σ ∏ã(nᵢ)/∏nᵢ^(3/4) over solutions ≤ y."""
    _check_pattern(k, l)
    check_precision_bits(precision_bits)
    if y < 1:
        raise ValueError("y must be >= 1")
    if y > table.n_max:
        raise TableRangeError(f"y={y} exceeds table n_max={table.n_max}")
    with mp.workprec(working_bits(precision_bits)):
        w = _weights(table, y)
        if (k, l) == (2, 1):
            total = _sum_21(w, y)
        else:
            kernel, _ = kernel_sieve(y)
            total = _sum_32(w, y, kernel) if (k, l) == (3, 2) else _sum_42(w, y, kernel)
    return SeriesValue(k, l, y, precision_bits, round_to(total, precision_bits))


_CONSTANT_L = {2: 1, 3: 2, 4: 2}


def constant_Ck(table: CoefficientTable, k: int, y: int, precision_bits: int) -> mpf:
    """C₂, C₃, or C₄ at truncation y: prefactor times the truncated series."""
    if k not in _CONSTANT_L:
        raise ValueError(f"k={k} unsupported; constants exist for k in {sorted(_CONSTANT_L)}")
    s = s_trunc(table, k, _CONSTANT_L[k], y, precision_bits)
    kappa = table.weight
    with mp.workprec(working_bits(precision_bits)):
        if k == 2:
            value = s.value / ((4 * kappa + 2) * mp.pi**2)
        elif k == 3:
            value = 3 * s.value / (4 * (6 * kappa + 1) * mp.pi**3)
        else:
            value = 3 * s.value / (64 * kappa * mp.pi**4)
    return round_to(value, precision_bits)


@dataclass(frozen=True)
class TailFitReport:
    """Dyadic-difference decay fit; extrapolation is heuristic by construction."""

    k: int
    l: int
    y_list: tuple[int, ...]
    values: tuple
    abs_diffs: tuple[float, ...]
    slope: float
    extrapolated: mpf | None
    error_bar: float | None
    excluded_points: int


def tail_fit(
    table: CoefficientTable,
    k: int,
    l: int,
    y_list: Sequence[int],
    precision_bits: int,
    values: Sequence | None = None,
) -> TailFitReport:
    """Fit log|s(2y)−s(y)| against log y over a dyadic ladder of truncations.

    Precomputed series values may be passed to skip the s_trunc calls.
    """
    y_list = list(y_list)
    if len(y_list) < 4:
        raise ValueError("need at least 4 dyadic truncation points")
    for a, b in zip(y_list, y_list[1:]):
        if b != 2 * a:
            raise ValueError("y_list must be dyadic (each entry twice the last)")
    if values is None:
        values = [s_trunc(table, k, l, y, precision_bits).value for y in y_list]
    else:
        values = list(values)
        if len(values) != len(y_list):
            raise ValueError("values length must match y_list")
    diffs = [values[i + 1] - values[i] for i in range(len(values) - 1)]
    xs, ys = [], []
    excluded = 0
    for y, d in zip(y_list[:-1], diffs):
        if d == 0:
            excluded += 1
            continue
        xs.append(math.log(y))
        ys.append(float(mp.log(abs(d))))
    if len(xs) < 2:
        raise ValueError("not enough nonzero dyadic differences to fit")
    slope = float(np.polyfit(np.array(xs), np.array(ys), 1)[0])
    ratio = 2.0**slope
    if ratio < 0.999:
        tail_factor = ratio / (1.0 - ratio)
        extrapolated = round_to(values[-1] + diffs[-1] * tail_factor, precision_bits)
        error_bar = abs(float(diffs[-1])) * tail_factor
    else:
        extrapolated = None
        error_bar = None
    return TailFitReport(
        k=k,
        l=l,
        y_list=tuple(y_list),
        values=tuple(values),
        abs_diffs=tuple(abs(float(d)) for d in diffs),
        slope=slope,
        extrapolated=extrapolated,
        error_bar=error_bar,
        excluded_points=excluded,
    )
