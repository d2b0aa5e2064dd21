"""Truncated cosine-sum evaluation of A(x) and the fourth-power split.

The truncated main sum is evaluated with phases reduced at twice the working
precision (arguments reach ~1e6; naive reduction would lose everything).
The fourth power of the resonance sum splits into four pieces; they are
computed through powers of the phasor sum Z = Σ w(n)·e^(iθ_n), which is
term-for-term identical to the grouped quadruple summation (a literal
quadruple-loop version is kept as a small-y oracle).
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

import numpy as np
from mpmath import mp, mpf

from .forms import CoefficientTable, TableRangeError, partial_sum
from .precision import check_precision_bits, round_to, working_bits
from .resonance import _weights, exact_equal, s_trunc

__all__ = [
    "DECOMPOSE_Y_CAP",
    "TruncationProfile",
    "ProfilePoint",
    "truncated_A",
    "resonance_sum_R",
    "decompose_S",
    "decompose_S_literal",
    "truncation_error_profile",
]

DECOMPOSE_Y_CAP = 2000


def _phases(x, count: int, offset, work_bits: int) -> list:
    """4π√(n·x) + offset for 1 ≤ n ≤ count, reduced at doubled precision."""
    out = [mpf(0)] * (count + 1)
    with mp.workprec(2 * work_bits):
        four_pi = 4 * mp.pi
        xm = mpf(x)
        off = offset * mp.pi
        for n in range(1, count + 1):
            out[n] = four_pi * mp.sqrt(n * xm) + off
    return out


def _cos_core(table: CoefficientTable, x, n_terms: int, work_bits: int):
    """Σ_{n≤N} a(n)·n^(−κ/2−1/4)·cos(4π√(nx) − π/4) at the ambient precision."""
    weights = _weights(table, n_terms)
    phases = _phases(x, n_terms, mpf(-1) / 4, work_bits)
    total = mpf(0)
    for n in range(1, n_terms + 1):
        if weights[n]:
            total += weights[n] * mp.cos(phases[n])
    return total


def _validate_eval(table: CoefficientTable, n_terms: int, precision_bits: int) -> None:
    check_precision_bits(precision_bits)
    if n_terms < 1:
        raise ValueError("truncation length must be >= 1")
    if n_terms > table.n_max:
        raise TableRangeError(f"truncation {n_terms} exceeds table n_max={table.n_max}")


def resonance_sum_R(table: CoefficientTable, x, y: int, precision_bits: int):
    """R(x) = x^(κ/2−1/4)·Σ_{n≤y} a(n)n^(−κ/2−1/4)cos(4π√(nx) − π/4)."""
    _validate_eval(table, y, precision_bits)
    w_bits = working_bits(precision_bits)
    with mp.workprec(w_bits):
        value = mpf(x) ** (mpf(2 * table.weight - 1) / 4) * _cos_core(table, x, y, w_bits)
    return round_to(value, precision_bits)


def truncated_A(
    table: CoefficientTable, x, N: int, precision_bits: int, trunc_ratio: float = 1.0
):
    """Truncated main-sum approximation of A(x): R(x)/(√2·π) with N = y terms."""
    if x < 2:
        raise ValueError("x must be >= 2")
    if N > trunc_ratio * x:
        raise ValueError(f"need N <= {trunc_ratio}*x (got N={N}, x={x})")
    _validate_eval(table, N, precision_bits)
    w_bits = working_bits(precision_bits)
    with mp.workprec(w_bits):
        r = mpf(x) ** (mpf(2 * table.weight - 1) / 4) * _cos_core(table, x, N, w_bits)
        value = r / (mp.sqrt(2) * mp.pi)
    return round_to(value, precision_bits)


def _check_decompose_args(table: CoefficientTable, y: int, precision_bits: int, cap: int) -> None:
    if y > cap:
        raise ValueError(
            f"y={y} exceeds the quadruple-structure cap {cap}; "
            "use resonance.s_trunc for plain series values at large y"
        )
    _validate_eval(table, y, precision_bits)


def decompose_S(table: CoefficientTable, x, y: int, precision_bits: int):
    """The four pieces of R⁴(x): diagonal, balanced off-diagonal, 3+1, 4+0.

    With Z = Σ_{n≤y} w(n)e^(iθ_n) (w = ã/n^(3/4), θ_n = 4π√(nx) − π/4) the
    ordered quadruple sums collapse to S₁ = (3/8)s₄;₂(ã;y)·x^(2κ−1),
    S₂ = (3/8)(|Z|⁴ − s₄;₂)·x^(2κ−1), S₃ = (1/2)Re(Z³·conj(Z))·x^(2κ−1),
    S₄ = (1/8)Re(Z⁴)·x^(2κ−1), and S₁+S₂+S₃+S₄ = (x^(κ/2−1/4)·Re Z)⁴ = R⁴.
    """
    _check_decompose_args(table, y, precision_bits, DECOMPOSE_Y_CAP)
    w_bits = working_bits(precision_bits)
    s42 = s_trunc(table, 4, 2, y, precision_bits).value
    with mp.workprec(w_bits):
        weights = _weights(table, y)
        phases = _phases(x, y, mpf(-1) / 4, w_bits)
        z = mp.mpc(0)
        for n in range(1, y + 1):
            if weights[n]:
                z += weights[n] * mp.mpc(mp.cos(phases[n]), mp.sin(phases[n]))
        x_pow = mpf(x) ** (2 * table.weight - 1)
        abs2 = z.real * z.real + z.imag * z.imag
        z2 = z * z
        s1 = mpf(3) / 8 * s42 * x_pow
        s2 = mpf(3) / 8 * (abs2 * abs2 - s42) * x_pow
        s3 = mpf(1) / 2 * (z2 * z * z.conjugate()).real * x_pow
        s4 = mpf(1) / 8 * (z2 * z2).real * x_pow
    return tuple(round_to(v, precision_bits) for v in (s1, s2, s3, s4))


def decompose_S_literal(table: CoefficientTable, x, y: int, precision_bits: int):
    """Oracle for decompose_S: direct quadruple summation grouped by the four
    sign patterns (O(y⁴) terms, so y is capped small)."""
    _check_decompose_args(table, y, precision_bits, 64)
    w_bits = working_bits(precision_bits)
    with mp.workprec(w_bits):
        weights = _weights(table, y)
        with mp.workprec(2 * w_bits):
            sqrt_x = mp.sqrt(mpf(x))
            four_pi_sqrt_x = 4 * mp.pi * sqrt_x
            roots = [mp.sqrt(n) for n in range(y + 1)]
        acc1 = acc2 = acc3 = acc4 = mpf(0)
        for n in range(1, y + 1):
            for m in range(1, y + 1):
                for k in range(1, y + 1):
                    for l in range(1, y + 1):
                        w4 = weights[n] * weights[m] * weights[k] * weights[l]
                        if not w4:
                            continue
                        base = roots[n] + roots[m]
                        acc4 += w4 * mp.cos(four_pi_sqrt_x * (base + roots[k] + roots[l]) - mp.pi)
                        acc3 += w4 * mp.cos(
                            four_pi_sqrt_x * (base + roots[k] - roots[l]) - mp.pi / 2
                        )
                        if exact_equal(n, m, k, l):
                            acc1 += w4
                        else:
                            acc2 += w4 * mp.cos(four_pi_sqrt_x * (base - roots[k] - roots[l]))
        x_pow = mpf(x) ** (2 * table.weight - 1)
        pieces = (
            mpf(3) / 8 * acc1 * x_pow,
            mpf(3) / 8 * acc2 * x_pow,
            mpf(1) / 2 * acc3 * x_pow,
            mpf(1) / 8 * acc4 * x_pow,
        )
    return tuple(round_to(v, precision_bits) for v in pieces)


@dataclass(frozen=True)
class ProfilePoint:
    N: int
    max_rel_error: float


@dataclass(frozen=True)
class TruncationProfile:
    weight: int
    x_lo: float
    x_hi: float
    grid: tuple[float, ...]
    points: tuple[ProfilePoint, ...]
    max_abs_error: mpf
    fitted_slope: float


def truncation_error_profile(
    table: CoefficientTable,
    x_lo: float,
    x_hi: float,
    N_list: list[int],
    grid_size: int = 12,
    precision_bits: int = 128,
    seed: int = 0,
) -> TruncationProfile:
    """Max of |A(x) − truncated_A(x,N)|/x^(κ/2) over an x-grid, per N, with a
    log-log slope fit across the N sweep.

    Grid points sit near half-integers (jitter ≤ 1/4) so the step
    discontinuities of A never fall inside the float fuzz of a sample.
    """
    check_precision_bits(precision_bits)
    n_list = sorted(set(int(n) for n in N_list))
    if not n_list or n_list[0] < 1:
        raise ValueError("N_list must contain positive integers")
    if n_list[-1] > table.n_max:
        raise TableRangeError(f"N={n_list[-1]} exceeds table n_max={table.n_max}")
    if not 2 <= x_lo < x_hi <= table.n_max:
        raise ValueError("x-range must satisfy 2 <= x_lo < x_hi <= n_max")
    if n_list[-1] > x_lo:
        raise ValueError("largest N must stay <= x_lo (truncation shorter than x)")
    rng = random.Random(seed)
    anchors = rng.sample(range(math.ceil(x_lo), math.floor(x_hi)), grid_size)
    grid = tuple(sorted(a + 0.5 + rng.uniform(-0.25, 0.25) for a in anchors))
    w_bits = working_bits(precision_bits)
    max_rel = {n: 0.0 for n in n_list}
    max_abs = mpf(0)
    with mp.workprec(w_bits):
        weights = _weights(table, n_list[-1])
        inv_norm = 1 / (mp.sqrt(2) * mp.pi)
        for x in grid:
            a_exact = mpf(partial_sum(table, x))
            xm = mpf(x)
            x_fact = xm ** (mpf(2 * table.weight - 1) / 4) * inv_norm
            x_half_kappa = xm ** (table.weight // 2)
            phases = _phases(x, n_list[-1], mpf(-1) / 4, w_bits)
            total = mpf(0)
            checkpoints = set(n_list)
            for n in range(1, n_list[-1] + 1):
                if weights[n]:
                    total += weights[n] * mp.cos(phases[n])
                if n in checkpoints:
                    err = abs(a_exact - x_fact * total)
                    max_abs = max(max_abs, err)
                    max_rel[n] = max(max_rel[n], float(err / x_half_kappa))
    xs = np.log(np.array(n_list, dtype=np.float64))
    ys = np.log(np.array([max_rel[n] for n in n_list]))
    slope = float(np.polyfit(xs, ys, 1)[0]) if len(n_list) >= 2 else float("nan")
    return TruncationProfile(
        weight=table.weight,
        x_lo=x_lo,
        x_hi=x_hi,
        grid=grid,
        points=tuple(ProfilePoint(n, max_rel[n]) for n in n_list),
        max_abs_error=max_abs,
        fitted_slope=slope,
    )
