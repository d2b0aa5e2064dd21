"""Exact power moments of A(n), predicted main terms, and the error-term fit.

Moments are exact integers (exact rationals for fractional endpoints); the
main term and its constant enter only at reporting time, through mpmath at a
controlled precision. Everything here treats the coefficient table as ground
truth and never rounds an exact quantity early.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
from mpmath import mp, mpf

from .forms import CoefficientTable, TableRangeError
from .precision import check_precision_bits, round_to, working_bits

__all__ = [
    "MIN_MOMENT_DEGREE",
    "MAX_MOMENT_DEGREE",
    "MomentReport",
    "MomentFit",
    "OscillatoryReport",
    "moment_exact",
    "moment_series",
    "moment_exponent",
    "main_term",
    "error_exponent_fit",
    "oscillatory_check",
]

MIN_MOMENT_DEGREE = 2
MAX_MOMENT_DEGREE = 8
FIT_WARMUP_T = 256


def _check_degree(k: int) -> None:
    if not MIN_MOMENT_DEGREE <= k <= MAX_MOMENT_DEGREE:
        raise ValueError(f"moment degree must lie in [{MIN_MOMENT_DEGREE}, {MAX_MOMENT_DEGREE}]")


def moment_exact(table: CoefficientTable, k: int, T):
    """Σ_{n=1}^{⌈T⌉−1} A(n)^k · |[n, n+1) ∩ [1, T]| as an exact number.

    Integer T gives an int; a fractional endpoint adds the final partial
    interval with an exact rational factor and gives a Fraction.
    """
    _check_degree(k)
    t_frac = Fraction(T)
    if t_frac < 2:
        raise ValueError("T must be >= 2")
    if t_frac > table.n_max:
        raise TableRangeError(f"T={T} exceeds table n_max={table.n_max}")
    floor_t = int(t_frac)
    total = 0
    for n in range(1, floor_t):
        total += table.A_value(n) ** k
    rest = t_frac - floor_t
    if rest:
        return total + rest * table.A_value(floor_t) ** k
    return total


def moment_series(table: CoefficientTable, k: int, T_list) -> list[int]:
    """moment_exact at several integer endpoints, one pass over the table."""
    _check_degree(k)
    ts = sorted(set(int(t) for t in T_list))
    if ts != sorted(int(t) for t in T_list):
        raise ValueError("endpoints must be distinct integers")
    if ts[0] < 2:
        raise ValueError("T must be >= 2")
    if ts[-1] > table.n_max:
        raise TableRangeError(f"T={ts[-1]} exceeds table n_max={table.n_max}")
    out = []
    total = 0
    next_idx = 0
    for n in range(1, ts[-1]):
        while next_idx < len(ts) and ts[next_idx] == n:
            out.append(total)
            next_idx += 1
        total += table.A_value(n) ** k
    out.append(total)
    order = {t: i for i, t in enumerate(ts)}
    return [out[order[int(t)]] for t in T_list]


def moment_exponent(weight: int, k: int) -> Fraction:
    """Exponent of the predicted main term C_k·T^(1+k(2κ−1)/4), exact."""
    e = 1 + Fraction(k * (2 * weight - 1), 4)
    if k == 4:
        assert e == 2 * weight
    elif k == 2:
        assert e == Fraction(2 * weight + 1, 2)
    elif k == 3:
        assert e == Fraction(6 * weight + 1, 4)
    return e


def main_term(c_k, weight: int, k: int, T, precision_bits: int):
    """C_k · T^(1+k(2κ−1)/4) at the requested precision."""
    _check_degree(k)
    check_precision_bits(precision_bits)
    e = moment_exponent(weight, k)
    with mp.workprec(working_bits(precision_bits)):
        value = mpf(c_k) * mpf(T) ** (mpf(e.numerator) / e.denominator)
    return round_to(value, precision_bits)


@dataclass(frozen=True)
class MomentReport:
    weight: int
    k: int
    T: int
    exact_moment: int
    main_term: mpf
    error: mpf
    ratio: mpf


@dataclass(frozen=True)
class MomentFit:
    reports: tuple[MomentReport, ...]
    slope: float
    delta_hat: float
    y_used: int
    warmup: int
    excluded: tuple[int, ...]


def error_exponent_fit(
    table: CoefficientTable,
    c_k,
    y_used: int,
    k: int,
    T_list,
    precision_bits: int = 128,
    warmup: int = FIT_WARMUP_T,
) -> MomentFit:
    """Fit log|M_k(T) − C_k·T^e| against log T over the endpoint sweep.

    Endpoints below the warm-up threshold and endpoints where the error is
    exactly zero are excluded from the fit (both would poison the log).
    delta_hat is the implied error exponent deficit e − slope.
    """
    check_precision_bits(precision_bits)
    moments = moment_series(table, k, T_list)
    reports = []
    excluded = []
    xs, ys = [], []
    w_bits = working_bits(precision_bits)
    for t, exact in zip(T_list, moments):
        t = int(t)
        predicted = main_term(c_k, table.weight, k, t, precision_bits)
        with mp.workprec(w_bits):
            error = mpf(exact) - predicted
            ratio = mpf(exact) / predicted
        reports.append(
            MomentReport(
                weight=table.weight,
                k=k,
                T=t,
                exact_moment=exact,
                main_term=predicted,
                error=round_to(error, precision_bits),
                ratio=round_to(ratio, precision_bits),
            )
        )
        if t < warmup or error == 0:
            excluded.append(t)
            continue
        xs.append(float(mp.log(t)))
        ys.append(float(mp.log(abs(error))))
    if len(xs) >= 2:
        slope = float(np.polyfit(np.array(xs), np.array(ys), 1)[0])
        delta = float(moment_exponent(table.weight, k)) - slope
    else:
        slope = float("nan")
        delta = float("nan")
    return MomentFit(
        reports=tuple(reports),
        slope=slope,
        delta_hat=delta,
        y_used=y_used,
        warmup=warmup,
        excluded=tuple(excluded),
    )


@lru_cache(maxsize=8)
def _gl_nodes(degree: int, bits: int):
    """Gauss-Legendre nodes/weights on [-1,1], Newton-refined from float seeds."""
    seeds = np.polynomial.legendre.leggauss(degree)[0]
    nodes = []
    with mp.workprec(bits + 32):
        for s in seeds:
            x = mpf(float(s))
            for _ in range(100):
                p0, p1 = mpf(1), x
                for j in range(2, degree + 1):
                    p0, p1 = p1, ((2 * j - 1) * x * p1 - (j - 1) * p0) / j
                dp = degree * (x * p1 - p0) / (x * x - 1)
                dx = p1 / dp
                x -= dx
                if abs(dx) < mpf(2) ** (-(bits + 8)):
                    break
            p0, p1 = mpf(1), x
            for j in range(2, degree + 1):
                p0, p1 = p1, ((2 * j - 1) * x * p1 - (j - 1) * p0) / j
            dp = degree * (x * p1 - p0) / (x * x - 1)
            nodes.append((x, 2 / ((1 - x * x) * dp * dp)))
    return tuple(nodes)


def _antideriv_cos(m: int, a, b, u):
    """∫ u^m cos(au+b) du, evaluated at u (integer m ≥ 0)."""
    if m == 0:
        return mp.sin(a * u + b) / a
    return u**m * mp.sin(a * u + b) / a - m / a * _antideriv_sin(m - 1, a, b, u)


def _antideriv_sin(m: int, a, b, u):
    if m == 0:
        return -mp.cos(a * u + b) / a
    return -(u**m) * mp.cos(a * u + b) / a + m / a * _antideriv_cos(m - 1, a, b, u)


@dataclass(frozen=True)
class OscillatoryReport:
    alpha: float
    A: float
    B: float
    T: float
    precision_bits: int
    value: mpf
    closed_form: mpf | None
    rel_diff: float | None
    bound_ratio: float


def oscillatory_check(
    alpha: float, A: float, B: float, T: float, precision_bits: int = 128, degree: int = 32
) -> OscillatoryReport:
    """∫_T^{2T} t^α cos(A√t + B) dt and the size comparison against T^(1/2+α)/|A|.

    Substituting u = √t turns the integrand into 2u^(2α+1)cos(Au+B), which is
    integrated by composite Gauss-Legendre with at least one panel per
    oscillation period. When 2α+1 is a nonnegative integer the closed form by
    repeated integration by parts is evaluated too and compared.
    """
    check_precision_bits(precision_bits)
    if A == 0:
        raise ValueError("frequency A must be nonzero")
    if T <= 0:
        raise ValueError("T must be positive")
    w_bits = working_bits(precision_bits)
    with mp.workprec(w_bits):
        u1, u2 = mp.sqrt(mpf(T)), mp.sqrt(2 * mpf(T))
        m_exp = 2 * mpf(alpha) + 1
        periods = abs(mpf(A)) * (u2 - u1) / (2 * mp.pi)
        panels = max(4, int(mp.ceil(periods)) + 2)
        nodes = _gl_nodes(degree, w_bits)
        step = (u2 - u1) / panels
        total = mpf(0)
        a_mp, b_mp = mpf(A), mpf(B)
        for i in range(panels):
            mid = u1 + (i + mpf(1) / 2) * step
            hw = step / 2
            part = mpf(0)
            for x, w in nodes:
                u = mid + hw * x
                part += w * u**m_exp * mp.cos(a_mp * u + b_mp)
            total += part * hw
        total *= 2
        closed = None
        rel = None
        m_int = int(mp.nint(m_exp))
        if m_int >= 0 and abs(m_exp - m_int) < mpf(2) ** (-w_bits // 2):
            closed = 2 * (
                _antideriv_cos(m_int, a_mp, b_mp, u2) - _antideriv_cos(m_int, a_mp, b_mp, u1)
            )
            denom = max(abs(total), abs(closed))
            rel = float(abs(total - closed) / denom) if denom else 0.0
        bound_ratio = float(abs(total) * abs(a_mp) / mpf(T) ** (mpf(1) / 2 + mpf(alpha)))
    return OscillatoryReport(
        alpha=alpha,
        A=A,
        B=B,
        T=T,
        precision_bits=precision_bits,
        value=round_to(total, precision_bits),
        closed_form=round_to(closed, precision_bits) if closed is not None else None,
        rel_diff=rel,
        bound_ratio=bound_ratio,
    )
