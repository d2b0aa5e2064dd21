"""Exact counting of near-solutions of four-term square-root inequalities.

Counts are exact: float64 does the bulk classification, and any candidate
within BOUNDARY_EPS of a window edge (or of zero) is settled by the exact
sign predicate.  Square roots of integers up to a few hundred carry ≤ 2 ulp
(~1e-13) of float error, far inside the 1e-9 fuzz radius, so the fuzzy zone
provably contains every ambiguous case.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from mpmath import mp, mpf

from .resonance import exact_equal, sqrt_combo_sign

__all__ = [
    "BOUNDARY_EPS",
    "MAX_SCAN_VALUE",
    "DyadicBox",
    "CountReport",
    "MinGapReport",
    "count_A1",
    "count_Apm",
    "brute_count_A1",
    "brute_count_Apm",
    "min_gap_scan",
    "lemma_ratio_sweep",
    "FastCounter",
    "BruteCounter",
]

BOUNDARY_EPS = 1e-9
MAX_SCAN_VALUE = 300


@dataclass(frozen=True)
class DyadicBox:
    """Four dyadic ranges; side N covers N < n <= 2N."""

    N: int
    M: int
    K: int
    L: int

    def __post_init__(self):
        if min(self.N, self.M, self.K, self.L) < 1:
            raise ValueError("box sides must be >= 1")

    def sides(self) -> tuple[int, int, int, int]:
        return (self.N, self.M, self.K, self.L)


@dataclass(frozen=True)
class CountReport:
    box: DyadicBox
    delta: float
    sign: str
    count: int
    bound: float
    ratio: float
    hypothesis_flags: dict = field(default_factory=dict)


def _range_values(side: int) -> np.ndarray:
    return np.arange(side + 1, 2 * side + 1, dtype=np.int64)


def _eta_terms(n: int, m: int, k: int, l: int, sign: str) -> list[tuple[int, int]]:
    c3 = 1 if sign == "+" else -1
    return [(1, n), (1, m), (c3, k), (-1, l)]


def _eta_is_zero(n: int, m: int, k: int, l: int, sign: str) -> bool:
    if sign == "-":
        return exact_equal(n, m, k, l)
    return sqrt_combo_sign(_eta_terms(n, m, k, l, sign)) == 0


def _inside_window_exact(terms: list[tuple[int, int]], delta: float) -> bool:
    """Exact test of −Δ < η < Δ, with Δ taken at its exact float value."""
    d = Fraction(delta)
    return (
        sqrt_combo_sign(terms + [(d, 1)]) > 0
        and sqrt_combo_sign(terms + [(-d, 1)]) < 0
    )


class FastCounter:
    """Sorted-array window counter for one box and sign pattern.

    Building the counter resolves every exact resonance (η = 0) once; each
    `count(delta)` is then two vectorized binary searches plus exact
    treatment of the handful of boundary candidates.
    """

    def __init__(self, box: DyadicBox, sign: str):
        if sign not in ("+", "-"):
            raise ValueError("sign must be '+' or '-'")
        self.box = box
        self.sign = sign
        n_v, m_v = _range_values(box.N), _range_values(box.M)
        k_v, l_v = _range_values(box.K), _range_values(box.L)
        nn, mm = np.meshgrid(n_v, m_v, indexing="ij")
        self.n_left = nn.ravel()
        self.m_left = mm.ravel()
        self.s = np.sqrt(self.n_left) + np.sqrt(self.m_left)
        kk, ll = np.meshgrid(k_v, l_v, indexing="ij")
        kk, ll = kk.ravel(), ll.ravel()
        t = np.sqrt(ll) - np.sqrt(kk) if sign == "+" else np.sqrt(kk) + np.sqrt(ll)
        order = np.argsort(t, kind="stable")
        self.t = t[order]
        self.k_right = kk[order]
        self.l_right = ll[order]
        # resolve exact resonances once: they are Δ-independent
        eps = BOUNDARY_EPS
        lo = np.searchsorted(self.t, self.s - eps, side="left")
        hi = np.searchsorted(self.t, self.s + eps, side="right")
        zero_counts = np.zeros(self.s.shape[0], dtype=np.int64)
        near_nonzero = 0
        for i in np.nonzero(hi > lo)[0]:
            n, m = int(self.n_left[i]), int(self.m_left[i])
            for j in range(lo[i], hi[i]):
                if _eta_is_zero(n, m, int(self.k_right[j]), int(self.l_right[j]), sign):
                    zero_counts[i] += 1
                else:
                    near_nonzero += 1
        self.zero_counts = zero_counts
        self.total_zeros = int(zero_counts.sum())
        self.near_nonzero = near_nonzero

    def count(self, delta: float) -> int:
        if delta <= 0:
            raise ValueError("delta must be positive")
        eps = BOUNDARY_EPS
        if delta <= 2 * eps:
            return self._count_tiny(delta)
        lo, hi = self.s - delta, self.s + delta
        lc = np.searchsorted(self.t, lo + eps, side="right")
        rc = np.searchsorted(self.t, hi - eps, side="left")
        total = int((rc - lc).sum()) - self.total_zeros
        cl = np.searchsorted(self.t, lo - eps, side="left")
        ch = np.searchsorted(self.t, hi + eps, side="right")
        for i in np.nonzero((cl < lc) | (rc < ch))[0]:
            n, m = int(self.n_left[i]), int(self.m_left[i])
            for j in list(range(cl[i], lc[i])) + list(range(rc[i], ch[i])):
                # boundary zone: |t−s| ≈ Δ > 2eps, so η ≠ 0 is automatic
                terms = _eta_terms(n, m, int(self.k_right[j]), int(self.l_right[j]), self.sign)
                if _inside_window_exact(terms, delta):
                    total += 1
        return total

    def _count_tiny(self, delta: float) -> int:
        """Window narrower than the fuzz radius: fully exact on the candidates."""
        eps = BOUNDARY_EPS
        lo = np.searchsorted(self.t, self.s - delta - eps, side="left")
        hi = np.searchsorted(self.t, self.s + delta + eps, side="right")
        total = 0
        for i in np.nonzero(hi > lo)[0]:
            n, m = int(self.n_left[i]), int(self.m_left[i])
            for j in range(lo[i], hi[i]):
                k, l = int(self.k_right[j]), int(self.l_right[j])
                if _eta_is_zero(n, m, k, l, self.sign):
                    continue
                if _inside_window_exact(_eta_terms(n, m, k, l, self.sign), delta):
                    total += 1
        return total


class BruteCounter:
    """Oracle: one globally sorted |η| array over the full quadruple grid."""

    def __init__(self, box: DyadicBox, sign: str):
        if sign not in ("+", "-"):
            raise ValueError("sign must be '+' or '-'")
        self.box = box
        self.sign = sign
        n_v, m_v = _range_values(box.N), _range_values(box.M)
        k_v, l_v = _range_values(box.K), _range_values(box.L)
        nn, mm = np.meshgrid(n_v, m_v, indexing="ij")
        self.left = np.stack([nn.ravel(), mm.ravel()], axis=1)
        kk, ll = np.meshgrid(k_v, l_v, indexing="ij")
        self.right = np.stack([kk.ravel(), ll.ravel()], axis=1)
        s = np.sqrt(self.left[:, 0]) + np.sqrt(self.left[:, 1])
        if sign == "+":
            t = np.sqrt(self.right[:, 1]) - np.sqrt(self.right[:, 0])
        else:
            t = np.sqrt(self.right[:, 0]) + np.sqrt(self.right[:, 1])
        abs_eta = np.abs(s[:, None] - t[None, :]).ravel()
        self.order = np.argsort(abs_eta, kind="stable")
        self.abs_sorted = abs_eta[self.order]
        self.n_right = self.right.shape[0]
        eps = BOUNDARY_EPS
        first = int(np.searchsorted(self.abs_sorted, eps, side="right"))
        self.near_nonzero = 0
        for pos in range(first):
            n, m, k, l = self._quadruple(pos)
            if not _eta_is_zero(n, m, k, l, sign):
                self.near_nonzero += 1
        self.zero_zone_end = first

    def _quadruple(self, pos: int) -> tuple[int, int, int, int]:
        flat = int(self.order[pos])
        i, j = divmod(flat, self.n_right)
        return (
            int(self.left[i, 0]),
            int(self.left[i, 1]),
            int(self.right[j, 0]),
            int(self.right[j, 1]),
        )

    def count(self, delta: float) -> int:
        if delta <= 0:
            raise ValueError("delta must be positive")
        eps = BOUNDARY_EPS
        if delta <= 2 * eps:
            total = 0
            end = int(np.searchsorted(self.abs_sorted, delta + eps, side="right"))
            for pos in range(end):
                n, m, k, l = self._quadruple(pos)
                if _eta_is_zero(n, m, k, l, self.sign):
                    continue
                if _inside_window_exact(_eta_terms(n, m, k, l, self.sign), delta):
                    total += 1
            return total
        lo = int(np.searchsorted(self.abs_sorted, eps, side="right"))
        hi = int(np.searchsorted(self.abs_sorted, delta - eps, side="left"))
        total = (hi - lo) + self.near_nonzero
        end = int(np.searchsorted(self.abs_sorted, delta + eps, side="right"))
        for pos in range(max(hi, lo), end):
            n, m, k, l = self._quadruple(pos)
            if _inside_window_exact(_eta_terms(n, m, k, l, self.sign), delta):
                total += 1
        return total


def _lemma5_bound(box: DyadicBox, delta: float) -> float:
    return delta * math.sqrt(box.L) * box.N * box.M * box.K + box.N * box.K * math.sqrt(box.L)


def _lemma6_bound(box: DyadicBox, delta: float) -> float:
    out = 1.0
    for side in box.sides():
        out *= delta**0.25 * side**0.875 + math.sqrt(side)
    return out


def _lemma5_flags(box: DyadicBox, delta: float) -> dict:
    # M ≍ L flagged with constants C1=1/2, C2=2; Δ ≪ √L with constant 1
    return {
        "N_le_M": box.N <= box.M,
        "K_le_L": box.K <= box.L,
        "N_le_K": box.N <= box.K,
        "M_asymp_L": box.L / 2 <= box.M <= 2 * box.L,
        "delta_ll_sqrt_L": delta <= math.sqrt(box.L),
    }


def count_A1(box: DyadicBox, delta: float) -> CountReport:
    """Exact count of 0 < |√n+√m−√k−√l| < Δ over the box (ordered tuples)."""
    count = FastCounter(box, "-").count(delta)
    bound = _lemma5_bound(box, delta)
    return CountReport(
        box=box,
        delta=delta,
        sign="-",
        count=count,
        bound=bound,
        ratio=count / bound,
        hypothesis_flags=_lemma5_flags(box, delta),
    )


def count_Apm(box: DyadicBox, delta: float, sign: str) -> CountReport:
    """Exact count of 0 < |√n₁+√n₂±√n₃−√n₄| < Δ over the four ranges."""
    count = FastCounter(box, sign).count(delta)
    bound = _lemma6_bound(box, delta)
    return CountReport(
        box=box,
        delta=delta,
        sign=sign,
        count=count,
        bound=bound,
        ratio=count / bound,
        hypothesis_flags={},
    )


def brute_count_A1(box: DyadicBox, delta: float) -> int:
    return BruteCounter(box, "-").count(delta)


def brute_count_Apm(box: DyadicBox, delta: float, sign: str) -> int:
    return BruteCounter(box, sign).count(delta)


@dataclass(frozen=True)
class MinGapReport:
    max_value: int
    normalized_min: float
    normalized_witness: tuple[int, int, int, int]
    normalized_pattern: str
    raw_min: float
    raw_witness: tuple[int, int, int, int]
    raw_pattern: str


def _mp_abs_eta(quad: tuple[int, int, int, int], sign: str) -> mpf:
    n, m, k, l = quad
    with mp.workprec(200):
        eta = mp.sqrt(n) + mp.sqrt(m) - mp.sqrt(l)
        eta += mp.sqrt(k) if sign == "+" else -mp.sqrt(k)
        return abs(eta)


def _norm_factor_mp(quad: tuple[int, int, int, int]) -> mpf:
    n, m, k, l = quad
    with mp.workprec(200):
        return mp.sqrt(n * m * k * l) * mpf(max(quad)) ** mpf(1.5)


def min_gap_scan(max_value: int) -> MinGapReport:
    """Minimum of |η|·(nmkl)^(1/2)·max^(3/2) and of raw |η| over both patterns.

    η = √n+√m±√k−√l over all quadruples with entries ≤ max_value, exact
    zeros excluded.  Witnesses are the lexicographically smallest attaining
    quadruple; near-minimal candidates are re-evaluated in high precision.
    """
    if max_value < 2:
        raise ValueError("max_value must be >= 2")
    if max_value > MAX_SCAN_VALUE:
        raise ValueError(f"max_value capped at {MAX_SCAN_VALUE} (quartic scan)")
    v = max_value
    idx = np.arange(1, v + 1, dtype=np.int64)
    nn, mm = np.meshgrid(idx, idx, indexing="ij")
    nn, mm = nn.ravel(), mm.ravel()
    s = np.sqrt(nn) + np.sqrt(mm)
    prod_nm = (nn * mm).astype(np.float64)
    max_nm = np.maximum(nn, mm)

    best: dict[str, tuple] = {}  # metric -> (mp value, witness, pattern)
    eps = BOUNDARY_EPS
    chunk = max(1, (1 << 22) // s.shape[0])
    for pattern in ("-", "+"):
        t = np.sqrt(mm) - np.sqrt(nn) if pattern == "+" else s
        # right-side reuse: (k,l) grid has the same index layout as (n,m)
        prod_kl, max_kl = prod_nm, max_nm
        exact_candidates: list[tuple[int, int, int, int]] = []
        chunk_mins_raw = []
        chunk_mins_norm = []
        starts = list(range(0, s.shape[0], chunk))
        for start in starts:
            stop = min(start + chunk, s.shape[0])
            eta = np.abs(s[start:stop, None] - t[None, :])
            zone = np.nonzero(eta <= eps)
            for a, b in zip(*zone):
                quad = (int(nn[start + a]), int(mm[start + a]), int(nn[b]), int(mm[b]))
                if not _eta_is_zero(*quad, pattern):
                    exact_candidates.append(quad)
                eta[a, b] = np.inf
            factor = (
                np.sqrt(prod_nm[start:stop, None] * prod_kl[None, :])
                * np.maximum(max_nm[start:stop, None], max_kl[None, :]) ** 1.5
            )
            chunk_mins_raw.append(float(eta.min()))
            chunk_mins_norm.append(float((eta * factor).min()))
        for metric, mins in (("raw", chunk_mins_raw), ("norm", chunk_mins_norm)):
            target = min(mins)
            for cand in exact_candidates:
                val = _mp_abs_eta(cand, pattern)
                if metric == "norm":
                    val = val * _norm_factor_mp(cand)
                target = min(target, float(val) * (1 + 1e-6))
            threshold = target * (1.0 + 1e-4)
            finalists = list(exact_candidates)
            for start, m_raw, m_norm in zip(starts, chunk_mins_raw, chunk_mins_norm):
                if (m_raw if metric == "raw" else m_norm) > threshold:
                    continue
                stop = min(start + chunk, s.shape[0])
                eta = np.abs(s[start:stop, None] - t[None, :])
                eta[eta <= eps] = np.inf
                if metric == "norm":
                    eta = eta * (
                        np.sqrt(prod_nm[start:stop, None] * prod_kl[None, :])
                        * np.maximum(max_nm[start:stop, None], max_kl[None, :]) ** 1.5
                    )
                for a, b in zip(*np.nonzero(eta <= threshold)):
                    finalists.append(
                        (int(nn[start + a]), int(mm[start + a]), int(nn[b]), int(mm[b]))
                    )
            for quad in sorted(set(finalists)):
                val = _mp_abs_eta(quad, pattern)
                if val == 0:
                    continue
                if metric == "norm":
                    val = val * _norm_factor_mp(quad)
                key = f"{metric}"
                # compare at full precision; at ambient 53 bits the product
                # rounds to the old value's neighborhood and ties break wrongly
                with mp.workprec(220):
                    improved = key not in best or val < best[key][0] * (
                        1 - mpf(2) ** -150
                    )
                if improved:
                    best[key] = (val, quad, pattern)
    raw_val, raw_wit, raw_pat = best["raw"]
    norm_val, norm_wit, norm_pat = best["norm"]
    return MinGapReport(
        max_value=max_value,
        normalized_min=float(norm_val),
        normalized_witness=norm_wit,
        normalized_pattern=norm_pat,
        raw_min=float(raw_val),
        raw_witness=raw_wit,
        raw_pattern=raw_pat,
    )


def lemma_ratio_sweep(
    boxes: list[DyadicBox], delta_list: list[float], alarm_threshold: float = 10.0
) -> tuple[list[CountReport], list[CountReport]]:
    """count_A1 ratios across a sweep; ratios above the threshold are alarms
    (they would indicate a counter bug, not a lemma failure)."""
    reports: list[CountReport] = []
    alarms: list[CountReport] = []
    for box in boxes:
        counter = FastCounter(box, "-")
        for delta in delta_list:
            count = counter.count(delta)
            bound = _lemma5_bound(box, delta)
            report = CountReport(
                box=box,
                delta=delta,
                sign="-",
                count=count,
                bound=bound,
                ratio=count / bound,
                hypothesis_flags=_lemma5_flags(box, delta),
            )
            reports.append(report)
            if report.ratio > alarm_threshold:
                alarms.append(report)
    return reports, alarms
