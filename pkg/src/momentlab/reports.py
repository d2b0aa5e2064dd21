"""Report serialization: fixed-schema CSV tables and JSON summaries.

CSV output is byte-identical across reruns of the same inputs; JSON summaries
carry a timestamp field and are otherwise deterministic. All floating values
go through format_real so digit counts track the configured precision.
"""

from __future__ import annotations

import csv
import io
import json
from datetime import datetime, timezone
from typing import Iterable, Optional

from .counting import CountReport, MinGapReport
from .moments import MomentFit, MomentReport, OscillatoryReport
from .precision import format_real, working_precision
from .resonance import SeriesValue, TailFitReport
from .voronoi import TruncationProfile

__all__ = [
    "count_csv",
    "moments_csv",
    "voronoi_csv",
    "constant_summary",
    "voronoi_summary",
    "moments_summary",
    "decompose_summary",
    "min_gap_summary",
    "oscillatory_summary",
    "dump_json",
]

COUNT_HEADER = ["N", "M", "K", "L", "delta", "sign", "count", "bound", "ratio"]
MOMENTS_HEADER = ["k", "T", "exact_moment", "main_term", "error", "ratio"]
VORONOI_HEADER = ["N", "max_rel_error"]


def _writer(buf: io.StringIO) -> "csv.writer":
    return csv.writer(buf, lineterminator="\n")


def _fmt(value, precision_bits: int) -> str:
    # machine floats carry 17 significant digits; only mpf values deserve
    # the precision_bits/3 digit treatment
    if isinstance(value, float):
        return repr(value)
    return format_real(value, precision_bits)


def count_csv(reports: Iterable[CountReport], precision_bits: int = 128) -> str:
    buf = io.StringIO()
    w = _writer(buf)
    w.writerow(COUNT_HEADER)
    for r in reports:
        w.writerow(
            [
                r.box.N,
                r.box.M,
                r.box.K,
                r.box.L,
                _fmt(r.delta, precision_bits),
                r.sign,
                r.count,
                _fmt(r.bound, precision_bits),
                _fmt(r.ratio, precision_bits),
            ]
        )
    return buf.getvalue()


def moments_csv(reports: Iterable[MomentReport], precision_bits: int = 128) -> str:
    buf = io.StringIO()
    w = _writer(buf)
    w.writerow(MOMENTS_HEADER)
    for r in reports:
        w.writerow(
            [
                r.k,
                r.T,
                r.exact_moment,
                _fmt(r.main_term, precision_bits),
                _fmt(r.error, precision_bits),
                _fmt(r.ratio, precision_bits),
            ]
        )
    return buf.getvalue()


def voronoi_csv(profile: TruncationProfile, precision_bits: int = 128) -> str:
    buf = io.StringIO()
    w = _writer(buf)
    w.writerow(VORONOI_HEADER)
    for p in profile.points:
        w.writerow([p.N, _fmt(p.max_rel_error, precision_bits)])
    return buf.getvalue()


def _timestamp() -> str:
    return datetime.now(timezone.utc).isoformat()


def constant_summary(
    values: list[SeriesValue],
    fit: Optional[TailFitReport],
    weight: int,
    with_timestamp: bool = True,
) -> dict:
    """Summary keyed on the deepest truncation; per-y values ride along."""
    last = values[-1]
    out = {
        "k": last.k,
        "l": last.l,
        "y": last.y,
        "weight": weight,
        "precision_bits": last.precision_bits,
        "value": format_real(last.value, last.precision_bits),
        "tail_slope": fit.slope if fit is not None else None,
        "series": [
            {"y": v.y, "value": format_real(v.value, v.precision_bits)} for v in values
        ],
    }
    if fit is not None and fit.extrapolated is not None:
        out["extrapolated"] = format_real(fit.extrapolated, last.precision_bits)
    if with_timestamp:
        out["timestamp"] = _timestamp()
    return out


def voronoi_summary(profile: TruncationProfile, with_timestamp: bool = True) -> dict:
    out = {
        "weight": profile.weight,
        "slope": profile.fitted_slope,
        "x_lo": profile.x_lo,
        "x_hi": profile.x_hi,
    }
    if with_timestamp:
        out["timestamp"] = _timestamp()
    return out


def moments_summary(
    fit: MomentFit, weight: int, k: int, with_timestamp: bool = True
) -> dict:
    out = {
        "weight": weight,
        "k": k,
        "slope": fit.slope,
        "delta_hat": fit.delta_hat,
        "y_used": fit.y_used,
        "warmup": fit.warmup,
        "excluded": list(fit.excluded),
        # cumulative values are in the CSV; windows cover [T, 2T] pairs
        "dyadic_windows": [
            {"t_lo": a.T, "t_hi": b.T, "moment": str(b.exact_moment - a.exact_moment)}
            for a, b in zip(fit.reports, fit.reports[1:])
            if b.T == 2 * a.T
        ],
    }
    if with_timestamp:
        out["timestamp"] = _timestamp()
    return out


def decompose_summary(
    pieces,
    r_value,
    x,
    y: int,
    weight: int,
    precision_bits: int,
    with_timestamp: bool = True,
) -> dict:
    """The four split pieces, R⁴, and the relative residual of the identity."""
    # ambient 53-bit arithmetic would swamp the ~2^-precision_bits residual
    with working_precision(precision_bits):
        r4 = r_value**4
        total = sum(pieces)
        residual = abs(r4 - total) / abs(r4) if r4 else abs(r4 - total)
    out = {
        "weight": weight,
        "x": x,
        "y": y,
        "precision_bits": precision_bits,
        "S1": format_real(pieces[0], precision_bits),
        "S2": format_real(pieces[1], precision_bits),
        "S3": format_real(pieces[2], precision_bits),
        "S4": format_real(pieces[3], precision_bits),
        "R4": format_real(r4, precision_bits),
        "residual": format_real(residual, precision_bits),
    }
    if with_timestamp:
        out["timestamp"] = _timestamp()
    return out


def min_gap_summary(report: MinGapReport, with_timestamp: bool = True) -> dict:
    out = {
        "max_value": report.max_value,
        "normalized_min": _fmt(report.normalized_min, 128),
        "normalized_witness": list(report.normalized_witness),
        "normalized_pattern": report.normalized_pattern,
        "raw_min": _fmt(report.raw_min, 128),
        "raw_witness": list(report.raw_witness),
        "raw_pattern": report.raw_pattern,
    }
    if with_timestamp:
        out["timestamp"] = _timestamp()
    return out


def oscillatory_summary(report: OscillatoryReport, with_timestamp: bool = True) -> dict:
    out = {
        "alpha": report.alpha,
        "A": report.A,
        "B": report.B,
        "T": report.T,
        "precision_bits": report.precision_bits,
        "value": format_real(report.value, report.precision_bits),
        "closed_form": (
            format_real(report.closed_form, report.precision_bits)
            if report.closed_form is not None
            else None
        ),
        "rel_diff": report.rel_diff,
        "bound_ratio": report.bound_ratio,
    }
    if with_timestamp:
        out["timestamp"] = _timestamp()
    return out


def dump_json(payload: dict) -> str:
    return json.dumps(payload, indent=2) + "\n"
