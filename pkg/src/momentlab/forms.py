"""One-dimensional cusp forms, coefficient tables, and coefficient validators.

Supported weights are the six for which the space of cusp forms for the full
modular group is one-dimensional, so "the" form of each weight is well
defined.  Tables hold a(n) and the exact prefix sums A(n) as unbounded ints.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from pathlib import Path

from mpmath import mp, mpf

from .arith import divisor_count_sieve, fnv64, primes_up_to
from .series import QSeries, delta, eisenstein, multiply

__all__ = [
    "SUPPORTED_WEIGHTS",
    "CuspForm",
    "CoefficientTable",
    "UnsupportedWeightError",
    "TableRangeError",
    "CacheFormatError",
    "DeligneReport",
    "HeckeReport",
    "build_form",
    "build_table",
    "partial_sum",
    "normalized_coefficient",
    "check_deligne",
    "check_hecke",
    "cache_filename",
    "write_cache",
    "read_cache",
    "load_or_build_table",
]

SUPPORTED_WEIGHTS = (12, 16, 18, 20, 22, 26)

# weight -> Eisenstein cofactor multiplying the discriminant form
_COFACTOR = {12: None, 16: 4, 18: 6, 20: 8, 22: 10, 26: 14}


class UnsupportedWeightError(ValueError):
    """Weight outside the six one-dimensional cusp-form spaces."""


class TableRangeError(ValueError):
    """Query outside the range covered by a coefficient table."""


class CacheFormatError(ValueError):
    """Coefficient cache file is malformed, mismatched, or corrupt."""


@dataclass(frozen=True)
class CuspForm:
    """Normalized eigenform of one of the supported weights."""

    weight: int
    series: QSeries

    def __post_init__(self):
        if self.series.length < 2:
            raise ValueError("form series must include the q^1 coefficient")
        if self.series[0] != 0 or self.series[1] != 1:
            raise ValueError("form must be normalized: a(0)=0, a(1)=1")


@dataclass(frozen=True)
class CoefficientTable:
    """a(n) and exact prefix sums A(n) for 1 <= n <= n_max (index 0 unused)."""

    weight: int
    n_max: int
    a: tuple[int, ...] = field(repr=False)
    A: tuple[int, ...] = field(repr=False)

    def a_value(self, n: int) -> int:
        if not 1 <= n <= self.n_max:
            raise TableRangeError(f"n={n} outside 1..{self.n_max}")
        return self.a[n]

    def A_value(self, n: int) -> int:
        if not 1 <= n <= self.n_max:
            raise TableRangeError(f"n={n} outside 1..{self.n_max}")
        return self.A[n]


def _weight_rejection(weight: int) -> str:
    if weight in SUPPORTED_WEIGHTS:
        return ""
    if weight % 2 or weight < 12 or weight == 14:
        return f"weight {weight}: the cusp-form space is zero-dimensional"
    return f"weight {weight}: the cusp-form space is not one-dimensional"


def build_form(weight: int, n_max: int) -> CuspForm:
    """The normalized cusp form of the given weight, with a(n) for n ≤ n_max."""
    msg = _weight_rejection(weight)
    if msg:
        raise UnsupportedWeightError(msg)
    if n_max < 1:
        raise ValueError("n_max must be >= 1 to hold a(1)")
    length = n_max + 1
    d = delta(length)
    cof = _COFACTOR[weight]
    series = d if cof is None else multiply(d, eisenstein(cof, length))
    return CuspForm(weight, series)


def build_table(form: CuspForm) -> CoefficientTable:
    n_max = form.series.length - 1
    a = [0] * (n_max + 1)
    prefix = [0] * (n_max + 1)
    running = 0
    for n in range(1, n_max + 1):
        a[n] = form.series[n]
        running += a[n]
        prefix[n] = running
    return CoefficientTable(form.weight, n_max, tuple(a), tuple(prefix))


def partial_sum(table: CoefficientTable, x: float) -> int:
    """A(x) = Σ_{n≤x} a(n); zero for x < 1."""
    if x < 0:
        raise ValueError("x must be nonnegative")
    if x > table.n_max:
        raise TableRangeError(f"x={x} exceeds table n_max={table.n_max}")
    n = math.floor(x)
    return 0 if n < 1 else table.A[n]


def normalized_coefficient(table: CoefficientTable, n: int, precision_bits: int) -> mpf:
    """ã(n) = a(n)·n^(−(κ−1)/2) at the stated precision."""
    a_n = table.a_value(n)
    with mp.workprec(2 * precision_bits + 16):
        value = mpf(a_n) * mpf(n) ** (-(mpf(table.weight) - 1) / 2)
    with mp.workprec(precision_bits):
        return +value


@dataclass(frozen=True)
class DeligneReport:
    weight: int
    n_max: int
    passed: bool
    max_ratio: float
    argmax_n: int
    first_violation: int | None = None


def check_deligne(table: CoefficientTable) -> DeligneReport:
    """Verify |a(n)| <= d(n)·n^((κ−1)/2) for all stored n, exactly.

    The comparison is |a(n)|² <= d(n)²·n^(κ−1) in integer arithmetic; the
    running maximum of the ratio is also tracked by exact cross-multiplication
    (ties keep the smallest n).
    """
    d = divisor_count_sieve(table.n_max)
    kappa = table.weight
    best_num, best_den, best_n = 0, 1, 0
    first_violation = None
    for n in range(1, table.n_max + 1):
        num = table.a[n] * table.a[n]
        den = int(d[n]) * int(d[n]) * n ** (kappa - 1)
        if num > den and first_violation is None:
            first_violation = n
        if num * best_den > best_num * den:
            best_num, best_den, best_n = num, den, n
    with mp.workprec(64):
        ratio = float(mp.sqrt(mpf(best_num) / mpf(best_den)))
    return DeligneReport(
        weight=table.weight,
        n_max=table.n_max,
        passed=first_violation is None,
        max_ratio=ratio,
        argmax_n=best_n,
        first_violation=first_violation,
    )


@dataclass(frozen=True)
class HeckeReport:
    weight: int
    passed: bool
    coprime_pairs_checked: int
    prime_squares_checked: int
    failures: tuple[tuple, ...] = ()


def check_hecke(table: CoefficientTable, trials: int, seed: int) -> HeckeReport:
    """Spot-check a(mn)=a(m)a(n) for gcd(m,n)=1 and a(p²)=a(p)²−p^(κ−1)."""
    rng = random.Random(seed)
    failures = []
    pairs = 0
    while pairs < trials:
        m = rng.randint(1, table.n_max)
        n = rng.randint(1, table.n_max // m)
        if math.gcd(m, n) != 1:
            continue
        pairs += 1
        if table.a[m * n] != table.a[m] * table.a[n]:
            failures.append(("coprime", m, n))
    primes = primes_up_to(math.isqrt(table.n_max))
    squares = 0
    if primes:
        for _ in range(max(trials // 10, 1)):
            p = rng.choice(primes)
            squares += 1
            if table.a[p * p] != table.a[p] ** 2 - p ** (table.weight - 1):
                failures.append(("prime_square", p))
    return HeckeReport(
        weight=table.weight,
        passed=not failures,
        coprime_pairs_checked=pairs,
        prime_squares_checked=squares,
        failures=tuple(failures),
    )


_CACHE_VERSION = "momentlab-coeffs v1"


def cache_filename(weight: int, n_max: int) -> str:
    return f"coeffs_w{weight}_n{n_max}.dat"


def write_cache(table: CoefficientTable, path: str | Path) -> Path:
    """Write the plain-text coefficient cache with a trailing checksum line.

    The checksum covers every byte before the checksum line (header and
    coefficient lines, including their newlines).
    """
    path = Path(path)
    lines = [f"{_CACHE_VERSION} weight={table.weight} nmax={table.n_max}\n"]
    lines.extend(f"{n} {table.a[n]}\n" for n in range(1, table.n_max + 1))
    payload = "".join(lines).encode("ascii")
    checksum = fnv64(payload)
    path.write_bytes(payload + f"checksum={checksum:016x}\n".encode("ascii"))
    return path


def read_cache(path: str | Path, expected_weight: int | None = None) -> CoefficientTable:
    """Parse and validate a coefficient cache file; rebuild prefix sums."""
    path = Path(path)
    data = path.read_bytes()
    text = data.decode("ascii")
    lines = text.splitlines(keepends=True)
    if not lines:
        raise CacheFormatError(f"{path}: empty cache file")
    header = lines[0].strip()
    parts = header.split()
    if (
        len(parts) != 4
        or " ".join(parts[:2]) != _CACHE_VERSION
        or not parts[2].startswith("weight=")
        or not parts[3].startswith("nmax=")
    ):
        raise CacheFormatError(f"{path}: unsupported cache header {header!r}")
    try:
        weight = int(parts[2].removeprefix("weight="))
        n_max = int(parts[3].removeprefix("nmax="))
    except ValueError as exc:
        raise CacheFormatError(f"{path}: bad header fields {header!r}") from exc
    if expected_weight is not None and weight != expected_weight:
        raise CacheFormatError(f"{path}: weight {weight}, expected {expected_weight}")
    body = lines[1:]
    if body and body[-1].startswith("checksum="):
        declared = body[-1].strip().removeprefix("checksum=")
        body = body[:-1]
        payload = "".join([lines[0]] + body).encode("ascii")
        actual = f"{fnv64(payload):016x}"
        if declared != actual:
            raise CacheFormatError(f"{path}: checksum mismatch")
    if len(body) != n_max:
        raise CacheFormatError(f"{path}: expected {n_max} coefficient lines, found {len(body)}")
    a = [0] * (n_max + 1)
    for i, line in enumerate(body, start=1):
        fields = line.split()
        if len(fields) != 2 or int(fields[0]) != i:
            raise CacheFormatError(f"{path}: bad coefficient line {i}")
        a[i] = int(fields[1])
    prefix = [0] * (n_max + 1)
    running = 0
    for n in range(1, n_max + 1):
        running += a[n]
        prefix[n] = running
    return CoefficientTable(weight, n_max, tuple(a), tuple(prefix))


def load_or_build_table(weight: int, n_max: int, cache_dir: str | Path | None) -> tuple[CoefficientTable, bool]:
    """Reuse a valid cache file when present; (table, rebuilt) is returned."""
    if cache_dir is not None:
        path = Path(cache_dir) / cache_filename(weight, n_max)
        if path.exists():
            try:
                table = read_cache(path, expected_weight=weight)
                if table.n_max == n_max:
                    return table, False
            except (CacheFormatError, OSError):
                pass
    table = build_table(build_form(weight, n_max))
    if cache_dir is not None:
        Path(cache_dir).mkdir(parents=True, exist_ok=True)
        write_cache(table, Path(cache_dir) / cache_filename(weight, n_max))
    return table, True
