"""Command-line front end.

Every subcommand builds a request, sends it to the HTTP service (an embedded
in-process instance by default, or a remote one via --server), and renders
the response. Exit codes: 0 success, 1 usage or environment error, 2 a
mathematical validator failed.
"""

from __future__ import annotations

import argparse
import asyncio
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import httpx

from .forms import cache_filename
from .reports import dump_json

__all__ = ["RunConfig", "main"]

DEFAULT_CACHE_DIR = "./momentlab-cache"
EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VALIDATION = 2


class CliError(Exception):
    """Usage or environment problem; maps to exit code 1."""


@dataclass(frozen=True)
class RunConfig:
    weight: int
    n_max: int
    precision_bits: int = 128
    cache_dir: str = DEFAULT_CACHE_DIR
    threads: int = 0
    output_format: str = "csv"
    seed: int = 0

    def __post_init__(self):
        if self.precision_bits < 64:
            raise CliError("precision_bits must be >= 64")
        if self.n_max < 1:
            raise CliError("n_max must be >= 1")


class _Parser(argparse.ArgumentParser):
    # usage problems must exit 1, not argparse's default 2
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def parse_int_range(text: str, dyadic: bool) -> list[int]:
    """Range syntax: 'a..b' (with --dyadic: {a, 2a, 4a, ...} up to b),
    otherwise a comma-separated list."""
    if ".." in text:
        lo_s, hi_s = text.split("..", 1)
        try:
            lo, hi = int(lo_s), int(hi_s)
        except ValueError:
            raise CliError(f"bad integer range {text!r}")
        if lo < 1 or hi < lo:
            raise CliError(f"bad range bounds {text!r}")
        if dyadic:
            out = [lo]
            while out[-1] * 2 <= hi:
                out.append(out[-1] * 2)
            return out
        if hi - lo >= 100000:
            raise CliError("plain range too large; use --dyadic")
        return list(range(lo, hi + 1))
    try:
        return [int(p) for p in text.split(",")]
    except ValueError:
        raise CliError(f"bad integer list {text!r}")


def parse_float_list(text: str, dyadic: bool) -> list[float]:
    if ".." in text:
        lo_s, hi_s = text.split("..", 1)
        try:
            lo, hi = float(lo_s), float(hi_s)
        except ValueError:
            raise CliError(f"bad float range {text!r}")
        if not dyadic:
            raise CliError("float ranges require --dyadic")
        if lo <= 0 or hi < lo:
            raise CliError(f"bad range bounds {text!r}")
        out = [lo]
        while out[-1] * 2 <= hi * (1 + 1e-12):
            out.append(out[-1] * 2)
        return out
    try:
        return [float(p) for p in text.split(",")]
    except ValueError:
        raise CliError(f"bad float list {text!r}")


def parse_x_range(text: str) -> tuple[float, float]:
    if ".." not in text:
        raise CliError("--x must be a range lo..hi")
    lo_s, hi_s = text.split("..", 1)
    try:
        lo, hi = float(lo_s), float(hi_s)
    except ValueError:
        raise CliError(f"bad x-range {text!r}")
    if not lo < hi:
        raise CliError("x-range must satisfy lo < hi")
    return lo, hi


def resolve_cache_dir(flag_value: Optional[str]) -> str:
    if flag_value:
        return flag_value
    return os.environ.get("MOMENTLAB_CACHE") or DEFAULT_CACHE_DIR


def _post(server: Optional[str], path: str, payload: dict) -> dict:
    """POST to a remote service, or to a fresh in-process app."""
    if server:
        try:
            with httpx.Client(base_url=server, timeout=None) as client:
                resp = client.post(path, json=payload)
        except httpx.HTTPError as exc:
            raise CliError(f"server {server} unreachable: {exc}")
    else:
        from .service import create_app

        async def run():
            transport = httpx.ASGITransport(app=create_app())
            async with httpx.AsyncClient(
                transport=transport, base_url="http://momentlab", timeout=None
            ) as client:
                return await client.post(path, json=payload)

        resp = asyncio.run(run())
    if resp.status_code != 200:
        try:
            detail = resp.json().get("detail", resp.text)
        except ValueError:
            detail = resp.text
        raise CliError(str(detail))
    return resp.json()


def _emit(text: str, path: Optional[str]) -> None:
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def _require_cache(config: RunConfig) -> None:
    path = Path(config.cache_dir) / cache_filename(config.weight, config.n_max)
    if not path.is_file():
        raise CliError(
            f"missing coefficient cache {path}; run "
            f"`momentlab coeffs --weight {config.weight} --nmax {config.n_max}` first"
        )


def cmd_coeffs(config: RunConfig, args) -> int:
    payload = {
        "weight": config.weight,
        "n_max": config.n_max,
        "cache_dir": config.cache_dir,
        "run_deligne": not args.skip_checks,
        "hecke_trials": 0 if args.skip_checks else args.hecke_trials,
        "seed": config.seed,
    }
    data = _post(args.server, "/coeffs", payload)
    if config.output_format == "json":
        _emit(dump_json(data), args.json)
    else:
        lines = [
            f"weight {data['weight']} n_max {data['n_max']} "
            f"{'rebuilt' if data['rebuilt'] else 'cached'}",
            f"cache file: {data['cache_file']}",
        ]
        if data.get("deligne"):
            d = data["deligne"]
            lines.append(
                f"deligne: {'pass' if d['passed'] else 'FAIL'} "
                f"max_ratio={d['max_ratio']:.6f} at n={d['argmax_n']}"
            )
        if data.get("hecke"):
            h = data["hecke"]
            lines.append(
                f"hecke: {'pass' if h['passed'] else 'FAIL'} "
                f"({h['coprime_pairs_checked']} coprime pairs, "
                f"{h['prime_squares_checked']} prime squares)"
            )
        _emit("\n".join(lines) + "\n", None)
    return EXIT_OK if data["passed"] else EXIT_VALIDATION


def cmd_moments(config: RunConfig, args) -> int:
    t_list = parse_int_range(args.t, args.dyadic)
    _require_cache(config)
    payload = {
        "weight": config.weight,
        "n_max": config.n_max,
        "k": args.k,
        "t_list": t_list,
        "precision_bits": config.precision_bits,
        "y_used": args.y,
        "raw": args.raw,
        "cache_dir": config.cache_dir,
    }
    data = _post(args.server, "/moments", payload)
    if args.raw or config.output_format == "json":
        _emit(dump_json(data["summary"]), args.json)
        return EXIT_OK
    _emit(data["csv"], args.csv)
    if args.json:
        _emit(dump_json(data["summary"]), args.json)
    else:
        _emit(dump_json(data["summary"]), None)
    return EXIT_OK


def cmd_constant(config: RunConfig, args) -> int:
    y_list = parse_int_range(args.y, args.dyadic)
    ell = args.l if args.l is not None else (1 if args.k == 2 else 2)
    payload = {
        "weight": config.weight,
        "n_max": config.n_max,
        "k": args.k,
        "l": ell,
        "y_list": y_list,
        "precision_bits": config.precision_bits,
        "cache_dir": config.cache_dir,
    }
    data = _post(args.server, "/constant", payload)
    _emit(dump_json(data["summary"]), args.json)
    return EXIT_OK


def cmd_count(config: RunConfig, args) -> int:
    box = parse_int_range(args.box, dyadic=False)
    if len(box) != 4:
        raise CliError("--box needs four comma-separated sides N,M,K,L")
    deltas = parse_float_list(args.delta, args.dyadic)
    payload = {
        "lemma": args.lemma,
        "box": box,
        "deltas": deltas,
        "sign": args.sign,
        "alarm_threshold": args.alarm_threshold,
    }
    data = _post(args.server, "/count", payload)
    _emit(data["csv"], args.csv)
    if data["alarms"]:
        print(f"{data['alarms']} ratio alarm(s) above {args.alarm_threshold}", file=sys.stderr)
        return EXIT_VALIDATION
    return EXIT_OK


def cmd_voronoi(config: RunConfig, args) -> int:
    x_lo, x_hi = parse_x_range(args.x)
    n_list = parse_int_range(args.n, args.dyadic)
    payload = {
        "weight": config.weight,
        "n_max": config.n_max,
        "x_lo": x_lo,
        "x_hi": x_hi,
        "n_list": n_list,
        "grid_size": args.grid_size,
        "precision_bits": config.precision_bits,
        "seed": config.seed,
        "cache_dir": config.cache_dir,
    }
    data = _post(args.server, "/voronoi", payload)
    _emit(data["csv"], args.csv)
    _emit(dump_json(data["summary"]), args.json)
    return EXIT_OK


def cmd_decompose(config: RunConfig, args) -> int:
    payload = {
        "weight": config.weight,
        "x": args.x,
        "y": args.y,
        "precision_bits": config.precision_bits,
        "cache_dir": config.cache_dir,
    }
    data = _post(args.server, "/decompose", payload)
    _emit(dump_json(data["summary"]), args.json)
    return EXIT_OK


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--weight", type=int, default=12)
    p.add_argument("--nmax", type=int, default=None)
    p.add_argument("--precision-bits", type=int, default=128)
    p.add_argument("--cache-dir", default=None)
    p.add_argument("--threads", type=int, default=0)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--server", default=None, help="URL of a running service")
    p.add_argument("--csv", default=None, help="write the CSV table to this file")
    p.add_argument("--json", default=None, help="write the JSON summary to this file")


def build_parser() -> _Parser:
    parser = _Parser(prog="momentlab")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("coeffs", help="build/verify a coefficient table cache")
    _add_common(p)
    p.add_argument("--hecke-trials", type=int, default=1000)
    p.add_argument("--skip-checks", action="store_true")

    p = sub.add_parser("moments", help="exact moments vs predicted main term")
    _add_common(p)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--t", required=True, help="endpoints: list or a..b")
    p.add_argument("--dyadic", action="store_true")
    p.add_argument("--y", type=int, default=None, help="truncation for the constant")
    p.add_argument("--raw", action="store_true", help="exact moments only, as JSON")

    p = sub.add_parser("constant", help="truncated series values and tail fit")
    _add_common(p)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--l", type=int, default=None)
    p.add_argument("--y", required=True, help="truncations: list or a..b")
    p.add_argument("--dyadic", action="store_true")

    p = sub.add_parser("count", help="inequality solution counts vs lemma bounds")
    _add_common(p)
    p.add_argument("--lemma", choices=("A1", "Apm"), default="A1")
    p.add_argument("--box", required=True, help="four sides N,M,K,L")
    p.add_argument("--delta", required=True, help="window width(s)")
    p.add_argument("--dyadic", action="store_true")
    p.add_argument("--sign", choices=("+", "-"), default="-")
    p.add_argument("--alarm-threshold", type=float, default=10.0)

    p = sub.add_parser("voronoi", help="truncation error profile over an x-grid")
    _add_common(p)
    p.add_argument("--x", required=True, help="x-range lo..hi")
    p.add_argument("--n", required=True, help="truncation lengths: list or a..b")
    p.add_argument("--dyadic", action="store_true")
    p.add_argument("--grid-size", type=int, default=12)

    p = sub.add_parser("decompose", help="fourth-power split of the resonance sum")
    _add_common(p)
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--y", type=int, required=True)

    return parser


_HANDLERS = {
    "coeffs": cmd_coeffs,
    "moments": cmd_moments,
    "constant": cmd_constant,
    "count": cmd_count,
    "voronoi": cmd_voronoi,
    "decompose": cmd_decompose,
}


def _default_nmax(args) -> int:
    if args.nmax is not None:
        return args.nmax
    if args.command == "moments":
        return max(parse_int_range(args.t, args.dyadic))
    if args.command == "constant":
        return max(parse_int_range(args.y, args.dyadic))
    if args.command == "voronoi":
        return int(parse_x_range(args.x)[1]) + 1
    if args.command == "decompose":
        return args.y
    return 1000


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        config = RunConfig(
            weight=args.weight,
            n_max=_default_nmax(args),
            precision_bits=args.precision_bits,
            cache_dir=resolve_cache_dir(args.cache_dir),
            threads=args.threads,
            output_format=args.format,
            seed=args.seed,
        )
        return _HANDLERS[args.command](config, args)
    except CliError as exc:
        print(f"momentlab: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
