"""Command-line front end.

Exit codes: 0 success, 1 I/O error, 2 invalid configuration or input,
3 verification failure (including a Las Vegas build that gave up).
"""
from __future__ import annotations

import argparse
import csv
import json
import random
import sys
import time
from contextlib import contextmanager, nullcontext
from typing import List, Optional, Sequence, TextIO

import numpy as np

from .builder import BuildConfig, build_sst
from .fingerprint import new_context
from .instrument import metering
from .lce import build_baseline, build_dc_lce
from .text import PositionSet, Text, brute_sparse_sort, random_text
from .verifier import Equation, build_las_vegas, verify_sst, verify_system

EXIT_IO, EXIT_CONFIG, EXIT_VERIFY = 1, 2, 3


class ConfigError(ValueError):
    pass


class _Array:
    def __init__(self, positions: List[int], lcps: List[int]):
        self.positions, self.lcps = positions, lcps


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--text", help="text file (raw bytes)")
    src = common.add_mutually_exclusive_group()
    src.add_argument("--positions", help="file with one 1-based position per line")
    src.add_argument("--stride", type=int, help="every k-th position starting at 1")
    src.add_argument("--random-b", type=int, dest="random_b", help="b positions drawn from --seed")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--security", type=int, default=1, help="error exponent c (>= 1)")
    common.add_argument("--mode", choices=["mc", "lv"], default="mc")
    common.add_argument("--lce", choices=["dc", "baseline"], default="dc")
    common.add_argument("--format", choices=["tsv", "json"], default="tsv")
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--retries", type=int, default=3, help="Las Vegas retry cap")
    common.add_argument("--instrument", action="store_true", help="report peak auxiliary words")

    ap = argparse.ArgumentParser(prog="sparsesuffix", description="Sparse suffix arrays in O(b) space.")
    sub = ap.add_subparsers(dest="command", required=True)
    sub.add_parser("build", parents=[common], help="build the sparse suffix array")
    sub.add_parser("oracle", parents=[common], help="brute-force sparse suffix array")
    v = sub.add_parser("verify", parents=[common], help="certify an array or equation file")
    v.add_argument("array", help="array (TSV or JSON) or equation file; '-' for stdin")
    sub.add_parser("lce", parents=[common], help="answer 'i j' queries from stdin")
    b = sub.add_parser("bench", parents=[common], help="CSV timings over text lengths")
    b.add_argument("sizes", nargs="+", type=int, help="text lengths n")
    return ap


def _check(args) -> None:
    if args.security < 1:
        raise ConfigError("--security must be at least 1")
    if args.retries < 0:
        raise ConfigError("--retries must be non-negative")
    if args.command != "bench" and args.text is None:
        raise ConfigError("--text is required")
    sources = [x is not None for x in (args.positions, args.stride, args.random_b)]
    if args.command in ("build", "oracle") and sum(sources) != 1:
        raise ConfigError("exactly one of --positions, --stride, --random-b is required")
    if args.command == "bench" and args.random_b is None:
        raise ConfigError("bench needs --random-b")


def random_positions(n: int, b: int, seed: int) -> PositionSet:
    if not 1 <= b <= n:
        raise ConfigError(f"--random-b must lie in [1, {n}]")
    rng = random.Random(f"{seed}/positions")
    return PositionSet(rng.sample(range(1, n + 1), b), n)


def _positions(args, n: int) -> Optional[PositionSet]:
    if args.positions is not None:
        try:
            return PositionSet.from_file(args.positions, n)
        except ValueError as exc:
            raise ConfigError(f"{args.positions}: {exc}") from exc
    if args.stride is not None:
        if args.stride < 1:
            raise ConfigError("--stride must be positive")
        return PositionSet.stride(args.stride, n)
    if args.random_b is not None:
        return random_positions(n, args.random_b, args.seed)
    return None


def _config(args) -> BuildConfig:
    return BuildConfig(seed=args.seed, c=args.security, lce=args.lce)


@contextmanager
def _output(path: Optional[str]):
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            yield fh


def write_array(out: TextIO, fmt: str, meta: dict, positions: Sequence[int],
                lcps: Sequence[int], timings: Optional[dict] = None,
                peak: Optional[int] = None) -> None:
    if fmt == "json":
        doc = {"meta": meta, "positions": list(positions), "lcps": [0] + list(lcps),
               "timings": timings or {}, "peak_aux_words": peak}
        json.dump(doc, out, sort_keys=True)
        out.write("\n")
        return
    out.write("# " + " ".join(f"{k}={meta.get(k)}" for k in ("n", "b", "seed", "prime", "mode")) + "\n")
    if peak is not None:
        out.write(f"# peak_aux_words={peak}\n")
    prev = [0] + list(lcps)
    for rank, (pos, ell) in enumerate(zip(positions, prev), start=1):
        out.write(f"{rank}\t{pos}\t{ell}\n")


def read_array(data: str):
    """Parse TSV rows, a JSON document or equations; returns (kind, payload)."""
    stripped = data.strip()
    if stripped.startswith("{"):
        try:
            doc = json.loads(stripped)
            positions = [int(x) for x in doc["positions"]]
            lcps = [int(x) for x in doc["lcps"]]
        except (ValueError, KeyError, TypeError) as exc:
            raise ConfigError(f"malformed JSON array: {exc}") from exc
        if len(lcps) == len(positions):
            lcps = lcps[1:]
        return "array", _Array(positions, lcps)
    rows = []
    for lineno, line in enumerate(data.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            rows.append([int(x) for x in line.split()])
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: not integers") from exc
    widths = {len(r) for r in rows}
    if widths == {4}:
        eqs = []
        for p, q, pp, qq in rows:
            if q - p != qq - pp:
                raise ConfigError(f"equation ({p}, {q}, {pp}, {qq}) has unequal sides")
            eqs.append(Equation(p, q, pp, qq))
        return "equations", eqs
    if widths <= {3}:
        for k, r in enumerate(rows, start=1):
            if r[0] != k:
                raise ConfigError(f"row {k}: rank {r[0]} out of sequence")
        return "array", _Array([r[1] for r in rows], [r[2] for r in rows[1:]])
    raise ConfigError("input is neither an array (3 columns) nor equations (4 columns)")


def cmd_build(args, out: TextIO) -> int:
    t = Text.from_file(args.text)
    B = _positions(args, t.n)
    cfg = _config(args)
    meter_ctx = metering() if (args.instrument or args.format == "json") else nullcontext(None)
    with meter_ctx as m:
        if args.mode == "mc":
            sst = build_sst(t, B, cfg)
        else:
            sst = build_las_vegas(t, B, cfg, retries=args.retries)
            if not sst:
                for entry in sst.attempts:
                    print(f"attempt {entry}", file=sys.stderr)
                print("las vegas build gave up", file=sys.stderr)
                return EXIT_VERIFY
    peak = m.peak if m is not None else None
    write_array(out, args.format, sst.meta, sst.positions, sst.lcps,
                {k: round(v * 1000, 3) for k, v in sst.timings.items()}, peak)
    return 0


def cmd_oracle(args, out: TextIO) -> int:
    t = Text.from_file(args.text)
    B = _positions(args, t.n)
    order, lcps = brute_sparse_sort(t, B)
    meta = {"n": t.n, "b": len(order), "seed": args.seed, "prime": None, "mode": "oracle"}
    write_array(out, args.format, meta, order, lcps)
    return 0


def cmd_verify(args, out: TextIO) -> int:
    t = Text.from_file(args.text)
    if args.array == "-":
        data = sys.stdin.read()
    else:
        with open(args.array, encoding="utf-8") as fh:
            data = fh.read()
    kind, payload = read_array(data)
    if kind == "equations":
        for e in payload:
            if min(e.p, e.pp) < 1 or max(e.q, e.qq) > t.n:
                raise ConfigError(f"equation {tuple(e)} leaves the text")
        verdict = verify_system(t, payload)
    else:
        B = _positions(args, t.n)
        verdict = verify_sst(t, payload, B=None if B is None else B.positions)
    if verdict:
        out.write("accept\n")
        return 0
    if verdict.witness is not None:
        out.write(verdict.line() + "\n")
    else:
        out.write(f"reject {verdict.reason}\n")
    return EXIT_VERIFY


def cmd_lce(args, out: TextIO) -> int:
    t = Text.from_file(args.text)
    B = _positions(args, t.n)
    b = len(B) if B is not None else max(1, int(t.n ** 0.5))
    ctx = new_context(t, args.security, args.seed)
    ds = build_dc_lce(t, ctx, b) if args.lce == "dc" else build_baseline(t, ctx, b)
    for lineno, line in enumerate(sys.stdin, start=1):
        if not line.strip():
            continue
        parts = line.split()
        try:
            i, j = (int(x) for x in parts) if len(parts) == 2 else (None, None)
        except ValueError:
            i = None
        if i is None or not (1 <= i <= t.n and 1 <= j <= t.n):
            print(f"line {lineno}: expected two positions in [1, {t.n}]", file=sys.stderr)
            return EXIT_CONFIG
        out.write(f"{ds.query(i, j)}\n")
    return 0


def cmd_bench(args, out: TextIO) -> int:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["n", "b", "mode", "build_ms", "verify_ms", "peak_aux_words"])
    for n in args.sizes:
        if not 1 <= args.random_b <= n:
            raise ConfigError(f"--random-b must lie in [1, {n}]")
        if args.text is not None:
            t = Text.from_file(args.text)
            if n > t.n:
                raise ConfigError(f"n={n} exceeds the text length {t.n}")
            t = Text(bytes(t.buf[:n]))
        else:
            t = random_text(np.random.default_rng([args.seed, n]), n, 4)
        B = random_positions(n, args.random_b, args.seed)
        cfg = _config(args)
        with metering() as m:
            clock = time.perf_counter()
            sst = build_sst(t, B, cfg) if args.mode == "mc" else build_las_vegas(t, B, cfg, retries=args.retries)
            build_ms = (time.perf_counter() - clock) * 1000
        if not sst:
            return EXIT_VERIFY
        clock = time.perf_counter()
        ok = verify_sst(t, sst, B=B.positions)
        verify_ms = (time.perf_counter() - clock) * 1000
        writer.writerow([n, args.random_b, args.mode, f"{build_ms:.1f}", f"{verify_ms:.1f}", m.peak])
        if not ok:
            return EXIT_VERIFY
    return 0


COMMANDS = {"build": cmd_build, "oracle": cmd_oracle, "verify": cmd_verify,
            "lce": cmd_lce, "bench": cmd_bench}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _parser().parse_args(argv)
    try:
        _check(args)
        with _output(args.out) as out:
            return COMMANDS[args.command](args, out)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ConfigError, ValueError, IndexError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
