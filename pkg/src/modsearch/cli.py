"""Command-line interface: ``search``, ``verify``, ``bench`` and ``gen``.

Exit codes: 0 success (including zero matches), 1 usage error, 2 input
format error, 3 capacity/overflow rejection, 4 verification mismatch.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import time
from pathlib import Path
from typing import Callable, Optional, Sequence

from . import formats
from .core import CapacityError, InputFormatError, ModSearchError, Text
from .engine import DEFAULT_LEAF_SIZE, EngineStats, next_power_of_two, score_alignments, search
from .generate import random_instance, random_pattern, random_table, random_text
from .oracle import naive_search
from .scoring import ModelKind, ScoreModel

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INPUT = 2
EXIT_CAPACITY = 3
EXIT_MISMATCH = 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _int_list(value: str) -> list[int]:
    try:
        return [int(v) for v in value.split(",") if v]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {value!r}")


def _nonneg(value: str) -> int:
    n = int(value)
    if n < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return n


def _add_model_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--model", choices=[k.value for k in ModelKind], default="exact")
    p.add_argument("--tau", type=_nonneg)
    p.add_argument("--b", type=_nonneg)
    p.add_argument("--table", help="assignment table file (table model)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="modsearch", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("search", help="report alignments where the pattern fits")
    s.add_argument("--text", required=True)
    s.add_argument("--pattern", required=True)
    _add_model_flags(s)
    s.add_argument("--engine", choices=["kam", "naive"], default="kam")
    s.add_argument("--json", action="store_true")
    s.add_argument("--all-scores", action="store_true")
    s.add_argument("--stats", action="store_true")
    s.add_argument("--threads", type=int, default=1)
    s.add_argument("--leaf-size", type=int, default=DEFAULT_LEAF_SIZE)

    v = sub.add_parser("verify", help="compare the engine with the naive oracle")
    v.add_argument("--seed", type=int, default=1)
    v.add_argument("--cases", type=_nonneg, default=200, help="cases per model kind")
    v.add_argument("--model", choices=[k.value for k in ModelKind], action="append")
    v.add_argument("--leaf-size", type=int, default=DEFAULT_LEAF_SIZE)
    v.add_argument("--threads", type=int, default=1)

    b = sub.add_parser("bench", help="operation counts and timings over a grid of m")
    b.add_argument("--m", type=_int_list, default=[8, 16, 32, 64, 128])
    b.add_argument("--n", type=int, help="fixed text length (default: segments * m)")
    b.add_argument("--segments", type=int, default=4)
    b.add_argument("--sigma", type=int, default=8)
    b.add_argument("--max-class-size", type=int, default=3)
    b.add_argument("--seed", type=int, default=1)
    b.add_argument("--leaf-size", type=int, default=1)
    b.add_argument("--threads", type=int, default=1)
    b.add_argument(
        "--naive-budget",
        type=int,
        default=2_000_000,
        help="largest n*m timed in full; larger naive runs are timed on a prefix and scaled",
    )
    b.add_argument("--no-naive", action="store_true")
    b.add_argument("--json", action="store_true")

    g = sub.add_parser("gen", help="write a random text and pattern")
    g.add_argument("--text", required=True, help="output text file")
    g.add_argument("--pattern", required=True, help="output pattern file")
    g.add_argument("--table", help="output assignment table (table model)")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--m", type=int, required=True)
    g.add_argument("--sigma", type=int, default=8)
    g.add_argument("--max-class-size", type=int, default=3)
    g.add_argument("--private-bounds", action="store_true")
    g.add_argument("--tau", type=_nonneg, default=4, help="largest private bound drawn")
    g.add_argument("--model", choices=[k.value for k in ModelKind], default="exact")
    g.add_argument("--seed", type=int, default=1)
    return parser


def _check_model_flags(args) -> None:
    kind = ModelKind(args.model)
    if kind is not ModelKind.EXACT and args.b is None:
        raise UsageError(f"--b is required for model {kind.value}")
    if kind is ModelKind.TABLE and not args.table:
        raise UsageError("--table is required for model table")


def _make_model(args, table=None) -> ScoreModel:
    kind = ModelKind(args.model)
    if kind is ModelKind.EXACT:
        return ScoreModel.exact()
    if kind is ModelKind.TABLE:
        return ScoreModel.from_table(table, args.b)
    return ScoreModel(kind, tau=args.tau, b=args.b)


def _read(path: str, reader):
    try:
        return reader(path)
    except OSError as exc:
        raise InputFormatError(f"cannot read {path}: {exc.strerror}") from None


def format_reports(reports, *, as_json: bool, all_scores: bool, stats: Optional[EngineStats]) -> str:
    if as_json:
        rows = [{"pos": r.position, "score": r.score, "verdict": r.verdict} for r in reports]
        doc = rows if stats is None else {"matches": rows, "stats": stats.to_dict()}
        return json.dumps(doc) + "\n"
    if all_scores:
        lines = [f"{r.position} {r.score} {int(r.verdict)}" for r in reports]
    else:
        lines = [f"{r.position} {r.score}" for r in reports]
    return "".join(line + "\n" for line in lines)


def cmd_search(args, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    _check_model_flags(args)
    if args.threads < 1:
        raise UsageError("--threads must be at least 1")
    table = None
    if ModelKind(args.model) is ModelKind.TABLE:
        table = _read(args.table, formats.parse_assignment_table)
    text = _read(args.text, formats.read_text)
    pattern = _read(args.pattern, formats.read_pattern)
    model = _make_model(args, table)
    if model.uses_tau and model.tau is None and not pattern.all_bounded:
        raise UsageError(f"--tau is required for model {model.kind.value} unless every position has @bound")

    stats = EngineStats() if args.stats else None
    reports = search(
        text,
        pattern,
        model,
        all_scores=args.all_scores,
        engine=args.engine,
        stats=stats,
        leaf_size=args.leaf_size,
        threads=args.threads,
    )
    out.write(format_reports(reports, as_json=args.json, all_scores=args.all_scores, stats=stats))
    if stats is not None and not args.json:
        err.write(f"stats {stats.to_json()}\n")
    return EXIT_OK


def _describe(instance) -> str:
    model = instance.model
    lines = [
        f"model={model.kind.value} tau={model.tau} b={model.b} n={instance.text.n} m={instance.pattern.m}",
        "text: " + " ".join(map(str, instance.text.chars)),
        "pattern:",
        formats.format_pattern(instance.pattern).rstrip("\n"),
    ]
    if model.kind is ModelKind.TABLE:
        lines += ["table:", formats.format_table(model.table).rstrip("\n")]
    return "\n".join(lines)


def cmd_verify(
    args,
    out=None,
    score_fn: Callable = score_alignments,
) -> int:
    """Run ``--cases`` random instances per model kind against the oracle.

    ``score_fn`` is the engine entry point under test; tests swap in a
    deliberately broken one to check that mismatches are caught.
    """
    out = out or sys.stdout
    kinds = [ModelKind(k) for k in args.model] if args.model else list(ModelKind)
    if args.cases == 0:
        out.write("0 cases: nothing to verify\n")
        return EXIT_OK
    master = random.Random(args.seed)
    total = 0
    for kind in kinds:
        for _ in range(args.cases):
            case_seed = master.getrandbits(48)
            inst = random_instance(case_seed, kind)
            expected, _ = naive_search(inst.text, inst.pattern, inst.model)
            got = score_fn(
                inst.text, inst.pattern, inst.model, leaf_size=args.leaf_size, threads=args.threads
            )
            got = [int(x) for x in got]
            total += 1
            if got != expected:
                out.write(f"MISMATCH model={kind.value} case seed={case_seed}\n")
                out.write(_describe(inst) + "\n")
                out.write(f"expected: {expected}\n")
                out.write(f"got:      {got}\n")
                return EXIT_MISMATCH
    out.write(f"{total} cases passed ({', '.join(k.value for k in kinds)}; seed {args.seed})\n")
    return EXIT_OK


def time_naive(text: Text, pattern, model, budget: int) -> tuple[float, bool]:
    """Wall time of the naive engine; scaled from a text prefix past ``budget``.

    The naive cost is the same for every alignment, so a prefix with fewer
    alignments is timed and multiplied up. Returns (seconds, estimated).
    """
    n, m = text.n, pattern.m
    alignments = n - m + 1
    if alignments <= 0:
        return 0.0, False
    if n * m <= budget:
        t0 = time.perf_counter()
        naive_search(text, pattern, model)
        return time.perf_counter() - t0, False
    sample = max(1, budget // m)
    prefix = Text(text.chars[: sample + m - 1])
    t0 = time.perf_counter()
    naive_search(prefix, pattern, model)
    return (time.perf_counter() - t0) * alignments / sample, True


def run_bench(args) -> list[dict]:
    rng = random.Random(args.seed)
    rows = []
    prev = None
    for m in args.m:
        if m < 1:
            raise UsageError("--m values must be positive")
        n = args.n if args.n is not None else args.segments * m
        text = random_text(rng, n, args.sigma)
        pattern = random_pattern(rng, m, args.sigma, args.max_class_size)
        model = ScoreModel.exact()
        stats = EngineStats()
        t0 = time.perf_counter()
        score_alignments(text, pattern, model, stats=stats, leaf_size=args.leaf_size, threads=args.threads)
        kam_s = time.perf_counter() - t0
        per_seg = stats.leaf_products / stats.segments if stats.segments else 0
        row = {
            "n": n,
            "m": m,
            "q": stats.segments,
            "k": next_power_of_two(m),
            **stats.to_dict(),
            "leaves_per_segment": per_seg,
            "leaf_ratio": per_seg / prev if prev else None,
            "kam_s": kam_s,
            "naive_s": None,
            "naive_estimated": None,
        }
        if not args.no_naive:
            row["naive_s"], row["naive_estimated"] = time_naive(text, pattern, model, args.naive_budget)
        rows.append(row)
        prev = per_seg if per_seg else None
    return rows


def cmd_bench(args, out=None) -> int:
    out = out or sys.stdout
    rows = run_bench(args)
    if args.json:
        out.write(json.dumps(rows, indent=1) + "\n")
        return EXIT_OK
    header = (
        f"{'n':>9} {'m':>5} {'q':>7} {'k':>5} {'leaves':>11} {'leaf/seg':>9} {'ratio':>6} "
        f"{'vec_add':>11} {'int_add':>11} {'kam_s':>8} {'naive_s':>9}"
    )
    out.write(header + "\n")
    for r in rows:
        ratio = f"{r['leaf_ratio']:.3f}" if r["leaf_ratio"] else "-"
        if r["naive_s"] is None:
            naive = "-"
        else:
            naive = ("~" if r["naive_estimated"] else "") + f"{r['naive_s']:.3f}"
        out.write(
            f"{r['n']:>9} {r['m']:>5} {r['q']:>7} {r['k']:>5} {r['leaf_products']:>11} "
            f"{r['leaves_per_segment']:>9.0f} {ratio:>6} {r['vector_additions']:>11} "
            f"{r['scalar_additions']:>11} {r['kam_s']:>8.3f} {naive:>9}\n"
        )
    return EXIT_OK


def cmd_gen(args, out=None) -> int:
    out = out or sys.stdout
    if args.n < 0 or args.m < 1 or args.sigma < 1 or args.max_class_size < 1:
        raise UsageError("need n >= 0, m >= 1, sigma >= 1, max class size >= 1")
    rng = random.Random(args.seed)
    text = random_text(rng, args.n, args.sigma)
    bound_prob = 1.0 if args.private_bounds else 0.0
    pattern = random_pattern(rng, args.m, args.sigma, args.max_class_size, bound_prob, args.tau)
    Path(args.text).write_text(formats.format_text(text), encoding="utf-8")
    Path(args.pattern).write_text(formats.format_pattern(pattern), encoding="utf-8")
    if args.table:
        table = random_table(rng, args.sigma, len(pattern.omega))
        Path(args.table).write_text(formats.format_table(table), encoding="utf-8")
    out.write(f"wrote {args.text} (n={args.n}) and {args.pattern} (m={args.m})\n")
    return EXIT_OK


COMMANDS = {"search": cmd_search, "verify": cmd_verify, "bench": cmd_bench, "gen": cmd_gen}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"modsearch: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InputFormatError as exc:
        print(f"modsearch: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except CapacityError as exc:
        print(f"modsearch: capacity error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except (ModSearchError, ValueError) as exc:
        print(f"modsearch: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
