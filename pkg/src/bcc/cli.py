"""``bcc`` command line: ``run``, ``experiment``, ``verify`` and ``gen``.

Exit codes: 0 success, 1 verification failure, 2 bad input (parse/config errors).
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .baselines import run_ghkz
from .clustering import cost, format_clustering
from .exact import SizeLimitError, opt
from .experiment import ConfigError, load_config, report_csv, report_json, run_experiment
from .graph import (
    GraphError,
    ParseError,
    gen_biclique_union,
    gen_counterexample,
    gen_planted,
    gen_random,
    read_graph,
    serialize_graph,
)
from .pivot import Phase, Trace, run, verify_trace
from .rng import derive_seed


def _fail(msg: str, code: int = 2) -> int:
    print(f"bcc: error: {msg}", file=sys.stderr)
    return code


def _load(path):
    try:
        return read_graph(path)
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None


def cmd_run(args) -> int:
    g = _load(args.graph)
    if args.algo == "pivot":
        b, _ = run(g, args.seed, trace=False)
    elif args.algo == "ghkz":
        b = run_ghkz(g, args.seed)
    else:
        b = opt(g).witness
    rep = cost(g, b)
    out = format_clustering(b) + f"# cost {rep.total} cut {rep.cut_edges} missing {rep.missing_pairs}\n"
    if args.out:
        Path(args.out).write_text(out, encoding="utf-8")
    sys.stdout.write(out)
    return 0


def cmd_experiment(args) -> int:
    cfg = load_config(args.config)
    rows = run_experiment(cfg)
    text = report_json(rows) if args.format == "json" else report_csv(rows)
    dest = args.out or cfg.out
    if dest:
        Path(dest).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def _inject_violation(trace: Trace) -> Trace | None:
    """Duplicate the first event that colors something, so a pair is colored twice."""
    for pi, ph in enumerate(trace.phases):
        for ev in ph.events:
            if ev.colored:
                phases = list(trace.phases)
                phases[pi] = Phase(ph.pivot, ph.events + (ev,))
                return Trace(phases)
    return None


def cmd_verify(args) -> int:
    g = _load(args.graph)
    if args.inject_violation:
        for j in range(max(args.runs, 1) * 10):
            b, tr = run(g, derive_seed(args.seed, j))
            bad = _inject_violation(tr)
            if bad is not None:
                v = verify_trace(g, b, bad)
                if v.ok:
                    print("self-test FAILED: injected violation not detected")
                    return 1
                print(f"self-test ok: injected violation detected: {v.message}")
                return 0
        print("self-test skipped: no trace with a reusable colored pair")
        return 0
    for j in range(args.runs):
        b, tr = run(g, derive_seed(args.seed, j))
        v = verify_trace(g, b, tr)
        if not v.ok:
            print(f"violation in run {j}: {v.message}")
            return 1
    print(f"ok, {args.runs} runs")
    return 0


def cmd_gen(args) -> int:
    kind = args.kind
    if kind == "random":
        g = gen_random(args.n_left, args.n_right, args.p, args.seed)
    elif kind == "counterexample":
        g = gen_counterexample(args.n)
    elif kind == "biclique":
        g = gen_biclique_union(args.left_sizes, args.right_sizes)
    else:
        g = gen_planted(args.left_sizes, args.right_sizes, args.eps, args.seed)
    text = serialize_graph(g)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def _sizes(s: str) -> list[int]:
    return [int(x) for x in s.split(",") if x]


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="bcc", description="Bipartite correlation clustering toolkit")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="cluster a graph file and print the clustering and its cost")
    p.add_argument("--graph", required=True)
    p.add_argument("--algo", choices=("pivot", "ghkz", "exact"), default="pivot")
    p.add_argument("--seed", type=lambda s: int(s, 0), default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("experiment", help="run a config and write a CSV report")
    p.add_argument("--config", required=True)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("verify", help="check the coloring invariant over seeded runs")
    p.add_argument("--graph", required=True)
    p.add_argument("--seed", type=lambda s: int(s, 0), default=0)
    p.add_argument("--runs", type=int, default=100)
    p.add_argument("--inject-violation", action="store_true", help="self-test on a corrupted trace")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("gen", help="write a generated graph in bcc format")
    p.add_argument("kind", choices=("random", "counterexample", "biclique", "planted"))
    p.add_argument("--n-left", type=int, default=5)
    p.add_argument("--n-right", type=int, default=5)
    p.add_argument("--p", type=float, default=0.5)
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--left-sizes", type=_sizes, default=[2])
    p.add_argument("--right-sizes", type=_sizes, default=[2])
    p.add_argument("--eps", type=float, default=0.1)
    p.add_argument("--seed", type=lambda s: int(s, 0), default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, GraphError, ConfigError, SizeLimitError) as exc:
        return _fail(str(exc))
    except OSError as exc:
        return _fail(f"{exc.filename}: {exc.strerror}")


if __name__ == "__main__":
    sys.exit(main())
