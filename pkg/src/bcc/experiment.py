"""Seeded experiment suites and CSV reports.

A config is a small ``key = value`` text file (``#`` starts a comment)::

    source     = random          # random | planted | biclique | counterexample | exhaustive | file
    n_left     = 5
    n_right    = 5
    p          = 0.3, 0.5, 0.7   # cycled over instances
    instances  = 100
    algorithms = pivot, exact
    runs       = 2000
    seed       = 1

Keys per source:

``random``          ``n_left n_right p instances``
``planted``         ``left_sizes right_sizes eps instances``
``biclique``        ``left_sizes right_sizes``
``counterexample``  ``n`` (comma list)
``exhaustive``      ``n_left n_right`` and optional ``sample`` (seeded subset)
``file``            ``path`` (comma list)

Common keys: ``algorithms`` (``pivot ghkz exact bounds dual``), ``runs``,
``seed``, ``z`` (tolerance in standard errors, default 3), ``opt_limit``
(largest component solved exactly, default 12), ``out``.

Instance ``i`` draws its graph from ``derive_seed(seed, 2*i)``; run ``j`` on
it uses ``derive_seed(derive_seed(seed, 2*i + 1), j)``.  Rows are written in
config order, so a config fully determines the CSV bytes.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from . import bounds
from .baselines import ghkz_cost
from .exact import DEFAULT_LIMIT, components, opt
from .graph import (
    BipartiteGraph,
    all_graphs,
    gen_biclique_union,
    gen_counterexample,
    gen_planted,
    gen_random,
    read_graph,
)
from .pivot import PivotRunner
from .rng import SplitMix64, derive_seed

ALGORITHMS = ("pivot", "ghkz", "exact", "bounds", "dual")
SOURCES = ("random", "planted", "biclique", "counterexample", "exhaustive", "file")

COLUMNS = [
    "instance_id",
    "n_left",
    "n_right",
    "n_edges",
    "algorithm",
    "runs",
    "mean_cost",
    "std_cost",
    "se_cost",
    "min_cost",
    "max_cost",
    "opt_cost",
    "opt_source",
    "lp_bound",
    "packing_bound",
    "ratio",
    "ratio_se",
    "dual_objective",
    "dual_objective_se",
    "min_slack",
    "dual_violations",
    "lemma3_violations",
]


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    source: str
    params: dict = field(default_factory=dict)
    algorithms: tuple = ("pivot",)
    runs: int = 1000
    seed: int = 0
    z: float = 3.0
    opt_limit: int = DEFAULT_LIMIT
    out: str | None = None

    def dumps(self) -> str:
        lines = [f"source = {self.source}"]
        lines += [f"{k} = {v}" for k, v in self.params.items()]
        lines += [
            f"algorithms = {', '.join(self.algorithms)}",
            f"runs = {self.runs}",
            f"seed = {self.seed}",
            f"z = {self.z}",
            f"opt_limit = {self.opt_limit}",
        ]
        if self.out:
            lines.append(f"out = {self.out}")
        return "\n".join(lines) + "\n"


def parse_config(text: str) -> ExperimentConfig:
    kv: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        k, v = (s.strip() for s in line.split("=", 1))
        kv[k] = v
    if "source" not in kv:
        raise ConfigError("missing 'source'")
    source = kv.pop("source")
    if source not in SOURCES:
        raise ConfigError(f"unknown source {source!r}; expected one of {', '.join(SOURCES)}")
    cfg = ExperimentConfig(source)
    try:
        if "algorithms" in kv:
            algs = tuple(a.strip() for a in kv.pop("algorithms").split(",") if a.strip())
            bad = [a for a in algs if a not in ALGORITHMS]
            if bad:
                raise ConfigError(f"unknown algorithm(s): {', '.join(bad)}")
            cfg.algorithms = algs
        if "runs" in kv:
            cfg.runs = int(kv.pop("runs"))
        if "seed" in kv:
            cfg.seed = int(kv.pop("seed"), 0)
        if "z" in kv:
            cfg.z = float(kv.pop("z"))
        if "opt_limit" in kv:
            cfg.opt_limit = int(kv.pop("opt_limit"))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    cfg.out = kv.pop("out", None)
    cfg.params = kv
    if cfg.runs < 0:
        raise ConfigError("runs must be nonnegative")
    return cfg


def load_config(path) -> ExperimentConfig:
    return parse_config(Path(path).read_text(encoding="utf-8"))


def _ints(s: str) -> list[int]:
    return [int(x) for x in s.split(",") if x.strip()]


def _floats(s: str) -> list[float]:
    return [float(x) for x in s.split(",") if x.strip()]


def _need(params: dict, *keys):
    missing = [k for k in keys if k not in params]
    if missing:
        raise ConfigError(f"missing parameter(s): {', '.join(missing)}")


def instances(cfg: ExperimentConfig):
    """Yield ``(instance_id, graph, known_opt)``; ``known_opt`` is a closed form or None."""
    p = cfg.params
    try:
        if cfg.source == "random":
            _need(p, "n_left", "n_right", "p", "instances")
            nl, nr, probs = int(p["n_left"]), int(p["n_right"]), _floats(p["p"])
            for i in range(int(p["instances"])):
                pr = probs[i % len(probs)]
                yield f"random-{i}-p{pr:g}", gen_random(nl, nr, pr, derive_seed(cfg.seed, 2 * i)), None
        elif cfg.source == "planted":
            _need(p, "left_sizes", "right_sizes", "eps")
            ls, rs, eps = _ints(p["left_sizes"]), _ints(p["right_sizes"]), float(p["eps"])
            for i in range(int(p.get("instances", 1))):
                yield f"planted-{i}", gen_planted(ls, rs, eps, derive_seed(cfg.seed, 2 * i)), None
        elif cfg.source == "biclique":
            _need(p, "left_sizes", "right_sizes")
            g = gen_biclique_union(_ints(p["left_sizes"]), _ints(p["right_sizes"]))
            yield "biclique", g, 0
        elif cfg.source == "counterexample":
            _need(p, "n")
            for n in _ints(p["n"]):
                yield f"counterexample-{n}", gen_counterexample(n), (n if n >= 4 else None)
        elif cfg.source == "exhaustive":
            _need(p, "n_left", "n_right")
            nl, nr = int(p["n_left"]), int(p["n_right"])
            graphs = list(all_graphs(nl, nr))
            chosen = range(len(graphs))
            if "sample" in p:
                chosen = sample_indices(len(graphs), int(p["sample"]), cfg.seed)
            for idx in chosen:
                yield f"g{nl}x{nr}-{idx}", graphs[idx], None
        elif cfg.source == "file":
            _need(p, "path")
            for path in (s.strip() for s in p["path"].split(",")):
                yield Path(path).name, read_graph(path), None
    except (ValueError, KeyError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"bad generator parameters: {exc}") from None


def sample_indices(n: int, k: int, seed: int) -> list[int]:
    """``k`` distinct indices from ``range(n)`` (partial Fisher-Yates), sorted."""
    if not 0 <= k <= n:
        raise ConfigError(f"sample size {k} not in 0..{n}")
    rng = SplitMix64(seed)
    pool = list(range(n))
    for i in range(k):
        j = i + rng.randbelow(n - i)
        pool[i], pool[j] = pool[j], pool[i]
    return sorted(pool[:k])


def _moments(costs: list[int]) -> dict:
    n = len(costs)
    if not n:
        return {}
    mean = sum(costs) / n
    var = sum((c - mean) ** 2 for c in costs) / (n - 1) if n > 1 else 0.0
    std = math.sqrt(var)
    return {
        "runs": n,
        "mean_cost": mean,
        "std_cost": std,
        "se_cost": std / math.sqrt(n),
        "min_cost": min(costs),
        "max_cost": max(costs),
    }


def run_experiment(cfg: ExperimentConfig) -> list[dict]:
    """All report rows, in deterministic config order."""
    rows = []
    for i, (iid, g, known) in enumerate(instances(cfg)):
        run_base = derive_seed(cfg.seed, 2 * i + 1)
        base = {"instance_id": iid, "n_left": g.n_left, "n_right": g.n_right, "n_edges": g.n_edges}
        if all(len(a) + len(b) <= cfg.opt_limit for a, b in components(g)):
            base["opt_cost"] = opt(g, limit=cfg.opt_limit).opt_cost
            base["opt_source"] = "exact"
        elif known is not None:
            base["opt_cost"] = known
            base["opt_source"] = "closed_form"
        else:
            base["opt_source"] = "lp_bound"
        if "bounds" in cfg.algorithms or base["opt_source"] == "lp_bound":
            base["packing_bound"] = bounds.packing_bound(g)
            try:
                base["lp_bound"] = bounds.square_lp_bound(g)
            except bounds.BoundsLimitError:
                base["opt_source"] = base["opt_source"].replace("lp_bound", "none")
        for alg in cfg.algorithms:
            row = dict(base, algorithm=alg)
            if alg in ("pivot", "ghkz"):
                if alg == "pivot":
                    runner = PivotRunner(g)
                    costs = [runner.cost(derive_seed(run_base, j)) for j in range(cfg.runs)]
                else:
                    costs = [ghkz_cost(g, derive_seed(run_base, j)) for j in range(cfg.runs)]
                row.update(_moments(costs))
                o = base.get("opt_cost")
                if o and costs:
                    row["ratio"] = row["mean_cost"] / o
                    row["ratio_se"] = row["se_cost"] / o
            elif alg == "exact":
                if "opt_cost" in base and base["opt_source"] == "exact":
                    o = base["opt_cost"]
                    row.update(runs=0, mean_cost=o, std_cost=0.0, se_cost=0.0, min_cost=o, max_cost=o)
            elif alg == "dual":
                stats = bounds.estimate_tuple_stats(g, cfg.runs, run_base)
                row.update(runs=stats.runs, mean_cost=stats.mean_cost, se_cost=stats.cost_se)
                if stats.counts:
                    dual = bounds.dual_solution(stats)
                    slacks = bounds.check_dual_feasibility(g, dual, stats, z=cfg.z)
                    l3 = bounds.check_lemma3(stats, dual, z=cfg.z)
                    row.update(
                        dual_objective=dual.objective,
                        dual_objective_se=bounds.dual_objective_se(dual, stats),
                        min_slack=min(s.slack for s in slacks),
                        dual_violations=sum(not s.ok for s in slacks),
                        lemma3_violations=sum(not r.ok for r in l3),
                    )
                else:
                    row.update(dual_objective=0.0, dual_objective_se=0.0, dual_violations=0, lemma3_violations=0)
            rows.append(row)
    return rows


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return f"{v:.10g}"
    return str(v)


def report_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for r in rows:
        w.writerow([_cell(r.get(c)) for c in COLUMNS])
    return buf.getvalue()


def report_json(rows: list[dict]) -> str:
    """The same rows as :func:`report_csv`, as a JSON list with every column present."""
    return json.dumps([{c: r.get(c) for c in COLUMNS} for r in rows], indent=1, sort_keys=False) + "\n"


def parse_report(text: str) -> list[dict]:
    """Read a report back; empty cells become ``None``, numbers are parsed."""
    out = []
    for rec in csv.DictReader(io.StringIO(text)):
        row = {}
        for k, v in rec.items():
            if v == "":
                row[k] = None
            elif k in ("instance_id", "algorithm", "opt_source"):
                row[k] = v
            else:
                row[k] = float(v) if any(ch in v for ch in ".eEn") else int(v)
        out.append(row)
    return out
