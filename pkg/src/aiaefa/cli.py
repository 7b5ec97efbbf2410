"""Command-line entry point: multi-run experiments, problem inspection, trace explanation.

Experiment files are INI documents. ``[experiment]`` holds the run matrix and
each algorithm may have its own section of ``RunConfig`` overrides::

    [experiment]
    problems = rra-series, toy-quadratic
    algorithms = aefa, ai-aefa
    runs = 20
    seed = 0
    reference = aefa

    [ai-aefa]
    beta = 6
    delta = 300
"""

from __future__ import annotations

import argparse
import configparser
import csv
import dataclasses
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from aiaefa import metrics
from aiaefa.core import ALGORITHMS, IterationTrace, RunConfig
from aiaefa.engine import RunError, run
from aiaefa.explain import write_explanations, write_trace_csv
from aiaefa.problems import available, registry_get

RESULT_COLUMNS = (
    "problem",
    "algorithm",
    "run",
    "seed",
    "best_objective",
    "best_violation",
    "feasible",
    "evaluations",
    "best_position",
)
SUMMARY_COLUMNS = (
    "problem",
    "algorithm",
    "runs",
    "mean",
    "std",
    "FR",
    "reference",
    "p_wilcoxon",
    "verdict",
    "p_ttest",
    "mpii",
    "time_complexity",
)

EXIT_USAGE = 2
EXIT_RUN = 3

_CASTS = {"int": int, "float": float, "str": str}


@dataclass
class ExperimentConfig:
    problems: list[str]
    algorithms: list[str] = field(default_factory=lambda: ["ai-aefa"])
    runs: int = 20
    seed: int = 0
    overrides: dict[str, dict] = field(default_factory=dict)
    out: str = "results"
    trace: bool = False
    parallel: int = 1
    reference: str | None = None
    time_complexity: bool = False

    def __post_init__(self):
        if self.runs < 1:
            raise ValueError("runs must be >= 1")
        if self.parallel < 1:
            raise ValueError("parallel must be >= 1")
        unknown = [p for p in self.problems if p not in available()]
        if unknown:
            raise KeyError(f"unknown problem(s) {unknown}; available: {', '.join(available())}")
        bad = [a for a in self.algorithms if a not in ALGORITHMS]
        if bad:
            raise KeyError(f"unknown algorithm(s) {bad}; choose from {', '.join(ALGORITHMS)}")
        if self.reference is not None and self.reference not in self.algorithms:
            raise KeyError(f"reference {self.reference!r} is not among the algorithms")

    def run_seed(self, index: int) -> int:
        return self.seed + index


def _split(value: str) -> list[str]:
    return [v.strip() for v in value.replace("\n", ",").split(",") if v.strip()]


def _parse_overrides(section: configparser.SectionProxy) -> dict:
    types = {f.name: f.type for f in dataclasses.fields(RunConfig)}
    out = {}
    for key in section:
        if key not in types or key in ("seed", "trace"):
            raise KeyError(f"[{section.name}] unknown RunConfig key {key!r}")
        if types[key] == "bool":
            out[key] = section.getboolean(key)
        else:
            out[key] = _CASTS[types[key]](section[key])
    return out


def load_config(path) -> ExperimentConfig:
    parser = configparser.ConfigParser()
    with open(path, encoding="utf-8") as fh:
        parser.read_file(fh)
    if "experiment" not in parser:
        raise KeyError(f"{path}: missing [experiment] section")
    ex = parser["experiment"]
    algorithms = _split(ex.get("algorithms", "ai-aefa"))
    overrides = {name: _parse_overrides(parser[name]) for name in parser.sections() if name != "experiment"}
    stray = set(overrides) - set(algorithms)
    if stray:
        raise KeyError(f"sections for algorithms not being run: {sorted(stray)}")
    return ExperimentConfig(
        problems=_split(ex["problems"]),
        algorithms=algorithms,
        runs=ex.getint("runs", 20),
        seed=ex.getint("seed", 0),
        overrides=overrides,
        out=ex.get("out", "results"),
        trace=ex.getboolean("trace", False),
        parallel=ex.getint("parallel", 1),
        reference=ex.get("reference") or None,
        time_complexity=ex.getboolean("time_complexity", False),
    )


def run_config_for(problem, algorithm: str, overrides: dict, seed: int, trace: bool) -> RunConfig:
    kw = dict(overrides)
    n = kw.get("population_size", RunConfig.population_size)
    if "max_evaluations" not in kw:
        kw["max_evaluations"] = (500 if problem.space.dim <= 10 else 1000) * n
    kw.setdefault("max_iterations", kw["max_evaluations"] // n)
    return ALGORITHMS[algorithm](seed=seed, trace=trace, **kw)


def _one_run(job):
    problem_name, algorithm, index, seed, overrides, trace = job
    problem = registry_get(problem_name)
    cfg = run_config_for(problem, algorithm, overrides, seed, trace)
    try:
        res = run(problem, cfg)
    except RunError as exc:
        raise RunError(f"{problem_name}/{algorithm} run {index}: {exc}", exc.agent, exc.iteration) from None
    # positions stay in-process; only the exported columns cross back
    trace_rows = [dataclasses.replace(t, positions=None) for t in res.trace]
    return {
        "problem": problem_name,
        "algorithm": algorithm,
        "run": index,
        "seed": seed,
        "best_objective": res.best_objective,
        "best_violation": res.best_violation,
        "feasible": res.feasible,
        "evaluations": res.evaluations_used,
        "best_position": ";".join(f"{v:.9e}" for v in res.best_position),
        "_trace": trace_rows,
    }


def _timing(problem_name: str, algorithm: str, overrides: dict, seed: int) -> float:
    problem = registry_get(problem_name)

    def algo(p, budget):
        cfg = run_config_for(p, algorithm, {**overrides, "max_evaluations": budget}, seed, False)
        return run(p, cfg)

    return metrics.timing_complexity([problem], algo, fe_budget=10000, seed=seed)


def summarize(rows: list[dict], config: ExperimentConfig) -> list[dict]:
    out = []
    by_key = {}
    for r in rows:
        by_key.setdefault((r["problem"], r["algorithm"]), []).append(r)
    for prob in config.problems:
        for alg in config.algorithms:
            runs = sorted(by_key[(prob, alg)], key=lambda r: r["run"])
            s = metrics.RunSummary(
                [r["best_objective"] for r in runs], [r["best_violation"] for r in runs]
            )
            mean, std, fr = metrics.mean_std_fr(s)
            row = {"problem": prob, "algorithm": alg, "runs": len(runs), "mean": mean, "std": std, "FR": fr}
            ref = config.reference
            if ref is not None and ref != alg:
                ref_runs = sorted(by_key[(prob, ref)], key=lambda r: r["run"])
                a = [r["best_objective"] for r in runs]
                b = [r["best_objective"] for r in ref_runs]
                row["reference"] = ref
                try:
                    w = metrics.wilcoxon_signed_rank(a, b)
                    row["p_wilcoxon"], row["verdict"] = w.p_value, w.verdict
                except ValueError:
                    pass
                if len(a) >= 2:
                    row["p_ttest"] = metrics.t_test(a, b)
                ref_mean = float(np.mean(b))
                if ref_mean != 1:
                    row["mpii"] = metrics.mpii(mean, ref_mean)
            if config.time_complexity:
                row["time_complexity"] = _timing(prob, alg, config.overrides.get(alg, {}), config.seed)
            out.append(row)
    return out


def run_experiment(config: ExperimentConfig) -> int:
    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)
    jobs = [
        (prob, alg, i, config.run_seed(i), config.overrides.get(alg, {}), config.trace)
        for prob in config.problems
        for alg in config.algorithms
        for i in range(config.runs)
    ]
    if config.parallel > 1:
        with ProcessPoolExecutor(config.parallel) as pool:
            rows = list(pool.map(_one_run, jobs))
    else:
        rows = [_one_run(j) for j in jobs]

    metrics.write_csv(out / "results.csv", RESULT_COLUMNS, rows)
    if config.trace:
        for r in rows:
            write_trace_csv(out / f"trace_{r['problem']}_{r['algorithm']}_{r['run']}.csv", r["_trace"])
    metrics.write_csv(out / "summary.csv", SUMMARY_COLUMNS, summarize(rows, config))
    return 0


def describe(name: str) -> str:
    p = registry_get(name)
    sp = p.space
    lines = [
        f"problem      {p.name}",
        f"description  {p.description}",
        f"sense        {p.sense}",
        f"dimension    {sp.dim}",
        f"lower        {np.array2string(sp.lower, separator=', ', max_line_width=10**6)}",
        f"upper        {np.array2string(sp.upper, separator=', ', max_line_width=10**6)}",
        f"integer dims {[int(i) for i in np.flatnonzero(sp.integer_mask)]} ({sp.mode})",
        f"constraints  {p.constraints.k} inequality, {p.constraints.m} equality",
    ]
    if p.known_best is not None:
        kb = p.known_best
        lines.append(f"known best   {kb.value:g}  [{kb.citation}]")
    return "\n".join(lines)


def read_trace_csv(path) -> list[IterationTrace]:
    with open(path, newline="", encoding="utf-8") as fh:
        return [
            IterationTrace(
                iteration=int(r["iteration"]),
                k_value=float(r["K"]),
                q_best=float(r["Q"]),
                a_norm=float(r["A"]),
                e_norm=float(r["E"]),
                f_best=float(r["f_best"]),
                x_norm=float(r["x_norm"]),
            )
            for r in csv.DictReader(fh)
        ]


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="aiaefa", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run an experiment file")
    p_run.add_argument("config")
    p_run.add_argument("--out", help="output directory (overrides the file)")
    p_run.add_argument("--seed", type=int, help="base seed; run i uses seed + i")
    p_run.add_argument("--trace", action="store_true", help="write per-iteration trace CSVs")
    p_run.add_argument("--parallel", type=int, help="worker processes")

    p_desc = sub.add_parser("describe", help="show a registered problem")
    p_desc.add_argument("problem")

    sub.add_parser("list", help="list registered problems")

    p_exp = sub.add_parser("explain", help="SHAP and correlation exports from a trace CSV")
    p_exp.add_argument("trace")
    p_exp.add_argument("--out", default=".")
    p_exp.add_argument("--surrogate", choices=("linear", "knn"), default="linear")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "list":
            print("\n".join(available()))
            return 0
        if args.command == "describe":
            print(describe(args.problem))
            return 0
        if args.command == "explain":
            Path(args.out).mkdir(parents=True, exist_ok=True)
            write_explanations(read_trace_csv(args.trace), args.out, kind=args.surrogate)
            return 0

        config = load_config(args.config)
        if args.out is not None:
            config.out = args.out
        if args.seed is not None:
            config.seed = args.seed
        if args.trace:
            config.trace = True
        if args.parallel is not None:
            config.parallel = args.parallel
        return run_experiment(config)
    except (KeyError, ValueError, FileNotFoundError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"error: {msg}", file=sys.stderr)
        return EXIT_USAGE
    except RunError as exc:
        print(f"run failed: {exc}", file=sys.stderr)
        return EXIT_RUN


if __name__ == "__main__":
    sys.exit(main())
