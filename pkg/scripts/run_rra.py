"""Seeded AI-AEFA / AEFA runs on the registered RRA problems.

Prints best, mean, std and FR per problem and algorithm, plus the gap of the
best run to the literature optimum.
"""

import argparse
import time

import numpy as np

from aiaefa.core import ALGORITHMS
from aiaefa.engine import run
from aiaefa.metrics import RunSummary, mean_std_fr, mpii
from aiaefa.problems import registry_get

RRA = ("rra-series", "rra-series-parallel", "rra-bridge", "rra-overspeed")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--problems", nargs="+", default=list(RRA))
    ap.add_argument("--algorithms", nargs="+", default=["aefa", "ai-aefa"])
    ap.add_argument("--runs", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--max-evaluations", type=int, default=15000)
    ap.add_argument("--beta", type=float, help="override the sigmoid slope for ai-aefa")
    ap.add_argument("--delta", type=float, help="override the sigmoid width for ai-aefa")
    args = ap.parse_args()

    extra = {k: v for k, v in (("beta", args.beta), ("delta", args.delta)) if v is not None}
    print(f"{'problem':<22}{'algorithm':<10}{'best':>12}{'mean':>12}{'std':>11}{'FR':>6}{'gap':>11}{'MPII':>10}{'s':>7}")
    for name in args.problems:
        prob = registry_get(name)
        means = {}
        for alg in args.algorithms:
            kw = extra if alg == "ai-aefa" else {}
            t0 = time.perf_counter()
            res = [
                run(prob, ALGORITHMS[alg](seed=args.seed + i, max_evaluations=args.max_evaluations, **kw))
                for i in range(args.runs)
            ]
            dt = time.perf_counter() - t0
            s = RunSummary([r.best_objective for r in res], [r.best_violation for r in res])
            mean, std, fr = mean_std_fr(s)
            means[alg] = mean
            feas = s.objectives[s.feasible]
            best = float(feas.max()) if feas.size else np.nan
            gap = prob.known_best.value - best
            ref = means.get(args.algorithms[0])
            m = mpii(mean, ref) if alg != args.algorithms[0] and ref != 1 else np.nan
            print(f"{name:<22}{alg:<10}{best:>12.6f}{mean:>12.6f}{std:>11.2e}{fr:>6.0f}{gap:>11.2e}{m:>10.4f}{dt:>7.1f}")


if __name__ == "__main__":
    main()
