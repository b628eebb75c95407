"""
Harmony Search against a GA and pure random search
==================================================

Compares the three optimizers on the 10-d sphere at a shared evaluation
budget.  Harmony Search improvises one candidate per iteration from its
memory of good vectors; the GA breeds a population generation by
generation; random search is the sanity floor.

Run:  python demos/03_optimizer_benchmarks.py
Writes demos/output/benchmark_curves.png.
"""

import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from gaitsynth import (
    GaParams,
    HsParams,
    benchmark_bounds,
    benchmark_objectives,
    ga_optimize,
    hs_optimize,
    random_search,
)

OUT = os.path.join(os.path.dirname(__file__), "output")
os.makedirs(OUT, exist_ok=True)

DIM = 10
BUDGET = 2000
SEEDS = range(5)

objective = benchmark_objectives()["sphere"]
bounds = benchmark_bounds("sphere", DIM)

curves = {"harmony search": [], "genetic algorithm": [], "random search": []}
finals = {k: [] for k in curves}
for seed in SEEDS:
    hs = hs_optimize(objective, bounds, HsParams(hms=10, ni=BUDGET - 10, seed=seed))
    ga = ga_optimize(objective, bounds,
                     GaParams(population=BUDGET // 10, generations=10, seed=seed))
    rs = random_search(objective, bounds, budget=BUDGET, seed=seed)
    curves["harmony search"].append([(i, b) for i, b, _ in hs.history])
    curves["genetic algorithm"].append(
        [(g * BUDGET // 10, b) for g, b, _ in ga.history])
    curves["random search"].append([(i, b) for i, b, _ in rs.history])
    for key, res in [("harmony search", hs), ("genetic algorithm", ga),
                     ("random search", rs)]:
        finals[key].append(res.best_fitness)

for key, vals in finals.items():
    print(f"{key:18s} median best {np.median(vals):9.4f} over {len(vals)} seeds")

fig, ax = plt.subplots(figsize=(8, 5))
for key, runs in curves.items():
    xs = np.array([p[0] for p in runs[0]])
    ys = np.median([[p[1] for p in run] for run in runs], axis=0)
    ax.plot(xs, -ys, label=key)
ax.set_yscale("log")
ax.set_xlabel("objective evaluations")
ax.set_ylabel("distance to optimum (lower is better)")
ax.set_title(f"10-d sphere, budget {BUDGET}, median of {len(list(SEEDS))} seeds")
ax.legend()
fig.tight_layout()
fig.savefig(os.path.join(OUT, "benchmark_curves.png"), dpi=120)
print(f"wrote {OUT}/benchmark_curves.png")
