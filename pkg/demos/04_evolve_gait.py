"""
Evolving a walking gait end to end
==================================

Runs Harmony Search against the planar walking environment: each candidate
genome parameterizes the oscillator and the joint network, the walker
scores it by distance walked with a fall punishment, and the memory keeps
the best parameter vectors.  The best genome is then traced tick by tick
and its trajectory exported.

Run:  python demos/04_evolve_gait.py        (about half a minute)
Writes demos/output/gait_trace.{csv,png} and best_gait.json.
"""

import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from gaitsynth import HsParams, SimConfig, evaluate, gait_bounds, hs_optimize, trace
from gaitsynth.experiments import write_genome_json
from gaitsynth.simulator import write_trace_csv

OUT = os.path.join(os.path.dirname(__file__), "output")
os.makedirs(OUT, exist_ok=True)

CFG = SimConfig()  # 15 s episodes, 3 s lock phase, 50 Hz
SEED = 3

print(f"evolving: 3,010 episode evaluations, seed {SEED} ...")
result = hs_optimize(lambda g: evaluate(g, CFG), gait_bounds(),
                     HsParams(hms=10, ni=3000, seed=SEED))
print(f"best fitness {result.best_fitness:.4f}")
for name, value in zip(gait_bounds().names, result.best):
    print(f"  {name:5s} = {value: .4f}")

run = trace(result.best, CFG)
status = "completed the episode" if not run.fell else \
    f"fell at {run.fall_time:.2f} s ({run.fall_reason})"
print(f"best gait {status}: walked {run.x:.3f} m in {run.n_exchanges} steps")

write_genome_json(os.path.join(OUT, "best_gait.json"), result.best,
                  result.best_fitness, {"seed": SEED})
write_trace_csv(os.path.join(OUT, "gait_trace.csv"), run, CFG)

t = np.arange(len(run.frames)) * CFG.dt
fig, axes = plt.subplots(3, 1, figsize=(9, 8), sharex=True)
axes[0].plot(t, [f.hip_l for f in run.frames], label="left hip")
axes[0].plot(t, [f.hip_r for f in run.frames], label="right hip", alpha=0.8)
axes[0].set_ylabel("degrees")
axes[0].legend(loc="upper right")
axes[1].plot(t, run.x_series, color="tab:green")
axes[1].set_ylabel("forward x (m)")
axes[2].plot(t, run.torso_height * 1000.0, color="tab:red")
axes[2].set_ylabel("torso height (mm)")
axes[2].set_xlabel("time (s)")
fig.suptitle("Best evolved gait: hip commands, progress, torso bobbing")
fig.tight_layout()
fig.savefig(os.path.join(OUT, "gait_trace.png"), dpi=120)
print(f"wrote {OUT}/best_gait.json, gait_trace.csv and gait_trace.png")
