"""
From oscillator outputs to leg-joint commands
=============================================

Wires the oscillator into the linear joint network: one neuron drives the
left leg, the other the right, hips and knees share one weight/bias pair
per joint type, and the ankle keeps the foot parallel to the ground.
Because the two outputs burst in antiphase, the left and right joint
trajectories come out identical up to a half-period shift, which the
script verifies numerically.

Run:  python demos/02_gait_controller.py
Writes demos/output/joint_trajectories.{csv,png}.
"""

import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from gaitsynth import (
    CANONICAL_INITIAL,
    CANONICAL_PARAMS,
    NetworkParams,
    analyze,
    controller_tick,
    frames_to_csv,
)
from gaitsynth.controller import NEUTRAL_FRAME

OUT = os.path.join(os.path.dirname(__file__), "output")
os.makedirs(OUT, exist_ok=True)

DT = 0.02
NET = NetworkParams(w11=-3.0, w12=-4.0, b1=5.0, b2=-10.0)

state, frame = CANONICAL_INITIAL, NEUTRAL_FRAME
states, frames = [], []
for _ in range(3000):  # 60 s
    state, frame = controller_tick(state, CANONICAL_PARAMS, NET, frame)
    states.append(state)
    frames.append(frame)

frames_to_csv(os.path.join(OUT, "joint_trajectories.csv"), frames, DT)

report = analyze(np.asarray(states), DT)
half = int(round(report.period / 2 / DT))
hip_l = np.array([f.hip_l for f in frames])
hip_r = np.array([f.hip_r for f in frames])
start = len(hip_l) // 2
rms = np.sqrt(np.mean((hip_l[start + half:] - hip_r[start:-half]) ** 2))
print(f"oscillation period        {report.period:.3f} s")
print(f"half-period shift         {half} ticks")
print(f"L/R mismatch after shift  {rms:.4f} deg RMS")

t = np.arange(len(frames)) * DT
window = (t >= 20) & (t <= 35)
fig, axes = plt.subplots(3, 1, figsize=(9, 8), sharex=True)
for ax, (l, r, name) in zip(axes, [
    (hip_l, hip_r, "hip"),
    (np.array([f.knee_l for f in frames]), np.array([f.knee_r for f in frames]), "knee"),
    (np.array([f.ankle_l for f in frames]), np.array([f.ankle_r for f in frames]), "ankle"),
]):
    ax.plot(t[window], l[window], label=f"left {name}")
    ax.plot(t[window], r[window], label=f"right {name}", alpha=0.8)
    ax.set_ylabel("degrees")
    ax.legend(loc="upper right")
axes[-1].set_xlabel("time (s)")
fig.suptitle("Left/right joint commands: equal shapes, half a period apart")
fig.tight_layout()
fig.savefig(os.path.join(OUT, "joint_trajectories.png"), dpi=120)
print(f"wrote {OUT}/joint_trajectories.csv and joint_trajectories.png")
