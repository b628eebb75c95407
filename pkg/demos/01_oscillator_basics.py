"""
Two mutually inhibiting neurons producing sustained antiphase bursts
=====================================================================

Integrates the coupled two-neuron oscillator from a small asymmetric kick,
measures its rhythm, and plots membrane states and rectified outputs.
The rectified outputs [x1]+ and [x2]+ alternate like a seesaw: exactly the
signal pair used to drive the left and right leg of the walker.

Run:  python demos/01_oscillator_basics.py
Writes demos/output/oscillator.csv and demos/output/oscillator.png.
"""

import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from gaitsynth import (
    CANONICAL_INITIAL,
    CANONICAL_PARAMS,
    analyze,
    series_to_csv,
    simulate,
)

OUT = os.path.join(os.path.dirname(__file__), "output")
os.makedirs(OUT, exist_ok=True)

DT = 0.02

# A 60 s run leaves a dozen cycles after the start-up transient.
series = simulate(CANONICAL_PARAMS, CANONICAL_INITIAL, duration=60.0, dt=DT)
report = analyze(series, DT)
print(f"period            {report.period:.3f} s")
print(f"amplitude         {report.amplitude:.3f}")
print(f"phase difference  {report.phase_difference:.3f} of a period")
print(f"sustained         {report.sustained}")

series_to_csv(os.path.join(OUT, "oscillator.csv"), series, DT)

t = np.arange(len(series)) * DT
y1 = np.maximum(series[:, 0], 0.0)
y2 = np.maximum(series[:, 2], 0.0)

fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(9, 6), sharex=True)
ax1.plot(t, series[:, 0], label="x1")
ax1.plot(t, series[:, 2], label="x2")
ax1.set_ylabel("membrane state")
ax1.set_xlim(0, 30)
ax1.legend(loc="upper right")
ax2.plot(t, y1, label="[x1]+")
ax2.plot(t, y2, label="[x2]+")
ax2.set_xlabel("time (s)")
ax2.set_ylabel("rectified output")
ax2.legend(loc="upper right")
fig.suptitle("Mutual inhibition with adaptation: alternating bursts")
fig.tight_layout()
fig.savefig(os.path.join(OUT, "oscillator.png"), dpi=120)
print(f"wrote {OUT}/oscillator.csv and oscillator.png")
