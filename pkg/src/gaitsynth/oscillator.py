"""Matsuoka two-neuron oscillator: dynamics, fixed-step integration, analysis.

The oscillator is a pair of mutually inhibiting neurons with adaptation.
Each neuron has a membrane state x_i and an adaptation state v_i:

    tau1 * dx1 = c - x1 - beta*v1 - gamma*[x2]+ - alpha*uf1
    tau2 * dv1 = [x1]+ - v1
    tau1 * dx2 = c - x2 - beta*v2 - gamma*[x1]+ - alpha*uf2
    tau2 * dv2 = [x2]+ - v2

where [x]+ = max(x, 0) and (uf1, uf2) are external feedback inputs scaled
by the gain alpha.  With a constant drive c the two neurons alternate:
the rectified outputs [x1]+ and [x2]+ form sustained antiphase bursts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

MIN_TAU = 1e-6
SIM_DT = 0.02  # simulator tick: 50 steps per second

# Fraction of a series treated as start-up transient by analyze().
TRANSIENT_FRACTION = 0.2
# A run counts as sustained if the last cycle keeps at least this fraction
# of the first retained cycle's amplitude.
SUSTAIN_RATIO = 0.9


class ParameterError(ValueError):
    """A parameter or configuration value violates its contract."""


class DivergenceError(RuntimeError):
    """Integration produced a non-finite state."""

    def __init__(self, message: str, state=None, tick: int | None = None):
        super().__init__(message)
        self.state = state
        self.tick = tick


@dataclass(frozen=True)
class OscillatorParams:
    """The six oscillator constants.

    tau1/tau2 are the rise and adaptation time constants (seconds), beta the
    adaptation intensity, gamma the mutual-inhibition coefficient, alpha the
    feedback gain and c the constant tonic drive.
    """

    tau1: float
    tau2: float
    beta: float
    gamma: float
    alpha: float
    c: float

    def __post_init__(self):
        vals = (self.tau1, self.tau2, self.beta, self.gamma, self.alpha, self.c)
        if not all(math.isfinite(v) for v in vals):
            raise ParameterError(f"non-finite oscillator parameter in {vals}")
        if self.tau1 <= MIN_TAU or self.tau2 <= MIN_TAU:
            raise ParameterError(
                f"time constants must exceed {MIN_TAU}: tau1={self.tau1}, tau2={self.tau2}"
            )


class OscillatorState(NamedTuple):
    x1: float
    v1: float
    x2: float
    v2: float


class FeedbackSignal(NamedTuple):
    uf1: float = 0.0
    uf2: float = 0.0


# Parameter set used throughout the docs and tests: oscillates with a
# period of roughly a second and settles quickly.
CANONICAL_PARAMS = OscillatorParams(
    tau1=0.5, tau2=1.0, beta=2.5, gamma=2.5, alpha=0.0, c=1.0
)
# Tiny asymmetry so the run leaves the (symmetric, non-oscillating) diagonal.
CANONICAL_INITIAL = OscillatorState(0.1, 0.0, 0.0, 0.0)


def rectify(x):
    """Positive part [x]+ = max(x, 0); works on scalars and arrays."""
    return np.maximum(x, 0.0)


def derivatives(
    state: OscillatorState,
    params: OscillatorParams,
    fb: FeedbackSignal = FeedbackSignal(),
) -> OscillatorState:
    """Right-hand side of the oscillator equations, as rates per second."""
    x1, v1, x2, v2 = state
    uf1, uf2 = fb
    return OscillatorState(
        *_field(x1, v1, x2, v2, params.tau1, params.tau2, params.beta,
                params.gamma, params.alpha, params.c, uf1, uf2)
    )


def _field(x1, v1, x2, v2, tau1, tau2, beta, gamma, alpha, c, uf1, uf2):
    y1 = x1 if x1 > 0.0 else 0.0
    y2 = x2 if x2 > 0.0 else 0.0
    dx1 = (c - x1 - beta * v1 - gamma * y2 - alpha * uf1) / tau1
    dv1 = (y1 - v1) / tau2
    dx2 = (c - x2 - beta * v2 - gamma * y1 - alpha * uf2) / tau1
    dv2 = (y2 - v2) / tau2
    return dx1, dv1, dx2, dv2


def _rk4(x1, v1, x2, v2, tau1, tau2, beta, gamma, alpha, c, uf1, uf2, dt):
    """One classical RK4 step with the feedback held constant (zero-order hold)."""
    a1, b1, c1, d1 = _field(x1, v1, x2, v2, tau1, tau2, beta, gamma, alpha, c, uf1, uf2)
    h = 0.5 * dt
    a2, b2, c2, d2 = _field(x1 + h * a1, v1 + h * b1, x2 + h * c1, v2 + h * d1,
                            tau1, tau2, beta, gamma, alpha, c, uf1, uf2)
    a3, b3, c3, d3 = _field(x1 + h * a2, v1 + h * b2, x2 + h * c2, v2 + h * d2,
                            tau1, tau2, beta, gamma, alpha, c, uf1, uf2)
    a4, b4, c4, d4 = _field(x1 + dt * a3, v1 + dt * b3, x2 + dt * c3, v2 + dt * d3,
                            tau1, tau2, beta, gamma, alpha, c, uf1, uf2)
    k = dt / 6.0
    return (
        x1 + k * (a1 + 2.0 * (a2 + a3) + a4),
        v1 + k * (b1 + 2.0 * (b2 + b3) + b4),
        x2 + k * (c1 + 2.0 * (c2 + c3) + c4),
        v2 + k * (d1 + 2.0 * (d2 + d3) + d4),
    )


def _check_dt(dt: float):
    if not (0.0 < dt <= SIM_DT + 1e-12):
        raise ParameterError(f"dt must lie in (0, {SIM_DT}], got {dt}")


def step(
    state: OscillatorState,
    params: OscillatorParams,
    fb: FeedbackSignal = FeedbackSignal(),
    dt: float = SIM_DT,
) -> OscillatorState:
    """Advance the state by one RK4 step of length dt."""
    _check_dt(dt)
    p = params
    out = _rk4(state[0], state[1], state[2], state[3],
               p.tau1, p.tau2, p.beta, p.gamma, p.alpha, p.c,
               fb[0], fb[1], dt)
    if not all(math.isfinite(v) for v in out):
        raise DivergenceError(f"oscillator state diverged: {out}", state=out)
    return OscillatorState(*out)


def simulate(
    params: OscillatorParams,
    initial: OscillatorState = CANONICAL_INITIAL,
    fb_source: Callable[[float], FeedbackSignal] | None = None,
    duration: float = 15.0,
    dt: float = SIM_DT,
) -> np.ndarray:
    """Integrate for `duration` seconds and return the state trajectory.

    Returns an array of shape (n+1, 4) with columns (x1, v1, x2, v2),
    including the initial state, where n = round(duration / dt).  The
    feedback source is sampled once per tick at the tick's start time and
    held constant across the step.
    """
    _check_dt(dt)
    if duration <= 0.0:
        raise ParameterError(f"duration must be positive, got {duration}")
    n = int(round(duration / dt))
    if n < 1 or abs(n * dt - duration) > dt:
        raise ParameterError(f"dt={dt} does not divide duration={duration}")

    p = params
    tau1, tau2, beta, gamma, alpha, c = p.tau1, p.tau2, p.beta, p.gamma, p.alpha, p.c
    x1, v1, x2, v2 = initial
    out = np.empty((n + 1, 4))
    out[0] = (x1, v1, x2, v2)
    for i in range(1, n + 1):
        if fb_source is not None:
            uf1, uf2 = fb_source((i - 1) * dt)
        else:
            uf1 = uf2 = 0.0
        x1, v1, x2, v2 = _rk4(x1, v1, x2, v2, tau1, tau2, beta, gamma,
                              alpha, c, uf1, uf2, dt)
        if not (math.isfinite(x1) and math.isfinite(v1)
                and math.isfinite(x2) and math.isfinite(v2)):
            raise DivergenceError(
                f"oscillator diverged at tick {i} (t={i * dt:.4f} s)",
                state=(x1, v1, x2, v2), tick=i,
            )
        out[i] = (x1, v1, x2, v2)
    return out


@dataclass(frozen=True)
class OscillationReport:
    period: float
    amplitude: float
    phase_difference: float
    sustained: bool
    n_cycles: int


def _peak_times(y: np.ndarray, t: np.ndarray, threshold: float) -> np.ndarray:
    """Times of local maxima of y above threshold, refined parabolically."""
    idx = np.flatnonzero((y[1:-1] > y[:-2]) & (y[1:-1] >= y[2:]) & (y[1:-1] > threshold)) + 1
    times = []
    dt = t[1] - t[0]
    for i in idx:
        ym, y0, yp = y[i - 1], y[i], y[i + 1]
        denom = ym - 2.0 * y0 + yp
        shift = 0.5 * (ym - yp) / denom if denom != 0.0 else 0.0
        times.append(t[i] + np.clip(shift, -1.0, 1.0) * dt)
    return np.asarray(times)


def _upward_crossings(d: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Interpolated times where d crosses from <= 0 to > 0."""
    idx = np.flatnonzero((d[:-1] <= 0.0) & (d[1:] > 0.0))
    frac = -d[idx] / (d[idx + 1] - d[idx])
    return t[idx] + frac * (t[1] - t[0])


def analyze(series: np.ndarray, dt: float) -> OscillationReport:
    """Measure period, amplitude, phase difference and sustainment.

    The first TRANSIENT_FRACTION of the series is discarded.  The period is
    the mean spacing of upward zero-crossings of [x1]+ - [x2]+; amplitude
    the mean per-cycle peak of [x1]+; the phase difference the offset of
    [x2]+ peaks after [x1]+ peaks as a fraction of the period.  Fewer than
    four detected cycles yields a not-oscillating report rather than an
    error.
    """
    arr = np.asarray(series, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 4:
        raise ParameterError(f"series must have shape (n, 4), got {arr.shape}")
    start = int(len(arr) * TRANSIENT_FRACTION)
    window = arr[start:]
    t = (start + np.arange(len(window))) * dt
    y1 = np.maximum(window[:, 0], 0.0)
    y2 = np.maximum(window[:, 2], 0.0)

    not_oscillating = OscillationReport(
        period=float("nan"), amplitude=float("nan"),
        phase_difference=float("nan"), sustained=False, n_cycles=0,
    )
    crossings = _upward_crossings(y1 - y2, t)
    if len(crossings) < 5:  # four full cycles need five crossings
        return not_oscillating
    n_cycles = len(crossings) - 1
    period = float(np.mean(np.diff(crossings)))

    # Per-cycle amplitude of y1 between consecutive crossings.
    amps = []
    for a, b in zip(crossings[:-1], crossings[1:]):
        seg = y1[(t >= a) & (t < b)]
        if len(seg):
            amps.append(float(seg.max()))
    if len(amps) < 4 or amps[0] <= 0.0:
        return not_oscillating
    amplitude = float(np.mean(amps))
    sustained = amps[-1] >= SUSTAIN_RATIO * amps[0]

    thr = 0.1 * max(y1.max(), y2.max())
    p1 = _peak_times(y1, t, thr)
    p2 = _peak_times(y2, t, thr)
    offsets = []
    for tp in p1:
        later = p2[p2 > tp]
        if len(later):
            offsets.append(((later[0] - tp) % period) / period)
    phase = float(np.mean(offsets)) if offsets else float("nan")

    return OscillationReport(
        period=period, amplitude=amplitude, phase_difference=phase,
        sustained=bool(sustained), n_cycles=n_cycles,
    )


def series_to_csv(path, series: np.ndarray, dt: float) -> None:
    """Write a state trajectory as CSV: t,x1,v1,x2,v2,y1,y2."""
    arr = np.asarray(series, dtype=float)
    with open(path, "w", newline="") as fh:
        fh.write("t,x1,v1,x2,v2,y1,y2\n")
        for i, row in enumerate(arr):
            x1, v1, x2, v2 = (float(v) for v in row)
            y1 = max(x1, 0.0)
            y2 = max(x2, 0.0)
            fh.write(f"{i * dt:.4f},{x1!r},{v1!r},{x2!r},{v2!r},{y1!r},{y2!r}\n")
