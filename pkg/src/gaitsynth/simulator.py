"""Planar sagittal walking environment for scoring gait controllers.

The walker is purely kinematic: the torso is an upright point mass at the
hip, both legs hang from it, and the stance foot is pinned to the ground.
Forward displacement accrues from stance-leg rotation; support switches to
the swing leg when its foot crosses the ground moving forward.  There are
no dynamics, so commanded angles are realized instantly; the model is
deterministic, desk-scale and analytically checkable, which is what the
optimizer needs from a fitness environment.

An episode runs for a fixed duration.  During an initial lock phase the
posture is held neutral while the oscillator warms up; afterwards the
controller drives the joints at the tick rate.  A rollout ends early if
the torso drops too low, if no step occurs for too long, or if the
oscillator diverges; all three count as falls and the episode is scored
with the fall-punished fitness: x - y when the episode completes,
(x - y) / (time remaining at the fall) otherwise.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, replace

import numpy as np

from gaitsynth.controller import (
    ANKLE_RANGE,
    HIP_FEEDBACK_SCALE,
    HIP_RANGE,
    KNEE_RANGE,
    GaitFrame,
    params_from_genome,
)
from gaitsynth.oscillator import (
    CANONICAL_INITIAL,
    DivergenceError,
    ParameterError,
    _rk4,
)

log = logging.getLogger(__name__)

D2R = math.pi / 180.0

# Guard for the fall-punishment division when the fall lands exactly on
# the deadline: one simulator tick.
REMAINING_TIME_EPS = 0.02

# Meters of lateral drift per degree of left/right actuation-noise
# asymmetry per tick; the planar model has no lateral dynamics of its own.
LATERAL_GAIN = 0.001


@dataclass(frozen=True)
class SimConfig:
    duration: float = 15.0
    lock_phase: float = 3.0
    tick_rate: float = 50.0
    thigh_length: float = 0.12
    shank_length: float = 0.12
    noise_std: float = 0.0
    resamples: int = 1
    seed: int = 0
    feedback_scale: float = HIP_FEEDBACK_SCALE
    use_rectified: bool = True
    lock_mode: str = "warmup"  # "warmup" runs the oscillator; "freeze" holds it
    fall_height_ratio: float = 0.6   # fall when torso < ratio * leg length ...
    fall_height_ticks: int = 5       # ... for this many consecutive ticks
    freeze_timeout: float = 5.0      # fall when no step happens for this long
    lateral_gain: float = LATERAL_GAIN

    def __post_init__(self):
        if not 0.0 <= self.lock_phase < self.duration:
            raise ParameterError(
                f"need 0 <= lock_phase < duration, got {self.lock_phase}, {self.duration}")
        if self.tick_rate <= 0.0:
            raise ParameterError(f"tick_rate must be positive, got {self.tick_rate}")
        if self.thigh_length <= 0.0 or self.shank_length <= 0.0:
            raise ParameterError("segment lengths must be positive")
        if self.resamples < 1:
            raise ParameterError(f"resamples must be >= 1, got {self.resamples}")
        if self.noise_std < 0.0:
            raise ParameterError(f"noise_std must be >= 0, got {self.noise_std}")
        if self.lock_mode not in ("warmup", "freeze"):
            raise ParameterError(f"lock_mode must be 'warmup' or 'freeze', got {self.lock_mode}")
        if not 0.0 < self.fall_height_ratio < 1.0:
            raise ParameterError("fall_height_ratio must lie in (0, 1)")
        if self.fall_height_ticks < 1 or self.freeze_timeout <= 0.0:
            raise ParameterError("fall_height_ticks >= 1 and freeze_timeout > 0 required")

    @property
    def dt(self) -> float:
        return 1.0 / self.tick_rate

    @property
    def leg_length(self) -> float:
        return self.thigh_length + self.shank_length


@dataclass
class SimResult:
    x: float
    y: float
    fell: bool
    fall_time: float | None
    fitness: float
    fall_reason: str | None = None
    n_exchanges: int = 0
    frames: list[GaitFrame] | None = None
    torso_height: np.ndarray | None = None
    x_series: np.ndarray | None = None
    y_series: np.ndarray | None = None


def fitness(x: float, y: float, current_time: float, duration: float, fell: bool) -> float:
    """Walking fitness: x - y on completion, divided by the remaining time
    on a fall (floored at one tick so a fall at the deadline stays finite)."""
    if not fell:
        return x - y
    remaining = duration - current_time
    if remaining < REMAINING_TIME_EPS:
        log.warning("fall at the episode deadline; remaining time floored at %.3fs",
                    REMAINING_TIME_EPS)
        remaining = REMAINING_TIME_EPS
    return (x - y) / remaining


def _episode(frame_fn, config: SimConfig, retain: bool, lateral=None) -> SimResult:
    """Drive the walker with per-tick joint commands.

    frame_fn(i, prev) takes the walking tick index (0-based from the end of
    the lock phase) and the previous commanded frame as a 6-tuple of floats,
    and returns the next one (already clamped).  It may raise
    DivergenceError, which scores as a fall at that tick.  `lateral` is an
    optional per-walking-tick array of signed lateral drift increments.
    """
    dt = config.dt
    n_ticks = int(round(config.duration * config.tick_rate))
    lock_ticks = int(round(config.lock_phase * config.tick_rate))
    lt, ls = config.thigh_length, config.shank_length
    leg = lt + ls
    low_threshold = config.fall_height_ratio * leg

    neutral = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0)
    prev = neutral
    stance = 0  # 0 = left, 1 = right
    stance_foot_x = 0.0
    hip_x = 0.0
    z_hip = leg
    prev_z_sw = 0.0
    prev_x_sw = 0.0
    y_signed = 0.0
    low_count = 0
    n_exchanges = 0
    fell = False
    fall_time = None
    fall_reason = None

    if retain:
        frames = [GaitFrame(*neutral)]
        torso = [leg]
        xs = [0.0]
        ys = [0.0]

    for i in range(1, n_ticks + 1):
        t = i * dt
        if i <= lock_ticks:
            if retain:
                frames.append(GaitFrame(*neutral))
                torso.append(leg)
                xs.append(0.0)
                ys.append(0.0)
            continue

        k = i - lock_ticks - 1  # walking tick index
        try:
            cmd = frame_fn(k, prev)
        except DivergenceError:
            fell = True
            fall_time = t
            fall_reason = "divergence"
            break
        hip_l, knee_l, ankle_l, hip_r, knee_r, ankle_r = cmd
        prev = cmd

        if stance == 0:
            hip_st, knee_st, hip_sw, knee_sw = hip_l, knee_l, hip_r, knee_r
        else:
            hip_st, knee_st, hip_sw, knee_sw = hip_r, knee_r, hip_l, knee_l
        # Joint conventions match the target robot: hip pitch negative swings
        # the thigh forward, knee pitch negative flexes the shank backward.
        a = -hip_st * D2R
        b = (-hip_st + knee_st) * D2R
        fx_st = lt * math.sin(a) + ls * math.sin(b)
        z_hip = lt * math.cos(a) + ls * math.cos(b)
        a = -hip_sw * D2R
        b = (-hip_sw + knee_sw) * D2R
        fx_sw = lt * math.sin(a) + ls * math.sin(b)
        fz_sw = -lt * math.cos(a) - ls * math.cos(b)
        hip_x = stance_foot_x - fx_st
        x_sw = hip_x + fx_sw
        z_sw = z_hip + fz_sw

        if prev_z_sw > 0.0 >= z_sw and x_sw > prev_x_sw:
            stance = 1 - stance
            stance_foot_x = x_sw
            n_exchanges += 1
            prev_z_sw = 0.0
            prev_x_sw = stance_foot_x - fx_sw + fx_st  # old stance foot, now swing
        else:
            prev_z_sw = z_sw
            prev_x_sw = x_sw

        if lateral is not None:
            y_signed += lateral[k]

        if retain:
            frames.append(GaitFrame(*cmd))
            torso.append(z_hip)
            xs.append(hip_x)
            ys.append(y_signed)

        # The episode-complete branch takes precedence at the deadline, so
        # fall conditions only apply to ticks strictly before the end.
        if i == n_ticks:
            break
        if z_hip <= 0.0:
            fell, fall_time, fall_reason = True, t, "torso"
            break
        if z_hip < low_threshold:
            low_count += 1
            if low_count >= config.fall_height_ticks:
                fell, fall_time, fall_reason = True, t, "torso"
                break
        else:
            low_count = 0
        # Frozen gait: stepping never starts within the timeout after the
        # lock phase.  A gait that walks and later stops merely stands, so
        # the fall-punishment division cannot be gamed by freezing late.
        if n_exchanges == 0 and t - config.lock_phase >= config.freeze_timeout:
            fell, fall_time, fall_reason = True, t, "frozen"
            break

    current_time = fall_time if fell else config.duration
    result = SimResult(
        x=hip_x, y=abs(y_signed), fell=fell, fall_time=fall_time,
        fitness=fitness(hip_x, abs(y_signed), current_time, config.duration, fell),
        fall_reason=fall_reason, n_exchanges=n_exchanges,
    )
    if retain:
        result.frames = frames
        result.torso_height = np.asarray(torso)
        result.x_series = np.asarray(xs)
        result.y_series = np.asarray(ys)
    return result


def rollout(genome, config: SimConfig = SimConfig(), retain: bool = False) -> SimResult:
    """Score one genome: build the CPG controller, run a full episode.

    An invalid genome inside the search box (for example a time constant at
    the validity floor) scores as an immediate fall at the end of the lock
    phase rather than raising.
    """
    try:
        osc, net = params_from_genome(genome)
    except ParameterError:
        return SimResult(x=0.0, y=0.0, fell=True, fall_time=config.lock_phase,
                         fitness=fitness(0.0, 0.0, config.lock_phase,
                                         config.duration, True),
                         fall_reason="divergence")

    dt = config.dt
    tau1, tau2, beta, gamma = osc.tau1, osc.tau2, osc.beta, osc.gamma
    alpha, c = osc.alpha, osc.c
    w11, w12, b1, b2 = net.w11, net.w12, net.b1, net.b2
    fs = config.feedback_scale
    rect = config.use_rectified
    hip_lo, hip_hi = HIP_RANGE
    knee_lo, knee_hi = KNEE_RANGE
    ankle_lo, ankle_hi = ANKLE_RANGE

    state = [CANONICAL_INITIAL.x1, CANONICAL_INITIAL.v1,
             CANONICAL_INITIAL.x2, CANONICAL_INITIAL.v2]
    if config.lock_mode == "warmup":
        lock_ticks = int(round(config.lock_phase * config.tick_rate))
        for _ in range(lock_ticks):
            state[:] = _rk4(state[0], state[1], state[2], state[3],
                            tau1, tau2, beta, gamma, alpha, c, 0.0, 0.0, dt)
        if not all(math.isfinite(v) for v in state):
            return SimResult(x=0.0, y=0.0, fell=True, fall_time=config.lock_phase,
                             fitness=fitness(0.0, 0.0, config.lock_phase,
                                             config.duration, True),
                             fall_reason="divergence")

    n_walk = int(round(config.duration * config.tick_rate)) \
        - int(round(config.lock_phase * config.tick_rate))
    noise = None
    lateral = None
    if config.noise_std > 0.0:
        rng = np.random.default_rng(config.seed)
        noise = rng.normal(0.0, config.noise_std, size=(n_walk, 6))
        lateral = config.lateral_gain * (noise[:, 0] - noise[:, 3])

    def frame_fn(k, prev):
        uf1 = fs * prev[0]
        uf2 = fs * prev[3]
        x1, v1, x2, v2 = _rk4(state[0], state[1], state[2], state[3],
                              tau1, tau2, beta, gamma, alpha, c, uf1, uf2, dt)
        if not (math.isfinite(x1) and math.isfinite(v1)
                and math.isfinite(x2) and math.isfinite(v2)):
            raise DivergenceError("oscillator diverged during rollout")
        state[0], state[1], state[2], state[3] = x1, v1, x2, v2
        if rect:
            y1 = x1 if x1 > 0.0 else 0.0
            y2 = x2 if x2 > 0.0 else 0.0
        else:
            y1, y2 = x1, x2
        hl = w11 * y1 + b1
        kl = w12 * y1 + b2
        hr = w11 * y2 + b1
        kr = w12 * y2 + b2
        al = -(hl + kl)
        ar = -(hr + kr)
        if noise is not None:
            row = noise[k]
            hl += float(row[0]); kl += float(row[1]); al += float(row[2])
            hr += float(row[3]); kr += float(row[4]); ar += float(row[5])
        if hl < hip_lo: hl = hip_lo
        elif hl > hip_hi: hl = hip_hi
        if hr < hip_lo: hr = hip_lo
        elif hr > hip_hi: hr = hip_hi
        if kl < knee_lo: kl = knee_lo
        elif kl > knee_hi: kl = knee_hi
        if kr < knee_lo: kr = knee_lo
        elif kr > knee_hi: kr = knee_hi
        if al < ankle_lo: al = ankle_lo
        elif al > ankle_hi: al = ankle_hi
        if ar < ankle_lo: ar = ankle_lo
        elif ar > ankle_hi: ar = ankle_hi
        return (hl, kl, al, hr, kr, ar)

    return _episode(frame_fn, config, retain, lateral)


def replay_frames(frames, config: SimConfig = SimConfig(), retain: bool = False) -> SimResult:
    """Run the walker on externally supplied walking-phase frames.

    frames[k] provides the GaitFrame (or 6-tuple) commanded at walking tick
    k; the neutral posture is still held through the lock phase.  Useful
    for scoring hand-built gaits without a CPG.
    """
    seq = [f.joints() if isinstance(f, GaitFrame) else tuple(f) for f in frames]

    def frame_fn(k, prev):
        return seq[k]

    return _episode(frame_fn, config, retain)


def evaluate(genome, config: SimConfig = SimConfig()) -> float:
    """Mean rollout fitness over `resamples` noisy repetitions.

    Each repetition gets a seed derived from config.seed, so the mean is
    reproducible and independent of execution order.  With one resample
    this is exactly rollout(genome, config).fitness.
    """
    if config.resamples == 1:
        return rollout(genome, config).fitness
    seeds = np.random.SeedSequence(config.seed).generate_state(config.resamples)
    total = 0.0
    for s in seeds:
        total += rollout(genome, replace(config, seed=int(s), resamples=1)).fitness
    return total / config.resamples


def trace(genome, config: SimConfig = SimConfig()) -> SimResult:
    """Rollout with the full per-tick trajectory retained."""
    return rollout(genome, config, retain=True)


def write_trace_csv(path, result: SimResult, config: SimConfig) -> None:
    """Per-tick trajectory CSV: t,hip_l,knee_l,ankle_l,hip_r,knee_r,ankle_r,torso_z,x,y."""
    if result.frames is None:
        raise ParameterError("result has no retained trajectory; use trace()")
    dt = config.dt
    with open(path, "w", newline="") as fh:
        fh.write("t,hip_l,knee_l,ankle_l,hip_r,knee_r,ankle_r,torso_z,x,y\n")
        for i, fr in enumerate(result.frames):
            vals = fr.joints() + (result.torso_height[i], result.x_series[i],
                                  result.y_series[i])
            fh.write(f"{i * dt:.4f}," + ",".join(repr(float(v)) for v in vals) + "\n")


def write_result_json(path, result: SimResult, config: SimConfig) -> None:
    payload = {
        "x": result.x,
        "y": result.y,
        "fell": result.fell,
        "fall_time": result.fall_time,
        "fall_reason": result.fall_reason,
        "n_exchanges": result.n_exchanges,
        "fitness": result.fitness,
        "seed": config.seed,
        "config": {
            "duration": config.duration,
            "lock_phase": config.lock_phase,
            "tick_rate": config.tick_rate,
            "thigh_length": config.thigh_length,
            "shank_length": config.shank_length,
            "noise_std": config.noise_std,
            "resamples": config.resamples,
            "feedback_scale": config.feedback_scale,
            "use_rectified": config.use_rectified,
            "lock_mode": config.lock_mode,
            "fall_height_ratio": config.fall_height_ratio,
            "fall_height_ticks": config.fall_height_ticks,
            "freeze_timeout": config.freeze_timeout,
            "lateral_gain": config.lateral_gain,
        },
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
