"""Oscillator-to-joint mapping: a single linear layer with mirrored
weights, the foot-parallel ankle rule, joint limits, and hip feedback.

One oscillator neuron drives the left leg, the other the right.  Hip and
knee commands come from identity-activation neurons sharing one weight and
bias per joint type across sides, so one (w, b) pair shapes both legs and
the half-period phase shift between them comes entirely from the
oscillator's antiphase outputs.  Ankle pitch is not a free command: it is
chosen so hip + knee + ankle = 0, keeping the sole parallel to the ground.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from gaitsynth.oscillator import (
    SIM_DT,
    FeedbackSignal,
    OscillatorParams,
    OscillatorState,
    ParameterError,
    step,
)

# Joint ranges in degrees: pitch about the lateral axis, flexion negative
# (negative hip pitch swings the thigh forward, negative knee pitch bends
# the shank back), matching the target robot's leg conventions.
HIP_RANGE = (-100.0, 25.0)
KNEE_RANGE = (-130.0, 0.0)
ANKLE_RANGE = (-75.0, 55.0)

JOINT_NAMES = ("hip_l", "knee_l", "ankle_l", "hip_r", "knee_r", "ankle_r")

# Commanded hip degrees are scaled by this before entering the feedback
# inputs, so a feedback gain of a few units is meaningful against state
# magnitudes of order one.
HIP_FEEDBACK_SCALE = 1.0 / 90.0


@dataclass(frozen=True)
class NetworkParams:
    """The four free network values; the right-leg mirrors are implicit
    (w22 = w11, w21 = w12, b4 = b1, b3 = b2)."""

    w11: float  # oscillator output -> hip command, degrees per unit
    w12: float  # oscillator output -> knee command, degrees per unit
    b1: float   # hip bias, degrees
    b2: float   # knee bias, degrees

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.w11, self.w12, self.b1, self.b2)):
            raise ParameterError(f"non-finite network parameter: {self}")


def _clamp(value: float, lo: float, hi: float) -> float:
    return lo if value < lo else hi if value > hi else value


@dataclass(frozen=True)
class GaitFrame:
    """Six joint commands in degrees, clamped to the joint ranges at
    construction; `saturated` names the joints that were clipped."""

    hip_l: float
    knee_l: float
    ankle_l: float
    hip_r: float
    knee_r: float
    ankle_r: float
    saturated: tuple[str, ...] = ()

    def __post_init__(self):
        hit = []
        for name in JOINT_NAMES:
            raw = getattr(self, name)
            if math.isnan(raw):
                raise ParameterError(f"NaN command for {name}")
            lo, hi = _limits(name)
            val = _clamp(raw, lo, hi)
            if val != raw:
                hit.append(name)
                object.__setattr__(self, name, val)
        object.__setattr__(self, "saturated", tuple(hit))

    def joints(self) -> tuple[float, float, float, float, float, float]:
        return (self.hip_l, self.knee_l, self.ankle_l,
                self.hip_r, self.knee_r, self.ankle_r)


def _limits(name: str) -> tuple[float, float]:
    if name.startswith("hip"):
        return HIP_RANGE
    if name.startswith("knee"):
        return KNEE_RANGE
    return ANKLE_RANGE


NEUTRAL_FRAME = GaitFrame(0.0, 0.0, 0.0, 0.0, 0.0, 0.0)


def network_output(y1: float, y2: float, net: NetworkParams):
    """Raw (hip_l, knee_l, hip_r, knee_r) in degrees, before clamping."""
    return (net.w11 * y1 + net.b1,
            net.w12 * y1 + net.b2,
            net.w11 * y2 + net.b1,
            net.w12 * y2 + net.b2)


def derive_ankle(hip: float, knee: float) -> float:
    """Ankle pitch keeping the foot parallel to the ground, clamped."""
    return _clamp(-(hip + knee), ANKLE_RANGE[0], ANKLE_RANGE[1])


def clamp_frame(hip_l, knee_l, ankle_l, hip_r, knee_r, ankle_r) -> GaitFrame:
    return GaitFrame(hip_l, knee_l, ankle_l, hip_r, knee_r, ankle_r)


def feedback_from_frame(frame: GaitFrame, scale: float = HIP_FEEDBACK_SCALE) -> FeedbackSignal:
    """Hip commands scaled into oscillator feedback inputs.  The feedback
    gain itself is applied inside the oscillator, not here."""
    return FeedbackSignal(scale * frame.hip_l, scale * frame.hip_r)


def controller_tick(
    state: OscillatorState,
    params: OscillatorParams,
    net: NetworkParams,
    prev_frame: GaitFrame = NEUTRAL_FRAME,
    dt: float = SIM_DT,
    feedback_scale: float = HIP_FEEDBACK_SCALE,
    use_rectified: bool = True,
) -> tuple[OscillatorState, GaitFrame]:
    """One control step: previous frame -> feedback -> oscillator step ->
    network -> ankles -> clamped frame.

    The joint neurons consume the rectified outputs [x_i]+ by default;
    use_rectified=False feeds the raw membrane states instead.
    """
    fb = feedback_from_frame(prev_frame, feedback_scale)
    new_state = step(state, params, fb, dt)
    if use_rectified:
        y1 = new_state.x1 if new_state.x1 > 0.0 else 0.0
        y2 = new_state.x2 if new_state.x2 > 0.0 else 0.0
    else:
        y1, y2 = new_state.x1, new_state.x2
    hip_l, knee_l, hip_r, knee_r = network_output(y1, y2, net)
    frame = GaitFrame(hip_l, knee_l, derive_ankle(hip_l, knee_l),
                      hip_r, knee_r, derive_ankle(hip_r, knee_r))
    return new_state, frame


def params_from_genome(genome) -> tuple[OscillatorParams, NetworkParams]:
    """Split a 10-vector (tau1, tau2, alpha, beta, gamma, c, w11, w12,
    b1, b2) into oscillator and network parameters.

    Raises ParameterError for non-finite values or time constants at or
    below the validity floor.
    """
    g = np.asarray(genome, dtype=float)
    if g.shape != (10,):
        raise ParameterError(f"genome must have exactly 10 elements, got shape {g.shape}")
    v = [float(x) for x in g]  # plain floats: overflow to inf silently
    osc = OscillatorParams(tau1=v[0], tau2=v[1], alpha=v[2], beta=v[3],
                           gamma=v[4], c=v[5])
    net = NetworkParams(w11=v[6], w12=v[7], b1=v[8], b2=v[9])
    return osc, net


def frames_to_csv(path, frames, dt: float = SIM_DT) -> None:
    """Write a gait trajectory as CSV: t,hip_l,knee_l,ankle_l,hip_r,knee_r,ankle_r."""
    with open(path, "w", newline="") as fh:
        fh.write("t,hip_l,knee_l,ankle_l,hip_r,knee_r,ankle_r\n")
        for i, fr in enumerate(frames):
            j = fr.joints()
            fh.write(f"{i * dt:.4f}," + ",".join(repr(float(v)) for v in j) + "\n")
