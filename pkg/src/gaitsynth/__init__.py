"""Biped gait synthesis: Matsuoka-oscillator CPG controller, Harmony Search
and GA optimizers, and a planar kinematic walking environment."""

__version__ = "0.1.0"

from gaitsynth.oscillator import (
    CANONICAL_INITIAL,
    CANONICAL_PARAMS,
    DivergenceError,
    FeedbackSignal,
    OscillationReport,
    OscillatorParams,
    OscillatorState,
    ParameterError,
    analyze,
    derivatives,
    rectify,
    series_to_csv,
    simulate,
    step,
)
from gaitsynth.controller import (
    GaitFrame,
    NetworkParams,
    clamp_frame,
    controller_tick,
    derive_ankle,
    feedback_from_frame,
    frames_to_csv,
    network_output,
    params_from_genome,
)
from gaitsynth.optimize import (
    GENOME_FIELDS,
    BoundsError,
    GaParams,
    HarmonyMemory,
    HsParams,
    OptimizeResult,
    SearchBounds,
    benchmark_bounds,
    benchmark_objectives,
    ga_optimize,
    gait_bounds,
    hs_optimize,
    improvise,
    init_memory,
    random_search,
)
from gaitsynth.simulator import (
    SimConfig,
    SimResult,
    evaluate,
    fitness,
    replay_frames,
    rollout,
    trace,
    write_result_json,
    write_trace_csv,
)
