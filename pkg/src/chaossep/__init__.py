"""Separation of mixed chaotic signals with reservoir computing.

A single measured channel carrying a linear mixture of two chaotic
components is split by an echo-state reservoir whose linear readout is
ridge-trained to recover one component, with a noncausal Wiener filter
as the linear benchmark.  Includes a two-stage pipeline for mixtures
whose mixing fraction is unknown: a reservoir trained to emit the
fraction itself, a cubic calibration of its output, and interpolation
between readouts pre-trained at neighboring fractions.
"""

from .dynsys import (
    CLASSIC,
    DivergenceError,
    LorenzParams,
    MixSpec,
    TimeSeries,
    generate,
    lorenz_deriv,
    mix,
    normalize,
    rk4_step,
)
from .metrics import ErrorReport, PsdOverlay, normalized_error, optimal_zeta, psd_overlay
from .pipeline import (
    AlphaEstimator,
    InterpolationRow,
    ScenarioSpec,
    SeparationResult,
    SweepRecord,
    SweepResult,
    estimate_alpha,
    evaluate_alpha_estimator,
    interpolation_study,
    run_separation,
    scenario,
    select_readout,
    separate_unknown,
    sweep_alpha,
    train_alpha_estimator,
    train_readout_bank,
)
from .readout import ReadoutWeights, RidgeAccumulator, interpolate, predict, train_ridge
from .reservoir import (
    ReservoirConfig,
    ReservoirWeights,
    StateTrajectory,
    build_weights,
    drive,
    spectral_radius,
    update,
)
from .wiener import SpectrumEstimate, WienerFilter, apply, build_wiener, welch_csd, welch_psd

__version__ = "0.1.0"

__all__ = [
    "CLASSIC",
    "DivergenceError",
    "LorenzParams",
    "MixSpec",
    "TimeSeries",
    "generate",
    "lorenz_deriv",
    "mix",
    "normalize",
    "rk4_step",
    "ErrorReport",
    "PsdOverlay",
    "normalized_error",
    "optimal_zeta",
    "psd_overlay",
    "AlphaEstimator",
    "InterpolationRow",
    "ScenarioSpec",
    "SeparationResult",
    "SweepRecord",
    "SweepResult",
    "estimate_alpha",
    "evaluate_alpha_estimator",
    "interpolation_study",
    "run_separation",
    "scenario",
    "select_readout",
    "separate_unknown",
    "sweep_alpha",
    "train_alpha_estimator",
    "train_readout_bank",
    "ReadoutWeights",
    "RidgeAccumulator",
    "interpolate",
    "predict",
    "train_ridge",
    "ReservoirConfig",
    "ReservoirWeights",
    "StateTrajectory",
    "build_weights",
    "drive",
    "spectral_radius",
    "update",
    "SpectrumEstimate",
    "WienerFilter",
    "apply",
    "build_wiener",
    "welch_csd",
    "welch_psd",
    "__version__",
]
