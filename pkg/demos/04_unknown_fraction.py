"""Two-stage separation when the mixing fraction is not known.

Stage one trains a small reservoir whose readout is taught to emit the
mixing fraction itself, calibrated by a cubic correction fitted on
held-out mixtures.  Stage two keeps a bank of separation readouts
trained at a few fractions and linearly interpolates their weights to
whatever fraction stage one reports.

Sizes here are reduced for demo speed (about a minute); the shipped
defaults in `train_alpha_estimator` are larger and tighter.
"""

import numpy as np

from chaossep import MixSpec, TimeSeries, mix, normalized_error, scenario
from chaossep.pipeline import (
    estimate_alpha,
    separate_unknown,
    train_alpha_estimator,
    train_readout_bank,
)
from chaossep.reservoir import ReservoirConfig

TRUE_ALPHA = 0.44
TRAIN, TEST = 20000, 2000

spec = scenario(
    "diff_params",
    train_len=TRAIN,
    test_len=TEST,
    reservoir=ReservoirConfig(n_nodes=1000),
)

print("training fraction estimator on a 0.1-step grid ...")
estimator = train_alpha_estimator(
    spec.p1,
    spec.p2,
    grid=np.round(np.arange(0.0, 1.01, 0.1), 10),
    cfg=ReservoirConfig(n_nodes=400, sparsity=0.99, bias=1.0),
    train_len=TRAIN,
    test_len=TRAIN,
    seed=0,
)
print(f"  cubic correction monotone on its range: {estimator.correction_monotone}")

print("training separation readout bank at fractions 0.3 ... 0.7 ...")
run, bank = train_readout_bank(spec, [0.3, 0.4, 0.5, 0.6, 0.7], seed=0)

u = mix(run.s1, run.s2, MixSpec(TRUE_ALPHA))
q = estimate_alpha(estimator, u)
s_hat, q = separate_unknown(estimator, bank, run, u)

# The prediction starts after the reservoir washout; score the held-out
# window only.
washout = run.config.washout
rep = normalized_error(
    TimeSeries(run.s1.samples[TRAIN:], u.dt),
    TimeSeries(s_hat.samples[TRAIN - washout :], u.dt),
    TimeSeries(u.samples[TRAIN:], u.dt),
    tag="rc",
)
print()
print(f"true fraction      : {TRUE_ALPHA}")
print(f"estimated fraction : {q:.3f}  (error {abs(q - TRUE_ALPHA):.3f})")
print(f"separation error with interpolated readout: E = {rep.e_normalized:.3f}")
