"""Linear readout: ridge training, prediction, and interpolation.

The readout is the only trained part of the separator.  Given harvested
states R (N x T) and targets S (M x T), ridge regression minimizes

    reg * ||W||^2 + ||W R - S||^2

whose closed form is W = S R^T (R R^T + reg I)^(-1).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace

import numpy as np
from scipy import linalg

from .dynsys import TimeSeries
from .reservoir import StateTrajectory


@dataclass
class ReadoutWeights:
    """Trained output matrix, tagged with its training context.

    trained_alpha records the mixing fraction the readout was trained at
    (None for generic regressions); reservoir_tag carries the fingerprint
    of the reservoir whose states it was trained on, so interpolation can
    reject cross-reservoir combinations.
    """

    w_out: np.ndarray  # M_o x N
    ridge_reg: float
    trained_alpha: float | None = None
    reservoir_tag: str | None = None

    def __post_init__(self) -> None:
        self.w_out = np.atleast_2d(np.asarray(self.w_out, dtype=float))
        if self.ridge_reg < 0:
            raise ValueError(f"ridge_reg must be nonnegative, got {self.ridge_reg}")


class RidgeAccumulator:
    """Streaming normal equations: G = sum R R^T, C = sum S R^T.

    Lets callers train one readout over data too large to hold as a single
    state matrix (e.g. many concatenated driving segments) by feeding
    blocks and solving once at the end.
    """

    def __init__(self, n_features: int):
        if n_features < 1:
            raise ValueError(f"n_features must be >= 1, got {n_features}")
        self.n_features = n_features
        self.gram = np.zeros((n_features, n_features))
        self.cross: np.ndarray | None = None
        self.n_samples = 0

    def update(self, states: np.ndarray, targets: np.ndarray) -> None:
        """Accumulate one block: states N x T, targets M x T (or length-T)."""
        states = np.asarray(states, dtype=float)
        targets = np.atleast_2d(np.asarray(targets, dtype=float))
        if states.ndim != 2 or states.shape[0] != self.n_features:
            raise ValueError(
                f"states must be {self.n_features} x T, got shape {states.shape}"
            )
        if targets.shape[1] != states.shape[1]:
            raise ValueError(
                f"targets cover {targets.shape[1]} steps, states {states.shape[1]}"
            )
        if self.cross is None:
            self.cross = np.zeros((targets.shape[0], self.n_features))
        elif self.cross.shape[0] != targets.shape[0]:
            raise ValueError(
                f"target dimension changed from {self.cross.shape[0]} to {targets.shape[0]}"
            )
        self.gram += states @ states.T
        self.cross += targets @ states.T
        self.n_samples += states.shape[1]

    def solve(self, reg: float) -> ReadoutWeights:
        """Solve (G + reg I) W^T = C^T for the readout weights."""
        if self.cross is None:
            raise ValueError("no data accumulated")
        if reg < 0:
            raise ValueError(f"ridge_reg must be nonnegative, got {reg}")
        g_reg = self.gram + reg * np.eye(self.n_features)
        try:
            factor = linalg.cho_factor(g_reg)
            w = linalg.cho_solve(factor, self.cross.T).T
        except linalg.LinAlgError:
            # Rank-deficient normal equations (possible at reg=0): fall back
            # to the pseudo-inverse, which picks the minimum-norm solution.
            warnings.warn(
                "normal equations are singular; using pseudo-inverse "
                "(minimum-norm) solution",
                stacklevel=2,
            )
            w = (np.linalg.pinv(g_reg) @ self.cross.T).T
        return ReadoutWeights(w_out=w, ridge_reg=reg)


def train_ridge(r: StateTrajectory, s, reg: float) -> ReadoutWeights:
    """Ridge-train a readout on states r and aligned targets s."""
    acc = RidgeAccumulator(r.n_nodes)
    acc.update(r.states, s)
    return acc.solve(reg)


def predict(w: ReadoutWeights, r: StateTrajectory) -> TimeSeries:
    """Apply a scalar readout column-wise over a state trajectory."""
    if w.w_out.shape[0] != 1:
        raise ValueError(
            f"predict produces a scalar series; readout has {w.w_out.shape[0]} outputs"
        )
    if w.w_out.shape[1] != r.n_nodes:
        raise ValueError(
            f"readout expects {w.w_out.shape[1]} nodes, trajectory has {r.n_nodes}"
        )
    return TimeSeries((w.w_out @ r.states)[0], r.dt)


def interpolate(w_lo: ReadoutWeights, w_hi: ReadoutWeights, q: float) -> ReadoutWeights:
    """Convex combination of two readouts trained at bracketing fractions.

    W_q = (q - q_lo)/(q_hi - q_lo) W_hi + (q_hi - q)/(q_hi - q_lo) W_lo.
    Both readouts must come from the same realized reservoir; combining
    readouts of different reservoirs is meaningless because their state
    coordinates are unrelated.
    """
    if w_lo.trained_alpha is None or w_hi.trained_alpha is None:
        raise ValueError("both readouts must be tagged with trained_alpha")
    q_lo, q_hi = w_lo.trained_alpha, w_hi.trained_alpha
    if not q_lo < q_hi:
        raise ValueError(f"need trained_alpha lo < hi, got {q_lo} >= {q_hi}")
    if not q_lo <= q <= q_hi:
        raise ValueError(f"q={q} outside bracket [{q_lo}, {q_hi}]")
    if w_lo.reservoir_tag != w_hi.reservoir_tag:
        raise ValueError(
            "readouts were trained on different reservoirs and cannot be interpolated"
        )
    if w_lo.w_out.shape != w_hi.w_out.shape:
        raise ValueError(
            f"shape mismatch: {w_lo.w_out.shape} vs {w_hi.w_out.shape}"
        )
    c_hi = (q - q_lo) / (q_hi - q_lo)
    c_lo = (q_hi - q) / (q_hi - q_lo)
    return replace(
        w_lo,
        w_out=c_hi * w_hi.w_out + c_lo * w_lo.w_out,
        trained_alpha=q,
    )
