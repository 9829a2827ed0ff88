"""Random reservoir construction and leaky-tanh state dynamics.

The reservoir is a sparse random recurrent network driven by a scalar
input signal:

    r(t+dt) = (1 - a) * r(t) + a * tanh(W_in u(t) + W_res r(t) + b)

W_in and W_res are fixed at build time; only the linear readout (see
`readout`) is ever trained.  W_res is rescaled so its spectral radius hits
a target value, which controls memory and stability of the dynamics.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np
from scipy import sparse

from .dynsys import TimeSeries


@dataclass(frozen=True)
class ReservoirConfig:
    """Hyperparameters of the random reservoir.

    input_scale is the half-width of the uniform distribution from which
    the input weights are drawn; it sets the drive level on a unit-variance
    input signal.  washout counts initial driven steps that are excluded
    from harvesting so harvested states are independent of the zero
    initial state.
    """

    n_nodes: int = 2000
    spectral_radius: float = 0.9
    leakage: float = 0.3
    input_scale: float = 1.0
    bias: float = 0.0
    sparsity: float = 0.95
    washout: int = 500
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n_nodes < 1:
            raise ValueError(f"n_nodes must be >= 1, got {self.n_nodes}")
        if not 0.0 <= self.leakage <= 1.0:
            raise ValueError(f"leakage must lie in [0, 1], got {self.leakage}")
        if not 0.0 <= self.sparsity <= 1.0:
            raise ValueError(f"sparsity must lie in [0, 1], got {self.sparsity}")
        if self.spectral_radius <= 0:
            raise ValueError(f"spectral_radius must be positive, got {self.spectral_radius}")
        if self.input_scale < 0:
            raise ValueError(f"input_scale must be nonnegative, got {self.input_scale}")
        if self.washout < 0:
            raise ValueError(f"washout must be nonnegative, got {self.washout}")


@dataclass
class ReservoirWeights:
    """Realized random matrices of one reservoir instance.

    fingerprint hashes the realized weights; readouts trained on the same
    reservoir carry it so that weight interpolation can refuse to combine
    readouts from different reservoirs.
    """

    w_in: np.ndarray
    w_res: sparse.csr_array
    realized_radius: float
    fingerprint: str


@dataclass
class StateTrajectory:
    """Harvested reservoir states, one column per time step."""

    states: np.ndarray  # N x T
    dt: float

    def __post_init__(self) -> None:
        if self.states.ndim != 2:
            raise ValueError("states must be an N x T matrix")

    @property
    def n_nodes(self) -> int:
        return self.states.shape[0]

    @property
    def n_steps(self) -> int:
        return self.states.shape[1]


def spectral_radius(m, tol: float = 1e-6, max_iter: int = 5000) -> float:
    """Magnitude of the dominant eigenvalue.

    Small matrices go straight to the dense eigensolver.  Larger ones use
    ARPACK with a fixed start vector so the result is reproducible; asking
    for several eigenvalues keeps near-tied magnitudes (real eigenvalue vs
    conjugate pair) inside the Krylov subspace.  If ARPACK still fails to
    converge the dense solver is the exact fallback.
    """
    n, m2 = m.shape
    if n != m2:
        raise ValueError(f"matrix must be square, got shape {m.shape}")

    def dense_radius():
        arr = m.toarray() if sparse.issparse(m) else np.asarray(m)
        return float(np.max(np.abs(np.linalg.eigvals(arr))))

    if n <= 64:
        return dense_radius()
    v0 = np.random.default_rng(0x5EED).standard_normal(n)
    try:
        vals = sparse.linalg.eigs(
            m,
            k=4,
            which="LM",
            v0=v0,
            tol=tol,
            maxiter=max(max_iter, 10 * n),
            return_eigenvectors=False,
        )
    except (sparse.linalg.ArpackNoConvergence, sparse.linalg.ArpackError):
        return dense_radius()
    return float(np.max(np.abs(vals)))


def build_weights(cfg: ReservoirConfig, input_dim: int = 1) -> ReservoirWeights:
    """Draw the random input and recurrent matrices for one reservoir.

    w_in entries are i.i.d. uniform on [-input_scale, input_scale].  w_res
    entries are uniform on [-1, 1], independently zeroed with probability
    `sparsity`, then the whole matrix is rescaled by one constant so its
    spectral radius equals the configured target.
    """
    if input_dim < 1:
        raise ValueError(f"input_dim must be >= 1, got {input_dim}")
    n = cfg.n_nodes
    rng = np.random.default_rng(cfg.seed)
    w_in = rng.uniform(-cfg.input_scale, cfg.input_scale, (n, input_dim))
    dense = rng.uniform(-1.0, 1.0, (n, n))
    dense[rng.random((n, n)) < cfg.sparsity] = 0.0
    if not dense.any():
        raise ValueError(
            "recurrent matrix is entirely zero after sparsity masking; "
            "lower the sparsity or try a different seed"
        )
    raw = sparse.csr_array(dense)
    radius = spectral_radius(raw)
    if radius == 0.0:
        raise ValueError(
            "recurrent matrix has spectral radius 0 and cannot be rescaled; "
            "lower the sparsity or try a different seed"
        )
    w_res = raw * (cfg.spectral_radius / radius)
    realized = spectral_radius(w_res)
    digest = hashlib.sha256()
    digest.update(np.int64(n).tobytes())
    digest.update(w_in.tobytes())
    digest.update(w_res.data.tobytes())
    digest.update(w_res.indices.tobytes())
    digest.update(w_res.indptr.tobytes())
    return ReservoirWeights(
        w_in=w_in,
        w_res=w_res,
        realized_radius=realized,
        fingerprint=digest.hexdigest(),
    )


def update(r: np.ndarray, u, w: ReservoirWeights, cfg: ReservoirConfig) -> np.ndarray:
    """One leaky-tanh step: (1-a) r + a tanh(W_in u + W_res r + b)."""
    u_vec = np.atleast_1d(np.asarray(u, dtype=float))
    pre = w.w_res @ r + w.w_in @ u_vec + cfg.bias
    a = cfg.leakage
    return (1.0 - a) * r + a * np.tanh(pre)


def drive(w: ReservoirWeights, cfg: ReservoirConfig, input_series: TimeSeries) -> StateTrajectory:
    """Run the reservoir over a scalar input from r=0; harvest post-washout states.

    Column t of the result is the state after consuming input sample
    (washout + t), i.e. states are aligned zero-lag with the inputs that
    produced them.
    """
    total = len(input_series)
    if total <= cfg.washout:
        raise ValueError(
            f"input length {total} must exceed washout {cfg.washout}"
        )
    if w.w_in.shape[1] != 1:
        raise ValueError(
            f"drive expects a scalar-input reservoir, got input_dim {w.w_in.shape[1]}"
        )
    n = cfg.n_nodes
    a = cfg.leakage
    w_res = w.w_res
    w_in_col = np.ascontiguousarray(w.w_in[:, 0])
    bias = cfg.bias
    u = input_series.samples
    harvested = total - cfg.washout
    out = np.empty((harvested, n))
    r = np.zeros(n)
    washout = cfg.washout
    for t in range(total):
        # Same map as update(); inlined with the scalar input specialized.
        r = (1.0 - a) * r + a * np.tanh(w_res @ r + w_in_col * u[t] + bias)
        if t >= washout:
            out[t - washout] = r
    return StateTrajectory(states=out.T, dt=input_series.dt)
