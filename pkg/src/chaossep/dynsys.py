"""Generation, normalization, and mixing of chaotic component signals.

The component signals come from the Lorenz family

    dx/dt = eta * sigma * (y - x)
    dy/dt = eta * (-x*z + rho*x - y)
    dz/dt = eta * (x*y - beta*z)

integrated with classical fourth-order Runge-Kutta at a fixed step and
subsampled onto a coarser measurement grid.  A measured mixture

    u(t) = sqrt(alpha) * s1(t) + sqrt(1 - alpha) * s2(t)

is formed from two normalized components, so that alpha is the variance
share of the first component.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

# Integration grid: RK4 step size and the subsampling factor that yields
# the measurement interval dt = RK4_STEP * SAMPLE_EVERY.
RK4_STEP = 0.01
SAMPLE_EVERY = 5

CLASSIC = (10.0, 28.0, 8.0 / 3.0)


class DivergenceError(RuntimeError):
    """Trajectory left the configured bound; parameters are non-physical."""


@dataclass(frozen=True)
class LorenzParams:
    """Lorenz coefficients plus a speed factor scaling the vector field."""

    sigma: float = CLASSIC[0]
    rho: float = CLASSIC[1]
    beta: float = CLASSIC[2]
    speed: float = 1.0

    def __post_init__(self) -> None:
        if self.speed <= 0:
            raise ValueError(f"speed must be positive, got {self.speed}")

    def scaled(self, factor: float) -> "LorenzParams":
        """Scale (sigma, rho, beta) by `factor`; speed is untouched."""
        return replace(
            self,
            sigma=self.sigma * factor,
            rho=self.rho * factor,
            beta=self.beta * factor,
        )

    def with_speed(self, speed: float) -> "LorenzParams":
        return replace(self, speed=speed)


@dataclass
class TimeSeries:
    """Uniformly sampled scalar sequence.

    `norm` records the (mean, std) that was subtracted/divided out when the
    series was produced by `normalize`, so the transform can be undone or
    reapplied to companion data.
    """

    samples: np.ndarray
    dt: float
    norm: tuple[float, float] | None = None

    def __post_init__(self) -> None:
        self.samples = np.asarray(self.samples, dtype=float)
        if self.samples.ndim != 1:
            raise ValueError("samples must be one-dimensional")
        if self.dt <= 0:
            raise ValueError(f"dt must be positive, got {self.dt}")

    def __len__(self) -> int:
        return self.samples.shape[0]


@dataclass(frozen=True)
class MixSpec:
    """Mixing fraction: component weights sqrt(alpha) and sqrt(1 - alpha)."""

    alpha: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in [0, 1], got {self.alpha}")


def _deriv(x: float, y: float, z: float, p: LorenzParams) -> tuple[float, float, float]:
    # Scalar core shared by lorenz_deriv / rk4_step / generate; plain floats
    # keep the integration loop an order of magnitude faster than 3-vectors.
    e = p.speed
    return (
        e * p.sigma * (y - x),
        e * (-x * z + p.rho * x - y),
        e * (x * y - p.beta * z),
    )


def lorenz_deriv(state: np.ndarray, p: LorenzParams) -> np.ndarray:
    """Right-hand side of the Lorenz system, scaled by the speed factor."""
    x, y, z = state
    return np.array(_deriv(x, y, z, p))


def _rk4(x: float, y: float, z: float, p: LorenzParams, h: float) -> tuple[float, float, float]:
    ax, ay, az = _deriv(x, y, z, p)
    bx, by, bz = _deriv(x + 0.5 * h * ax, y + 0.5 * h * ay, z + 0.5 * h * az, p)
    cx, cy, cz = _deriv(x + 0.5 * h * bx, y + 0.5 * h * by, z + 0.5 * h * bz, p)
    dx, dy, dz = _deriv(x + h * cx, y + h * cy, z + h * cz, p)
    s = h / 6.0
    return (
        x + s * (ax + 2.0 * (bx + cx) + dx),
        y + s * (ay + 2.0 * (by + cy) + dy),
        z + s * (az + 2.0 * (bz + cz) + dz),
    )


def rk4_step(state: np.ndarray, p: LorenzParams, h: float) -> np.ndarray:
    """One classical Runge-Kutta step of size h."""
    if h <= 0:
        raise ValueError(f"step size must be positive, got {h}")
    x, y, z = state
    return np.array(_rk4(x, y, z, p, h))


def generate(
    p: LorenzParams,
    init: np.ndarray | tuple[float, float, float] = (1.0, 1.0, 1.0),
    n_samples: int = 1000,
    discard: int = 1000,
    seed_perturb: int | None = None,
    divergence_bound: float = 1e6,
) -> tuple[TimeSeries, TimeSeries, TimeSeries]:
    """Integrate a Lorenz trajectory and return its (x, y, z) series.

    `discard` initial RK4 steps are dropped so sampling starts on the
    attractor; thereafter every SAMPLE_EVERY-th step is recorded, giving
    series with dt = 0.05.  If `seed_perturb` is given, the initial
    condition is jittered by a seeded uniform draw from [-0.5, 0.5]^3 so
    that repeat runs explore independent stretches of the attractor while
    remaining reproducible.
    """
    if n_samples <= 0:
        raise ValueError(f"n_samples must be positive, got {n_samples}")
    if discard < 0:
        raise ValueError(f"discard must be nonnegative, got {discard}")
    x, y, z = (float(v) for v in init)
    if seed_perturb is not None:
        jitter = np.random.default_rng(seed_perturb).uniform(-0.5, 0.5, 3)
        x, y, z = x + jitter[0], y + jitter[1], z + jitter[2]
    h = RK4_STEP
    for _ in range(discard):
        x, y, z = _rk4(x, y, z, p, h)
    out = np.empty((n_samples, 3))
    for i in range(n_samples):
        for _ in range(SAMPLE_EVERY):
            x, y, z = _rk4(x, y, z, p, h)
        out[i, 0] = x
        out[i, 1] = y
        out[i, 2] = z
        if not (abs(x) < divergence_bound and abs(y) < divergence_bound and abs(z) < divergence_bound):
            raise DivergenceError(
                f"trajectory exceeded bound {divergence_bound:g} at sample {i}; "
                "parameters are likely non-physical"
            )
    dt = h * SAMPLE_EVERY
    return (
        TimeSeries(out[:, 0].copy(), dt),
        TimeSeries(out[:, 1].copy(), dt),
        TimeSeries(out[:, 2].copy(), dt),
    )


def normalize(s: TimeSeries, window: int | None = None) -> TimeSeries:
    """Shift to mean 0 and scale to variance 1; record (mean, std).

    When `window` is given, the statistics come from samples[:window] only
    (the training segment) and are applied to the whole series; test-time
    statistics are unavailable in deployment.
    """
    if len(s) < 2:
        raise ValueError("need at least 2 samples to normalize")
    seg = s.samples if window is None else s.samples[:window]
    if len(seg) < 2:
        raise ValueError(f"normalization window must cover >= 2 samples, got {len(seg)}")
    mean = float(np.mean(seg))
    std = float(np.std(seg))
    if std == 0.0 or not math.isfinite(std):
        raise ValueError("cannot normalize a series with zero variance")
    return TimeSeries((s.samples - mean) / std, s.dt, norm=(mean, std))


def mix(s1: TimeSeries, s2: TimeSeries, m: MixSpec) -> TimeSeries:
    """Weighted sum sqrt(alpha)*s1 + sqrt(1-alpha)*s2.

    Expects normalized inputs; the squared weights sum to 1, so the output
    has unit variance in expectation for uncorrelated components and is not
    re-normalized here.
    """
    if len(s1) != len(s2):
        raise ValueError(f"length mismatch: {len(s1)} vs {len(s2)}")
    if s1.dt != s2.dt:
        raise ValueError(f"dt mismatch: {s1.dt} vs {s2.dt}")
    w1 = math.sqrt(m.alpha)
    w2 = math.sqrt(1.0 - m.alpha)
    return TimeSeries(w1 * s1.samples + w2 * s2.samples, s1.dt)
