"""Experiment orchestration: separation scenarios, mixing-fraction
estimation, and readout interpolation.

A scenario fixes two Lorenz systems, a measured component, and mixing and
reservoir settings.  One run generates both components, normalizes them,
mixes with fraction alpha, trains a reservoir readout on the training
window of the mixture against the first component, builds a Wiener filter
from the same window, and scores both estimators on the held-out window.

Seed policy: a run with seed s derives its generator jitters and reservoir
draw as 3s, 3s+1, and 3s+2, so every random choice is a pure function of
the run seed.  Repeat r of an experiment uses run seed base + r.

Normalization policy: the target component is always normalized to unit
variance on its training window.  By default ("amplitude") the companion
component is centered but scaled by the target's standard deviation, so
the components' relative amplitude survives into the mixture; this
asymmetry is what lets a separator distinguish components whose spectra
match.  "unit" scales each component by its own standard deviation
instead, which erases the amplitude ratio.
"""

from __future__ import annotations

import bisect
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .dynsys import LorenzParams, MixSpec, TimeSeries, generate, mix, normalize
from .metrics import ErrorReport, normalized_error, optimal_zeta
from .readout import ReadoutWeights, RidgeAccumulator, interpolate, predict, train_ridge
from .reservoir import ReservoirConfig, ReservoirWeights, StateTrajectory, build_weights, drive
from .wiener import build_wiener
from .wiener import apply as wiener_apply

SCENARIO_KINDS = ("diff_params", "diff_speed", "matched_spectra", "custom")
NORMALIZATIONS = ("amplitude", "unit")
_COMPONENTS = {"x": 0, "y": 1, "z": 2}


@dataclass(frozen=True)
class ScenarioSpec:
    """Everything one separation experiment depends on."""

    kind: str
    p1: LorenzParams
    p2: LorenzParams
    component: str = "x"
    alpha: float | None = None
    train_len: int = 50000
    test_len: int = 5000
    reservoir: ReservoirConfig = field(default_factory=ReservoirConfig)
    ridge_reg: float = 1e-6
    seg_len: int = 500
    seeds: tuple[int, ...] = (0,)
    normalization: str = "amplitude"

    def __post_init__(self) -> None:
        if self.kind not in SCENARIO_KINDS:
            raise ValueError(f"unknown scenario kind {self.kind!r}")
        if self.component not in _COMPONENTS:
            raise ValueError(f"component must be x, y or z, got {self.component!r}")
        if self.alpha is not None and not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in [0, 1], got {self.alpha}")
        if self.train_len <= self.reservoir.washout:
            raise ValueError("train_len must exceed the reservoir washout")
        if self.test_len < 1:
            raise ValueError("test_len must be positive")
        if self.normalization not in NORMALIZATIONS:
            raise ValueError(f"unknown normalization {self.normalization!r}")


def scenario(kind: str, **overrides) -> ScenarioSpec:
    """Build a ScenarioSpec with the named kind's component systems.

    diff_params: same speed, second system's (sigma, rho, beta) scaled by
    1.2.  diff_speed: same parameters, first system runs 1.2x faster.
    matched_spectra: second system's parameters scaled by 1.1 and slowed
    to 0.9x, which leaves the two spectra nearly identical.  custom:
    caller supplies p1 and p2.
    """
    base = LorenzParams()
    if kind == "diff_params":
        pair = {"p1": base, "p2": base.scaled(1.2)}
    elif kind == "diff_speed":
        pair = {"p1": base.with_speed(1.2), "p2": base}
    elif kind == "matched_spectra":
        pair = {"p1": base, "p2": base.scaled(1.1).with_speed(0.9)}
    elif kind == "custom":
        if "p1" not in overrides or "p2" not in overrides:
            raise ValueError("custom scenario requires explicit p1 and p2")
        pair = {}
    else:
        raise ValueError(f"unknown scenario kind {kind!r}")
    pair.update(overrides)
    return ScenarioSpec(kind=kind, **pair)


@dataclass
class PreparedRun:
    """Signals and reservoir shared by every mixing fraction of one seed."""

    s1: TimeSeries
    s2: TimeSeries
    weights: ReservoirWeights
    config: ReservoirConfig
    seed: int


@dataclass
class SeparationResult:
    """Reports and predictions from one separation run."""

    rc: ErrorReport
    wiener: ErrorReport
    alpha: float
    seed: int
    t: np.ndarray
    actual: np.ndarray
    rc_pred: np.ndarray
    wiener_pred: np.ndarray


def normalize_pair(
    t1: TimeSeries,
    t2: TimeSeries,
    window: int | None,
    normalization: str = "amplitude",
) -> tuple[TimeSeries, TimeSeries]:
    """Apply the scenario normalization policy to a component pair."""
    if normalization not in NORMALIZATIONS:
        raise ValueError(f"unknown normalization {normalization!r}")
    s1 = normalize(t1, window=window)
    if normalization == "amplitude":
        mean2 = float(np.mean(t2.samples[:window] if window else t2.samples))
        std1 = s1.norm[1]
        s2 = TimeSeries((t2.samples - mean2) / std1, t2.dt, norm=(mean2, std1))
    else:
        s2 = normalize(t2, window=window)
    return s1, s2


def prepare_signals(spec: ScenarioSpec, seed: int) -> tuple[TimeSeries, TimeSeries]:
    """Generate and normalize both components for one run seed."""
    total = spec.train_len + spec.test_len
    comp = _COMPONENTS[spec.component]
    t1 = generate(spec.p1, n_samples=total, seed_perturb=3 * seed)[comp]
    t2 = generate(spec.p2, n_samples=total, seed_perturb=3 * seed + 1)[comp]
    return normalize_pair(t1, t2, spec.train_len, spec.normalization)


def prepare_run(spec: ScenarioSpec, seed: int) -> PreparedRun:
    """Generate signals and realize the reservoir for one run seed."""
    s1, s2 = prepare_signals(spec, seed)
    cfg = replace(spec.reservoir, seed=3 * seed + 2)
    weights = build_weights(cfg, input_dim=1)
    return PreparedRun(s1=s1, s2=s2, weights=weights, config=cfg, seed=seed)


def _separate_once(spec: ScenarioSpec, run: PreparedRun, alpha: float) -> SeparationResult:
    """Train, filter, and score one mixing fraction on prepared signals."""
    cfg = run.config
    train_len, test_len = spec.train_len, spec.test_len
    u = mix(run.s1, run.s2, MixSpec(alpha))
    traj = drive(run.weights, cfg, u)
    n_train = train_len - cfg.washout
    r_train = StateTrajectory(traj.states[:, :n_train], traj.dt)
    r_test = StateTrajectory(traj.states[:, n_train:], traj.dt)
    targets = run.s1.samples[cfg.washout : train_len]
    readout = train_ridge(r_train, targets, spec.ridge_reg)
    rc_pred = predict(readout, r_test)

    u_train = TimeSeries(u.samples[:train_len], u.dt)
    s1_train = TimeSeries(run.s1.samples[:train_len], u.dt)
    filt = build_wiener(u_train, s1_train, seg_len=spec.seg_len)
    wiener_full = wiener_apply(filt, u)

    s1_test = TimeSeries(run.s1.samples[train_len:], u.dt)
    u_test = TimeSeries(u.samples[train_len:], u.dt)
    w_pred = TimeSeries(wiener_full.samples[train_len:], u.dt)

    rc_report = normalized_error(s1_test, rc_pred, u_test, tag="rc")
    w_report = normalized_error(s1_test, w_pred, u_test, tag="wiener")

    # Self-check: the scaled mixture itself must score exactly 1.
    zeta = optimal_zeta(s1_test, u_test)
    baseline = TimeSeries(zeta * u_test.samples, u.dt)
    check = normalized_error(s1_test, baseline, u_test, tag="check")
    if not math.isnan(check.e_normalized) and abs(check.e_normalized - 1.0) > 1e-9:
        raise AssertionError(
            f"scaled-mixture self-check failed: {check.e_normalized!r} != 1"
        )

    t = (np.arange(test_len) + train_len) * u.dt
    return SeparationResult(
        rc=rc_report,
        wiener=w_report,
        alpha=alpha,
        seed=run.seed,
        t=t,
        actual=s1_test.samples,
        rc_pred=rc_pred.samples,
        wiener_pred=w_pred.samples,
    )


def run_separation(spec: ScenarioSpec, seed: int | None = None) -> SeparationResult:
    """Full separation experiment for one seed at the spec's alpha."""
    if spec.alpha is None:
        raise ValueError("scenario has no alpha; set one to run a separation")
    if seed is None:
        seed = spec.seeds[0] if spec.seeds else 0
    return _separate_once(spec, prepare_run(spec, seed), spec.alpha)


@dataclass
class SweepRecord:
    """One (alpha, seed, estimator) measurement within a sweep."""

    kind: str
    component: str
    alpha: float
    seed: int
    estimator: str
    e_norm: float
    e_num: float
    zeta_star: float
    n_samples: int


@dataclass
class SweepTableRow:
    """Per-(alpha, estimator) aggregate over sweep repeats."""

    alpha: float
    estimator: str
    e_mean: float
    e_stderr: float
    num_mean: float
    num_stderr: float
    repeats: int


@dataclass
class SweepResult:
    records: list[SweepRecord]
    table: list[SweepTableRow]


def _sweep_worker(spec: ScenarioSpec, alphas: tuple[float, ...], seed: int) -> list[SweepRecord]:
    run = prepare_run(spec, seed)
    records = []
    for alpha in alphas:
        result = _separate_once(spec, run, alpha)
        for report in (result.rc, result.wiener):
            records.append(
                SweepRecord(
                    kind=spec.kind,
                    component=spec.component,
                    alpha=alpha,
                    seed=seed,
                    estimator=report.tag,
                    e_norm=report.e_normalized,
                    e_num=report.e_numerator,
                    zeta_star=report.zeta_star,
                    n_samples=report.n_samples,
                )
            )
    return records


def sweep_alpha(
    spec: ScenarioSpec,
    alphas,
    repeats: int = 1,
    jobs: int = 1,
) -> SweepResult:
    """Run every (alpha, seed) combination and aggregate per alpha.

    Repeat r uses run seed base + r where base is the spec's first seed.
    Workers split by seed; records are merged in (alpha, seed) order, so
    the output is identical for any job count.
    """
    alphas = tuple(float(a) for a in alphas)
    if not alphas:
        raise ValueError("alphas must be nonempty")
    if repeats < 1:
        raise ValueError(f"repeats must be >= 1, got {repeats}")
    base = spec.seeds[0] if spec.seeds else 0
    seeds = [base + r for r in range(repeats)]
    if jobs > 1 and len(seeds) > 1:
        with ProcessPoolExecutor(max_workers=min(jobs, len(seeds))) as pool:
            per_seed = list(pool.map(_sweep_worker, [spec] * len(seeds), [alphas] * len(seeds), seeds))
    else:
        per_seed = [_sweep_worker(spec, alphas, s) for s in seeds]
    records = [rec for chunk in per_seed for rec in chunk]
    records.sort(key=lambda r: (r.alpha, r.seed, r.estimator))

    table = []
    for alpha in alphas:
        for estimator in ("rc", "wiener"):
            grp = [r for r in records if r.alpha == alpha and r.estimator == estimator]
            e_vals = np.array([r.e_norm for r in grp])
            n_vals = np.array([r.e_num for r in grp])
            scale = math.sqrt(len(grp))
            table.append(
                SweepTableRow(
                    alpha=alpha,
                    estimator=estimator,
                    e_mean=float(np.mean(e_vals)),
                    e_stderr=float(np.std(e_vals) / scale),
                    num_mean=float(np.mean(n_vals)),
                    num_stderr=float(np.std(n_vals) / scale),
                    repeats=len(grp),
                )
            )
    return SweepResult(records=records, table=table)


ESTIMATOR_GRID_STEP = 0.05


def default_estimator_config() -> ReservoirConfig:
    """Estimator reservoir: smaller and sparser than the separation one.

    The nonzero bias is essential here, not cosmetic: with b = 0 the tanh
    is odd and the zero-mean mixture excites states whose time averages
    vanish for every mixing fraction, so a linear readout cannot encode
    the fraction at all.  The bias breaks that symmetry and converts the
    fraction-dependent input statistics into state means.
    """
    return ReservoirConfig(n_nodes=1000, sparsity=0.99, bias=1.0)


@dataclass
class AlphaEstimator:
    """Reservoir trained to emit a constant mixing fraction, plus the
    cubic correction that undoes its skew toward the middle of the
    training range."""

    weights: ReservoirWeights
    config: ReservoirConfig
    readout: ReadoutWeights
    correction: np.ndarray
    training_grid: tuple[float, ...]
    raw_estimates: tuple[float, ...]
    correction_monotone: bool


def fit_correction(raw: np.ndarray, true: np.ndarray) -> np.ndarray:
    """Least-squares cubic mapping raw averaged predictions to true values."""
    raw = np.asarray(raw, dtype=float)
    true = np.asarray(true, dtype=float)
    if len(np.unique(raw)) < 4:
        raise ValueError("need at least 4 distinct raw estimates to fit a cubic")
    return np.polyfit(raw, true, 3)


def _cubic_monotone_on(coeffs: np.ndarray, lo: float, hi: float) -> bool:
    """Whether the fitted cubic is nondecreasing on [lo, hi]."""
    deriv = np.polyder(coeffs)
    grid = np.linspace(lo, hi, 512)
    return bool(np.all(np.polyval(deriv, grid) >= 0.0))


def train_alpha_estimator(
    p1: LorenzParams,
    p2: LorenzParams,
    grid=None,
    cfg: ReservoirConfig | None = None,
    component: str = "x",
    train_len: int = 50000,
    test_len: int = 50000,
    ridge_reg: float = 1e-6,
    seed: int = 0,
    normalization: str = "amplitude",
) -> AlphaEstimator:
    """Train the constant-output reservoir and its cubic correction.

    One readout is ridge-trained over all grid fractions jointly, each
    segment driven from a fresh zero state with its own washout so no
    state leaks between fractions.  Raw time-averaged predictions on the
    held-out half of each segment then calibrate the cubic correction.
    """
    if grid is None:
        grid = np.round(np.arange(0.0, 1.0 + ESTIMATOR_GRID_STEP / 2, ESTIMATOR_GRID_STEP), 10)
    grid = tuple(float(g) for g in grid)
    if any(not 0.0 <= g <= 1.0 for g in grid):
        raise ValueError("grid values must lie in [0, 1]")
    if len(set(grid)) < 4:
        raise ValueError("need at least 4 distinct grid values to fit the cubic correction")
    if cfg is None:
        cfg = default_estimator_config()
    cfg = replace(cfg, seed=3 * seed + 2)
    base_spec = ScenarioSpec(
        kind="custom",
        p1=p1,
        p2=p2,
        component=component,
        train_len=train_len,
        test_len=test_len,
        reservoir=cfg,
        normalization=normalization,
    )
    s1, s2 = prepare_signals(base_spec, seed)
    weights = build_weights(cfg, input_dim=1)

    acc = RidgeAccumulator(cfg.n_nodes)
    held_out = []
    for alpha in grid:
        u = mix(s1, s2, MixSpec(alpha))
        u_train = TimeSeries(u.samples[:train_len], u.dt)
        traj = drive(weights, cfg, u_train)
        targets = np.full(traj.n_steps, alpha)
        acc.update(traj.states, targets)
        held_out.append(TimeSeries(u.samples[train_len:], u.dt))
    readout = acc.solve(ridge_reg)
    readout.reservoir_tag = weights.fingerprint

    raw = np.empty(len(grid))
    for i, u_test in enumerate(held_out):
        traj = drive(weights, cfg, u_test)
        raw[i] = float(np.mean(predict(readout, traj).samples))
    coeffs = fit_correction(raw, np.array(grid))
    monotone = _cubic_monotone_on(coeffs, float(np.min(raw)), float(np.max(raw)))
    return AlphaEstimator(
        weights=weights,
        config=cfg,
        readout=readout,
        correction=coeffs,
        training_grid=grid,
        raw_estimates=tuple(float(r) for r in raw),
        correction_monotone=monotone,
    )


def estimate_alpha(est: AlphaEstimator, u: TimeSeries, return_raw: bool = False):
    """Estimate the mixing fraction of a mixture: drive, average, correct, clamp."""
    traj = drive(est.weights, est.config, u)
    raw = float(np.mean(predict(est.readout, traj).samples))
    corrected = float(np.polyval(est.correction, raw))
    corrected = min(1.0, max(0.0, corrected))
    if return_raw:
        return corrected, raw
    return corrected


def evaluate_alpha_estimator(
    est: AlphaEstimator,
    p1: LorenzParams,
    p2: LorenzParams,
    grid=None,
    component: str = "x",
    train_len: int = 50000,
    test_len: int = 50000,
    seed: int = 1,
    normalization: str = "amplitude",
) -> list[tuple[float, float, float]]:
    """Score the estimator on fresh mixtures at each grid fraction.

    New component realizations (different seed than training) are mixed at
    every grid value; the estimator sees only the segment past the
    normalization window, mirroring how calibration segments were cut.
    Returns (true, corrected, raw) triples.
    """
    if grid is None:
        grid = est.training_grid
    grid = tuple(float(g) for g in grid)
    spec = ScenarioSpec(
        kind="custom",
        p1=p1,
        p2=p2,
        component=component,
        train_len=train_len,
        test_len=test_len,
        reservoir=est.config,
        normalization=normalization,
    )
    s1, s2 = prepare_signals(spec, seed)
    rows = []
    for alpha in grid:
        u = mix(s1, s2, MixSpec(alpha))
        u_eval = TimeSeries(u.samples[train_len:], u.dt)
        corrected, raw = estimate_alpha(est, u_eval, return_raw=True)
        rows.append((alpha, corrected, raw))
    return rows


def train_readout_bank(
    spec: ScenarioSpec,
    alphas,
    seed: int | None = None,
) -> tuple[PreparedRun, list[ReadoutWeights]]:
    """Train one readout per mixing fraction on a single shared reservoir."""
    alphas = sorted(float(a) for a in alphas)
    if not alphas:
        raise ValueError("bank needs at least one mixing fraction")
    if seed is None:
        seed = spec.seeds[0] if spec.seeds else 0
    run = prepare_run(spec, seed)
    bank = [_train_bank_readout(spec, run, a) for a in alphas]
    return run, bank


def _train_bank_readout(spec: ScenarioSpec, run: PreparedRun, alpha: float) -> ReadoutWeights:
    """Ridge-train one tagged readout at one mixing fraction."""
    cfg = run.config
    u = mix(run.s1, run.s2, MixSpec(alpha))
    u_train = TimeSeries(u.samples[: spec.train_len], u.dt)
    traj = drive(run.weights, cfg, u_train)
    targets = run.s1.samples[cfg.washout : spec.train_len]
    readout = train_ridge(traj, targets, spec.ridge_reg)
    readout.trained_alpha = alpha
    readout.reservoir_tag = run.weights.fingerprint
    return readout


def select_readout(bank: list[ReadoutWeights], q: float) -> ReadoutWeights:
    """Readout for fraction q: exact hit, interpolation, or nearest endpoint."""
    if not bank:
        raise ValueError("empty readout bank")
    tagged = sorted(bank, key=lambda w: w.trained_alpha)
    grid = [w.trained_alpha for w in tagged]
    if any(g is None for g in grid):
        raise ValueError("bank readouts must be tagged with trained_alpha")
    if q <= grid[0]:
        return tagged[0]
    if q >= grid[-1]:
        return tagged[-1]
    hi = bisect.bisect_left(grid, q)
    if grid[hi] == q:
        return tagged[hi]
    return interpolate(tagged[hi - 1], tagged[hi], q)


def separate_unknown(
    est: AlphaEstimator,
    bank: list[ReadoutWeights],
    run: PreparedRun,
    u: TimeSeries,
) -> tuple[TimeSeries, float]:
    """Two-stage separation of a mixture with unknown mixing fraction.

    Estimates the fraction with the first-stage reservoir, picks or
    interpolates the bracketing bank readouts, and predicts the component
    with the shared separation reservoir.
    """
    q = estimate_alpha(est, u)
    readout = select_readout(bank, q)
    traj = drive(run.weights, run.config, u)
    return predict(readout, traj), q


@dataclass
class InterpolationRow:
    """Direct vs interpolated error at one (spacing, midpoint)."""

    spacing: float
    alpha: float
    direct: float
    interpolated: float
    ratio: float
    repeats: int


def interpolation_study(
    spec: ScenarioSpec,
    spacings,
    midpoints=(0.45,),
    repeats: int = 1,
) -> list[InterpolationRow]:
    """Compare direct-trained vs interpolated readouts at midpoint fractions.

    For spacing d and midpoint m, endpoint readouts trained at m - d/2 and
    m + d/2 are interpolated to m and scored on a test mixture at m against
    a readout trained directly at m.  Spacing 0 reuses the direct readout,
    pinning the ratio at exactly 1.
    """
    spacings = [float(d) for d in spacings]
    midpoints = [float(m) for m in midpoints]
    if any(d < 0 for d in spacings):
        raise ValueError("spacings must be nonnegative")
    base = spec.seeds[0] if spec.seeds else 0
    direct_err: dict[tuple[float, float], list[float]] = {}
    interp_err: dict[tuple[float, float], list[float]] = {}
    for r in range(repeats):
        run = prepare_run(spec, base + r)
        for m in midpoints:
            u = mix(run.s1, run.s2, MixSpec(m))
            traj = drive(run.weights, run.config, u)
            n_train = spec.train_len - run.config.washout
            r_train = StateTrajectory(traj.states[:, :n_train], traj.dt)
            r_test = StateTrajectory(traj.states[:, n_train:], traj.dt)
            targets = run.s1.samples[run.config.washout : spec.train_len]
            direct = train_ridge(r_train, targets, spec.ridge_reg)
            direct.trained_alpha = m
            direct.reservoir_tag = run.weights.fingerprint
            s1_test = TimeSeries(run.s1.samples[spec.train_len :], u.dt)
            u_test = TimeSeries(u.samples[spec.train_len :], u.dt)
            e_direct = normalized_error(s1_test, predict(direct, r_test), u_test, tag="rc").e_normalized
            for d in spacings:
                if d == 0.0:
                    e_interp = e_direct
                else:
                    lo, hi = m - d / 2.0, m + d / 2.0
                    if lo < 0.0 or hi > 1.0:
                        raise ValueError(
                            f"endpoints {lo}, {hi} for midpoint {m} and spacing {d} leave [0, 1]"
                        )
                    w_lo = _train_bank_readout(spec, run, lo)
                    w_hi = _train_bank_readout(spec, run, hi)
                    w_q = interpolate(w_lo, w_hi, m)
                    e_interp = normalized_error(
                        s1_test, predict(w_q, r_test), u_test, tag="rc"
                    ).e_normalized
                direct_err.setdefault((d, m), []).append(e_direct)
                interp_err.setdefault((d, m), []).append(e_interp)
    rows = []
    for d in spacings:
        for m in midpoints:
            dvals = direct_err[(d, m)]
            ivals = interp_err[(d, m)]
            dmean = float(np.mean(dvals))
            imean = float(np.mean(ivals))
            rows.append(
                InterpolationRow(
                    spacing=d,
                    alpha=m,
                    direct=dmean,
                    interpolated=imean,
                    ratio=imean / dmean if dmean != 0 else math.nan,
                    repeats=len(dvals),
                )
            )
    return rows
