"""Command-line front end.

Subcommands: generate, separate, sweep, estimate-alpha, interp-study.
Each reads an INI-style config (one or more scenario sections), runs the
corresponding pipeline function, and writes CSV files into the output
directory.  With a single section files land in the output directory
itself; with several, each section gets a subdirectory named after it.

Exit codes: 0 all outputs written, 2 unwritable output directory,
3 missing or invalid config key, 1 any other failure.  Every error path
prints a single diagnostic line to stderr.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import os
import sys
from dataclasses import replace

import numpy as np

from .dynsys import MixSpec, generate, mix
from .pipeline import (
    ESTIMATOR_GRID_STEP,
    ScenarioSpec,
    default_estimator_config,
    evaluate_alpha_estimator,
    interpolation_study,
    normalize_pair,
    run_separation,
    scenario,
    sweep_alpha,
    train_alpha_estimator,
)
from .reservoir import ReservoirConfig

_CONFIG_KINDS = ("diff_params", "diff_speed", "matched_spectra")

# Per-key parsers; unknown keys are rejected by name.
_KEY_PARSERS = {
    "kind": str,
    "component": str,
    "normalization": str,
    "alpha": float,
    "alphas": "floats",
    "n_nodes": int,
    "spectral_radius": float,
    "leakage": float,
    "input_scale": float,
    "bias": float,
    "sparsity": float,
    "washout": int,
    "ridge_reg": float,
    "train_len": int,
    "test_len": int,
    "seg_len": int,
    "repeats": int,
    "grid_step": float,
    "spacings": "floats",
    "midpoints": "floats",
    "n_samples": int,
    "discard": int,
    "seed": int,
    "out_dir": str,
}

_RESERVOIR_KEYS = {
    "n_nodes",
    "spectral_radius",
    "leakage",
    "input_scale",
    "bias",
    "sparsity",
    "washout",
}


class ConfigError(Exception):
    """Missing or invalid config key; maps to exit code 3."""


class OutputDirError(Exception):
    """Output directory cannot be created or written; exit code 2."""


def _parse_floats(text: str) -> tuple[float, ...]:
    parts = [p.strip() for p in text.split(",") if p.strip()]
    if not parts:
        raise ValueError("empty list")
    return tuple(float(p) for p in parts)


def parse_section(section: str, items: dict) -> dict:
    """Validate and type one scenario section."""
    out = {}
    for key, raw in items.items():
        parser = _KEY_PARSERS.get(key)
        if parser is None:
            raise ConfigError(f"unknown config key {key!r} in section {section!r}")
        try:
            out[key] = _parse_floats(raw) if parser == "floats" else parser(raw)
        except ValueError as exc:
            raise ConfigError(
                f"invalid value {raw!r} for key {key!r} in section {section!r}: {exc}"
            ) from None
    if "kind" not in out:
        raise ConfigError(f"missing required key 'kind' in section {section!r}")
    if out["kind"] not in _CONFIG_KINDS:
        raise ConfigError(
            f"key 'kind' in section {section!r} must be one of {', '.join(_CONFIG_KINDS)}"
        )
    return out


def load_config(path: str) -> list[tuple[str, dict]]:
    """Read the config file into (section name, typed values) pairs."""
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise ConfigError(f"config file {path!r} not found or unreadable")
    sections = parser.sections()
    if not sections:
        raise ConfigError(f"config file {path!r} defines no scenario section")
    return [(name, parse_section(name, dict(parser.items(name)))) for name in sections]


def _reservoir_from(values: dict, base: ReservoirConfig) -> ReservoirConfig:
    present = {k: values[k] for k in _RESERVOIR_KEYS if k in values}
    return replace(base, **present)


def _spec_from(values: dict, section: str, base_reservoir: ReservoirConfig, seed: int) -> ScenarioSpec:
    fields = {}
    for key in ("component", "alpha", "train_len", "test_len", "ridge_reg", "seg_len", "normalization"):
        if key in values:
            fields[key] = values[key]
    try:
        return scenario(
            values["kind"],
            reservoir=_reservoir_from(values, base_reservoir),
            seeds=(seed,),
            **fields,
        )
    except ValueError as exc:
        raise ConfigError(f"section {section!r}: {exc}") from None


def _require_alpha(values: dict, section: str) -> float:
    if "alpha" not in values:
        raise ConfigError(
            f"missing required key 'alpha' in section {section!r} for kind {values['kind']!r}"
        )
    return values["alpha"]


def _fmt(value) -> str:
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csv(path: str, header, rows) -> None:
    try:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            for row in rows:
                writer.writerow([_fmt(v) for v in row])
    except OSError as exc:
        raise OutputDirError(f"cannot write {path}: {exc}") from None


def ensure_outdir(path: str) -> str:
    try:
        os.makedirs(path, exist_ok=True)
    except OSError as exc:
        raise OutputDirError(f"cannot create output directory {path!r}: {exc}") from None
    if not os.access(path, os.W_OK):
        raise OutputDirError(f"output directory {path!r} is not writable")
    return path


def cmd_generate(values: dict, section: str, out: str, seed: int, jobs: int) -> None:
    alpha = _require_alpha(values, section)
    spec = _spec_from(values, section, ReservoirConfig(), seed)
    n = values.get("n_samples", spec.train_len + spec.test_len)
    if n < 2:
        raise ConfigError(f"key 'n_samples' in section {section!r} must be at least 2")
    discard = values.get("discard", 1000)
    comp = {"x": 0, "y": 1, "z": 2}[spec.component]
    traj1 = generate(spec.p1, n_samples=n, discard=discard, seed_perturb=3 * seed)
    traj2 = generate(spec.p2, n_samples=n, discard=discard, seed_perturb=3 * seed + 1)
    window = spec.train_len if spec.train_len < n else None
    s1, s2 = normalize_pair(traj1[comp], traj2[comp], window, spec.normalization)
    u = mix(s1, s2, MixSpec(alpha))
    dt = u.dt
    t = np.arange(n) * dt
    for name, traj in (("traj1.csv", traj1), ("traj2.csv", traj2)):
        write_csv(
            os.path.join(out, name),
            ["t", "x", "y", "z"],
            zip(t, traj[0].samples, traj[1].samples, traj[2].samples),
        )
    for name, series in (("s1.csv", s1), ("s2.csv", s2), ("mixed.csv", u)):
        write_csv(os.path.join(out, name), ["t", "value"], zip(t, series.samples))
    write_csv(
        os.path.join(out, "manifest.csv"),
        ["kind", "component", "alpha", "seed", "n_samples", "dt", "normalization"],
        [(spec.kind, spec.component, alpha, seed, n, dt, spec.normalization)],
    )


def cmd_separate(values: dict, section: str, out: str, seed: int, jobs: int) -> None:
    _require_alpha(values, section)
    spec = _spec_from(values, section, ReservoirConfig(), seed)
    result = run_separation(spec, seed)
    write_csv(
        os.path.join(out, "report.csv"),
        ["scenario", "alpha", "seed", "estimator", "e_norm", "e_num", "zeta_star", "n"],
        [
            (spec.kind, result.alpha, seed, rep.tag, rep.e_normalized, rep.e_numerator, rep.zeta_star, rep.n_samples)
            for rep in (result.rc, result.wiener)
        ],
    )
    write_csv(
        os.path.join(out, "predictions.csv"),
        ["t", "actual", "rc", "wiener"],
        zip(result.t, result.actual, result.rc_pred, result.wiener_pred),
    )


_FIG_BY_KIND = {"diff_params": "fig2.csv", "diff_speed": "fig3.csv", "matched_spectra": "fig4.csv"}


def cmd_sweep(values: dict, section: str, out: str, seed: int, jobs: int) -> None:
    spec = _spec_from(values, section, ReservoirConfig(), seed)
    alphas = values.get("alphas", tuple(np.round(np.arange(0.1, 0.95, 0.1), 10)))
    repeats = values.get("repeats", 5)
    result = sweep_alpha(spec, alphas, repeats=repeats, jobs=jobs)
    write_csv(
        os.path.join(out, _FIG_BY_KIND[spec.kind]),
        ["alpha", "estimator", "e_mean", "e_stderr", "num_mean", "num_stderr", "repeats"],
        [
            (r.alpha, r.estimator, r.e_mean, r.e_stderr, r.num_mean, r.num_stderr, r.repeats)
            for r in result.table
        ],
    )
    write_csv(
        os.path.join(out, "report.csv"),
        ["scenario", "alpha", "seed", "estimator", "e_norm", "e_num", "zeta_star", "n"],
        [
            (r.kind, r.alpha, r.seed, r.estimator, r.e_norm, r.e_num, r.zeta_star, r.n_samples)
            for r in result.records
        ],
    )


def cmd_estimate_alpha(values: dict, section: str, out: str, seed: int, jobs: int) -> None:
    # The estimator's own defaults: smaller, sparser reservoir, equal-length
    # training and held-out segments.
    spec = _spec_from(values, section, default_estimator_config(), seed)
    train_len = values.get("train_len", 50000)
    test_len = values.get("test_len", 50000)
    step = values.get("grid_step", ESTIMATOR_GRID_STEP)
    if not 0.0 < step <= 0.5:
        raise ConfigError(f"key 'grid_step' in section {section!r} must lie in (0, 0.5]")
    grid = np.round(np.arange(0.0, 1.0 + step / 2, step), 10)
    est = train_alpha_estimator(
        spec.p1,
        spec.p2,
        grid=grid,
        cfg=spec.reservoir,
        component=spec.component,
        train_len=train_len,
        test_len=test_len,
        ridge_reg=spec.ridge_reg,
        seed=seed,
        normalization=spec.normalization,
    )
    rows = evaluate_alpha_estimator(
        est,
        spec.p1,
        spec.p2,
        grid=grid,
        component=spec.component,
        train_len=train_len,
        test_len=test_len,
        seed=seed + 1,
        normalization=spec.normalization,
    )
    write_csv(
        os.path.join(out, "fig5.csv"),
        ["true_alpha", "corrected_estimate"],
        [(true, corrected) for true, corrected, _ in rows],
    )


def cmd_interp_study(values: dict, section: str, out: str, seed: int, jobs: int) -> None:
    # Defaults mirror the interpolation figure: 1000-node reservoir on the
    # differing-parameters pair.
    base = replace(ReservoirConfig(), n_nodes=1000)
    spec = _spec_from(values, section, base, seed)
    spacings = values.get("spacings", (0.0, 0.05, 0.1, 0.2, 0.3, 0.4))
    midpoints = values.get("midpoints", (0.45,))
    repeats = values.get("repeats", 1)
    rows = interpolation_study(spec, spacings, midpoints=midpoints, repeats=repeats)
    write_csv(
        os.path.join(out, "fig6.csv"),
        ["spacing", "alpha", "direct", "interpolated", "ratio", "repeats"],
        [(r.spacing, r.alpha, r.direct, r.interpolated, r.ratio, r.repeats) for r in rows],
    )


_COMMANDS = {
    "generate": cmd_generate,
    "separate": cmd_separate,
    "sweep": cmd_sweep,
    "estimate-alpha": cmd_estimate_alpha,
    "interp-study": cmd_interp_study,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chaossep",
        description="Chaotic signal separation experiments: reservoir vs Wiener filter.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="INI config with scenario sections")
        p.add_argument("--out", default=None, help="output directory (default: config out_dir or '.')")
        p.add_argument("--seed", type=int, default=None, help="master seed (default: config seed or 0)")
        p.add_argument("--jobs", type=int, default=1, help="worker processes for sweeps")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.jobs < 1:
        print("chaossep: error: --jobs must be at least 1", file=sys.stderr)
        return 3
    try:
        sections = load_config(args.config)
        handler = _COMMANDS[args.command]
        for name, values in sections:
            out = args.out if args.out is not None else values.get("out_dir", ".")
            if len(sections) > 1:
                out = os.path.join(out, name)
            out = ensure_outdir(out)
            seed = args.seed if args.seed is not None else values.get("seed", 0)
            handler(values, name, out, seed, args.jobs)
    except ConfigError as exc:
        print(f"chaossep: error: {exc}", file=sys.stderr)
        return 3
    except OutputDirError as exc:
        print(f"chaossep: error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # single-line diagnostic for anything else
        print(f"chaossep: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
