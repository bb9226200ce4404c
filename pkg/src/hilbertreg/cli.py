"""Command-line surface: config parsing, experiment subcommands, table emission.

Subcommands
-----------
demo | moments | weights-dist | exceedance | lagrange | variance-bias |
risk | classify | extrapolate | reproduce-all

Configuration is flat ``key = value`` text (values parse as JSON: numbers,
strings, arrays, booleans); command-line flags override file values.
Unknown keys are rejected by name.  Tables are emitted as CSV (metadata in
leading ``#`` comment lines, floats with 17 significant digits) or JSON;
rerunning with the same seed reproduces every output byte for byte, so no
wall-clock or timestamp ever enters a table (timing goes to stderr).

Exit codes: 0 success, 2 configuration error, 3 runtime error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import __version__, asymptotics
from .densities import (
    BernoulliFromTarget,
    ClampedLogistic,
    Constant,
    GaussianConstant,
    GaussianHetero,
    Linear,
    RadialHeavyTail,
    Sine1D,
    Triangular1D,
    UniformBall,
    UniformBox,
    sample_dataset,
)
from .estimators import HilbertKind, evaluate_on_grid
from .experiments import (
    EstimateRecord,
    ExperimentSpec,
    run_classification,
    run_exceedance,
    run_extrapolation,
    run_lagrange,
    run_moments,
    run_regression_risk,
    run_variance_bias,
    run_weight_distribution,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3

SUBCOMMANDS = {
    "demo": "demo",
    "moments": "moments",
    "weights-dist": "weight_distribution",
    "exceedance": "exceedance",
    "lagrange": "lagrange",
    "variance-bias": "variance_bias",
    "risk": "regression_risk",
    "classify": "classification",
    "extrapolate": "extrapolation",
    "reproduce-all": "reproduce_all",
}


class ConfigError(Exception):
    """Invalid configuration; reported with exit code 2."""


# ---------------------------------------------------------------------------
# Config parsing
# ---------------------------------------------------------------------------

_COMMON_KEYS = {"kind", "seed", "out", "format", "threads", "verbosity", "replicates"}
_DENSITY_KEYS = {"density", "lo", "hi", "center", "radius", "dim"}
_TARGET_KEYS = {"target", "value", "slope", "intercept", "logistic_center", "logistic_rate"}
_NOISE_KEYS = {"noise", "sigma", "sigma_slope", "sigma_intercept"}
_KIND_KEYS = {
    "demo": {"n", "grid_points"},
    "moments": {"n_grid", "queries", "beta_list", "estimator_mode"} | _DENSITY_KEYS | _TARGET_KEYS | _NOISE_KEYS,
    "weight_distribution": {"n_grid", "queries", "weight_scale_mode", "all_weights"} | _DENSITY_KEYS | _TARGET_KEYS | _NOISE_KEYS,
    "exceedance": {"n_grid", "queries", "epsilon_list", "estimator_mode"} | _DENSITY_KEYS | _TARGET_KEYS | _NOISE_KEYS,
    "lagrange": {"n_grid", "x0", "lagrange_halfwidth", "lagrange_points", "lagrange_mode"} | _DENSITY_KEYS | _TARGET_KEYS | _NOISE_KEYS,
    "variance_bias": {"n_grid", "queries"} | _DENSITY_KEYS | _TARGET_KEYS | _NOISE_KEYS,
    "regression_risk": {"n_grid", "queries"} | _DENSITY_KEYS | _TARGET_KEYS | _NOISE_KEYS,
    "classification": {"n_grid", "queries"} | _DENSITY_KEYS | _TARGET_KEYS | _NOISE_KEYS,
    "extrapolation": {"n_grid", "queries"} | _DENSITY_KEYS | _TARGET_KEYS | _NOISE_KEYS,
    "reproduce_all": set(),
}

_DEFAULTS = {
    "demo": {"n": 50, "grid_points": 1000, "replicates": 1},
    "moments": {
        "density": "uniform_box", "lo": [0.0], "hi": [1.0],
        "target": "constant", "value": 0.0, "noise": "gaussian", "sigma": 0.1,
        "n_grid": [1000, 10000], "replicates": 2000, "queries": [[0.5]],
        "beta_list": [0.5, 2.0, 3.0], "estimator_mode": "all_weights",
    },
    "weight_distribution": {
        "density": "radial_heavy_tail", "dim": 1,
        "target": "constant", "value": 0.0, "noise": "gaussian", "sigma": 0.0,
        "n_grid": [65536], "replicates": 20000, "queries": [[0.0]],
        "weight_scale_mode": "second_order", "all_weights": False,
    },
    "exceedance": {
        "density": "uniform_box", "lo": [0.0], "hi": [1.0],
        "target": "constant", "value": 0.0, "noise": "gaussian", "sigma": 0.1,
        "n_grid": [1000, 10000], "replicates": 5000, "queries": [[0.5]],
        "epsilon_list": [0.1, 0.5, 0.9], "estimator_mode": "all_weights",
    },
    "lagrange": {
        "density": "uniform_box", "lo": [0.0], "hi": [1.0],
        "target": "constant", "value": 0.0, "noise": "gaussian", "sigma": 0.0,
        "n_grid": [400], "replicates": 100, "x0": [0.5],
        "lagrange_halfwidth": 0.2, "lagrange_points": 81, "lagrange_mode": "implicit_wn",
    },
    "variance_bias": {
        "density": "uniform_box", "lo": [0.0], "hi": [1.0],
        "target": "sine", "noise": "gaussian", "sigma": 0.1,
        "n_grid": [1000, 10000], "replicates": 2000, "queries": [[0.3], [0.5]],
    },
    "regression_risk": {
        "density": "uniform_box", "lo": [0.0], "hi": [1.0],
        "target": "constant", "value": 0.0, "noise": "gaussian", "sigma": 0.1,
        "n_grid": [1000, 10000], "replicates": 2000, "queries": [[0.5]],
    },
    "classification": {
        "density": "uniform_box", "lo": [0.0], "hi": [1.0],
        "target": "logistic", "logistic_center": 0.25,
        "logistic_rate": 4.0 * math.log(3.0), "noise": "bernoulli",
        "n_grid": [1000, 10000], "replicates": 3000, "queries": [[0.5]],
    },
    "extrapolation": {
        "density": "uniform_box", "lo": [0.0], "hi": [1.0],
        "target": "linear", "slope": [1.0], "intercept": 0.0,
        "noise": "gaussian", "sigma": 0.0,
        "n_grid": [10000], "replicates": 500, "queries": [[2.0], [100.0]],
    },
    "reproduce_all": {"replicates": 0},
}


@dataclass
class RunConfig:
    """Fully resolved configuration for one subcommand invocation."""

    kind: str
    params: dict
    seed: int = 0
    out: Optional[str] = None
    format: str = "csv"
    threads: int = 1
    verbosity: int = 1
    replicates: Optional[int] = None


def _parse_value(raw: str):
    try:
        return json.loads(raw)
    except json.JSONDecodeError:
        return raw  # bare word: keep as string


def parse_config(text: str, kind: Optional[str] = None) -> RunConfig:
    """Parse flat ``key = value`` configuration text into a RunConfig.

    ``kind`` (from the subcommand) must agree with a ``kind`` key in the
    text if both are present.  Unknown keys raise :class:`ConfigError`
    naming the offender.
    """
    raw: dict = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {stripped!r}")
        key, _, value = stripped.partition("=")
        key = key.strip()
        if key in raw:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        raw[key] = _parse_value(value.strip())

    file_kind = raw.pop("kind", None)
    if file_kind is not None and kind is not None and file_kind != kind:
        raise ConfigError(f"config kind {file_kind!r} conflicts with subcommand kind {kind!r}")
    resolved_kind = kind or file_kind
    if resolved_kind is None:
        raise ConfigError("no experiment kind given (subcommand or 'kind' key)")
    if resolved_kind not in _KIND_KEYS:
        raise ConfigError(f"unknown kind {resolved_kind!r}")

    allowed = _KIND_KEYS[resolved_kind] | _COMMON_KEYS
    for key in raw:
        if key not in allowed:
            raise ConfigError(f"unknown key {key!r} for kind {resolved_kind!r}")

    params = dict(_DEFAULTS[resolved_kind])
    common = {}
    for key, value in raw.items():
        if key in ("seed", "out", "format", "threads", "verbosity", "replicates"):
            common[key] = value
        else:
            params[key] = value
    cfg = RunConfig(kind=resolved_kind, params=params)
    if "seed" in common:
        cfg.seed = int(common["seed"])
    if "out" in common:
        cfg.out = str(common["out"])
    if "format" in common:
        cfg.format = str(common["format"])
    if "threads" in common:
        cfg.threads = int(common["threads"])
    if "verbosity" in common:
        cfg.verbosity = int(common["verbosity"])
    if "replicates" in common:
        cfg.replicates = int(common["replicates"])
    if cfg.format not in ("csv", "json"):
        raise ConfigError(f"format must be 'csv' or 'json', got {cfg.format!r}")
    return cfg


def _build_density(p: dict):
    name = p.get("density")
    try:
        if name == "uniform_box":
            return UniformBox(p["lo"], p["hi"])
        if name == "uniform_ball":
            return UniformBall(p["center"], p["radius"])
        if name == "triangular":
            return Triangular1D()
        if name == "radial_heavy_tail":
            return RadialHeavyTail(int(p.get("dim", 1)))
    except (KeyError, ValueError, TypeError) as exc:
        raise ConfigError(f"bad density parameters: {exc}") from exc
    raise ConfigError(f"unknown density {name!r}")


def _build_target(p: dict):
    name = p.get("target", "constant")
    try:
        if name == "constant":
            return Constant(p.get("value", 0.0))
        if name == "linear":
            return Linear(p.get("slope", [1.0]), p.get("intercept", 0.0))
        if name == "sine":
            return Sine1D()
        if name == "logistic":
            return ClampedLogistic(
                center=p.get("logistic_center", 0.0), rate=p.get("logistic_rate", 1.0)
            )
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"bad target parameters: {exc}") from exc
    raise ConfigError(f"unknown target {name!r}")


def _build_noise(p: dict):
    name = p.get("noise", "gaussian")
    try:
        if name == "gaussian":
            return GaussianConstant(p.get("sigma", 0.1))
        if name == "gaussian_hetero":
            return GaussianHetero(Linear(p["sigma_slope"], p.get("sigma_intercept", 0.0)))
        if name == "bernoulli":
            return BernoulliFromTarget()
    except (KeyError, ValueError, TypeError) as exc:
        raise ConfigError(f"bad noise parameters: {exc}") from exc
    raise ConfigError(f"unknown noise {name!r}")


def build_spec(cfg: RunConfig) -> ExperimentSpec:
    """Turn a RunConfig into a validated ExperimentSpec."""
    p = cfg.params
    density = _build_density(p)
    target = _build_target(p)
    noise = _build_noise(p)
    kwargs: dict = {}
    if cfg.kind == "lagrange":
        x0 = np.atleast_1d(np.asarray(p["x0"], dtype=float))
        half = float(p["lagrange_halfwidth"])
        npts = int(p["lagrange_points"])
        kwargs["hold_point"] = x0
        kwargs["lagrange_grid"] = np.linspace(x0[0] - half, x0[0] + half, npts)[:, None]
        kwargs["lagrange_mode"] = p["lagrange_mode"]
        kwargs["query_points"] = None
    else:
        kwargs["query_points"] = p.get("queries")
    if cfg.kind == "weight_distribution":
        kwargs["weight_scale_mode"] = p["weight_scale_mode"]
        kwargs["all_weights"] = bool(p["all_weights"])
    if cfg.kind in ("moments", "exceedance"):
        kwargs["estimator_mode"] = p["estimator_mode"]
    try:
        return ExperimentSpec(
            kind=cfg.kind,
            density=density,
            target=target,
            noise=noise,
            n_grid=p["n_grid"],
            replicates=cfg.replicates if cfg.replicates is not None else int(p["replicates"]),
            beta_list=tuple(p.get("beta_list", ())),
            epsilon_list=tuple(p.get("epsilon_list", ())),
            master_seed=cfg.seed,
            threads=cfg.threads,
            **kwargs,
        )
    except (KeyError, ValueError, TypeError) as exc:
        raise ConfigError(f"invalid experiment spec: {exc}") from exc


# ---------------------------------------------------------------------------
# Result tables
# ---------------------------------------------------------------------------

RECORD_FIELDS = [
    "kind", "n", "query", "quantity", "mc_mean", "mc_stderr",
    "prediction", "ratio", "replicates_used", "seed",
]


@dataclass
class ResultTable:
    """Rows plus the metadata needed to regenerate them bit-identically."""

    metadata: dict
    fieldnames: list
    rows: list = field(default_factory=list)


def _resolved_metadata(cfg: RunConfig, extra: Optional[dict] = None) -> dict:
    meta = {
        "tool": "hilbertreg",
        "version": __version__,
        "kind": cfg.kind,
        "seed": cfg.seed,
        "threads": cfg.threads,
        "resolved_params": cfg.params,
    }
    if cfg.replicates is not None:
        meta["replicates_override"] = cfg.replicates
    if extra:
        meta.update(extra)
    return meta


def records_table(records: list[EstimateRecord], metadata: dict) -> ResultTable:
    rows = []
    for r in records:
        rows.append(
            {
                "kind": r.kind,
                "n": r.n,
                "query": list(r.query),
                "quantity": r.quantity,
                "mc_mean": r.mc_mean,
                "mc_stderr": r.mc_stderr,
                "prediction": r.prediction,
                "ratio": r.ratio,
                "replicates_used": r.replicates_used,
                "seed": r.seed,
            }
        )
    return ResultTable(metadata=metadata, fieldnames=list(RECORD_FIELDS), rows=rows)


def _format_csv_value(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return f"{v:.17g}"
    if isinstance(v, (list, tuple)):
        return ";".join(_format_csv_value(item) for item in v)
    return str(v)


def write_table(table: ResultTable, fmt: str, path: str) -> None:
    """Emit a table as CSV (metadata in '#' comments) or JSON.

    Float fields carry 17 significant digits so values round-trip exactly.
    """
    parent = os.path.dirname(os.path.abspath(path))
    if not os.path.isdir(parent):
        raise ConfigError(f"output directory does not exist: {parent}")
    if fmt == "csv":
        lines = []
        for key in sorted(table.metadata):
            lines.append(f"# {key}: {json.dumps(table.metadata[key], sort_keys=True)}")
        lines.append(",".join(table.fieldnames))
        for row in table.rows:
            lines.append(",".join(_format_csv_value(row.get(f)) for f in table.fieldnames))
        text = "\n".join(lines) + "\n"
    elif fmt == "json":
        text = json.dumps(
            {"metadata": table.metadata, "fieldnames": table.fieldnames, "rows": table.rows},
            sort_keys=True,
            indent=2,
        ) + "\n"
    else:
        raise ConfigError(f"unknown format {fmt!r}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def read_table_json(path: str) -> ResultTable:
    """Inverse of write_table for the JSON format."""
    with open(path, "r", encoding="utf-8") as fh:
        payload = json.load(fh)
    return ResultTable(
        metadata=payload["metadata"], fieldnames=payload["fieldnames"], rows=payload["rows"]
    )


# ---------------------------------------------------------------------------
# Subcommand implementations
# ---------------------------------------------------------------------------


def cmd_demo(cfg: RunConfig) -> ResultTable:
    """One-dimensional showcase: noisy sine samples, interpolating curve,
    and the extrapolation behavior outside the data domain."""
    n = int(cfg.params["n"])
    grid_points = int(cfg.params["grid_points"])
    density = UniformBox([0.25], [0.75])
    target = Sine1D()
    noise = GaussianConstant(0.1)
    ds = sample_dataset(density, target, noise, n, np.random.SeedSequence(cfg.seed, spawn_key=(0,)))
    grid = np.linspace(0.0, 1.0, grid_points)[:, None]
    preds = evaluate_on_grid(grid, ds, HilbertKind())
    rows = []
    for x, p in zip(grid[:, 0], preds):
        rows.append(
            {"x": float(x), "f_hat": p.value, "f_true": float(target(np.array([x]))), "is_sample": 0}
        )
    for i in range(ds.n_points):
        x = float(ds.points[i, 0])
        rows.append(
            {"x": x, "f_hat": float(ds.labels[i]), "f_true": float(target(ds.points[i])), "is_sample": 1}
        )
    rows.sort(key=lambda r: (r["x"], r["is_sample"]))
    meta = _resolved_metadata(cfg, {"samples": n, "grid_points": grid_points})
    return ResultTable(metadata=meta, fieldnames=["x", "f_hat", "f_true", "is_sample"], rows=rows)


def cmd_weights_dist(cfg: RunConfig) -> ResultTable:
    spec = build_spec(cfg)
    results = run_weight_distribution(spec)
    rows = []
    summaries = {}
    for res in results:
        hist = res.histogram
        dens = hist.densities()
        model = asymptotics.scaling_pdf(hist.centers)
        for b in range(len(hist.counts)):
            rows.append(
                {
                    "n": res.n,
                    "bin_lo": float(hist.edges[b]),
                    "bin_hi": float(hist.edges[b + 1]),
                    "count": int(hist.counts[b]),
                    "density": float(dens[b]),
                    "model_density": float(model[b]),
                }
            )
        summaries[str(res.n)] = {
            "tail_slope": res.tail_slope,
            "tail_slope_stderr": res.tail_slope_stderr,
            "cdf_sup_distance": res.cdf_sup_distance,
            "scale_mode": res.scale_mode,
            "scale_value": res.scale_value,
            "replicates": res.replicates,
        }
    meta = _resolved_metadata(cfg, {"summaries": summaries})
    return ResultTable(
        metadata=meta,
        fieldnames=["n", "bin_lo", "bin_hi", "count", "density", "model_density"],
        rows=rows,
    )


_RUNNERS = {
    "moments": run_moments,
    "exceedance": run_exceedance,
    "lagrange": run_lagrange,
    "variance_bias": run_variance_bias,
    "regression_risk": run_regression_risk,
    "classification": run_classification,
    "extrapolation": run_extrapolation,
}


def run_command(cfg: RunConfig) -> ResultTable:
    """Execute one subcommand and return its table (reproduce-all excluded)."""
    if cfg.kind == "demo":
        return cmd_demo(cfg)
    if cfg.kind == "weight_distribution":
        return cmd_weights_dist(cfg)
    spec = build_spec(cfg)
    records = _RUNNERS[cfg.kind](spec)
    return records_table(records, _resolved_metadata(cfg))


def cmd_reproduce_all(cfg: RunConfig, out_dir: str) -> list[str]:
    """Reproduce the three figure protocols plus one cell per theorem.

    Writes one table per item into ``out_dir`` along with a manifest, and
    returns the list of file names.  Each item derives its seed from the
    master seed so the whole set is reproducible from one integer.
    """
    os.makedirs(out_dir, exist_ok=True)
    fmt = cfg.format
    ext = fmt
    items = [
        ("fig1_demo", "demo", {}),
        ("fig2_weight_distribution", "weight_distribution", {}),
        ("fig3_lagrange", "lagrange", {}),
        ("theorem1_moments", "moments", {}),
        ("exceedance_bounds", "exceedance", {}),
        ("theorem4_5_variance_bias", "variance_bias", {}),
        (
            "theorem7_rho_zero",
            "variance_bias",
            {
                "density": "triangular", "target": "linear", "slope": [1.0],
                "intercept": 0.0, "noise": "gaussian", "sigma": 0.0,
                "n_grid": [10000], "replicates": 500, "queries": [[0.0]],
            },
        ),
        ("theorem8_regression_risk", "regression_risk", {}),
        ("theorem9_classification", "classification", {}),
        ("theorem10_extrapolation", "extrapolation", {}),
    ]
    written = []
    for offset, (name, kind, overrides) in enumerate(items):
        params = dict(_DEFAULTS[kind])
        params.update(overrides)
        sub = RunConfig(
            kind=kind,
            params=params,
            seed=cfg.seed + offset,
            format=fmt,
            threads=cfg.threads,
            verbosity=cfg.verbosity,
        )
        t0 = time.perf_counter()
        table = run_command(sub)
        fname = f"{name}.{ext}"
        write_table(table, fmt, os.path.join(out_dir, fname))
        written.append(fname)
        _log(cfg, f"{fname} done in {time.perf_counter() - t0:.1f}s")
    manifest = {
        "tool": "hilbertreg",
        "version": __version__,
        "master_seed": cfg.seed,
        "format": fmt,
        "files": written,
    }
    with open(os.path.join(out_dir, "manifest.json"), "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, sort_keys=True, indent=2)
        fh.write("\n")
    return written + ["manifest.json"]


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------


def _use_color() -> bool:
    return os.environ.get("NO_COLOR") is None and sys.stderr.isatty()


def _log(cfg: RunConfig, message: str) -> None:
    if cfg.verbosity < 1:
        return
    if _use_color():
        message = f"\x1b[2m{message}\x1b[0m"
    print(message, file=sys.stderr)


def _check_writable(path: str) -> None:
    parent = os.path.dirname(os.path.abspath(path)) or "."
    if not os.path.isdir(parent):
        raise ConfigError(f"output directory does not exist: {parent}")
    if not os.access(parent, os.W_OK):
        raise ConfigError(f"output directory is not writable: {parent}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hilbertreg",
        description="Interpolating kernel regression experiments with closed-form predictions",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name in SUBCOMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", type=str, default=None, help="flat key=value config file")
        p.add_argument("--seed", type=int, default=None, help="master seed (64-bit)")
        p.add_argument("--out", type=str, default=None, help="output path (directory for reproduce-all)")
        p.add_argument("--format", type=str, default=None, choices=("csv", "json"))
        p.add_argument("--threads", type=int, default=None)
        p.add_argument("--replicates", type=int, default=None)
        p.add_argument("--quiet", action="store_true", help="suppress progress logging")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    kind = SUBCOMMANDS[args.subcommand]
    try:
        text = ""
        if args.config is not None:
            if not os.path.exists(args.config):
                raise ConfigError(f"config file not found: {args.config}")
            with open(args.config, "r", encoding="utf-8") as fh:
                text = fh.read()
        cfg = parse_config(text, kind=kind)
        if args.seed is not None:
            cfg.seed = args.seed
        if args.out is not None:
            cfg.out = args.out
        if args.format is not None:
            cfg.format = args.format
        if args.threads is not None:
            cfg.threads = args.threads
        if args.replicates is not None:
            cfg.replicates = args.replicates
        if args.quiet:
            cfg.verbosity = 0
        if cfg.replicates is not None:
            cfg.params["replicates"] = cfg.replicates
            cfg.replicates = None

        if cfg.kind == "reproduce_all":
            out_dir = cfg.out or "results"
            os.makedirs(out_dir, exist_ok=True)
            if not os.access(out_dir, os.W_OK):
                raise ConfigError(f"output directory is not writable: {out_dir}")
        else:
            if cfg.out is None:
                cfg.out = f"{args.subcommand}.{cfg.format}"
            _check_writable(cfg.out)
            if cfg.kind != "demo":
                build_spec(cfg)  # config-level validation before compute starts
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        t0 = time.perf_counter()
        if cfg.kind == "reproduce_all":
            files = cmd_reproduce_all(cfg, cfg.out or "results")
            _log(cfg, f"wrote {len(files)} files to {cfg.out or 'results'} "
                      f"in {time.perf_counter() - t0:.1f}s")
        else:
            table = run_command(cfg)
            write_table(table, cfg.format, cfg.out)
            _log(cfg, f"wrote {cfg.out} ({len(table.rows)} rows) in {time.perf_counter() - t0:.1f}s")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001 - report and exit nonzero
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
