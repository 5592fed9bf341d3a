"""Command-line front end reproducing the simulation experiments end to end.

One subcommand per verifiable claim plus the figure pipeline:

* ``validate-exponent`` -- numerical admissibility check of an exponent
* ``feller``            -- zero-boundary non-attainability test
* ``lipschitz``         -- truncation Lipschitz constants (JSON)
* ``simulate``          -- one model, summary JSON + CSVs + manifest
* ``compare``           -- CIR baseline vs variable-exponent models on
                           common random numbers, CSV/JSON/SVG outputs
* ``moments``           -- empirical moments vs growth ceilings
* ``martingale``        -- drift-compensated statistic check
* ``picard-verify``     -- Picard fixed point vs Euler on truncated
                           coefficients

Exit codes: 0 success, 1 verification check failed, 2 config/usage
error, 3 numeric failure (overflow, non-convergence). Verification
subcommands print their report as JSON on stdout; file-producing
subcommands print a one-line summary. All floats are serialized with 17
significant digits and files are written atomically, so identical
configurations produce byte-identical outputs.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass
from pathlib import Path as FsPath

import numpy as np
import scipy

from . import __version__
from .analysis import (
    check_moment_bounds,
    default_checkpoints,
    martingale_report,
    terminal_histogram,
)
from .exponent import (
    HypothesisViolationError,
    constant_exponent,
    make_builtin,
    validate_hypotheses,
)
from .figures import svg_histogram, svg_line_plot
from .model import ModelParams, feller_check, parse_model
from .solver import PathOverflowError, euler_maruyama_truncated, picard_solve, simulate_batch
from .stochastic import make_grid, path_increments, sample_batch
from .truncation import TruncationParams, lipschitz_constants

__all__ = ["main", "run"]

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_NUMERIC = 3

DEFAULTS = {
    "kappa": 2.0,
    "theta": 0.05,
    "xi": 0.3,
    "v0": 0.05,
    "T": 1.0,
    "dt": 0.001,
    "paths": 5000,
    "seed": 42,
    "policy": "full-trunc",
    "bins": 50,
    "orders": "2,3,4",
    "checkpoints": None,
    "out": ".",
    "n": 10,
    "tol": 1e-9,
    "kmax": 200,
}

POLICY_NAMES = {
    "full-trunc": "full-truncation",
    "reflect": "reflection",
    # canonical names accepted too, so a manifest's config echo round-trips
    "full-truncation": "full-truncation",
    "reflection": "reflection",
}


# ---------------------------------------------------------------------------
# deterministic serialization

def _fmt_float(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    return format(x, ".17g")


def json_text(obj, indent: int = 0) -> str:
    """Deterministic JSON with floats at 17 significant digits."""
    pad = " " * indent
    inner = " " * (indent + 2)
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, (list, tuple, np.ndarray)):
        items = [json_text(v, indent + 2) for v in obj]
        if not items:
            return "[]"
        return "[\n" + ",\n".join(inner + it for it in items) + "\n" + pad + "]"
    if isinstance(obj, dict):
        items = [f'{json.dumps(str(k))}: {json_text(v, indent + 2)}' for k, v in obj.items()]
        if not items:
            return "{}"
        return "{\n" + ",\n".join(inner + it for it in items) + "\n" + pad + "}"
    raise TypeError(f"cannot serialize {type(obj)!r}")


def atomic_write(path: FsPath, text: str):
    tmp = path.with_name(path.name + f".tmp-{os.getpid()}")
    tmp.write_text(text)
    os.replace(tmp, path)


def write_csv(path: FsPath, header: list[str], rows):
    lines = [",".join(header)]
    for row in rows:
        lines.append(
            ",".join(
                format(v, ".17g") if isinstance(v, (float, np.floating)) else str(v)
                for v in row
            )
        )
    atomic_write(path, "\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# configuration

@dataclass(frozen=True)
class RunConfig:
    """Validated run settings; defaults match the reference experiment
    (kappa=2, theta=0.05, xi=0.3, v0=0.05, T=1, dt=0.001, M=5000)."""

    params: ModelParams
    T: float
    dt: float
    m_paths: int
    seed: int
    policy: str
    out: FsPath
    bins: int
    orders: tuple
    checkpoints: tuple | None
    dump_paths: bool
    no_svg: bool

    def grid(self):
        return make_grid(self.T, self.dt)

    def echo(self) -> dict:
        return {
            "kappa": self.params.kappa,
            "theta": self.params.theta,
            "xi": self.params.xi,
            "v0": self.params.v0,
            "T": self.T,
            "dt": self.dt,
            "paths": self.m_paths,
            "seed": self.seed,
            "policy": self.policy,
            "bins": self.bins,
            "orders": list(self.orders),
            "checkpoints": list(self.checkpoints) if self.checkpoints else None,
            "dump_paths": self.dump_paths,
            "no_svg": self.no_svg,
        }


def _load_config_file(path: str | None) -> dict:
    if path is None:
        return {}
    raw = FsPath(path).read_text()
    try:
        cfg = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ValueError(f"malformed config file {path}: {exc}") from None
    if not isinstance(cfg, dict):
        raise ValueError(f"config file {path} must hold a JSON object")
    return cfg


def _setting(ns, cfg: dict, key: str, cast=None):
    """Flag value if given, else config file value, else default."""
    flag = getattr(ns, key.replace("-", "_"), None)
    if flag is not None:
        return flag
    if key in cfg:
        value = cfg[key]
        return cast(value) if cast else value
    return DEFAULTS.get(key)


def _parse_int_list(text) -> tuple:
    if isinstance(text, (list, tuple)):
        return tuple(int(v) for v in text)
    return tuple(int(v) for v in str(text).split(","))


def _parse_float_list(text) -> tuple:
    if isinstance(text, (list, tuple)):
        return tuple(float(v) for v in text)
    return tuple(float(v) for v in str(text).split(","))


def _resolve_seed(ns, cfg: dict) -> int:
    if getattr(ns, "seed", None) is not None:
        return ns.seed
    if "seed" in cfg:
        return int(cfg["seed"])
    env = os.environ.get("VAREXP_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise ValueError(f"VAREXP_SEED must be an integer, got {env!r}") from None
    return DEFAULTS["seed"]


def build_run_config(ns) -> RunConfig:
    cfg = _load_config_file(getattr(ns, "config", None))
    params = _params_from_config(cfg)
    policy_flag = _setting(ns, cfg, "policy")
    if policy_flag not in POLICY_NAMES:
        raise ValueError(f"unknown policy {policy_flag!r}; expected full-trunc or reflect")
    checkpoints = _setting(ns, cfg, "checkpoints")
    return RunConfig(
        params=params,
        T=float(_setting(ns, cfg, "T")),
        dt=float(_setting(ns, cfg, "dt")),
        m_paths=int(_setting(ns, cfg, "paths")),
        seed=_resolve_seed(ns, cfg),
        policy=POLICY_NAMES[policy_flag],
        out=FsPath(_setting(ns, cfg, "out")),
        bins=int(_setting(ns, cfg, "bins")),
        orders=_parse_int_list(_setting(ns, cfg, "orders")),
        checkpoints=_parse_float_list(checkpoints) if checkpoints is not None else None,
        dump_paths=bool(getattr(ns, "dump_paths", False)),
        no_svg=bool(getattr(ns, "no_svg", False)),
    )


def _versions() -> dict:
    return {
        "varexp_cir": __version__,
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "python": ".".join(str(v) for v in sys.version_info[:3]),
    }


# ---------------------------------------------------------------------------
# per-model outputs

def _model_outputs(cfg: RunConfig, model, batch, pathbatch) -> tuple[dict, list[str]]:
    """Write summary JSON, path CSV and histogram CSV for one model."""
    grid = batch.grid
    checkpoints = cfg.checkpoints or default_checkpoints(grid)
    moments = check_moment_bounds(pathbatch, cfg.params, cfg.orders, checkpoints)
    mart = martingale_report(pathbatch, cfg.params, checkpoints)
    hist = terminal_histogram(pathbatch, grid.horizon, cfg.bins)
    summary = {
        "model": model.model_id,
        "seed": cfg.seed,
        "policy": pathbatch.policy,
        "grid": {"T": grid.horizon, "dt": grid.dt, "n_steps": grid.n_steps},
        "m_paths": batch.m_paths,
        "increment_checksum": batch.checksum(),
        "clamp": {
            "clamped_steps": int(pathbatch.clamp_counts.sum()),
            "fraction": pathbatch.clamp_fraction,
        },
        "moments": [r.to_dict() for r in moments],
        "martingale": mart.to_dict(),
        "terminal_histogram": hist.to_dict(),
    }
    mid = model.model_id
    files = [f"{mid}_summary.json", f"{mid}_path.csv", f"{mid}_hist.csv"]
    atomic_write(cfg.out / files[0], json_text(summary) + "\n")

    times = grid.times
    if cfg.dump_paths:
        rows = (
            (times[j], i, pathbatch.values[i, j])
            for i in range(pathbatch.m_paths)
            for j in range(grid.n_steps + 1)
        )
    else:
        rows = ((times[j], 0, pathbatch.values[0, j]) for j in range(grid.n_steps + 1))
    write_csv(cfg.out / files[1], ["t", "path_id", "v"], rows)

    hist_rows = zip(hist.bin_edges[:-1], hist.bin_edges[1:], hist.counts, hist.densities)
    write_csv(cfg.out / files[2], ["bin_left", "bin_right", "count", "density"], hist_rows)
    return summary, files


def _write_manifest(cfg: RunConfig, command: str, models: list[str], batch, summaries, outputs):
    manifest = {
        "command": command,
        "config": {**cfg.echo(), "models": models, "out": str(cfg.out)},
        "increment_checksum": batch.checksum(),
        "clamp_stats": {s["model"]: s["clamp"] for s in summaries},
        "versions": _versions(),
        "outputs": sorted(outputs),
    }
    atomic_write(cfg.out / "manifest.json", json_text(manifest) + "\n")


def emit_figures(cfg: RunConfig, grid, cir_pb, gm_runs) -> list[str]:
    """Figure pair per exponent: sample path overlay and terminal
    histogram overlay of the CIR baseline vs the variable-exponent run,
    both driven by common increments. Path index 0 is shown so outputs
    are reproducible."""
    files = []
    times = grid.times
    for exponent_name, pb in gm_runs:
        slug = exponent_name.replace(":", "_")
        path_name = f"fig_{slug}_path.svg"
        hist_name = f"fig_{slug}_hist.svg"
        path_svg = svg_line_plot(
            [
                ("cir", times, cir_pb.values[0]),
                (f"gm {exponent_name}", times, pb.values[0]),
            ],
            title=f"Sample path (path 0): cir vs gm {exponent_name}",
        )
        cir_hist = terminal_histogram(cir_pb, grid.horizon, cfg.bins)
        gm_hist = terminal_histogram(pb, grid.horizon, cfg.bins)
        hist_svg = svg_histogram(
            [
                ("cir", cir_hist.bin_edges, cir_hist.densities),
                (f"gm {exponent_name}", gm_hist.bin_edges, gm_hist.densities),
            ],
            title=f"Terminal distribution: cir vs gm {exponent_name}",
        )
        atomic_write(cfg.out / path_name, path_svg)
        atomic_write(cfg.out / hist_name, hist_svg)
        files.extend([path_name, hist_name])
    return files


# ---------------------------------------------------------------------------
# subcommand handlers

def cmd_validate_exponent(ns) -> int:
    try:
        fn = make_builtin(ns.exponent)
    except HypothesisViolationError:
        # out-of-range constant: diagnose it instead of refusing
        fn = constant_exponent(float(ns.exponent.split(":", 1)[1]))
    report = validate_hypotheses(fn)
    print(json_text({"exponent": ns.exponent, **report.to_dict()}))
    print(f"validate-exponent {ns.exponent}: {report.verdict}", file=sys.stderr)
    return EXIT_OK if report.passed else EXIT_CHECK_FAILED


def _params_from_config(cfg_file: dict) -> ModelParams:
    return ModelParams(
        kappa=float(cfg_file.get("kappa", DEFAULTS["kappa"])),
        theta=float(cfg_file.get("theta", DEFAULTS["theta"])),
        xi=float(cfg_file.get("xi", DEFAULTS["xi"])),
        v0=float(cfg_file.get("v0", DEFAULTS["v0"])),
    )


def cmd_feller(ns) -> int:
    params = _params_from_config(_load_config_file(ns.config))
    model = parse_model(ns.model, params)
    report = feller_check(model)
    print(json_text({"model": model.model_id, **report.to_dict()}))
    print(f"feller {model.model_id}: {report.verdict}", file=sys.stderr)
    return EXIT_OK if report.verdict == "non-attainable" else EXIT_CHECK_FAILED


def cmd_lipschitz(ns) -> int:
    params = _params_from_config(_load_config_file(ns.config))
    model = parse_model(ns.model, params)
    tp = TruncationParams(n=ns.n)
    report = lipschitz_constants(tp, model)
    print(json_text(report.to_dict()))
    ok = report.empirical_sup_quotient <= report.Lg_n * (1.0 + 1e-12)
    print(f"lipschitz n={ns.n}: {'ok' if ok else 'violated'}", file=sys.stderr)
    return EXIT_OK if ok else EXIT_CHECK_FAILED


def _simulate_models(cfg: RunConfig, model_specs: list[str]):
    grid = cfg.grid()
    batch = sample_batch(cfg.seed, cfg.m_paths, grid)
    runs = []
    for spec in model_specs:
        model = parse_model(spec, cfg.params)
        runs.append((spec, model, simulate_batch(model, batch, cfg.policy)))
    return grid, batch, runs


def cmd_simulate(ns) -> int:
    cfg = build_run_config(ns)
    cfg.out.mkdir(parents=True, exist_ok=True)
    _, batch, runs = _simulate_models(cfg, [ns.model])
    _, model, pb = runs[0]
    summary, files = _model_outputs(cfg, model, batch, pb)
    _write_manifest(cfg, "simulate", [ns.model], batch, [summary], files + ["manifest.json"])
    print(
        f"simulate {model.model_id}: M={cfg.m_paths} seed={cfg.seed} "
        f"clamp_fraction={pb.clamp_fraction:.3g} -> {cfg.out}"
    )
    return EXIT_OK


def cmd_compare(ns) -> int:
    cfg = build_run_config(ns)
    cfg.out.mkdir(parents=True, exist_ok=True)
    exponents = [e.strip() for e in ns.exponents.split(",") if e.strip()]
    if not exponents:
        raise ValueError("--exponents must name at least one exponent")
    specs = ["cir"] + [f"gm:{e}" for e in exponents]
    grid, batch, runs = _simulate_models(cfg, specs)

    outputs, summaries = [], []
    gm_runs = []
    cir_pb = runs[0][2]
    for spec, model, pb in runs:
        summary, files = _model_outputs(cfg, model, batch, pb)
        summaries.append(summary)
        outputs.extend(files)
        if spec.startswith("gm:"):
            gm_runs.append((spec[3:], pb))
    if not cfg.no_svg:
        outputs.extend(emit_figures(cfg, grid, cir_pb, gm_runs))
    _write_manifest(cfg, "compare", specs, batch, summaries, outputs + ["manifest.json"])
    print(
        f"compare cir+{','.join(exponents)}: M={cfg.m_paths} seed={cfg.seed} "
        f"checksum={batch.checksum()[:12]} -> {cfg.out}"
    )
    return EXIT_OK


def cmd_moments(ns) -> int:
    cfg = build_run_config(ns)
    grid, batch, runs = _simulate_models(cfg, [ns.model])
    _, model, pb = runs[0]
    checkpoints = cfg.checkpoints or default_checkpoints(grid)
    reports = check_moment_bounds(pb, cfg.params, cfg.orders, checkpoints)
    all_ok = all(r.satisfied for r in reports)
    print(json_text({"model": model.model_id, "reports": [r.to_dict() for r in reports]}))
    print(f"moments {model.model_id}: {'ok' if all_ok else 'violated'}", file=sys.stderr)
    return EXIT_OK if all_ok else EXIT_CHECK_FAILED


def cmd_martingale(ns) -> int:
    cfg = build_run_config(ns)
    grid, batch, runs = _simulate_models(cfg, [ns.model])
    _, model, pb = runs[0]
    checkpoints = cfg.checkpoints or default_checkpoints(grid)
    report = martingale_report(pb, cfg.params, checkpoints)
    print(json_text({"model": model.model_id, **report.to_dict()}))
    print(f"martingale {model.model_id}: {'ok' if report.satisfied else 'violated'}", file=sys.stderr)
    return EXIT_OK if report.satisfied else EXIT_CHECK_FAILED


def cmd_picard_verify(ns) -> int:
    cfg = build_run_config(ns)
    grid = cfg.grid()
    model = parse_model(ns.model, cfg.params)
    tp = TruncationParams(n=ns.n)
    row = path_increments(cfg.seed, 0, grid)
    report = picard_solve(tp, model, grid, row, tol=ns.tol, k_max=ns.kmax)
    if not report.converged:
        print(json_text(report.to_dict()))
        print(f"picard-verify: no convergence within {ns.kmax} iterations", file=sys.stderr)
        return EXIT_NUMERIC
    euler = euler_maruyama_truncated(tp, model, grid, row)
    sup_diff = float(np.max(np.abs(report.fixed_point.values - euler.values)))
    payload = report.to_dict()
    payload["sup_diff_vs_euler"] = sup_diff
    print(json_text({"model": model.model_id, "n": ns.n, **payload}))
    ok = sup_diff <= ns.tol
    print(
        f"picard-verify {model.model_id} n={ns.n}: iterations={report.iterations_used} "
        f"sup_diff={sup_diff:.3g} {'ok' if ok else 'violated'}",
        file=sys.stderr,
    )
    return EXIT_OK if ok else EXIT_CHECK_FAILED


# ---------------------------------------------------------------------------
# parser

def _add_common(p: argparse.ArgumentParser, *, sim: bool):
    p.add_argument("--config", help="JSON config file (keys kappa, theta, xi, v0, ...)")
    p.add_argument("--seed", type=int, help="64-bit seed (default 42; env VAREXP_SEED)")
    if sim:
        p.add_argument("--paths", type=int, help="number of Monte Carlo paths")
        p.add_argument("--dt", type=float, help="time step")
        p.add_argument("--T", type=float, help="horizon")
        p.add_argument("--policy", choices=sorted(POLICY_NAMES), help="positivity policy")
        p.add_argument("--bins", type=int, help="histogram bin count")
        p.add_argument("--orders", help="comma-separated moment orders")
        p.add_argument("--checkpoints", help="comma-separated checkpoint times")
        p.add_argument("--out", help="output directory")
        p.add_argument("--dump-paths", action="store_true", help="write every path to CSV")
        p.add_argument("--no-svg", action="store_true", help="skip SVG figures")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="varexp-cir",
        description="Simulation and verification toolkit for mean-reverting "
        "diffusions with variable-exponent volatility.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate-exponent", help="check exponent admissibility")
    p.add_argument("--exponent", required=True, help="p1 | p2 | p3 | const:<float>")
    p.set_defaults(func=cmd_validate_exponent)

    p = sub.add_parser("feller", help="zero-boundary non-attainability test")
    p.add_argument("--model", default="cir", help="cir | gm:<exp> | pkm:a=..,b=..")
    p.add_argument("--config")
    p.set_defaults(func=cmd_feller)

    p = sub.add_parser("lipschitz", help="truncation Lipschitz constants")
    p.add_argument("--model", default="gm:p1")
    p.add_argument("--n", type=int, default=DEFAULTS["n"], help="truncation level")
    p.add_argument("--config")
    p.set_defaults(func=cmd_lipschitz)

    p = sub.add_parser("simulate", help="simulate one model, write outputs")
    p.add_argument("--model", default="gm:p1")
    _add_common(p, sim=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("compare", help="CIR baseline vs variable-exponent models")
    p.add_argument("--exponents", default="p1,p2,p3", help="comma-separated exponent specs")
    _add_common(p, sim=True)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("moments", help="empirical moments vs ceilings")
    p.add_argument("--model", default="gm:p1")
    _add_common(p, sim=True)
    p.set_defaults(func=cmd_moments)

    p = sub.add_parser("martingale", help="drift-compensated statistic check")
    p.add_argument("--model", default="gm:p1")
    _add_common(p, sim=True)
    p.set_defaults(func=cmd_martingale)

    p = sub.add_parser("picard-verify", help="Picard fixed point vs Euler recursion")
    p.add_argument("--model", default="gm:p1")
    p.add_argument("--n", type=int, default=DEFAULTS["n"], help="truncation level")
    p.add_argument("--tol", type=float, default=DEFAULTS["tol"])
    p.add_argument("--kmax", type=int, default=DEFAULTS["kmax"])
    _add_common(p, sim=True)
    p.set_defaults(func=cmd_picard_verify)

    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return ns.func(ns)
    except PathOverflowError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main():
    sys.exit(run())
