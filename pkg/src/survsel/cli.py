"""Command-line entry point: run scenario grids, plot results, export datasets,
probe degenerate baselines.

Exit codes: 0 success, 2 configuration error, 3 runtime error.
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import sys
from dataclasses import asdict, dataclass, fields
from pathlib import Path

from .bench import default_threads, degenerate_alpha_probe, run_scenario
from .config import ScenarioConfig, SolverSettings
from .errors import InvalidParameterError, SurvselError
from .selectors import ALL_METHODS, Method
from .sim import replicate_dataset
from .svg import line_chart

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 2, 3
DESK_REPLICATES = 1000
FULL_REPLICATES = 10000

CSV_COLUMNS = ("scenario_id", "n", "censor_rate", "rho", "n_events", "method",
               "sensitivity", "sens_ci_low", "sens_ci_high",
               "specificity", "spec_ci_low", "spec_ci_high",
               "selection_accuracy", "ranking_accuracy", "rank_ci_low", "rank_ci_high",
               "n_replicates", "n_fit_failures")
PANELS = ("selection_accuracy", "ranking_accuracy", "sensitivity", "specificity")
PANEL_TITLES = {
    "selection_accuracy": "Feature selection accuracy",
    "ranking_accuracy": "Effect-size ranking accuracy",
    "sensitivity": "Sensitivity",
    "specificity": "Specificity",
}


class ConfigError(SurvselError):
    """Malformed manifest or command-line value."""


@dataclass(frozen=True)
class RunManifest:
    n: tuple
    censor_rate: tuple
    rho: tuple
    replicates: int = DESK_REPLICATES
    master_seed: int = 20221008
    solver: SolverSettings = SolverSettings()
    methods: tuple = tuple(ALL_METHODS)
    output_dir: str = "results"

    def scenarios(self):
        """Grid cells in a fixed order (n outermost, rho innermost)."""
        return [ScenarioConfig(n=n, censor_rate=c, rho=r, replicates=self.replicates,
                               master_seed=self.master_seed, solver=self.solver)
                for n, c, r in itertools.product(self.n, self.censor_rate, self.rho)]

    def find(self, scenario_id):
        for cfg in self.scenarios():
            if cfg.scenario_id == scenario_id:
                return cfg
        known = ", ".join(c.scenario_id for c in self.scenarios())
        raise ConfigError(f"unknown scenario id {scenario_id!r}; manifest has: {known}")


def _as_list(value, name, kind):
    if not isinstance(value, list):
        value = [value]
    if not value:
        raise ConfigError(f"field {name!r} must not be empty")
    out = []
    for v in value:
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ConfigError(f"field {name!r} must hold numbers, got {v!r}")
        if kind is int and float(v) != int(v):
            raise ConfigError(f"field {name!r} must hold integers, got {v!r}")
        out.append(kind(v))
    return tuple(out)


def parse_manifest(doc):
    """Validate a decoded manifest document and build a ``RunManifest``."""
    if not isinstance(doc, dict):
        raise ConfigError("manifest must be a JSON object")
    allowed = {"grid", "replicates", "master_seed", "solver", "methods", "output_dir"}
    unknown = set(doc) - allowed
    if unknown:
        raise ConfigError(f"unknown manifest field(s): {', '.join(sorted(unknown))}")
    grid = doc.get("grid")
    if not isinstance(grid, dict):
        raise ConfigError("field 'grid' is required and must be an object")
    for key in ("n", "censor_rate", "rho"):
        if key not in grid:
            raise ConfigError(f"field 'grid.{key}' is required")
    extra = set(grid) - {"n", "censor_rate", "rho"}
    if extra:
        raise ConfigError(f"unknown grid field(s): {', '.join(sorted(extra))}")

    kw = dict(n=_as_list(grid["n"], "grid.n", int),
              censor_rate=_as_list(grid["censor_rate"], "grid.censor_rate", float),
              rho=_as_list(grid["rho"], "grid.rho", float))
    for key in ("replicates", "master_seed"):
        if key in doc:
            v = doc[key]
            if isinstance(v, bool) or not isinstance(v, int):
                raise ConfigError(f"field {key!r} must be an integer, got {v!r}")
            kw[key] = v
    if "output_dir" in doc:
        if not isinstance(doc["output_dir"], str):
            raise ConfigError("field 'output_dir' must be a string")
        kw["output_dir"] = doc["output_dir"]
    if "methods" in doc:
        try:
            kw["methods"] = tuple(Method(m) for m in doc["methods"])
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"field 'methods': {exc}") from None
    solver = doc.get("solver", {})
    if not isinstance(solver, dict):
        raise ConfigError("field 'solver' must be an object")
    names = {f.name for f in fields(SolverSettings)}
    for key in solver:
        if key not in names:
            raise ConfigError(f"unknown solver field {key!r}")
    try:
        kw["solver"] = SolverSettings(**solver)
        manifest = RunManifest(**kw)
        manifest.scenarios()
    except InvalidParameterError as exc:
        raise ConfigError(str(exc)) from None
    except TypeError as exc:
        raise ConfigError(str(exc)) from None
    return manifest


def load_manifest(path):
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read manifest {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"manifest {path} is not valid JSON: {exc}") from None
    return parse_manifest(doc)


def apply_overrides(manifest, args):
    """Command-line flags take precedence over the manifest."""
    changes = {}
    solver = {}
    if getattr(args, "seed", None) is not None:
        changes["master_seed"] = args.seed
    if getattr(args, "full_scale", False):
        changes["replicates"] = FULL_REPLICATES
    if getattr(args, "replicates", None) is not None:
        changes["replicates"] = args.replicates
    if getattr(args, "include_event_indicator", False):
        solver["include_event_indicator_in_cox"] = True
    if getattr(args, "mix", None) is not None:
        solver["mix"] = args.mix
    if getattr(args, "out", None) is not None:
        changes["output_dir"] = args.out
    try:
        if solver:
            changes["solver"] = SolverSettings(**{**asdict(manifest.solver), **solver})
        out = RunManifest(**{**{f.name: getattr(manifest, f.name) for f in fields(RunManifest)},
                             **changes})
        out.scenarios()
    except InvalidParameterError as exc:
        raise ConfigError(str(exc)) from None
    return out


# --------------------------------------------------------------------------- formatting

def fmt(value):
    """Locale-independent 6-significant-digit rendering; ``NA`` for missing."""
    if value is None:
        return "NA"
    if isinstance(value, (int,)) and not isinstance(value, bool):
        return str(value)
    return format(float(value), ".6g")


def report_rows(report):
    cfg = report.config
    for m in report.per_method:
        sens, spec = m.sensitivity, m.specificity
        rank = m.ranking_accuracy
        yield [cfg.scenario_id, cfg.n, fmt(cfg.censor_rate), fmt(cfg.rho), report.n_events,
               str(m.method),
               fmt(sens and sens.estimate), fmt(sens and sens.ci_low), fmt(sens and sens.ci_high),
               fmt(spec and spec.estimate), fmt(spec and spec.ci_low), fmt(spec and spec.ci_high),
               fmt(m.selection_accuracy), fmt(rank.estimate), fmt(rank.ci_low), fmt(rank.ci_high),
               m.n_replicates, m.n_fit_failures]


def write_csv(path, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    writer.writerows(rows)
    Path(path).write_text(buf.getvalue(), encoding="utf-8")


def _json_default(obj):
    if isinstance(obj, Method):
        return str(obj)
    if hasattr(obj, "tolist"):
        return obj.tolist()
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def write_json(path, doc):
    text = json.dumps(doc, indent=2, sort_keys=True, default=_json_default)
    Path(path).write_text(text + "\n", encoding="utf-8")


def _log(msg):
    print(msg, file=sys.stderr, flush=True)


# --------------------------------------------------------------------------- commands

def cmd_run(args):
    manifest = apply_overrides(load_manifest(args.manifest), args)
    out_dir = Path(manifest.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = []
    for cfg in manifest.scenarios():
        _log(f"[run] {cfg.scenario_id}: {cfg.replicates} replicates, {cfg.n_events} events")
        report = run_scenario(cfg, methods=manifest.methods, threads=args.threads)
        _log(f"[run] {cfg.scenario_id} done in {report.wall_time:.1f}s")
        # wall time stays out of the files so reruns are byte-identical
        write_json(out_dir / f"{cfg.scenario_id}.json", report.as_dict(include_wall_time=False))
        rows.extend(report_rows(report))
    write_csv(out_dir / "results.csv", rows)
    _log(f"[run] wrote {out_dir / 'results.csv'}")
    return EXIT_OK


def read_results(path):
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.DictReader(fh))
    except OSError as exc:
        raise ConfigError(f"cannot read results {path}: {exc.strerror}") from None
    if rows and set(CSV_COLUMNS) - set(rows[0]):
        raise ConfigError(f"{path} is not a results CSV (missing columns)")
    return rows


def panel_series(rows, panel, rho=None):
    """``{method: [(n_events, value), ...]}`` for one panel, skipping NA cells."""
    if panel not in PANELS:
        raise ConfigError(f"unknown panel {panel!r}; choose from {', '.join(PANELS)}")
    series = {}
    for row in rows:
        if rho is not None and abs(float(row["rho"]) - rho) > 1e-12:
            continue
        if row[panel] == "NA":
            continue
        series.setdefault(row["method"], []).append((float(row["n_events"]), float(row[panel])))
    return series


def cmd_plot(args):
    rows = read_results(args.csv)
    series = panel_series(rows, args.panel, args.rho)
    if not series:
        raise SurvselError("no data matches the requested panel and rho filter")
    title = PANEL_TITLES[args.panel]
    if args.rho is not None:
        title += f" (rho = {args.rho:g})"
    svg = line_chart(series, title=title, x_label="Total number of events",
                     y_label=PANEL_TITLES[args.panel])
    out = Path(args.out)
    if out.parent != Path(""):
        out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(svg, encoding="utf-8")
    _log(f"[plot] wrote {out}")
    return EXIT_OK


def cmd_gen(args):
    manifest = apply_overrides(load_manifest(args.manifest), args)
    cfg = manifest.find(args.scenario)
    if not 0 <= args.replicate < cfg.replicates:
        raise ConfigError(f"replicate index {args.replicate} out of range [0, {cfg.replicates})")
    ds = replicate_dataset(cfg, args.replicate)
    out = Path(args.out)
    if out.parent != Path(""):
        out.parent.mkdir(parents=True, exist_ok=True)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["time_obs", "status"] + [f"f{j + 1}" for j in range(ds.x_obs.shape[1])])
    for t, s, row in zip(ds.time_obs, ds.status, ds.x_obs):
        # repr round-trips doubles exactly
        writer.writerow([repr(float(t)), int(s)] + [repr(float(v)) for v in row])
    out.write_text(buf.getvalue(), encoding="utf-8")
    sidecar = {
        "scenario_id": cfg.scenario_id,
        "replicate": args.replicate,
        "master_seed": cfg.master_seed,
        "n": cfg.n,
        "n_events": int(ds.n_events),
        "true_ids": [int(i) + 1 for i in ds.true_ids],
        "true_beta_obs": [float(b) for b in ds.true_beta_obs],
        "observed_true_columns": [f"f{j + 1}" for j in ds.true_columns],
        "baseline": {"shape_alpha": ds.baseline.shape_alpha,
                     "scale_lambda": ds.baseline.scale_lambda},
    }
    write_json(out.with_suffix(".json"), sidecar)
    _log(f"[gen] wrote {out} and {out.with_suffix('.json')}")
    return EXIT_OK


def _parse_alphas(text):
    try:
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"--alphas must be comma-separated numbers, got {text!r}") from None
    if not values:
        raise ConfigError("--alphas is empty")
    return values


def cmd_probe(args):
    alphas = _parse_alphas(args.alphas)
    try:
        cfg = ScenarioConfig(n=args.n, censor_rate=args.censor_rate, rho=args.rho_value,
                             replicates=args.replicates or 200,
                             master_seed=args.seed if args.seed is not None else 20221008)
        rows = degenerate_alpha_probe(alphas, cfg, threads=args.threads)
    except InvalidParameterError as exc:
        raise ConfigError(str(exc)) from None
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["shape_alpha", "failure_rate", "n_failures", "replicates"])
    for r in rows:
        writer.writerow([fmt(r.alpha), fmt(r.failure_rate), r.n_failures, r.replicates])
    if args.out:
        out = Path(args.out)
        if out.parent != Path(""):
            out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(buf.getvalue(), encoding="utf-8")
        _log(f"[probe] wrote {out}")
    else:
        sys.stdout.write(buf.getvalue())
    return EXIT_OK


# --------------------------------------------------------------------------- parser

def _positive_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def _seed(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer seed, got {text!r}") from None
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return v


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser():
    parser = _Parser(prog="survsel",
                     description="Feature-selection benchmark for simulated survival data.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, manifest=True):
        if manifest:
            p.add_argument("--manifest", required=True, help="JSON run manifest")
        p.add_argument("--threads", type=_positive_int, default=default_threads(),
                       help="worker processes (default: available cores)")
        p.add_argument("--seed", type=_seed, default=None, help="override master seed")
        p.add_argument("--replicates", type=_positive_int, default=None,
                       help="override replicate count")

    p = sub.add_parser("run", help="run every scenario of a manifest")
    common(p)
    p.add_argument("--out", default=None, help="output directory (overrides manifest)")
    p.add_argument("--full-scale", action="store_true",
                   help=f"use {FULL_REPLICATES} replicates per scenario")
    p.add_argument("--include-event-indicator", action="store_true",
                   help="add the event indicator as a Cox elastic-net covariate")
    p.add_argument("--mix", type=float, default=None, help="elastic-net L1 weight in (0, 1]")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("plot", help="draw one panel from a results CSV as SVG")
    p.add_argument("csv", help="results.csv written by 'run'")
    p.add_argument("--panel", choices=PANELS, default="selection_accuracy")
    p.add_argument("--rho", type=float, default=None, help="keep only this correlation")
    p.add_argument("--out", required=True, help="SVG output path")
    p.set_defaults(func=cmd_plot)

    p = sub.add_parser("gen", help="export one simulated replicate as CSV + JSON sidecar")
    p.add_argument("--manifest", required=True, help="JSON run manifest")
    p.add_argument("--scenario", required=True, help="scenario id, e.g. n500_c0.1_r0")
    p.add_argument("--replicate", type=int, default=0, help="0-based replicate index")
    p.add_argument("--seed", type=_seed, default=None, help="override master seed")
    p.add_argument("--replicates", type=_positive_int, default=None,
                   help="override replicate count")
    p.add_argument("--out", required=True, help="dataset CSV path")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("probe", help="Cox fit-failure rate against a fixed baseline shape")
    common(p, manifest=False)
    p.add_argument("--alphas", default="0.1,0.5,1,2,4", help="comma-separated shapes in (0, 4]")
    p.add_argument("--n", type=_positive_int, default=1000)
    p.add_argument("--censor-rate", type=float, default=0.1)
    p.add_argument("--rho", dest="rho_value", type=float, default=0.0)
    p.add_argument("--out", default=None, help="CSV output path (default: stdout)")
    p.set_defaults(func=cmd_probe)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        _log(f"survsel: configuration error: {exc}")
        return EXIT_CONFIG
    except (SurvselError, OSError) as exc:
        _log(f"survsel: error: {exc}")
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
