"""Command-line entry point.

Subcommands cover the full pipeline: ``synth`` generates a seeded
synthetic dataset, ``cluster`` trains the mixed-type k-means model,
``assess`` writes the threshold/month/temperature/life-loss report tables,
and ``estimate`` scores query days against a trained model. Options can be
preloaded from a JSON config file; command-line flags win over the config.

Every error class maps to a distinct exit code (see ``txrisk --help``).
"""

from __future__ import annotations

import argparse
import csv
import datetime as dt
import json
import os
import sys
from dataclasses import fields as dataclass_fields
from pathlib import Path

from . import clustering, estimation, ingest, riskassess, thermal
from . import features as ft
from .errors import ConfigError, TxRiskError

_EXIT_CODE_DOC = """\
exit codes:
  0   success
  1   unexpected internal error
  2   usage or configuration error
  3   input file parse error
  4   incomplete day with gap filling disabled
  5   no common weather/meter/calendar coverage
  6   more clusters requested than data points
  7   thermal daily cycle did not converge
  8   no feasible loading scale (ambient above limit)
  9   strict mode: query far from all clusters
  10  per-cluster maps disagree on cluster ids
  11  vector does not match the feature schema
  12  empty dataset
  13  cluster member lacks a raw 24-hour profile
  14  zero services in energy conversion
  15  ordinal status order out of range
  16  centroid update over zero members
"""


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="txrisk",
        description="Statistical overloading-risk assessment for residential "
                    "oil-immersed transformer fleets.",
        epilog=_EXIT_CODE_DOC,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON config file; flags override it")
        p.add_argument("--seed", type=int, help="master random seed")
        p.add_argument("--out", help="output directory (default .)")
        p.add_argument("--threads", type=int,
                       help="parallelism bound (default: processor count)")
        p.add_argument("--strict", action="store_true", default=None,
                       help="error out on far-from-all-clusters queries")

    p_synth = sub.add_parser("synth", help="generate a synthetic dataset")
    common(p_synth)
    p_synth.add_argument("--services", type=int, help="number of services")
    p_synth.add_argument("--days", type=int, help="number of days")
    p_synth.add_argument("--start-date", help="first date, ISO format")

    p_cluster = sub.add_parser("cluster", help="train the cluster model")
    common(p_cluster)
    p_cluster.add_argument("--weather", help="weather.csv path")
    p_cluster.add_argument("--meter", help="meter.csv path")
    p_cluster.add_argument("--calendar", help="calendar.csv path")
    p_cluster.add_argument("--k", type=int, help="number of clusters")
    p_cluster.add_argument("--restarts", type=int,
                           help="seeded restarts, best objective wins")
    p_cluster.add_argument("--k-sweep", metavar="A..B",
                           help="also report the objective for each k in the "
                                "range before training at --k")

    p_assess = sub.add_parser("assess", help="write the risk report tables")
    common(p_assess)
    p_assess.add_argument("--spec", help="transformer spec JSON path")
    p_assess.add_argument("--model", help="trained cluster model JSON path")
    p_assess.add_argument("--n-range", metavar="A..B",
                          help="service counts to study (default 1..40)")
    p_assess.add_argument("--budget", type=float,
                          help="yearly economic-loss budget per transformer")
    p_assess.add_argument("--years", type=float,
                          help="dataset span in years for annualization")
    p_assess.add_argument("--svg", action="store_true", default=None,
                          help="also emit the month-distribution SVG chart")

    p_estimate = sub.add_parser("estimate",
                                help="estimate temperatures for query days")
    common(p_estimate)
    p_estimate.add_argument("--spec", help="transformer spec JSON path")
    p_estimate.add_argument("--model", help="trained cluster model JSON path")
    p_estimate.add_argument("--query", help="query CSV path")
    p_estimate.add_argument("--services", type=int,
                            help="service count at the target transformer")
    return parser


class RunConfig:
    """Merged view of defaults, the JSON config file, and CLI flags."""

    _DEFAULTS = {
        "seed": 42,
        "out": ".",
        "threads": None,
        "strict": False,
        "services": 20,
        "days": 730,
        "start_date": "2014-01-01",
        "k": 10,
        "restarts": 1,
        "n_range": "1..40",
        "budget": 500.0,
        "years": 3.0,
        "scale_max": riskassess.SCALE_MAX_DEFAULT,
        "scale_tol": riskassess.SCALE_TOL_DEFAULT,
        "svg": False,
        "weather": None,
        "meter": None,
        "calendar": None,
        "spec": None,
        "model": None,
        "query": None,
        "features": None,
        "synth": None,
        "k_sweep": None,
    }

    def __init__(self, args: argparse.Namespace):
        file_cfg = {}
        if getattr(args, "config", None):
            try:
                with open(args.config, encoding="utf-8") as fh:
                    file_cfg = json.load(fh)
            except (OSError, json.JSONDecodeError) as exc:
                raise ConfigError(f"cannot read config {args.config}: {exc}")
            if not isinstance(file_cfg, dict):
                raise ConfigError("config file must hold a JSON object")
            unknown = set(file_cfg) - set(self._DEFAULTS)
            if unknown:
                raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        self._file = file_cfg
        self._args = vars(args)

    def get(self, key):
        flag = self._args.get(key)
        if flag is not None:
            return flag
        if key in self._file and self._file[key] is not None:
            return self._file[key]
        return self._DEFAULTS[key]

    def require_path(self, key) -> Path:
        value = self.get(key)
        if not value:
            raise ConfigError(f"missing required path: --{key.replace('_', '-')}")
        path = Path(value)
        if not path.exists():
            raise ConfigError(f"path does not exist: {path}")
        return path

    def out_dir(self) -> Path:
        out = Path(self.get("out"))
        out.mkdir(parents=True, exist_ok=True)
        return out

    def threads(self) -> int:
        value = self.get("threads")
        if value is None:
            value = os.cpu_count() or 1
        if value < 1:
            raise ConfigError("--threads must be >= 1")
        return value

    def schema(self) -> ft.FeatureSchema:
        items = self.get("features")
        if items is None:
            return ft.default_schema()
        try:
            return ft.FeatureSchema.from_jsonable(items)
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"bad feature schema in config: {exc}")

    def synth_config(self) -> ingest.SynthConfig:
        overrides = self.get("synth") or {}
        known = {f.name for f in dataclass_fields(ingest.SynthConfig)}
        unknown = set(overrides) - known
        if unknown:
            raise ConfigError(f"unknown synth config keys: {sorted(unknown)}")
        if "holidays" in overrides:
            overrides = dict(overrides)
            overrides["holidays"] = tuple(
                (int(m), int(d)) for m, d in overrides["holidays"])
        return ingest.SynthConfig(**overrides)


def parse_span(text: str, label: str) -> range:
    """Parse an inclusive integer span like ``1..40``."""
    parts = str(text).split("..")
    try:
        lo, hi = (int(p) for p in parts)
    except ValueError:
        raise ConfigError(f"{label} must look like A..B, got {text!r}") from None
    if lo < 1 or hi < lo:
        raise ConfigError(f"{label} {text!r} is empty or non-positive")
    return range(lo, hi + 1)


def cmd_synth(cfg: RunConfig) -> int:
    try:
        start = dt.date.fromisoformat(str(cfg.get("start_date")))
    except ValueError:
        raise ConfigError(f"bad start date {cfg.get('start_date')!r}")
    services = int(cfg.get("services"))
    days = int(cfg.get("days"))
    if services < 1 or days < 1:
        raise ConfigError("--services and --days must be >= 1")
    paths = ingest.synth_dataset(int(cfg.get("seed")), services, start, days,
                                 cfg.synth_config(), cfg.out_dir())
    for name in ("weather", "meter", "calendar"):
        print(f"wrote {paths[name]}")
    return 0


def _write_composition_csv(model, path):
    rows = clustering.composition(model)
    header = (["cluster_id", "member_count"]
              + list(model.schema.numeric_names)
              + list(model.schema.ordinal_names)
              + list(model.schema.nominal_names))
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            out = [row["cluster_id"], row["member_count"]]
            for name in model.schema.numeric_names:
                out.append(f"{row[name]:.2f}")
            for name in model.schema.ordinal_names:
                out.append(f"{row[name]:.4f}")
            for name in model.schema.nominal_names:
                out.append(row[name])
            writer.writerow(out)


def cmd_cluster(cfg: RunConfig) -> int:
    dataset = ingest.load_dataset(cfg.require_path("weather"),
                                  cfg.require_path("meter"),
                                  cfg.require_path("calendar"))
    schema = cfg.schema()
    seed = int(cfg.get("seed"))
    restarts = int(cfg.get("restarts"))

    sweep = cfg.get("k_sweep")
    if sweep:
        for k in parse_span(sweep, "--k-sweep"):
            model = clustering.kmeans(dataset.records, k, schema, seed,
                                      restarts=restarts)
            print(f"k={k} objective={model.objective:.6f}")

    k = int(cfg.get("k"))
    model = clustering.train_model(dataset.records, dataset.profiles, k,
                                   schema, seed, restarts=restarts)
    out = cfg.out_dir()
    model_path = out / "model.json"
    clustering.save_model(model, model_path)
    _write_composition_csv(model, out / "composition.csv")
    print(f"trained k={k} on {len(dataset.records)} records, "
          f"objective={model.objective:.6f}")
    print(f"wrote {model_path}")
    print(f"wrote {out / 'composition.csv'}")
    return 0


def cmd_assess(cfg: RunConfig) -> int:
    spec = thermal.load_transformer_spec(cfg.require_path("spec"))
    model = clustering.load_model(cfg.require_path("model"))
    n_range = parse_span(cfg.get("n_range"), "--n-range")
    budget = float(cfg.get("budget"))
    years = float(cfg.get("years"))
    threads = cfg.threads()
    out = cfg.out_dir()

    thresholds = riskassess.cluster_thresholds(
        spec, model, scale_max=float(cfg.get("scale_max")),
        tolerance=float(cfg.get("scale_tol")))
    riskassess.write_thresholds_csv(thresholds, out / "thresholds.csv")

    matrix = clustering.month_cluster_matrix(model)
    riskassess.write_month_matrix_csv(matrix, model, thresholds,
                                      out / "month_matrix.csv")

    temp_study = riskassess.max_services_by_temperature(spec, model, n_range,
                                                        threads=threads)
    riskassess.write_temperature_grid_csv(temp_study, spec,
                                          out / "temperature_grid.csv")

    life_study = riskassess.max_services_by_life(spec, model, n_range, budget,
                                                 years, threads=threads)
    riskassess.write_life_loss_csv(life_study, spec, out / "life_loss.csv")

    if cfg.get("svg"):
        riskassess.write_month_distribution_svg(matrix, model, thresholds,
                                                out / "month_distribution.svg")

    min_peak = min(t.max_peak_load_pu for t in thresholds)
    print(f"minimum allowed daily peak loading: {min_peak:.2f} p.u.")
    print(f"max services by temperature limits: {temp_study.max_services_by_temp}")
    print(f"max services by life-loss budget ${budget:g}/year: "
          f"{life_study.max_services_by_life}")
    for name in ("thresholds.csv", "month_matrix.csv", "temperature_grid.csv",
                 "life_loss.csv"):
        print(f"wrote {out / name}")
    if cfg.get("svg"):
        print(f"wrote {out / 'month_distribution.svg'}")
    return 0


def cmd_estimate(cfg: RunConfig) -> int:
    spec = thermal.load_transformer_spec(cfg.require_path("spec"))
    model = clustering.load_model(cfg.require_path("model"))
    queries = estimation.read_query_csv(cfg.require_path("query"))
    services = cfg.get("services")
    if services is None or int(services) < 1:
        raise ConfigError("--services must be >= 1")
    strict = bool(cfg.get("strict"))

    temps = estimation.cluster_max_top_oil(model, spec, int(services))
    results = [estimation.estimate_day_temperature(q, model, int(services),
                                                   spec, temps, strict=strict)
               for q in queries]
    out = cfg.out_dir()
    estimation.write_estimates_csv(queries, results, out / "estimates.csv")
    print(f"wrote {out / 'estimates.csv'} ({len(results)} days)")
    return 0


_COMMANDS = {
    "synth": cmd_synth,
    "cluster": cmd_cluster,
    "assess": cmd_assess,
    "estimate": cmd_estimate,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = RunConfig(args)
        return _COMMANDS[args.command](cfg)
    except TxRiskError as exc:
        print(f"txrisk: error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
