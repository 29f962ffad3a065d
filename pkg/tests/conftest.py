"""Shared fixtures: the reference transformer, small hand-built models,
and the end-to-end pipeline run used by the acceptance suite."""

import datetime as dt
import time

import pytest

from txrisk import cli, features as ft, thermal
from txrisk.clustering import Cluster, ClusterModel

QUERY_CSV = """\
date,t_max_c,t_min_c,t_avg_c,l_avg_kva,weekday
2016-06-06,21.53,8.12,14.20,0.97,Y
2016-06-07,22.73,12.62,14.62,0.98,Y
2016-06-08,20.12,9.41,13.39,1.06,Y
2016-06-09,18.61,10.78,16.55,0.97,Y
2016-06-10,18.48,11.80,14.77,1.07,Y
2016-06-11,20.04,11.26,16.52,1.34,N
2016-06-12,21.72,8.18,17.58,1.23,N
"""

PIPELINE_FILES = (
    "data/weather.csv",
    "data/meter.csv",
    "data/calendar.csv",
    "out/model.json",
    "out/composition.csv",
    "out/thresholds.csv",
    "out/month_matrix.csv",
    "out/temperature_grid.csv",
    "out/life_loss.csv",
    "out/month_distribution.svg",
    "out/estimates.csv",
)


@pytest.fixture
def default_spec():
    """25 kVA ONAN pole transformer used throughout the suite."""
    return thermal.TransformerSpec(
        rated_kva=25.0,
        top_oil_rise_rated=55.0,
        hotspot_differential=25.0,
        loss_ratio=4.0,
        oil_time_constant=3.0,
        winding_time_constant=0.08,
        replacement_cost=5000.0,
    )


def write_spec_file(path):
    spec = thermal.TransformerSpec(
        rated_kva=25.0, top_oil_rise_rated=55.0, hotspot_differential=25.0,
        loss_ratio=4.0, oil_time_constant=3.0, winding_time_constant=0.08,
        replacement_cost=5000.0)
    thermal.save_transformer_spec(spec, path)
    return path


def make_model(centroids, values_schema=None, *, nominal_modes=None,
               far_threshold=0.0):
    """Hand-built 1-D (or n-D) cluster model for estimation tests.

    ``centroids`` is a list of dicts of normalized quantitative values.
    Normalization params are identity ([0,1] bounds) per feature.
    """
    schema = values_schema or ft.FeatureSchema(features=tuple(
        ft.FeatureDef(name, ft.KIND_NUMERIC) for name in sorted(centroids[0])))
    params = ft.NormalizationParams(
        bounds={name: (0.0, 1.0) for name in schema.numeric_names})
    clusters = []
    for i, centroid in enumerate(centroids):
        modes = (nominal_modes or {}).get(i, {})
        clusters.append(Cluster(
            id=i + 1,
            centroid_numeric=dict(centroid),
            centroid_nominal=dict(modes),
            member_count=1,
            member_refs=((f"s{i}", "2015-01-01"),),
        ))
    return ClusterModel(
        k=len(clusters), clusters=tuple(clusters), schema=schema,
        norm_params=params, seed=0, objective=0.0,
        far_threshold=far_threshold)


def run_pipeline(root):
    """synth -> cluster -> assess -> estimate, all through the CLI."""
    data = root / "data"
    out = root / "out"
    out.mkdir(parents=True, exist_ok=True)
    spec_path = write_spec_file(root / "spec.json")
    query_path = root / "query.csv"
    query_path.write_text(QUERY_CSV, encoding="utf-8")

    assert cli.main(["synth", "--seed", "42", "--services", "20",
                     "--days", "730", "--out", str(data)]) == 0
    assert cli.main(["cluster",
                     "--weather", str(data / "weather.csv"),
                     "--meter", str(data / "meter.csv"),
                     "--calendar", str(data / "calendar.csv"),
                     "--k", "6", "--seed", "42", "--restarts", "3",
                     "--out", str(out)]) == 0
    assert cli.main(["assess", "--spec", str(spec_path),
                     "--model", str(out / "model.json"),
                     "--n-range", "1..40", "--budget", "500",
                     "--years", "2", "--svg", "--out", str(out)]) == 0
    assert cli.main(["estimate", "--spec", str(spec_path),
                     "--model", str(out / "model.json"),
                     "--query", str(query_path), "--services", "18",
                     "--out", str(out)]) == 0
    return root


@pytest.fixture(scope="session")
def golden_pipeline(tmp_path_factory):
    """The full 20-service x 730-day pipeline, run twice for determinism
    checks. Returns [(root, wall_seconds), (root, wall_seconds)]."""
    runs = []
    for name in ("pipeline_a", "pipeline_b"):
        root = tmp_path_factory.mktemp(name)
        start = time.perf_counter()
        run_pipeline(root)
        runs.append((root, time.perf_counter() - start))
    return runs


def make_day(date=dt.date(2015, 7, 1), **numeric):
    """Quick FeatureVector for estimation-style queries."""
    nominal = {}
    if "weekday" in numeric:
        nominal["weekday"] = numeric.pop("weekday")
    return ft.FeatureVector(service_id="q", date=date, numeric=numeric,
                            nominal=nominal)
