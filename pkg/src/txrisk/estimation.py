"""Cross-area estimation: inverse-distance weighting over cluster
centroids to estimate temperatures or life loss for transformers outside
the clustered dataset, plus the energy-to-average-load conversion for
areas with revenue (non-interval) meters."""

from __future__ import annotations

import csv
import datetime as dt
import warnings
from dataclasses import dataclass

from . import aging, features as ft, thermal
from .clustering import ClusterModel
from .errors import (
    FarFromAllClustersError,
    FarQueryWarning,
    MissingFeatureWarning,
    ParseError,
    ZeroServicesError,
)
from .riskassess import profile_to_day

# Below this dissimilarity a query is treated as sitting exactly on the
# centroid, sidestepping the 1/d blow-up.
ZERO_DISTANCE_EPS = 1e-9

QUERY_HEADER = ["date", "t_max_c", "t_min_c", "t_avg_c", "l_avg_kva", "weekday"]


@dataclass(frozen=True)
class EstimationResult:
    """Inverse-distance-weighted estimate and its diagnostics."""

    estimate: float
    per_cluster_distances: dict[int, float]
    weights: dict[int, float]
    far_flag: bool


def estimate(feature_x: ft.FeatureVector, model: ClusterModel,
             per_cluster_values: dict[int, float], *,
             strict: bool = False) -> EstimationResult:
    """Estimate a per-cluster quantity at a new feature vector.

    Weights are proportional to the inverse dissimilarity between the
    query and each cluster centroid (the model's own weighted mixed
    dissimilarity), so the estimate is a convex combination of the
    per-cluster values; a query on a centroid returns that cluster's value
    exactly. Queries farther from every centroid than the model's far
    guard are flagged; in strict mode they are refused.

    Raises:
        FarFromAllClustersError: strict mode and the query is outside the
            model's support.
        KeyError: ``per_cluster_values`` does not cover every cluster.
    """
    missing = [c.id for c in model.clusters if c.id not in per_cluster_values]
    if missing:
        raise KeyError(f"per_cluster_values missing clusters {missing}")

    encoded = ft.encode(feature_x, model.schema, model.norm_params,
                        allow_missing=True)
    absent = [name for name, v in zip(model.schema.quantitative_names,
                                      encoded.quantitative) if v != v]
    absent += [name for name, v in zip(model.schema.nominal_names,
                                       encoded.nominal) if v is None]
    if absent:
        warnings.warn(
            f"query lacks features {absent}; distances use the remaining "
            "features only", MissingFeatureWarning, stacklevel=2)

    dists = {
        c.id: ft.distance(encoded, model.centroid_vector(c), model.schema)
        for c in model.clusters
    }

    far = model.far_threshold > 0 and min(dists.values()) > model.far_threshold
    if far:
        if strict:
            raise FarFromAllClustersError(
                "query is farther than the far-guard threshold "
                f"({model.far_threshold:.6g}) from every cluster centroid")
        warnings.warn(
            "query is far from all cluster centroids; the estimate is "
            "unreliable", FarQueryWarning, stacklevel=2)

    exact = [cid for cid, d in sorted(dists.items()) if d < ZERO_DISTANCE_EPS]
    if exact:
        hit = exact[0]
        weights = {cid: (1.0 if cid == hit else 0.0) for cid in dists}
        return EstimationResult(
            estimate=float(per_cluster_values[hit]),
            per_cluster_distances=dists,
            weights=weights,
            far_flag=far,
        )

    inv = {cid: 1.0 / d for cid, d in dists.items()}
    total = sum(inv.values())
    weights = {cid: v / total for cid, v in inv.items()}
    value = sum(weights[cid] * per_cluster_values[cid] for cid in weights)
    return EstimationResult(
        estimate=float(value),
        per_cluster_distances=dists,
        weights=weights,
        far_flag=far,
    )


def avg_load_from_energy(daily_energy_kwh, service_count: int) -> float:
    """Average per-service load (kVA at unity power factor) from one day of
    revenue-meter energy readings: sum(E_i) / (24 n)."""
    if service_count < 1:
        raise ZeroServicesError("service_count must be >= 1")
    energies = list(daily_energy_kwh)
    if len(energies) != service_count:
        raise ValueError(
            f"expected {service_count} readings, got {len(energies)}")
    if any(e < 0 for e in energies):
        raise ValueError("daily energies must be >= 0")
    return sum(energies) / (24.0 * service_count)


def cluster_max_top_oil(model: ClusterModel, spec: thermal.TransformerSpec,
                        service_count: int) -> dict[int, float]:
    """Per-cluster maximum top-oil °C when each cluster profile supplies
    ``service_count`` services; computed once and reused across queries."""
    out = {}
    for cluster in model.clusters:
        day = profile_to_day(model.profiles[cluster.id], service_count,
                             spec.rated_kva)
        out[cluster.id] = max(thermal.simulate_day(spec, day).top_oil)
    return out


def cluster_daily_life_loss(model: ClusterModel, spec: thermal.TransformerSpec,
                            service_count: int) -> dict[int, float]:
    """Per-cluster life loss (days per day) at ``service_count`` services."""
    out = {}
    for cluster in model.clusters:
        day = profile_to_day(model.profiles[cluster.id], service_count,
                             spec.rated_kva)
        trace = thermal.simulate_day(spec, day)
        out[cluster.id] = aging.equivalent_aging(
            [aging.aging_acceleration(t) for t in trace.hotspot])
    return out


def estimate_day_temperature(day_features: ft.FeatureVector, model: ClusterModel,
                             service_count: int, spec: thermal.TransformerSpec,
                             per_cluster_temps: dict[int, float] | None = None,
                             *, strict: bool = False) -> EstimationResult:
    """Estimated maximum top-oil temperature for one day at a transformer
    with ``service_count`` services, weighted across cluster centroids."""
    if per_cluster_temps is None:
        per_cluster_temps = cluster_max_top_oil(model, spec, service_count)
    return estimate(day_features, model, per_cluster_temps, strict=strict)


def read_query_csv(path) -> list[ft.FeatureVector]:
    """Read estimation query days: date, daily temperature summary, average
    service load, and weekday flag."""
    try:
        fh = open(path, encoding="utf-8", newline="")
    except OSError as exc:
        raise ParseError(f"cannot open file: {exc}", path=path) from exc
    with fh:
        rows = csv.reader(fh)
        header = next(rows, None)
        if header != QUERY_HEADER:
            raise ParseError(f"unexpected header {header!r}; expected "
                             f"{','.join(QUERY_HEADER)}", path=path, row=1)
        out = []
        for i, row in enumerate(rows, start=2):
            if len(row) != len(QUERY_HEADER):
                raise ParseError(f"expected {len(QUERY_HEADER)} columns, got "
                                 f"{len(row)}", path=path, row=i)
            try:
                date = dt.date.fromisoformat(row[0])
            except ValueError:
                raise ParseError(f"bad date {row[0]!r}", path=path, row=i,
                                 column="date") from None
            numeric = {}
            for j, name in enumerate(QUERY_HEADER[1:5], start=1):
                try:
                    numeric[name] = float(row[j])
                except ValueError:
                    raise ParseError(f"bad number {row[j]!r}", path=path,
                                     row=i, column=name) from None
            if row[5] not in ("Y", "N"):
                raise ParseError(f"weekday must be Y or N, got {row[5]!r}",
                                 path=path, row=i, column="weekday")
            out.append(ft.FeatureVector(
                service_id="query",
                date=date,
                numeric=numeric,
                nominal={"weekday": row[5]},
            ))
        return out


def write_estimates_csv(queries, results, path) -> None:
    """One output row per query day with the estimate and far flag."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(QUERY_HEADER + ["estimated_max_top_oil_c", "far_flag"])
        for query, result in zip(queries, results):
            writer.writerow([
                query.date.isoformat(),
                f"{query.numeric['t_max_c']:.2f}",
                f"{query.numeric['t_min_c']:.2f}",
                f"{query.numeric['t_avg_c']:.2f}",
                f"{query.numeric['l_avg_kva']:.2f}",
                query.nominal["weekday"],
                f"{result.estimate:.1f}",
                "Y" if result.far_flag else "N",
            ])
