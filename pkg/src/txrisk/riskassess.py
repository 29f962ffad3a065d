"""Fleet risk outputs: per-cluster loading thresholds, impact ranking, and
maximum service counts by temperature limit and by life-loss budget.

Cluster 24-hour profiles (kVA per service) are scaled to a transformer
load, simulated with the thermal model, and screened against the
temperature limits or converted to aging figures.
"""

from __future__ import annotations

import csv
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

from . import aging, thermal
from .clustering import ClusterModel, ClusterProfile
from .errors import ConfigError, NoFeasibleScaleError

SCALE_MAX_DEFAULT = 16.0  # p.u. peak, bisection upper bound
SCALE_TOL_DEFAULT = 0.005  # p.u.

MONTH_LABELS = ("Jan", "Feb", "Mar", "Apr", "May", "June", "July", "Aug",
                "Sep", "Oct", "Nov", "Dec")


@dataclass(frozen=True)
class ThresholdResult:
    """Largest tolerable loading for one cluster's day shape."""

    cluster_id: int
    max_avg_load_pu: float
    max_peak_load_pu: float
    binding_limit: str  # "top_oil" | "hotspot"
    impact_rank: int | None = None


@dataclass(frozen=True)
class ServiceCountStudy:
    """Per-(cluster, N) simulation results and the resulting service caps.

    ``per_cluster_max_temps`` maps (cluster_id, N) to (max top-oil °C,
    max hotspot °C); ``per_cluster_daily_loss`` maps (cluster_id, N) to
    life-loss days per day. Only the slice produced by the requesting
    study is populated.
    """

    n_values: tuple[int, ...]
    cluster_ids: tuple[int, ...]
    per_cluster_max_temps: dict | None = None
    per_cluster_daily_loss: dict | None = None
    max_services_by_temp: int | None = None
    max_services_by_life: int | None = None
    member_day_counts: dict | None = None
    years: float | None = None
    total_days_by_n: dict | None = None
    annual_days_by_n: dict | None = None
    economic_loss_by_n: dict | None = None
    budget: float | None = None


def profile_to_day(profile: ClusterProfile, n_services: float,
                   rated_kva: float) -> thermal.DayProfile:
    """Scale a per-service cluster profile to a transformer day in per-unit."""
    return thermal.DayProfile(
        ambient=profile.ambient_c,
        load_pu=tuple(n_services * kva / rated_kva for kva in profile.load_kva),
    )


def loading_threshold(spec: thermal.TransformerSpec, profile: ClusterProfile,
                      cluster_id: int = 0, *, scale_max: float = SCALE_MAX_DEFAULT,
                      tolerance: float = SCALE_TOL_DEFAULT) -> ThresholdResult:
    """Largest peak loading (p.u.) whose simulated day stays within limits.

    The profile is reduced to its peak-normalized shape, so the bisection
    scale *is* the 24-hour peak per-unit load; the 24-hour average at the
    binding scale is reported alongside. Bisection is valid because the
    converged temperatures are monotone in the load scale. The returned
    scale is certified: it passes the limits while ``scale + tolerance``
    violates at least one of them.

    Raises:
        NoFeasibleScaleError: ambient alone violates a limit (scale 0 fails).
        ConfigError: ``scale_max`` still passes the limits.
    """
    peak_kva = max(profile.load_kva)
    if peak_kva <= 0:
        raise ValueError("cluster profile has zero peak load")
    shape = tuple(v / peak_kva for v in profile.load_kva)

    def passes(scale: float) -> bool:
        day = thermal.DayProfile(ambient=profile.ambient_c,
                                 load_pu=tuple(scale * s for s in shape))
        verdict = thermal.check_limits(spec, thermal.simulate_day(spec, day))
        return verdict.within_limits

    if not passes(0.0):
        raise NoFeasibleScaleError(
            f"cluster {cluster_id}: ambient profile violates a temperature "
            "limit even at zero load")
    if passes(scale_max):
        raise ConfigError(
            f"cluster {cluster_id}: limits not reached at scale_max="
            f"{scale_max} p.u.; raise the threshold search bound")

    lo, hi = 0.0, scale_max
    while hi - lo > tolerance:
        mid = 0.5 * (lo + hi)
        if passes(mid):
            lo = mid
        else:
            hi = mid

    probe = thermal.DayProfile(
        ambient=profile.ambient_c,
        load_pu=tuple((lo + tolerance) * s for s in shape))
    verdict = thermal.check_limits(spec, thermal.simulate_day(spec, probe))
    binding = "top_oil" if verdict.worst_top_oil > spec.top_oil_limit else "hotspot"

    return ThresholdResult(
        cluster_id=cluster_id,
        max_avg_load_pu=lo * sum(shape) / 24.0,
        max_peak_load_pu=lo,
        binding_limit=binding,
    )


def rank_impact(results) -> list[ThresholdResult]:
    """Fill impact ranks: 1 = lowest tolerable peak loading (most
    restrictive), ties broken by cluster id. Returned in cluster-id order."""
    by_peak = sorted(results, key=lambda r: (r.max_peak_load_pu, r.cluster_id))
    ranked = [replace(r, impact_rank=i + 1) for i, r in enumerate(by_peak)]
    return sorted(ranked, key=lambda r: r.cluster_id)


def cluster_thresholds(spec: thermal.TransformerSpec, model: ClusterModel,
                       *, scale_max: float = SCALE_MAX_DEFAULT,
                       tolerance: float = SCALE_TOL_DEFAULT) -> list[ThresholdResult]:
    """Ranked loading thresholds for every cluster in the model."""
    _require_profiles(model)
    results = [
        loading_threshold(spec, model.profiles[c.id], c.id,
                          scale_max=scale_max, tolerance=tolerance)
        for c in model.clusters
    ]
    return rank_impact(results)


def _require_profiles(model: ClusterModel):
    if not model.profiles:
        raise ConfigError("cluster model carries no 24-hour profiles; "
                          "retrain with profile extraction")


def _simulate_grid(spec, model, n_values, threads=None):
    """(cluster_id, N) -> (max top-oil, max hotspot, daily equivalent aging)."""
    _require_profiles(model)

    def one(args):
        cid, n = args
        day = profile_to_day(model.profiles[cid], n, spec.rated_kva)
        trace = thermal.simulate_day(spec, day)
        feqa = aging.equivalent_aging(
            [aging.aging_acceleration(t) for t in trace.hotspot])
        return (cid, n), (max(trace.top_oil), max(trace.hotspot), feqa)

    jobs = [(c.id, n) for c in model.clusters for n in n_values]
    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            pairs = list(pool.map(one, jobs))
    else:
        pairs = [one(job) for job in jobs]
    return dict(pairs)


def _check_monotone(study_values, cluster_ids, n_values, what):
    for cid in cluster_ids:
        series = [study_values[(cid, n)] for n in n_values]
        for a, b in zip(series, series[1:]):
            if b < a - 1e-9:
                raise RuntimeError(
                    f"{what} not non-decreasing in N for cluster {cid}")


def max_services_by_temperature(spec: thermal.TransformerSpec,
                                model: ClusterModel, n_range,
                                threads: int | None = None) -> ServiceCountStudy:
    """Largest service count whose worst-cluster day stays within both
    temperature limits; transformer load is the cluster per-service profile
    times the service count."""
    n_values = tuple(n_range)
    if not n_values:
        raise ConfigError("n_range is empty")
    grid = _simulate_grid(spec, model, n_values, threads)
    cluster_ids = tuple(c.id for c in model.clusters)

    temps = {key: (oil, hot) for key, (oil, hot, _) in grid.items()}
    _check_monotone({k: v[0] for k, v in temps.items()}, cluster_ids, n_values,
                    "max top-oil temperature")
    _check_monotone({k: v[1] for k, v in temps.items()}, cluster_ids, n_values,
                    "max hotspot temperature")

    best = None
    for n in n_values:
        worst_oil = max(temps[(cid, n)][0] for cid in cluster_ids)
        worst_hot = max(temps[(cid, n)][1] for cid in cluster_ids)
        if worst_oil <= spec.top_oil_limit and worst_hot <= spec.hotspot_limit:
            best = n if best is None else max(best, n)
    return ServiceCountStudy(
        n_values=n_values,
        cluster_ids=cluster_ids,
        per_cluster_max_temps=temps,
        max_services_by_temp=best,
    )


def max_services_by_life(spec: thermal.TransformerSpec, model: ClusterModel,
                         n_range, annual_budget: float, years: float,
                         threads: int | None = None) -> ServiceCountStudy:
    """Largest service count whose yearly equivalent economic loss stays
    within the budget.

    Per-cluster daily life loss (days per day) is the daily equivalent
    aging factor of the simulated day; totals weight it by member-day
    counts, annualize over ``years``, and convert to currency.
    """
    n_values = tuple(n_range)
    if not n_values:
        raise ConfigError("n_range is empty")
    grid = _simulate_grid(spec, model, n_values, threads)
    cluster_ids = tuple(c.id for c in model.clusters)
    counts = model.member_day_counts()

    losses = {key: feqa for key, (_, _, feqa) in grid.items()}
    _check_monotone(losses, cluster_ids, n_values, "daily life loss")

    totals, annuals, els = {}, {}, {}
    for n in n_values:
        per_cluster = {cid: losses[(cid, n)] for cid in cluster_ids}
        total, annual = aging.accumulate_life_loss(per_cluster, counts, years)
        totals[n] = total
        annuals[n] = annual
        els[n] = aging.economic_loss(annual, spec.replacement_cost)

    return ServiceCountStudy(
        n_values=n_values,
        cluster_ids=cluster_ids,
        per_cluster_daily_loss=losses,
        max_services_by_life=select_max_services(els, annual_budget),
        member_day_counts=counts,
        years=years,
        total_days_by_n=totals,
        annual_days_by_n=annuals,
        economic_loss_by_n=els,
        budget=annual_budget,
    )


def select_max_services(economic_loss_by_n: dict, budget: float) -> int | None:
    """Largest N whose yearly economic loss is within the budget."""
    feasible = [n for n, el in economic_loss_by_n.items() if el <= budget]
    return max(feasible) if feasible else None


# ---------------------------------------------------------------------------
# Report files


def write_thresholds_csv(results, path) -> None:
    """Threshold and impact-ranking table, one row per cluster."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["cluster_id", "max_avg_load_pu", "max_peak_load_pu",
                         "binding_limit", "impact_rank"])
        for r in sorted(results, key=lambda r: r.cluster_id):
            writer.writerow([r.cluster_id, f"{r.max_avg_load_pu:.2f}",
                             f"{r.max_peak_load_pu:.2f}", r.binding_limit,
                             r.impact_rank])


def _rank_order(ranked_results):
    """Cluster ids ordered by impact rank 1..k."""
    return [r.cluster_id for r in sorted(ranked_results,
                                         key=lambda r: r.impact_rank)]


def write_month_matrix_csv(matrix, model: ClusterModel, ranked_results, path) -> None:
    """Month-by-cluster member-day counts, columns ordered by impact rank.

    The first data row maps each impact column back to its cluster id; the
    footer row sums each column (equal to the cluster member counts).
    """
    order = _rank_order(ranked_results)
    col_of = {c.id: i for i, c in enumerate(model.clusters)}
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["month"] + [f"imp_{i + 1}" for i in range(len(order))])
        writer.writerow(["cluster_id"] + [cid for cid in order])
        for m, label in enumerate(MONTH_LABELS):
            writer.writerow([label] + [int(matrix[m, col_of[cid]])
                                       for cid in order])
        writer.writerow(["Sum"] + [int(matrix[:, col_of[cid]].sum())
                                   for cid in order])


def write_temperature_grid_csv(study: ServiceCountStudy, spec, path) -> None:
    """Max top-oil temperature (°C, rounded) per cluster and service count,
    with a Max footer row over clusters."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["cluster_id"] + [f"N={n}" for n in study.n_values])
        for cid in study.cluster_ids:
            writer.writerow([cid] + [
                round(study.per_cluster_max_temps[(cid, n)][0])
                for n in study.n_values])
        writer.writerow(["Max"] + [
            round(max(study.per_cluster_max_temps[(cid, n)][0]
                      for cid in study.cluster_ids))
            for n in study.n_values])


def write_life_loss_csv(study: ServiceCountStudy, spec, path) -> None:
    """Life-loss grid with member-day counts and total/annual/economic
    footer rows."""
    years_label = f"{study.years:g}-Year Total Loss of Life (Days)"
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["cluster_id"] + [f"N={n}" for n in study.n_values]
                        + ["num_days"])
        for cid in study.cluster_ids:
            writer.writerow([cid] + [
                f"{study.per_cluster_daily_loss[(cid, n)]:.1f}"
                for n in study.n_values]
                + [study.member_day_counts[cid]])
        writer.writerow([years_label] + [f"{study.total_days_by_n[n]:.1f}"
                                         for n in study.n_values] + ["-"])
        writer.writerow(["Average annual Loss of Life (Days)"]
                        + [f"{study.annual_days_by_n[n]:.1f}"
                           for n in study.n_values] + ["-"])
        writer.writerow(["Economic Loss ($/year)"]
                        + [f"{study.economic_loss_by_n[n]:.1f}"
                           for n in study.n_values] + ["-"])


_SVG_PALETTE = ("#4477aa", "#66ccee", "#228833", "#ccbb44", "#ee6677",
                "#aa3377", "#bbbbbb", "#222255", "#225555", "#552200")


def write_month_distribution_svg(matrix, model: ClusterModel, ranked_results,
                                 path) -> None:
    """Grouped bar chart of member days per month per cluster (impact order).

    Hand-rolled SVG so repeated runs are byte-identical.
    """
    order = _rank_order(ranked_results)
    col_of = {c.id: i for i, c in enumerate(model.clusters)}
    k = len(order)
    top = max(1, int(matrix.max()))

    width, height = 980, 420
    left, right, bottom, upper = 55, 160, 40, 20
    plot_w = width - left - right
    plot_h = height - upper - bottom
    group_w = plot_w / 12.0
    bar_w = group_w / (k + 1)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
        f'height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{left}" y1="{upper + plot_h}" x2="{left + plot_w}" '
        f'y2="{upper + plot_h}" stroke="black"/>',
        f'<line x1="{left}" y1="{upper}" x2="{left}" y2="{upper + plot_h}" '
        'stroke="black"/>',
    ]
    for frac in (0.0, 0.25, 0.5, 0.75, 1.0):
        y = upper + plot_h * (1.0 - frac)
        parts.append(f'<text x="{left - 8:.1f}" y="{y + 4:.1f}" '
                     'font-size="11" text-anchor="end" '
                     f'font-family="sans-serif">{round(top * frac)}</text>')
        parts.append(f'<line x1="{left - 4}" y1="{y:.1f}" x2="{left}" '
                     f'y2="{y:.1f}" stroke="black"/>')
    for m, label in enumerate(MONTH_LABELS):
        gx = left + m * group_w
        parts.append(f'<text x="{gx + group_w / 2:.1f}" '
                     f'y="{upper + plot_h + 16:.1f}" font-size="11" '
                     f'text-anchor="middle" font-family="sans-serif">{label}</text>')
        for j, cid in enumerate(order):
            count = int(matrix[m, col_of[cid]])
            h = plot_h * count / top
            x = gx + (j + 0.5) * bar_w
            y = upper + plot_h - h
            color = _SVG_PALETTE[j % len(_SVG_PALETTE)]
            parts.append(f'<rect x="{x:.1f}" y="{y:.1f}" width="{bar_w:.1f}" '
                         f'height="{h:.1f}" fill="{color}"/>')
    for j, cid in enumerate(order):
        color = _SVG_PALETTE[j % len(_SVG_PALETTE)]
        ly = upper + 14 * (j + 1)
        parts.append(f'<rect x="{left + plot_w + 16}" y="{ly - 9}" width="10" '
                     f'height="10" fill="{color}"/>')
        parts.append(f'<text x="{left + plot_w + 30}" y="{ly}" font-size="11" '
                     f'font-family="sans-serif">Imp {j + 1} (cluster {cid})</text>')
    parts.append('<text x="14" y="16" font-size="12" '
                 'font-family="sans-serif">Member days per month by cluster '
                 'impact level</text>')
    parts.append("</svg>")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(parts))
        fh.write("\n")
