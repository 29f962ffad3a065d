"""From cluster profiles to fleet rules.

Three questions a planning engineer asks of a transformer model plus a
trained cluster model:

1. How hard can each kind of day push this transformer? (loading
   thresholds + impact ranking)
2. How many services can one unit carry before a temperature limit is
   hit on the worst kind of day?
3. How many services keep the yearly insulation-loss bill under budget?
"""

import datetime as dt
import tempfile
from pathlib import Path

from txrisk import (
    TransformerSpec,
    cluster_thresholds,
    default_schema,
    load_dataset,
    max_services_by_life,
    max_services_by_temperature,
    synth_dataset,
    train_model,
)

spec = TransformerSpec(
    rated_kva=25.0, top_oil_rise_rated=55.0, hotspot_differential=25.0,
    loss_ratio=4.0, oil_time_constant=3.0, winding_time_constant=0.08,
    replacement_cost=5000.0)

workdir = Path(tempfile.mkdtemp(prefix="txrisk_demo_"))
paths = synth_dataset(seed=42, services=10, start_date=dt.date(2014, 1, 1),
                      days=730, out_dir=workdir)
dataset = load_dataset(paths["weather"], paths["meter"], paths["calendar"])
model = train_model(dataset.records, dataset.profiles, k=6,
                    schema=default_schema(), seed=7, restarts=3)

# 1. Thresholds: scale each cluster's day shape until a limit binds.
print("loading thresholds by cluster (impact 1 = most restrictive)")
thresholds = cluster_thresholds(spec, model)
for t in sorted(thresholds, key=lambda t: t.impact_rank):
    print(f"  impact {t.impact_rank}: cluster {t.cluster_id} tolerates "
          f"peak {t.max_peak_load_pu:.2f} p.u. "
          f"(avg {t.max_avg_load_pu:.2f}, {t.binding_limit} binds)")
fleet_rule = min(t.max_peak_load_pu for t in thresholds)
print(f"conservative fleet rule: keep daily peaks below {fleet_rule:.2f} p.u.\n")

# 2. Service cap by temperature.
temp_study = max_services_by_temperature(spec, model, range(1, 41))
print(f"max services before a temperature limit: "
      f"{temp_study.max_services_by_temp}")
n = temp_study.max_services_by_temp
worst = max(temp_study.per_cluster_max_temps[(c.id, n)][0]
            for c in model.clusters)
worst_next = max(temp_study.per_cluster_max_temps[(c.id, n + 1)][0]
                 for c in model.clusters)
print(f"  at N={n} the worst cluster day peaks at {worst:.0f} degC; "
      f"N={n + 1} would reach {worst_next:.0f} degC (limit "
      f"{spec.top_oil_limit:g})\n")

# 3. Service cap by life-loss budget.
budget = 500.0
life_study = max_services_by_life(spec, model, range(1, 41), budget, years=2.0)
print(f"max services within a ${budget:g}/year loss budget: "
      f"{life_study.max_services_by_life}")
for n in range(life_study.max_services_by_life - 1,
               life_study.max_services_by_life + 3):
    el = life_study.economic_loss_by_n[n]
    marker = " <= budget" if el <= budget else ""
    print(f"  N={n:>2}: ${el:>10.1f}/year{marker}")
