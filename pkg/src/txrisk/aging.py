"""Insulation aging: hourly acceleration factors, daily equivalent aging,
accumulated life loss, and the equivalent yearly economic loss."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import KeyMismatchError

# Reference hottest-spot temperature at which insulation ages at unit rate.
REFERENCE_HOTSPOT_K = 383.0  # 110 °C
AGING_RATE_CONSTANT = 15000.0
# Normal insulation life required by the loading standard (20.55 years).
NORMAL_LIFE_DAYS = 7500.0


@dataclass(frozen=True)
class AgingResult:
    """Aging summary for one simulated day extended over a window.

    ``daily_feqa`` is the effective aging in days per calendar day;
    ``economic_loss`` is currency per year.
    """

    hourly_faa: tuple[float, ...]
    daily_feqa: float
    life_loss_days: float
    annual_loss_days: float
    economic_loss: float


def aging_acceleration(hotspot_c: float) -> float:
    """Aging acceleration factor at a hottest-spot temperature in °C.

    Equals 1 at 110 °C and grows exponentially with temperature.
    """
    return math.exp(AGING_RATE_CONSTANT / REFERENCE_HOTSPOT_K
                    - AGING_RATE_CONSTANT / (hotspot_c + 273.0))


def equivalent_aging(hourly_faa) -> float:
    """Daily equivalent aging factor: the mean of the 24 hourly factors."""
    factors = list(hourly_faa)
    if len(factors) != 24:
        raise ValueError("equivalent_aging expects exactly 24 hourly factors")
    if any(f <= 0 for f in factors):
        raise ValueError("hourly aging factors must be > 0")
    return sum(factors) / 24.0


def accumulate_life_loss(per_cluster_daily_loss: dict, member_day_counts: dict,
                         years: float) -> tuple[float, float]:
    """Accumulate per-cluster daily life loss over an evaluation window.

    Args:
        per_cluster_daily_loss: cluster id -> life loss in days per day.
        member_day_counts: cluster id -> number of member days in the window.
        years: window length in years.

    Returns:
        (total life loss in days, average annual life loss in days/year).

    Raises:
        KeyMismatchError: the two maps disagree on their cluster ids.
    """
    if years <= 0:
        raise ValueError("years must be > 0")
    if set(per_cluster_daily_loss) != set(member_day_counts):
        raise KeyMismatchError(
            "daily-loss and day-count maps cover different clusters: "
            f"{sorted(per_cluster_daily_loss)} vs {sorted(member_day_counts)}"
        )
    total = sum(per_cluster_daily_loss[c] * member_day_counts[c]
                for c in per_cluster_daily_loss)
    return total, total / years


def economic_loss(annual_loss_days: float, replacement_cost: float) -> float:
    """Equivalent economic loss in currency per year.

    One full normal life (``NORMAL_LIFE_DAYS``) consumed per year costs
    one replacement transformer per year.
    """
    if annual_loss_days < 0:
        raise ValueError("annual_loss_days must be >= 0")
    if replacement_cost < 0:
        raise ValueError("replacement_cost must be >= 0")
    return annual_loss_days / NORMAL_LIFE_DAYS * replacement_cost


def day_aging(hotspot_trace, years: float = 1.0, day_count: float = 365.0,
              replacement_cost: float = 0.0) -> AgingResult:
    """Full aging summary for one simulated day applied over a window.

    ``day_count`` days of operation under this profile are spread over
    ``years`` years; life loss per operated day equals the daily
    equivalent aging factor.
    """
    factors = tuple(aging_acceleration(t) for t in hotspot_trace)
    feqa = equivalent_aging(factors)
    total = feqa * day_count
    annual = total / years
    return AgingResult(
        hourly_faa=factors,
        daily_feqa=feqa,
        life_loss_days=total,
        annual_loss_days=annual,
        economic_loss=economic_loss(annual, replacement_cost),
    )
