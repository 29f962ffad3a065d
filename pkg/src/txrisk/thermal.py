"""Oil-immersed transformer thermal model.

Top-oil and winding hottest-spot temperatures for a 24-hour day are
computed with the IEEE C57.91 exponential-response loading equations
(ONAN exponents n = m = 0.8 by default) and a cyclic daily iteration:
the last hour's rise feeds back into the first hour until the whole
day reaches a steady repeating profile.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

from .errors import NonConvergenceError, ParseError

HOURS = 24

# Daily-cycle iteration controls: the sweep loop stops once no hourly rise
# moves more than CONVERGENCE_TOL between consecutive sweeps.
CONVERGENCE_TOL = 0.01  # °C
MAX_SWEEPS = 200

DEFAULT_EXPONENT_N = 0.8
DEFAULT_EXPONENT_M = 0.8
DEFAULT_TOP_OIL_LIMIT = 120.0  # °C
DEFAULT_HOTSPOT_LIMIT = 200.0  # °C


@dataclass(frozen=True)
class TransformerSpec:
    """Nameplate and thermal constants of one transformer.

    Attributes:
        rated_kva: apparent power rating, kVA.
        top_oil_rise_rated: top-oil rise over ambient at rated load, °C.
        hotspot_differential: rated hotspot rise over top-oil, °C.
        loss_ratio: rated load loss / no-load loss, dimensionless.
        oil_time_constant: oil thermal time constant, hours.
        winding_time_constant: winding thermal time constant, hours.
        exponent_n: top-oil loading exponent (0.8 for ONAN).
        exponent_m: winding loading exponent (0.8 for ONAN).
        top_oil_limit: top-oil operating limit, °C.
        hotspot_limit: hottest-spot operating limit, °C.
        replacement_cost: purchase + installation cost, currency units.
    """

    rated_kva: float
    top_oil_rise_rated: float
    hotspot_differential: float
    loss_ratio: float
    oil_time_constant: float
    winding_time_constant: float
    exponent_n: float = DEFAULT_EXPONENT_N
    exponent_m: float = DEFAULT_EXPONENT_M
    top_oil_limit: float = DEFAULT_TOP_OIL_LIMIT
    hotspot_limit: float = DEFAULT_HOTSPOT_LIMIT
    replacement_cost: float = 0.0

    def __post_init__(self):
        if self.rated_kva <= 0:
            raise ValueError("rated_kva must be > 0")
        if self.top_oil_rise_rated <= 0:
            raise ValueError("top_oil_rise_rated must be > 0")
        if self.hotspot_differential <= 0:
            raise ValueError("hotspot_differential must be > 0")
        if self.loss_ratio <= 0:
            raise ValueError("loss_ratio must be > 0")
        if self.oil_time_constant <= 0 or self.winding_time_constant <= 0:
            raise ValueError("time constants must be > 0")
        if not 0 < self.exponent_n <= 1 or not 0 < self.exponent_m <= 1:
            raise ValueError("exponents must lie in (0, 1]")
        if self.top_oil_limit >= self.hotspot_limit:
            raise ValueError("top_oil_limit must be below hotspot_limit")
        if self.replacement_cost < 0:
            raise ValueError("replacement_cost must be >= 0")


@dataclass(frozen=True)
class DayProfile:
    """Paired 24-hour ambient temperature (°C) and per-unit load sequences."""

    ambient: tuple[float, ...]
    load_pu: tuple[float, ...]

    def __post_init__(self):
        ambient = tuple(float(v) for v in self.ambient)
        load_pu = tuple(float(v) for v in self.load_pu)
        if len(ambient) != HOURS or len(load_pu) != HOURS:
            raise ValueError("ambient and load_pu must each have 24 entries")
        if any(k < 0 for k in load_pu):
            raise ValueError("load_pu entries must be >= 0")
        object.__setattr__(self, "ambient", ambient)
        object.__setattr__(self, "load_pu", load_pu)


@dataclass(frozen=True)
class ThermalTrace:
    """Converged 24-hour temperature trace.

    ``top_oil[h] = ambient[h] + top_oil_rise[h]`` and
    ``hotspot[h] = top_oil[h] + hotspot_rise[h]`` hold exactly;
    ``iterations`` counts daily-cycle sweeps until convergence.
    """

    top_oil: tuple[float, ...]
    hotspot: tuple[float, ...]
    top_oil_rise: tuple[float, ...]
    hotspot_rise: tuple[float, ...]
    iterations: int


@dataclass(frozen=True)
class LimitVerdict:
    """Outcome of checking a trace against the temperature limits."""

    within_limits: bool
    worst_top_oil: float
    worst_hotspot: float


def ultimate_top_oil_rise(spec: TransformerSpec, k_u: float) -> float:
    """Steady-state top-oil rise over ambient at load ratio ``k_u`` (p.u.)."""
    r = spec.loss_ratio
    return spec.top_oil_rise_rated * ((k_u * k_u * r + 1.0) / (r + 1.0)) ** spec.exponent_n


def ultimate_hotspot_rise(spec: TransformerSpec, k_u: float) -> float:
    """Steady-state hottest-spot rise over top-oil at load ratio ``k_u``."""
    return spec.hotspot_differential * k_u ** (2.0 * spec.exponent_m)


def exponential_step(initial_rise: float, ultimate_rise: float,
                     time_constant: float, dt: float = 1.0) -> float:
    """One exponential transient step from ``initial_rise`` toward ``ultimate_rise``.

    Shared by the top-oil and hottest-spot transients; ``dt`` and
    ``time_constant`` are in hours.
    """
    return (ultimate_rise - initial_rise) * (1.0 - math.exp(-dt / time_constant)) + initial_rise


def simulate_day(spec: TransformerSpec, profile: DayProfile,
                 initial_top_oil_rise: float = 0.0,
                 initial_hotspot_rise: float = 0.0) -> ThermalTrace:
    """Simulate one daily cycle until the 24-hour profile repeats steadily.

    Hour 1 starts from the given initial rises (0 °C by default); each
    sweep chains the exponential step through hours 1..24 and feeds the
    hour-24 rise back into hour 1. Sweeps repeat until no hourly rise
    (oil or winding) changes by more than ``CONVERGENCE_TOL``.

    Raises:
        NonConvergenceError: tolerance not met within ``MAX_SWEEPS`` sweeps.
    """
    ult_oil = [ultimate_top_oil_rise(spec, k) for k in profile.load_pu]
    ult_hot = [ultimate_hotspot_rise(spec, k) for k in profile.load_pu]
    alpha_oil = 1.0 - math.exp(-1.0 / spec.oil_time_constant)
    alpha_hot = 1.0 - math.exp(-1.0 / spec.winding_time_constant)

    oil = [0.0] * HOURS
    hot = [0.0] * HOURS
    seed_oil = initial_top_oil_rise
    seed_hot = initial_hotspot_rise

    for sweep in range(1, MAX_SWEEPS + 1):
        prev_oil = oil[:]
        prev_hot = hot[:]
        o, h = seed_oil, seed_hot
        for i in range(HOURS):
            o = o + (ult_oil[i] - o) * alpha_oil
            h = h + (ult_hot[i] - h) * alpha_hot
            oil[i] = o
            hot[i] = h
        seed_oil, seed_hot = oil[-1], hot[-1]

        if sweep > 1:
            delta = max(
                max(abs(a - b) for a, b in zip(oil, prev_oil)),
                max(abs(a - b) for a, b in zip(hot, prev_hot)),
            )
            if delta < CONVERGENCE_TOL:
                return _assemble(profile, oil, hot, sweep)

    raise NonConvergenceError(
        f"daily cycle did not converge within {MAX_SWEEPS} sweeps "
        f"(oil tau {spec.oil_time_constant} h, winding tau {spec.winding_time_constant} h)"
    )


def _assemble(profile: DayProfile, oil: list[float], hot: list[float],
              sweeps: int) -> ThermalTrace:
    top_oil = tuple(a + r for a, r in zip(profile.ambient, oil))
    hotspot = tuple(t + r for t, r in zip(top_oil, hot))
    return ThermalTrace(
        top_oil=top_oil,
        hotspot=hotspot,
        top_oil_rise=tuple(oil),
        hotspot_rise=tuple(hot),
        iterations=sweeps,
    )


def check_limits(spec: TransformerSpec, trace: ThermalTrace) -> LimitVerdict:
    """Check a converged trace against the top-oil and hottest-spot limits.

    Limits are inclusive: a trace exactly at a limit is within limits.
    """
    worst_oil = max(trace.top_oil)
    worst_hot = max(trace.hotspot)
    within = worst_oil <= spec.top_oil_limit and worst_hot <= spec.hotspot_limit
    return LimitVerdict(within_limits=within, worst_top_oil=worst_oil,
                        worst_hotspot=worst_hot)


# JSON spec-file field names, fixed interchange format.
_REQUIRED_SPEC_FIELDS = {
    "rated_kva": "rated_kva",
    "top_oil_rise_rated_c": "top_oil_rise_rated",
    "hotspot_differential_c": "hotspot_differential",
    "loss_ratio": "loss_ratio",
    "oil_time_constant_h": "oil_time_constant",
    "winding_time_constant_h": "winding_time_constant",
    "replacement_cost": "replacement_cost",
}
_OPTIONAL_SPEC_FIELDS = {
    "exponent_n": ("exponent_n", DEFAULT_EXPONENT_N),
    "exponent_m": ("exponent_m", DEFAULT_EXPONENT_M),
    "top_oil_limit_c": ("top_oil_limit", DEFAULT_TOP_OIL_LIMIT),
    "hotspot_limit_c": ("hotspot_limit", DEFAULT_HOTSPOT_LIMIT),
}


def load_transformer_spec(path) -> TransformerSpec:
    """Load a TransformerSpec from its JSON file format."""
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot read transformer spec: {exc}", path=path) from exc
    if not isinstance(raw, dict):
        raise ParseError("transformer spec must be a JSON object", path=path)

    kwargs = {}
    for key, attr in _REQUIRED_SPEC_FIELDS.items():
        if key not in raw:
            raise ParseError(f"missing required field {key!r}", path=path)
        kwargs[attr] = float(raw[key])
    for key, (attr, default) in _OPTIONAL_SPEC_FIELDS.items():
        kwargs[attr] = float(raw.get(key, default))
    try:
        return TransformerSpec(**kwargs)
    except ValueError as exc:
        raise ParseError(f"invalid transformer spec: {exc}", path=path) from exc


def save_transformer_spec(spec: TransformerSpec, path) -> None:
    """Write a TransformerSpec in its JSON file format."""
    doc = {
        "rated_kva": spec.rated_kva,
        "top_oil_rise_rated_c": spec.top_oil_rise_rated,
        "hotspot_differential_c": spec.hotspot_differential,
        "loss_ratio": spec.loss_ratio,
        "oil_time_constant_h": spec.oil_time_constant,
        "winding_time_constant_h": spec.winding_time_constant,
        "exponent_n": spec.exponent_n,
        "exponent_m": spec.exponent_m,
        "top_oil_limit_c": spec.top_oil_limit,
        "hotspot_limit_c": spec.hotspot_limit,
        "replacement_cost": spec.replacement_cost,
    }
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")
