"""Per-service per-day feature vectors and the weighted mixed-type
dissimilarity used for clustering and estimation.

Numeric features are min-max normalized to [0,1]; orderly categorical
features are mapped into (0,1) by their status order; unordered
categorical features compare by match/mismatch. All three kinds carry a
per-feature weight.
"""

from __future__ import annotations

import datetime as dt
import math
import warnings
from dataclasses import dataclass, field

from .errors import (
    DegenerateFeatureWarning,
    EmptyDatasetError,
    OutOfRangeError,
    SchemaMismatchError,
)

KIND_NUMERIC = "numeric"
KIND_ORDINAL = "ordinal"
KIND_NOMINAL = "nominal"
_KINDS = (KIND_NUMERIC, KIND_ORDINAL, KIND_NOMINAL)


@dataclass(frozen=True)
class FeatureDef:
    """One feature: its name, kind, status list (categoricals), and weight."""

    name: str
    kind: str
    statuses: tuple[str, ...] = ()
    weight: float = 1.0

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown feature kind {self.kind!r}")
        if self.kind in (KIND_ORDINAL, KIND_NOMINAL) and not self.statuses:
            raise ValueError(f"{self.kind} feature {self.name!r} needs a status list")
        if self.weight < 0:
            raise ValueError(f"feature {self.name!r} weight must be >= 0")
        object.__setattr__(self, "statuses", tuple(self.statuses))


@dataclass(frozen=True)
class FeatureSchema:
    """Ordered feature definitions shared by every encoded vector."""

    features: tuple[FeatureDef, ...]

    def __post_init__(self):
        object.__setattr__(self, "features", tuple(self.features))
        names = [f.name for f in self.features]
        if len(set(names)) != len(names):
            raise ValueError("feature names must be unique")

    @property
    def numeric_names(self) -> tuple[str, ...]:
        return tuple(f.name for f in self.features if f.kind == KIND_NUMERIC)

    @property
    def ordinal_names(self) -> tuple[str, ...]:
        return tuple(f.name for f in self.features if f.kind == KIND_ORDINAL)

    @property
    def nominal_names(self) -> tuple[str, ...]:
        return tuple(f.name for f in self.features if f.kind == KIND_NOMINAL)

    @property
    def quantitative_names(self) -> tuple[str, ...]:
        """Numeric then ordinal names: the squared-difference features."""
        return self.numeric_names + self.ordinal_names

    @property
    def weights(self) -> dict[str, float]:
        return {f.name: f.weight for f in self.features}

    def feature(self, name: str) -> FeatureDef:
        for f in self.features:
            if f.name == name:
                return f
        raise KeyError(name)

    def quantitative_weights(self) -> tuple[float, ...]:
        w = self.weights
        return tuple(w[n] for n in self.quantitative_names)

    def nominal_weights(self) -> tuple[float, ...]:
        w = self.weights
        return tuple(w[n] for n in self.nominal_names)

    def to_jsonable(self) -> list[dict]:
        out = []
        for f in self.features:
            item = {"name": f.name, "kind": f.kind, "weight": f.weight}
            if f.statuses:
                item["statuses"] = list(f.statuses)
            out.append(item)
        return out

    @classmethod
    def from_jsonable(cls, items) -> "FeatureSchema":
        defs = []
        for item in items:
            defs.append(FeatureDef(
                name=item["name"],
                kind=item["kind"],
                statuses=tuple(item.get("statuses", ())),
                weight=float(item.get("weight", 1.0)),
            ))
        return cls(features=tuple(defs))


def default_schema(weights: dict[str, float] | None = None) -> FeatureSchema:
    """Default clustering schema: daily temperature extremes/mean, mean
    service load, and the weekday flag."""
    w = weights or {}
    return FeatureSchema(features=(
        FeatureDef("t_max_c", KIND_NUMERIC, weight=w.get("t_max_c", 1.0)),
        FeatureDef("t_min_c", KIND_NUMERIC, weight=w.get("t_min_c", 1.0)),
        FeatureDef("t_avg_c", KIND_NUMERIC, weight=w.get("t_avg_c", 1.0)),
        FeatureDef("l_avg_kva", KIND_NUMERIC, weight=w.get("l_avg_kva", 1.0)),
        FeatureDef("weekday", KIND_NOMINAL, statuses=("Y", "N"),
                   weight=w.get("weekday", 1.0)),
    ))


@dataclass(frozen=True)
class FeatureVector:
    """Raw per-service per-day record.

    ``numeric`` holds raw values (°C, kVA), ``ordinal`` holds values already
    encoded into (0,1), ``nominal`` holds status labels.
    """

    service_id: str
    date: dt.date
    numeric: dict[str, float] = field(default_factory=dict)
    ordinal: dict[str, float] = field(default_factory=dict)
    nominal: dict[str, str] = field(default_factory=dict)


@dataclass(frozen=True)
class NormalizationParams:
    """Observed per-feature Min/Max used for min-max normalization."""

    bounds: dict[str, tuple[float, float]]

    def to_jsonable(self) -> dict:
        return {name: [lo, hi] for name, (lo, hi) in self.bounds.items()}

    @classmethod
    def from_jsonable(cls, doc) -> "NormalizationParams":
        return cls(bounds={name: (float(lo), float(hi))
                           for name, (lo, hi) in doc.items()})


@dataclass(frozen=True)
class EncodedVector:
    """Schema-aligned vector in normalized space.

    ``quantitative`` follows schema numeric-then-ordinal order (NaN marks a
    missing feature); ``nominal`` follows schema nominal order (None marks a
    missing feature).
    """

    quantitative: tuple[float, ...]
    nominal: tuple[str | None, ...]


def encode_ordinal(status_order: int, status_count: int) -> float:
    """Map the i-th of N ordered statuses into (0,1): (i - 1/2) / N."""
    if status_count < 1:
        raise OutOfRangeError("status_count must be >= 1")
    if not 1 <= status_order <= status_count:
        raise OutOfRangeError(
            f"status order {status_order} outside [1, {status_count}]")
    return (status_order - 0.5) / status_count


def fit_normalization(dataset, schema: FeatureSchema) -> NormalizationParams:
    """Observe per-feature Min/Max for the schema's numeric features.

    Warns about degenerate (constant) features; their normalized value is
    pinned to 0 so they contribute nothing to distances.

    Raises:
        EmptyDatasetError: no records supplied.
        SchemaMismatchError: a record lacks a schema numeric feature.
    """
    records = list(dataset)
    if not records:
        raise EmptyDatasetError("cannot fit normalization on an empty dataset")
    bounds = {}
    for name in schema.numeric_names:
        try:
            values = [rec.numeric[name] for rec in records]
        except KeyError:
            raise SchemaMismatchError(
                f"record missing numeric feature {name!r}") from None
        lo, hi = min(values), max(values)
        if lo == hi:
            warnings.warn(
                f"feature {name!r} is constant ({lo}); it will not contribute "
                "to distances", DegenerateFeatureWarning, stacklevel=2)
        bounds[name] = (float(lo), float(hi))
    return NormalizationParams(bounds=bounds)


def normalize(value: float, params: NormalizationParams, feature: str) -> float:
    """Min-max normalize one raw value into [0,1], clamping out-of-range
    values; a degenerate feature (Min == Max) maps to 0."""
    try:
        lo, hi = params.bounds[feature]
    except KeyError:
        raise SchemaMismatchError(f"no normalization params for {feature!r}") from None
    if hi == lo:
        return 0.0
    x = (value - lo) / (hi - lo)
    return min(1.0, max(0.0, x))


def denormalize(value: float, params: NormalizationParams, feature: str) -> float:
    """Inverse of :func:`normalize` (no clamping)."""
    try:
        lo, hi = params.bounds[feature]
    except KeyError:
        raise SchemaMismatchError(f"no normalization params for {feature!r}") from None
    return lo + value * (hi - lo)


def encode(record: FeatureVector, schema: FeatureSchema,
           params: NormalizationParams, *, allow_missing: bool = False) -> EncodedVector:
    """Encode a raw record into normalized schema-aligned form.

    With ``allow_missing``, absent features become NaN/None placeholders
    (used by estimation queries that carry fewer features than the schema).
    """
    quantitative = []
    for name in schema.numeric_names:
        if name in record.numeric:
            quantitative.append(normalize(record.numeric[name], params, name))
        elif allow_missing:
            quantitative.append(math.nan)
        else:
            raise SchemaMismatchError(f"record missing numeric feature {name!r}")
    for name in schema.ordinal_names:
        if name in record.ordinal:
            quantitative.append(float(record.ordinal[name]))
        elif allow_missing:
            quantitative.append(math.nan)
        else:
            raise SchemaMismatchError(f"record missing ordinal feature {name!r}")
    nominal = []
    for name in schema.nominal_names:
        if name in record.nominal:
            label = record.nominal[name]
            if label not in schema.feature(name).statuses:
                raise SchemaMismatchError(
                    f"unknown status {label!r} for nominal feature {name!r}")
            nominal.append(label)
        elif allow_missing:
            nominal.append(None)
        else:
            raise SchemaMismatchError(f"record missing nominal feature {name!r}")
    return EncodedVector(quantitative=tuple(quantitative), nominal=tuple(nominal))


def distance(x: EncodedVector, y: EncodedVector, schema: FeatureSchema) -> float:
    """Weighted mixed-type dissimilarity between two encoded vectors.

    Numeric and ordinal features contribute weighted squared differences;
    nominal features contribute their weight on mismatch and 0 on match.
    Features marked missing (NaN/None) in either vector are skipped.
    """
    q_names = schema.quantitative_names
    n_names = schema.nominal_names
    if len(x.quantitative) != len(q_names) or len(y.quantitative) != len(q_names):
        raise SchemaMismatchError("quantitative components do not match schema")
    if len(x.nominal) != len(n_names) or len(y.nominal) != len(n_names):
        raise SchemaMismatchError("nominal components do not match schema")

    weights = schema.weights
    total = 0.0
    for name, xv, yv in zip(q_names, x.quantitative, y.quantitative):
        if math.isnan(xv) or math.isnan(yv):
            continue
        diff = xv - yv
        total += weights[name] * diff * diff
    for name, xl, yl in zip(n_names, x.nominal, y.nominal):
        if xl is None or yl is None:
            continue
        if xl != yl:
            total += weights[name]
    return total
