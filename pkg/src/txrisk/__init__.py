"""Statistical overloading-risk assessment for residential oil-immersed
transformer fleets.

The pipeline pairs a 24-hour transformer thermal/aging simulation with
mixed-type weighted k-means clustering of multi-year residential service
operation data; cluster profiles drive loading thresholds, impact
rankings, maximum-service studies, economic loss figures, and
inverse-distance estimates for uninstrumented areas.
"""

from .aging import (
    NORMAL_LIFE_DAYS,
    AgingResult,
    accumulate_life_loss,
    aging_acceleration,
    day_aging,
    economic_loss,
    equivalent_aging,
)
from .clustering import (
    Cluster,
    ClusterModel,
    ClusterProfile,
    composition,
    extract_profiles,
    kmeans,
    load_model,
    month_cluster_matrix,
    save_model,
    train_model,
    update_centroid,
)
from .estimation import (
    EstimationResult,
    avg_load_from_energy,
    cluster_max_top_oil,
    estimate,
    estimate_day_temperature,
)
from .features import (
    EncodedVector,
    FeatureDef,
    FeatureSchema,
    FeatureVector,
    NormalizationParams,
    default_schema,
    distance,
    encode,
    encode_ordinal,
    fit_normalization,
    normalize,
)
from .ingest import Dataset, RawDayProfile, SynthConfig, load_dataset, synth_dataset
from .riskassess import (
    ServiceCountStudy,
    ThresholdResult,
    cluster_thresholds,
    loading_threshold,
    max_services_by_life,
    max_services_by_temperature,
    rank_impact,
)
from .thermal import (
    DayProfile,
    LimitVerdict,
    ThermalTrace,
    TransformerSpec,
    check_limits,
    exponential_step,
    load_transformer_spec,
    simulate_day,
    ultimate_hotspot_rise,
    ultimate_top_oil_rise,
)

__version__ = "0.1.0"
