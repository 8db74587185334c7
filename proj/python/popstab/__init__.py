"""Population stability metrics for credit scorecards.

Thin wrapper around the compiled extension; every public name lives in
``popstab._core``.
"""

from popstab._core import (  # noqa: F401
    AttributeConfig,
    Band,
    GroupedCounts,
    LogisticFit,
    McConfig,
    McResult,
    Metric,
    MetricOutcome,
    PdGrouping,
    PopulationRole,
    ProportionVector,
    RawSamplePair,
    ScenarioConfig,
    ScorecardModel,
    SimulatedPopulation,
    SnapshotPair,
    StabilityError,
    WoeTable,
    __version__,
    builtin_scenarios,
    critical_value,
    dpv,
    effect_sizes,
    fit_logistic,
    gamma,
    iv,
    ks,
    mean_pd_shift,
    model_from_json,
    overlap,
    p_value,
    pai,
    pd_groups,
    predict_pd,
    psi,
    sample_null_proportions,
    scenario_from_json,
    simulate,
    snapshot,
    woe,
)
