"""Secrecy metrics for ratio-selected transmitters behind unreliable backhaul."""
from __future__ import annotations

from .analytics import (
    DOCUMENTED_SERIES_DEVIATIONS,
    MetricValue,
    SopSeriesVariant,
    ValidationRow,
    asymptote,
    closed_form,
    documented_series_deviation,
    nzr_closed_form,
    nzr_oracle,
    oracle,
    sop_closed_form,
    sop_oracle,
    validate_grid,
    validate_point,
    write_validation_report,
)
from .distributions import ExponentialGain, GatedGain, MaxRatioLaw, single_ratio_cdf
from .params import (
    KnowledgeMode,
    Metric,
    Scheme,
    SystemParams,
    db_to_linear,
    linear_to_db,
    secrecy_rate,
)
from .simulator import (
    ChannelRealization,
    MetricEstimate,
    SelectionOutcome,
    estimate_metric,
    outage_indicators,
    sample_realization,
    select,
    simulate_point,
    trial_outcomes,
    trial_stride,
    uniform_block,
)

__version__ = "0.1.0"

__all__ = [
    "ChannelRealization",
    "DOCUMENTED_SERIES_DEVIATIONS",
    "ExponentialGain",
    "GatedGain",
    "KnowledgeMode",
    "MaxRatioLaw",
    "Metric",
    "MetricEstimate",
    "MetricValue",
    "Scheme",
    "SelectionOutcome",
    "SopSeriesVariant",
    "SystemParams",
    "ValidationRow",
    "asymptote",
    "closed_form",
    "db_to_linear",
    "documented_series_deviation",
    "estimate_metric",
    "linear_to_db",
    "nzr_closed_form",
    "nzr_oracle",
    "oracle",
    "outage_indicators",
    "sample_realization",
    "secrecy_rate",
    "select",
    "simulate_point",
    "single_ratio_cdf",
    "sop_closed_form",
    "sop_oracle",
    "trial_outcomes",
    "trial_stride",
    "uniform_block",
    "validate_grid",
    "validate_point",
    "write_validation_report",
]
