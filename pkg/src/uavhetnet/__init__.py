"""Dual-engine evaluator for a two-tier UAV/mmWave heterogeneous downlink:
closed-form stochastic-geometry expressions (association, coverage, spectrum
efficiency) validated against a Monte Carlo simulator."""

from .params import NetworkParams, DerivedConstants, ParameterError, build_derived
from .distances import TierLabel
from .association import AssociationProbs, assoc_all
from .coverage import CoverageResult, NomaThresholds, coverage_noma_tier, coverage_tbs
from .rate import RateCase, rate_noma_tier, rate_tbs
from .simulator import CampaignSummary, TrialRecords, run_campaign, simulate_records

__version__ = "0.1.0"

__all__ = [
    "NetworkParams", "DerivedConstants", "ParameterError", "build_derived",
    "TierLabel", "AssociationProbs", "assoc_all",
    "CoverageResult", "NomaThresholds", "coverage_noma_tier", "coverage_tbs",
    "RateCase", "rate_noma_tier", "rate_tbs",
    "CampaignSummary", "TrialRecords", "run_campaign", "simulate_records",
    "__version__",
]
