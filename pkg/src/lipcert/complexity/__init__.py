"""Packing-based complexity estimation and its consistency checks."""

from .layers import (
    ComplexityReport,
    LayerDecomposition,
    SandwichVerdict,
    default_gamma,
    estimate_sc,
    estimate_snc,
    integral_estimate,
    layer_decomposition,
    report_to_json,
    sandwich_check,
    write_report,
)
from .packing import (
    LemmaSuiteVerdict,
    exact_covering_bruteforce,
    exact_packing_bruteforce,
    greedy_packing,
    lemma_consistency_trials,
)

__all__ = [
    "ComplexityReport",
    "LayerDecomposition",
    "LemmaSuiteVerdict",
    "SandwichVerdict",
    "default_gamma",
    "estimate_sc",
    "estimate_snc",
    "exact_covering_bruteforce",
    "exact_packing_bruteforce",
    "greedy_packing",
    "integral_estimate",
    "layer_decomposition",
    "lemma_consistency_trials",
    "report_to_json",
    "sandwich_check",
    "write_report",
]
