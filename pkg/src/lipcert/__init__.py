"""Certified zeroth-order global optimization of Lipschitz functions.

The package maximises black-box functions with a known Lipschitz bound
and, unlike plain global optimizers, emits after every query a
certificate: a number guaranteed to dominate the recommendation's
distance from the true maximum.  Around that sit packing-based
estimators of how many queries certification must cost, and adversarial
audits that demonstrate the cost is real by constructing
indistinguishable objectives.
"""

from .adversary import (
    AuditReport,
    BumpPerturbation,
    WedgePair1D,
    audit_certified_run,
    audit_to_json,
    build_bump,
    build_wedges_1d,
    perturbed_pair,
    query_floor_constant,
    write_audit,
)
from .complexity import (
    ComplexityReport,
    LayerDecomposition,
    LemmaSuiteVerdict,
    SandwichVerdict,
    default_gamma,
    estimate_sc,
    estimate_snc,
    exact_covering_bruteforce,
    exact_packing_bruteforce,
    greedy_packing,
    integral_estimate,
    layer_decomposition,
    lemma_consistency_trials,
    report_to_json,
    sandwich_check,
    write_report,
)
from .core import (
    EUCLIDEAN,
    L1,
    NOT_REACHED,
    SUP,
    Ball,
    Box,
    CertificateCheck,
    ComplexityScale,
    Norm,
    RunTrace,
    TestFunction,
    certificate_validity,
    convert_lip_bound,
    diameter,
    domain_volume,
    enclosing_box,
    midpoint_grid,
    norm_ratio,
    uniform_sample,
    read_trace,
    recommendations_consistent,
    sigma_from_trace,
    trace_from_json,
    trace_to_json,
    write_trace,
    zeta_from_trace,
)
from .optimizers import (
    ActiveLeafSet,
    CandidateSet,
    Envelope1D,
    candidates_for,
    cdoo_run,
    grid_candidates,
    ncdoo_run,
    ps_run_1d,
    ps_run_grid,
    ring_candidates,
)
from .partition import (
    AssumptionCheck,
    BisectionPartition,
    CellKey,
    ROOT,
    bisection_setup,
    verify_assumptions,
)
from .cli import LABELS, default_algorithm, get_function, registry

__version__ = "0.1.0"

__all__ = [
    "ActiveLeafSet",
    "AssumptionCheck",
    "AuditReport",
    "Ball",
    "BisectionPartition",
    "Box",
    "BumpPerturbation",
    "CandidateSet",
    "CellKey",
    "CertificateCheck",
    "ComplexityReport",
    "ComplexityScale",
    "EUCLIDEAN",
    "Envelope1D",
    "L1",
    "LABELS",
    "LayerDecomposition",
    "LemmaSuiteVerdict",
    "NOT_REACHED",
    "Norm",
    "ROOT",
    "RunTrace",
    "SUP",
    "SandwichVerdict",
    "TestFunction",
    "WedgePair1D",
    "audit_certified_run",
    "audit_to_json",
    "bisection_setup",
    "build_bump",
    "build_wedges_1d",
    "candidates_for",
    "cdoo_run",
    "certificate_validity",
    "convert_lip_bound",
    "default_algorithm",
    "default_gamma",
    "diameter",
    "domain_volume",
    "enclosing_box",
    "estimate_sc",
    "estimate_snc",
    "exact_covering_bruteforce",
    "exact_packing_bruteforce",
    "get_function",
    "greedy_packing",
    "grid_candidates",
    "integral_estimate",
    "layer_decomposition",
    "lemma_consistency_trials",
    "midpoint_grid",
    "ncdoo_run",
    "norm_ratio",
    "uniform_sample",
    "perturbed_pair",
    "ps_run_1d",
    "ps_run_grid",
    "query_floor_constant",
    "read_trace",
    "recommendations_consistent",
    "registry",
    "report_to_json",
    "ring_candidates",
    "sandwich_check",
    "sigma_from_trace",
    "trace_from_json",
    "trace_to_json",
    "verify_assumptions",
    "write_audit",
    "write_report",
    "write_trace",
    "zeta_from_trace",
]
