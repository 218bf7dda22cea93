"""Shared vocabulary: norms and domains, objectives, accuracy schedules,
and run traces with certificates."""

from .functions import TestFunction
from .geometry import (
    EUCLIDEAN,
    L1,
    NORM_KINDS,
    SUP,
    Ball,
    Box,
    Domain,
    Norm,
    convert_lip_bound,
    diameter,
    domain_volume,
    enclosing_box,
    midpoint_grid,
    norm_ratio,
    uniform_sample,
)
from .scales import ComplexityScale
from .trace import (
    NOT_REACHED,
    CertificateCheck,
    RunTrace,
    certificate_validity,
    read_trace,
    recommendations_consistent,
    sigma_from_trace,
    trace_from_json,
    trace_to_json,
    write_trace,
    zeta_from_trace,
)

__all__ = [
    "Ball",
    "Box",
    "CertificateCheck",
    "ComplexityScale",
    "Domain",
    "EUCLIDEAN",
    "L1",
    "NORM_KINDS",
    "NOT_REACHED",
    "Norm",
    "RunTrace",
    "SUP",
    "TestFunction",
    "certificate_validity",
    "convert_lip_bound",
    "diameter",
    "domain_volume",
    "enclosing_box",
    "midpoint_grid",
    "norm_ratio",
    "read_trace",
    "recommendations_consistent",
    "sigma_from_trace",
    "trace_from_json",
    "trace_to_json",
    "uniform_sample",
    "write_trace",
    "zeta_from_trace",
]
