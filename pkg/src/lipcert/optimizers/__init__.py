"""Query-efficient global maximisation with and without certificates."""

from .doo import ActiveLeafSet, cdoo_run, ncdoo_run
from .piyavskii import (
    CandidateSet,
    Envelope1D,
    candidates_for,
    grid_candidates,
    ps_run_1d,
    ps_run_grid,
    ring_candidates,
)

__all__ = [
    "ActiveLeafSet",
    "CandidateSet",
    "Envelope1D",
    "candidates_for",
    "cdoo_run",
    "grid_candidates",
    "ncdoo_run",
    "ps_run_1d",
    "ps_run_grid",
    "ring_candidates",
]
