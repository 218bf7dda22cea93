"""Run traces for query-by-query optimization with error certificates.

A trace records, for each query index n starting at 1: the query point,
its value, the recommendation after n queries, and (for certified
algorithms) a certificate bounding the recommendation's suboptimality.
Traces serialize to a stable JSON layout and support the two stopping
statistics: certified time (first certificate at or below a target) and
plain hitting time (first recommendation within the target of the true
maximum).
"""

from __future__ import annotations

import json
import os
import math
from dataclasses import dataclass, field
from typing import IO, Optional, Union

import numpy as np

NOT_REACHED = math.inf


@dataclass(frozen=True)
class RunTrace:
    """Immutable record of one optimization run.

    Attributes:
      algorithm: label of the algorithm that produced the run.
      function: label of the objective.
      lip_bound: Lipschitz bound the run was given.
      eps: accuracy target the run was asked to certify, or None for
        algorithms that do not certify.
      budget: query budget the run was given.
      seed: RNG seed if the algorithm used randomness, else None.
      queries: query points, shape ``(n, d)``.
      values: observed values, shape ``(n,)``.
      rec_points: recommendation after each query, shape ``(n, d)``.
      rec_values: value of each recommendation, shape ``(n,)``.
      certificates: claimed suboptimality bounds, shape ``(n,)``, or None
        for non-certified runs.  Certificates are nonnegative.
      warnings: free-form diagnostics attached by the producer.  Not
        serialized; the JSON layout carries only the fields above.
    """

    algorithm: str
    function: str
    lip_bound: float
    eps: Optional[float]
    budget: int
    seed: Optional[int]
    queries: np.ndarray
    values: np.ndarray
    rec_points: np.ndarray
    rec_values: np.ndarray
    certificates: Optional[np.ndarray]
    warnings: tuple[str, ...] = field(default=())

    def __post_init__(self) -> None:
        queries = np.atleast_2d(np.asarray(self.queries, dtype=float))
        values = np.asarray(self.values, dtype=float).reshape(-1)
        recs = np.atleast_2d(np.asarray(self.rec_points, dtype=float))
        rec_values = np.asarray(self.rec_values, dtype=float).reshape(-1)
        n = len(values)
        if n == 0:
            raise ValueError("a trace must contain at least one query")
        if queries.shape != recs.shape or queries.shape[0] != n or rec_values.shape[0] != n:
            raise ValueError("trace arrays must agree on the number of records")
        certificates = self.certificates
        if certificates is not None:
            certificates = np.asarray(certificates, dtype=float).reshape(-1)
            if certificates.shape[0] != n:
                raise ValueError("certificate array must have one entry per record")
            if certificates.min(initial=0.0) < 0:
                raise ValueError("certificates must be nonnegative")
            certificates.flags.writeable = False
        for arr in (queries, values, recs, rec_values):
            arr.flags.writeable = False
        object.__setattr__(self, "queries", queries)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "rec_points", recs)
        object.__setattr__(self, "rec_values", rec_values)
        object.__setattr__(self, "certificates", certificates)

    def __len__(self) -> int:
        return len(self.values)

    @property
    def dim(self) -> int:
        return self.queries.shape[1]


def recommendations_consistent(trace: RunTrace) -> bool:
    """Check the recommendation bookkeeping bitwise.

    The recommendation after n queries must be the best query so far with
    ties resolved toward the earliest index, and its stored value must
    equal the observed value exactly (no smoothing or recomputation).
    """
    running = np.maximum.accumulate(trace.values)
    if not np.array_equal(running, trace.rec_values):
        return False
    best = -math.inf
    best_idx = 0
    for i, v in enumerate(trace.values):
        if v > best:
            best = v
            best_idx = i
        if not np.array_equal(trace.rec_points[i], trace.queries[best_idx]):
            return False
    return True


def sigma_from_trace(trace: RunTrace, eps: Optional[float] = None) -> Union[int, float]:
    """First query count whose certificate is at or below ``eps``.

    Args:
      trace: a certified run.
      eps: accuracy target; defaults to the target stored in the trace.

    Returns:
      The 1-based count, or ``NOT_REACHED`` if no certificate qualifies.
    """
    if trace.certificates is None:
        raise ValueError("trace carries no certificates")
    if eps is None:
        eps = trace.eps
    if eps is None or not eps > 0:
        raise ValueError(f"accuracy target must be positive, got {eps}")
    hits = np.flatnonzero(trace.certificates <= eps)
    return int(hits[0]) + 1 if len(hits) else NOT_REACHED


def zeta_from_trace(
    trace: RunTrace, known_max: float, eps: Optional[float] = None
) -> Union[int, float]:
    """First query count whose recommendation is within ``eps`` of the max.

    Unlike the certified time this uses ground truth, so it is available
    for non-certified runs and is never larger than the certified time on
    a valid certified run.
    """
    if eps is None:
        eps = trace.eps
    if eps is None or not eps > 0:
        raise ValueError(f"accuracy target must be positive, got {eps}")
    if known_max is None or not math.isfinite(known_max):
        raise ValueError("a finite known maximum is required")
    hits = np.flatnonzero(known_max - trace.rec_values <= eps)
    return int(hits[0]) + 1 if len(hits) else NOT_REACHED


@dataclass(frozen=True)
class CertificateCheck:
    """Outcome of validating every certificate in a trace against ground
    truth.  ``max_excess`` is the largest amount by which a true gap
    exceeded its certificate; validity means it is within tolerance."""

    ok: bool
    first_violation: Optional[int]
    max_excess: float


def certificate_validity(
    trace: RunTrace, known_max: float, tol: float = 1e-9
) -> CertificateCheck:
    """Check that every certificate really bounds the recommendation gap.

    A certificate at index n is valid when
    ``known_max - rec_value_n <= certificate_n + tol``.
    """
    if trace.certificates is None:
        raise ValueError("trace carries no certificates")
    if known_max is None or not math.isfinite(known_max):
        raise ValueError("a finite known maximum is required")
    excess = (known_max - trace.rec_values) - trace.certificates
    worst = float(excess.max())
    bad = np.flatnonzero(excess > tol)
    return CertificateCheck(
        ok=len(bad) == 0,
        first_violation=int(bad[0]) + 1 if len(bad) else None,
        max_excess=worst,
    )


def _float_or_none(x: Optional[float]) -> Optional[float]:
    return None if x is None else float(x)


def trace_to_json(trace: RunTrace) -> str:
    """Serialize a trace to the stable JSON layout.

    The layout is a header with the run parameters followed by one record
    per query: index, query point, value, recommendation, its value, and
    the certificate (null for non-certified runs).  Output bytes depend
    only on the trace contents.
    """
    records = []
    for i in range(len(trace)):
        record = {
            "n": i + 1,
            "x": [float(v) for v in trace.queries[i]],
            "fx": float(trace.values[i]),
            "xstar": [float(v) for v in trace.rec_points[i]],
            "fxstar": float(trace.rec_values[i]),
        }
        if trace.certificates is not None:
            record["xi"] = float(trace.certificates[i])
        records.append(record)
    doc = {
        "header": {
            "algorithm": trace.algorithm,
            "function": trace.function,
            "L": float(trace.lip_bound),
            "eps": _float_or_none(trace.eps),
            "budget": int(trace.budget),
            "seed": trace.seed,
        },
        "records": records,
    }
    return json.dumps(doc, indent=2)


def trace_from_json(text: str) -> RunTrace:
    """Inverse of :func:`trace_to_json`; round-trips bitwise."""
    doc = json.loads(text)
    header = doc["header"]
    records = doc["records"]
    if not records:
        raise ValueError("trace document contains no records")
    queries = np.array([r["x"] for r in records], dtype=float)
    values = np.array([r["fx"] for r in records], dtype=float)
    recs = np.array([r["xstar"] for r in records], dtype=float)
    rec_values = np.array([r["fxstar"] for r in records], dtype=float)
    if any(r.get("xi") is None for r in records):
        certificates = None
    else:
        certificates = np.array([r["xi"] for r in records], dtype=float)
    return RunTrace(
        algorithm=header["algorithm"],
        function=header["function"],
        lip_bound=float(header["L"]),
        eps=_float_or_none(header["eps"]),
        budget=int(header["budget"]),
        seed=header["seed"],
        queries=queries,
        values=values,
        rec_points=recs,
        rec_values=rec_values,
        certificates=certificates,
    )


def write_trace(trace: RunTrace, fp: Union[str, os.PathLike, IO[str]]) -> None:
    text = trace_to_json(trace)
    if isinstance(fp, (str, os.PathLike)):
        with open(os.fspath(fp), "w") as handle:
            handle.write(text + "\n")
    else:
        fp.write(text + "\n")


def read_trace(fp: Union[str, os.PathLike, IO[str]]) -> RunTrace:
    if isinstance(fp, (str, os.PathLike)):
        with open(os.fspath(fp)) as handle:
            return trace_from_json(handle.read())
    return trace_from_json(fp.read())
