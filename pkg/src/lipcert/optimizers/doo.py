"""Optimistic tree search over a bisection partition, with and without
error certificates.

Both variants expand, at each round, the active leaf with the largest
optimistic value: observed value at the representative plus the Lipschitz
bound times the cell diameter bound.  The certified variant additionally
emits, after each query, a bound on how far the recommendation can be
from the maximum, and stops once that bound reaches the target accuracy.
The non-certified variant runs to its budget and emits no bounds.
"""

from __future__ import annotations

import heapq
from typing import Optional

import numpy as np

from ..core import RunTrace, TestFunction, convert_lip_bound
from ..partition import ROOT, BisectionPartition, CellKey, bisection_setup


class ActiveLeafSet:
    """Max-heap of active leaves keyed by optimistic value.

    Ties are broken toward smaller depth, then smaller index, so pop
    order is deterministic.  Each cell key may be pushed at most once.
    """

    def __init__(self) -> None:
        self._heap: list[tuple[float, int, int, np.ndarray, float]] = []

    def push(self, key: CellKey, rep: np.ndarray, value: float, optimistic: float) -> None:
        heapq.heappush(self._heap, (-optimistic, key.depth, key.index, rep, value))

    def pop(self) -> tuple[CellKey, np.ndarray, float, float]:
        neg_b, depth, index, rep, value = heapq.heappop(self._heap)
        return CellKey(depth, index), rep, value, -neg_b

    def __len__(self) -> int:
        return len(self._heap)

    def items(self) -> list[tuple[CellKey, float]]:
        """Current (key, optimistic value) pairs, for inspection only."""
        return [(CellKey(d, i), -nb) for nb, d, i, _, _ in self._heap]


def _resolve_setup(
    fn: TestFunction,
    partition: Optional[BisectionPartition],
    lip: Optional[float],
) -> tuple[BisectionPartition, float]:
    default_partition, required = bisection_setup(fn)
    if partition is None:
        partition = default_partition
    if partition.dim != fn.dim:
        raise ValueError("partition dimension does not match the objective")
    if lip is None:
        lip = required
    elif lip < required * (1 - 1e-12):
        raise ValueError(
            f"Lipschitz bound {lip} is below the bound {required} implied by "
            "the objective's metadata; certificates would be meaningless"
        )
    return partition, lip


def _tree_search(
    fn: TestFunction,
    partition: BisectionPartition,
    lip: float,
    eps: Optional[float],
    budget: int,
    algorithm: str,
) -> RunTrace:
    if not isinstance(budget, (int, np.integer)) or budget < 1:
        raise ValueError(f"budget must be a positive integer, got {budget}")
    certified = eps is not None
    if certified and not eps > 0:
        raise ValueError(f"accuracy target must be positive, got {eps}")

    rep0 = partition.representative(ROOT)
    v0 = float(fn(rep0))
    queries = [rep0]
    values = [v0]
    best_rep, best_val = rep0, v0
    rec_points = [rep0]
    rec_values = [v0]
    certs: Optional[list[float]] = None
    if certified:
        certs = [max(0.0, lip * partition.diam_bound)]

    leaves = ActiveLeafSet()
    leaves.push(ROOT, rep0, v0, v0 + lip * partition.diam_bound)
    depth_limit = getattr(partition, "max_depth", None)
    frozen_b = -np.inf
    done = certified and certs[0] <= eps
    while len(leaves) and len(values) < budget and not done:
        key, _, _, optimistic = leaves.pop()
        if depth_limit is not None and key.depth >= depth_limit:
            # Cell indices (and dyadic geometry) cannot resolve another
            # split.  The cell stays in the certificate envelope but is
            # never refined; the run ends early if only such cells remain.
            frozen_b = max(frozen_b, optimistic)
            continue
        kids = [k for k in partition.children(key) if partition.feasible(k)]
        if not kids:
            continue
        kid_reps = np.stack([partition.representative(k) for k in kids])
        kid_vals = np.asarray(fn(kid_reps), dtype=float)
        slack = lip * partition.diam_bound * partition.shrink ** (key.depth + 1)
        for kid, rep, val in zip(kids, kid_reps, kid_vals):
            val = float(val)
            queries.append(rep)
            values.append(val)
            if val > best_val:
                best_rep, best_val = rep, val
            rec_points.append(best_rep)
            rec_values.append(best_val)
            if certified:
                # The popped leaf had the largest optimistic value among
                # the still-splittable cells; together with the frozen
                # cells' envelope this bounds the maximum over the domain.
                certs.append(max(0.0, max(optimistic, frozen_b) - best_val))
            leaves.push(kid, rep, val, val + slack)
            if len(values) == budget:
                done = True
                break
        # The accuracy check sits at round granularity: a round whose
        # certificate passes the target is still recorded in full.
        if certified and not done and certs[-1] <= eps:
            done = True

    return RunTrace(
        algorithm=algorithm,
        function=fn.label,
        lip_bound=lip,
        eps=eps,
        budget=budget,
        seed=None,
        queries=np.asarray(queries),
        values=np.asarray(values),
        rec_points=np.asarray(rec_points),
        rec_values=np.asarray(rec_values),
        certificates=None if certs is None else np.asarray(certs),
    )


def cdoo_run(
    fn: TestFunction,
    eps: float,
    budget: int,
    partition: Optional[BisectionPartition] = None,
    lip: Optional[float] = None,
) -> RunTrace:
    """Certified tree search.

    Args:
      fn: objective to maximise.
      eps: accuracy to certify; the run stops once a certificate reaches
        it, or at the budget, whichever comes first.
      budget: maximum number of queries.
      partition: bisection partition to search over; defaults to the
        canonical partition of the objective's domain.
      lip: sup-norm Lipschitz bound; defaults to the objective's declared
        bound converted to the sup norm.  Passing a smaller value than
        the conversion implies is rejected.

    Returns:
      A trace whose certificates, for any truly valid bound, dominate the
      recommendation's suboptimality at every step.
    """
    partition, lip = _resolve_setup(fn, partition, lip)
    return _tree_search(fn, partition, lip, eps, budget, "cdoo")


def ncdoo_run(
    fn: TestFunction,
    budget: int,
    partition: Optional[BisectionPartition] = None,
    lip: Optional[float] = None,
) -> RunTrace:
    """Non-certified tree search: same expansion rule and query order as
    :func:`cdoo_run`, but no certificates and no accuracy stop; the run
    uses the whole budget."""
    partition, lip = _resolve_setup(fn, partition, lip)
    return _tree_search(fn, partition, lip, None, budget, "ncdoo")
