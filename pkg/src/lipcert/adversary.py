"""Adversarial lower-bound audits of certified runs.

A certified stop is only meaningful if no function consistent with the
queries could still be badly suboptimal at the recommendation.  The
audit makes that concrete: it looks for a cone-shaped perturbation that
vanishes at every query the algorithm made (so the perturbed run is
query-for-query identical) yet moves the maximum enough that the
recommendation is provably far from optimal on the perturbed objective.
Finding one at the certified accuracy would disprove the certificate;
finding one only at finer accuracies shows the certified stopping time
was tight, not wasteful.
"""

from __future__ import annotations

import json
import os
import math
from dataclasses import dataclass, replace
from typing import IO, Callable, Optional, Union

import numpy as np

from .complexity import greedy_packing
from .core import (
    ComplexityScale,
    Norm,
    RunTrace,
    TestFunction,
    diameter,
    enclosing_box,
    midpoint_grid,
    sigma_from_trace,
)
from .optimizers import candidates_for, cdoo_run, ps_run_1d, ps_run_grid
from .partition import bisection_setup


@dataclass(frozen=True)
class BumpPerturbation:
    """Cone bump that is large at its center and zero at given distance.

    The bump takes value ``8 * eps_tilde`` at the center and decreases
    linearly with slope ``lip_bound - exact_lip`` until it hits zero at
    ``radius``; outside it is identically zero, bitwise.  Adding or
    subtracting it from a function with Lipschitz constant ``exact_lip``
    keeps the result within the bound ``lip_bound``.
    """

    center: np.ndarray
    eps_tilde: float
    lip_bound: float
    exact_lip: float
    norm: Norm

    def __post_init__(self) -> None:
        center = np.atleast_1d(np.asarray(self.center, dtype=float)).copy()
        center.flags.writeable = False
        object.__setattr__(self, "center", center)
        if not self.eps_tilde > 0:
            raise ValueError(f"bump accuracy must be positive, got {self.eps_tilde}")
        if not 0 <= self.exact_lip < self.lip_bound:
            raise ValueError(
                "the exact Lipschitz constant must sit strictly below the bound "
                "to leave headroom for the perturbation"
            )

    @property
    def slope(self) -> float:
        return self.lip_bound - self.exact_lip

    @property
    def peak(self) -> float:
        return 8.0 * self.eps_tilde

    @property
    def radius(self) -> float:
        """Distance at which the bump reaches zero."""
        return self.peak / self.slope

    @property
    def headroom_factor(self) -> float:
        """Scale-free size of the bump's support: the radius equals this
        factor times ``eps_tilde / (2 * lip_bound)``."""
        return 16.0 * self.lip_bound / self.slope

    def __call__(self, x: np.ndarray) -> Union[float, np.ndarray]:
        x = np.asarray(x, dtype=float)
        dist = self.norm.length(x - self.center)
        out = np.where(
            np.asarray(dist) <= self.radius,
            np.maximum(0.0, self.peak - self.slope * np.asarray(dist)),
            0.0,
        )
        return float(out) if np.ndim(out) == 0 else out


def build_bump(fn: TestFunction, center: np.ndarray, eps_tilde: float) -> BumpPerturbation:
    """Bump sized to the objective's Lipschitz headroom.

    Requires the exact Lipschitz constant to be known and strictly below
    the declared bound; the bump's slope uses up exactly the difference.
    """
    if fn.exact_lip is None:
        raise ValueError("building a bump needs exact Lipschitz metadata")
    return BumpPerturbation(
        center=np.asarray(center, dtype=float),
        eps_tilde=eps_tilde,
        lip_bound=fn.lip_bound,
        exact_lip=fn.exact_lip,
        norm=fn.norm,
    )


def perturbed_pair(
    fn: TestFunction, bump: BumpPerturbation
) -> tuple[TestFunction, TestFunction]:
    """The objective with the bump added and subtracted.

    Both variants keep the original declared bound, which is valid by
    the headroom construction.  The added variant's maximum is the
    larger of the original maximum and the bump's peak value at its
    center; that is exact whenever the original constant is at most half
    the bound, and is recorded only in that case.  The subtracted
    variant's maximum is not tracked.
    """
    inner = fn.evaluator

    def plus(x: np.ndarray, _f=inner, _g=bump) -> np.ndarray:
        return _f(x) + _g(x)

    def minus(x: np.ndarray, _f=inner, _g=bump) -> np.ndarray:
        return _f(x) - _g(x)

    plus_max = None
    if fn.known_max is not None and fn.exact_lip is not None:
        if fn.exact_lip <= fn.lip_bound / 2.0:
            center_val = float(fn(bump.center))
            plus_max = max(fn.known_max, center_val + bump.peak)
    fn_plus = replace(
        fn,
        label=fn.label + "+bump",
        evaluator=plus,
        exact_lip=None,
        known_max=plus_max,
        argmax_note="",
    )
    fn_minus = replace(
        fn,
        label=fn.label + "-bump",
        evaluator=minus,
        exact_lip=None,
        known_max=None,
        argmax_note="",
    )
    return fn_plus, fn_minus


@dataclass(frozen=True)
class WedgePair1D:
    """Upper and lower envelopes through a triple of interval points.

    Given strictly increasing points t0 < t1 < t2, the pair brackets
    every function that agrees with the base objective outside the
    triple's span: the upper wedge rises from ``f(t0)`` at the full
    Lipschitz rate over the shorter side of the triple and returns
    linearly to ``f(t2)``; the lower wedge mirrors it downward.  When
    the left side is the longer one the construction is reflected so
    that the steep leg always spans the shorter side.
    """

    triple: tuple[float, float, float]
    lip: float
    base: Callable[[np.ndarray], np.ndarray]
    anchor_low: float
    anchor_high: float
    mirrored: bool

    def _eval(self, x: np.ndarray, steep_sign: float) -> np.ndarray:
        t0, t1, t2 = self.triple
        x = np.asarray(x, dtype=float)
        f = np.asarray(self.base(x[:, None] if x.ndim == 1 else x), dtype=float)
        f0 = self.anchor_low
        f2 = self.anchor_high
        if not self.mirrored:
            knee = f0 + steep_sign * self.lip * (t1 - t0)
            steep = f0 + steep_sign * self.lip * (x - t0)
            ramp = knee + (x - t1) * (f2 - knee) / (t2 - t1)
            inside = np.where(x <= t1, steep, ramp)
        else:
            knee = f2 + steep_sign * self.lip * (t2 - t1)
            steep = f2 + steep_sign * self.lip * (t2 - x)
            ramp = f0 + (x - t0) * (knee - f0) / (t1 - t0)
            inside = np.where(x >= t1, steep, ramp)
        return np.where((x >= t0) & (x <= t2), inside, f)

    def upper(self, x: np.ndarray) -> Union[float, np.ndarray]:
        x = np.asarray(x, dtype=float)
        out = self._eval(np.atleast_1d(x), +1.0)
        return float(out[0]) if x.ndim == 0 else out

    def lower(self, x: np.ndarray) -> Union[float, np.ndarray]:
        x = np.asarray(x, dtype=float)
        out = self._eval(np.atleast_1d(x), -1.0)
        return float(out[0]) if x.ndim == 0 else out


def build_wedges_1d(
    fn: TestFunction, triple: tuple[float, float, float], lip: Optional[float] = None
) -> WedgePair1D:
    """Wedge envelopes for a strictly increasing triple of domain points.

    Args:
      fn: one-dimensional objective supplying the values at the triple's
        outer points.
      triple: three strictly increasing points; anything else raises.
      lip: slope of the steep leg; defaults to the declared bound.
    """
    if fn.dim != 1:
        raise ValueError("wedges are a one-dimensional construction")
    t0, t1, t2 = (float(t) for t in triple)
    if not t0 < t1 < t2:
        raise ValueError(f"triple must be strictly increasing, got {triple}")
    if lip is None:
        lip = fn.lip_bound
    mirrored = (t1 - t0) > (t2 - t1)
    return WedgePair1D(
        triple=(t0, t1, t2),
        lip=lip,
        base=fn.evaluator,
        anchor_low=float(fn(np.array([t0]))),
        anchor_high=float(fn(np.array([t2]))),
        mirrored=mirrored,
    )


def query_floor_constant(lip_ratio: float, dim: int) -> float:
    """Constant in the guaranteed query floor for certified runs.

    A certified run on a function whose exact constant is ``lip_ratio``
    times the bound must spend more than this constant times the
    certified complexity per schedule entry.  The constant is tiny; its
    point is the order of growth, not the numerical value.
    """
    if not 0 <= lip_ratio < 1:
        raise ValueError(f"Lipschitz ratio must lie in [0, 1), got {lip_ratio}")
    if dim < 1:
        raise ValueError(f"dimension must be positive, got {dim}")
    return 0.25 * (2.0**-7 * (1.0 - lip_ratio)) ** dim


@dataclass(frozen=True)
class AuditReport:
    """Outcome of an adversarial audit at one stopped run.

    ``case_fired`` tells which perturbation sign produced the witness:
    ``inside-ball`` when the recommendation sat close to the bump center
    (so subtracting the bump hurts it), ``outside-ball`` when it sat far
    (so adding the bump elsewhere hurts it), or ``inconclusive`` when no
    scale admitted two query-free bump sites.  ``coincidence`` records
    whether the perturbed reruns matched the original queries bitwise;
    ``regret_achieved`` is the proven suboptimality of the original
    recommendation on the perturbed objective.
    """

    algorithm: str
    function: str
    eps: float
    eps_tilde: Optional[float]
    headroom_factor: float
    center: Optional[np.ndarray]
    n: int
    case_fired: str
    coincidence: Optional[bool]
    regret_achieved: Optional[float]
    scales_tried: tuple[float, ...] = ()


def _runner(
    algorithm: str, fn: TestFunction, eps: float, budget: int
) -> Callable[[TestFunction, int], RunTrace]:
    if algorithm == "cdoo":
        partition, lip = bisection_setup(fn)

        def run(variant: TestFunction, steps: int) -> RunTrace:
            return cdoo_run(variant, eps, steps, partition=partition, lip=lip)

        return run
    if algorithm == "ps1d":

        def run(variant: TestFunction, steps: int) -> RunTrace:
            return ps_run_1d(variant, eps, steps)

        return run
    if algorithm == "psgrid":
        candidates = candidates_for(fn.domain, fn.lip_bound, eps, fn.norm)

        def run(variant: TestFunction, steps: int) -> RunTrace:
            return ps_run_grid(variant, eps, steps, candidates=candidates)

        return run
    raise ValueError(f"audit does not support algorithm {algorithm!r}")


def _min_distance_to(queries: np.ndarray, points: np.ndarray, norm: Norm) -> np.ndarray:
    out = np.full(len(points), math.inf)
    chunk = max(1, 2_000_000 // max(1, len(queries)))
    for start in range(0, len(points), chunk):
        block = points[start : start + chunk]
        dists = norm.length(block[:, None, :] - queries[None, :, :])
        out[start : start + chunk] = np.atleast_2d(dists).min(axis=1)
    return out


def audit_certified_run(
    fn: TestFunction,
    eps: float,
    algorithm: str = "cdoo",
    budget: int = 200_000,
    n_override: Optional[int] = None,
    extra_halvings: int = 12,
    grid_cap: int = 400_000,
) -> AuditReport:
    """Audit a certified run one query before it certified.

    Runs the algorithm to its certified stop, rewinds to ``n`` queries
    (one less than the stopping count unless overridden), and searches a
    ladder of accuracies for two bump sites that are near-optimal yet
    query-free.  If found, the corresponding perturbation is applied,
    the run is replayed on both signs to confirm bitwise coincidence,
    and the recommendation's proven regret on the adverse sign is
    reported.  The ladder starts at the certified accuracy, climbs the
    halving schedule, then descends below the target, since a correct
    certificate rules out witnesses at the target scale itself.

    The search is sound but not complete: a reported witness is a real
    lower bound, while ``inconclusive`` only means none was found on the
    grids tried.

    Args:
      fn: objective with exact maximum and Lipschitz metadata.
      eps: accuracy the run certifies.
      algorithm: ``cdoo``, ``ps1d``, or ``psgrid``.
      budget: budget for the initial certified run.
      n_override: audit after this many queries instead of one before
        the certified stop.
      extra_halvings: how far the ladder descends below the target.
      grid_cap: cap on the candidate grid per scale.
    """
    if fn.known_max is None:
        raise ValueError("auditing needs exact maximum metadata")
    if fn.exact_lip is None or not fn.exact_lip < fn.lip_bound:
        raise ValueError(
            "auditing needs an exact Lipschitz constant strictly below the bound"
        )
    run = _runner(algorithm, fn, eps, budget)
    base = run(fn, budget)
    sigma = sigma_from_trace(base, eps)
    if not math.isfinite(sigma):
        raise ValueError(
            "the run never certified the target accuracy within its budget; "
            "raise the budget or the accuracy"
        )
    n = int(sigma) - 1 if n_override is None else int(n_override)
    if not 1 <= n <= len(base):
        raise ValueError(f"audit point {n} outside the recorded run of {len(base)}")
    queries = base.queries[:n]
    rec_point = base.rec_points[n - 1]
    rec_value = float(base.rec_values[n - 1])

    norm = fn.norm
    slope = fn.lip_bound - fn.exact_lip
    headroom = 16.0 * fn.lip_bound / slope
    scale = ComplexityScale.from_accuracy(
        fn.lip_bound * diameter(fn.domain, norm), eps
    )
    ladder = list(reversed(scale.schedule))
    ladder += [eps * 0.5**k for k in range(1, extra_halvings + 1)]
    box = enclosing_box(fn.domain)
    tried: list[float] = []
    for eps_tilde in ladder:
        tried.append(eps_tilde)
        ball_radius = 8.0 * eps_tilde / slope
        separation = headroom * eps_tilde / fn.lip_bound
        step = ball_radius / 2.0
        while True:
            counts = np.maximum(1, np.ceil(box.edges / step))
            if float(np.prod(counts)) <= grid_cap:
                break
            step *= 1.5
        grid, _ = midpoint_grid(box, step, max_points=grid_cap * 2)
        inside = np.asarray(fn.domain.contains(grid))
        grid = grid[inside]
        if len(grid) == 0:
            continue
        gaps = fn.known_max - np.asarray(fn(grid), dtype=float)
        near_optimal = grid[gaps <= eps_tilde]
        if len(near_optimal) < 2:
            continue
        free = near_optimal[
            _min_distance_to(queries, near_optimal, norm) > ball_radius
        ]
        if len(free) < 2:
            continue
        packed = greedy_packing(free, separation, norm)
        if len(packed) < 2:
            continue
        center, witness = packed[0], packed[1]
        bump = build_bump(fn, center, eps_tilde)
        fn_plus, fn_minus = perturbed_pair(fn, bump)
        rec_dist = float(norm.length(rec_point - center))
        if rec_dist <= bump.radius / 2.0:
            case = "inside-ball"
            # Subtracting the bump pulls the recommendation down while
            # the witness site, outside the bump's support, stays put.
            regret = float(fn(witness)) - (rec_value - float(bump(rec_point)))
        else:
            case = "outside-ball"
            # Adding the bump lifts its center to near-certain optimality
            # while the recommendation gains at most half the peak.
            regret = (
                float(fn(center)) + bump.peak - (rec_value + float(bump(rec_point)))
            )
        replay_plus = run(fn_plus, n)
        replay_minus = run(fn_minus, n)
        coincidence = all(
            np.array_equal(replay.queries, queries)
            and np.array_equal(replay.values, base.values[:n])
            and np.array_equal(replay.rec_points, base.rec_points[:n])
            for replay in (replay_plus, replay_minus)
        )
        return AuditReport(
            algorithm=algorithm,
            function=fn.label,
            eps=eps,
            eps_tilde=eps_tilde,
            headroom_factor=headroom,
            center=center,
            n=n,
            case_fired=case,
            coincidence=coincidence,
            regret_achieved=regret,
            scales_tried=tuple(tried),
        )
    return AuditReport(
        algorithm=algorithm,
        function=fn.label,
        eps=eps,
        eps_tilde=None,
        headroom_factor=headroom,
        center=None,
        n=n,
        case_fired="inconclusive",
        coincidence=None,
        regret_achieved=None,
        scales_tried=tuple(tried),
    )


def audit_to_json(report: AuditReport) -> str:
    """Serialize an audit report to the stable JSON layout."""
    doc = {
        "algorithm": report.algorithm,
        "function": report.function,
        "eps": report.eps,
        "eps_tilde": report.eps_tilde,
        "K_adv": report.headroom_factor,
        "center": None if report.center is None else [float(v) for v in report.center],
        "n": report.n,
        "case_fired": report.case_fired,
        "coincidence": report.coincidence,
        "regret_achieved": report.regret_achieved,
    }
    return json.dumps(doc, indent=2)


def write_audit(report: AuditReport, fp: Union[str, os.PathLike, IO[str]]) -> None:
    text = audit_to_json(report)
    if isinstance(fp, (str, os.PathLike)):
        with open(os.fspath(fp), "w") as handle:
            handle.write(text + "\n")
    else:
        fp.write(text + "\n")
