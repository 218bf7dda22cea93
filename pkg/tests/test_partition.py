"""Bisection partition geometry and the assumption verifier."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lipcert import (
    EUCLIDEAN,
    ROOT,
    Ball,
    BisectionPartition,
    Box,
    CellKey,
    bisection_setup,
    verify_assumptions,
)


@pytest.fixture
def unit2():
    return BisectionPartition(Box(np.zeros(2), np.ones(2)))


def test_constants(unit2):
    assert unit2.dim == 2
    assert unit2.arity == 4
    assert unit2.shrink == 0.5
    assert unit2.diam_bound == 1.0
    assert unit2.separation == 0.5
    assert unit2.norm.kind == "sup"


def test_constants_anisotropic():
    part = BisectionPartition(Box(np.zeros(2), np.array([4.0, 1.0])))
    assert part.diam_bound == 4.0
    assert part.separation == 0.5


def test_root_cell(unit2):
    lower, upper = unit2.cell_bounds(ROOT)
    assert np.array_equal(lower, np.zeros(2))
    assert np.array_equal(upper, np.ones(2))
    assert np.array_equal(unit2.representative(ROOT), np.array([0.5, 0.5]))


def test_children_are_dimension_major(unit2):
    kids = unit2.children(ROOT)
    assert kids == [CellKey(1, 0), CellKey(1, 1), CellKey(1, 2), CellKey(1, 3)]
    # child code's most significant bit moves along dimension 0
    reps = [unit2.representative(k) for k in kids]
    assert np.array_equal(reps[0], np.array([0.25, 0.25]))
    assert np.array_equal(reps[1], np.array([0.25, 0.75]))
    assert np.array_equal(reps[2], np.array([0.75, 0.25]))
    assert np.array_equal(reps[3], np.array([0.75, 0.75]))


def test_child_bounds_partition_the_parent(unit2):
    parent_lower, parent_upper = unit2.cell_bounds(CellKey(1, 2))
    kids = unit2.children(CellKey(1, 2))
    vol = 0.0
    for kid in kids:
        lo, hi = unit2.cell_bounds(kid)
        assert np.all(lo >= parent_lower - 1e-15)
        assert np.all(hi <= parent_upper + 1e-15)
        vol += float(np.prod(hi - lo))
    assert vol == pytest.approx(float(np.prod(parent_upper - parent_lower)))


def test_representative_is_cell_center(unit2):
    key = CellKey(3, 17)
    lo, hi = unit2.cell_bounds(key)
    assert np.array_equal(unit2.representative(key), (lo + hi) / 2.0)


def test_locate_inverts_bounds(unit2):
    for depth in (0, 1, 2, 4):
        count = unit2.arity**depth
        for index in {0, 1 % count, count - 1}:
            key = CellKey(depth, index)
            rep = unit2.representative(key)
            assert unit2.locate(rep, depth) == key


def test_locate_upper_boundary_lands_in_last_cell(unit2):
    key = unit2.locate(np.array([1.0, 1.0]), 3)
    assert key == CellKey(3, unit2.arity**3 - 1)


def test_locate_rejects_outside_points(unit2):
    with pytest.raises(ValueError):
        unit2.locate(np.array([1.5, 0.5]), 2)


def test_index_bounds_checked(unit2):
    with pytest.raises(ValueError):
        unit2.cell_bounds(CellKey(1, 4))
    with pytest.raises(ValueError):
        unit2.cell_bounds(CellKey(-1, 0))


def test_depth_cap():
    part = BisectionPartition(Box(np.zeros(1), np.ones(1)))
    assert part.max_depth == 60
    part.cell_bounds(CellKey(60, 0))
    with pytest.raises(ValueError):
        part.children(CellKey(60, 0))
    part3 = BisectionPartition(Box(np.zeros(3), np.ones(3)))
    assert part3.max_depth == 20


@given(
    st.integers(min_value=1, max_value=3),
    st.integers(min_value=0, max_value=6),
    st.integers(min_value=0, max_value=10**6),
)
@settings(deadline=None)
def test_cells_nest_into_parents(d, depth, raw_index):
    part = BisectionPartition(Box(np.zeros(d), np.ones(d)))
    index = raw_index % part.arity**depth
    key = CellKey(depth, index)
    lo, hi = part.cell_bounds(key)
    assert np.all(hi - lo == pytest.approx(0.5**depth))
    if depth > 0:
        parent = CellKey(depth - 1, index // part.arity)
        plo, phi = part.cell_bounds(parent)
        assert np.all(lo >= plo - 1e-15)
        assert np.all(hi <= phi + 1e-15)
        assert key in part.children(parent)


def test_ball_restriction_feasibility():
    ball = Ball(np.zeros(2), 1.0, EUCLIDEAN)
    part = BisectionPartition(Box(np.full(2, -1.0), np.ones(2)), restrict_to=ball)
    assert part.feasible(ROOT)
    # depth-2 corner cell [-1,-0.5]^2 touches the ball only beyond its
    # nearest corner, which lies outside: sqrt(0.5) > ... it is feasible
    # since the corner (-0.5,-0.5) has norm sqrt(0.5) < 1
    assert part.feasible(part.locate(np.array([-0.75, -0.75]), 2))
    # depth-3 corner cell [-1,-0.75]^2 is fully outside the ball
    corner = part.locate(np.array([-0.9, -0.9]), 3)
    assert not part.feasible(corner)


def test_ball_restriction_moves_representative_inside():
    ball = Ball(np.zeros(2), 1.0, EUCLIDEAN)
    part = BisectionPartition(Box(np.full(2, -1.0), np.ones(2)), restrict_to=ball)
    key = part.locate(np.array([0.8, 0.8]), 2)  # cell [0.5,1]^2, center outside
    rep = part.representative(key)
    assert ball.contains(rep)
    lo, hi = part.cell_bounds(key)
    assert np.all(rep >= lo) and np.all(rep <= hi)


def test_ball_must_fit_in_box():
    with pytest.raises(ValueError):
        BisectionPartition(
            Box(np.zeros(2), np.ones(2)),
            restrict_to=Ball(np.zeros(2), 1.0, EUCLIDEAN),
        )


def test_bisection_setup_converts_the_bound():
    import lipcert

    cone = lipcert.get_function("cone-d2")
    part, lip = bisection_setup(cone)
    assert isinstance(part, BisectionPartition)
    assert part.restrict_to is cone.domain
    assert lip == pytest.approx(np.sqrt(2.0))

    tent = lipcert.get_function("tent-d1")
    part, lip = bisection_setup(tent)
    assert part.restrict_to is None
    assert lip == 1.0


def test_verify_assumptions_passes_on_boxes():
    for d, depth in ((1, 6), (2, 4), (3, 3)):
        part = BisectionPartition(Box(np.zeros(d), np.ones(d)))
        result = verify_assumptions(part, max_depth=depth)
        assert result.ok, result.violation
        assert result.cells_checked == sum(part.arity**h for h in range(depth + 1))
        assert result.pairs_checked > 0


def test_verify_assumptions_passes_on_shifted_anisotropic_box():
    part = BisectionPartition(Box(np.array([-2.0, 1.0]), np.array([1.0, 2.0])))
    result = verify_assumptions(part, max_depth=4)
    assert result.ok, result.violation


def test_verify_assumptions_detects_clipped_rep_collision():
    # Clipping representatives into a restriction ball can make a parent
    # and child share a representative, which breaks the separation
    # guarantee; the verifier must report it rather than pass.
    ball = Ball(np.full(2, 0.5), 0.5, EUCLIDEAN)
    part = BisectionPartition(Box(np.zeros(2), np.ones(2)), restrict_to=ball)
    result = verify_assumptions(part, max_depth=5)
    assert not result.ok
    assert result.violation["kind"] == "separation"
    assert result.violation["measured"] < result.violation["required"]


class ShrunkenRepPartition:
    """Box bisection whose representatives collapse toward the center.

    Same cell interface as the real partition, but representatives at
    depth >= 2 all sit at the domain center, violating separation.  Used
    to exercise the generic (non-vectorized) verification path.
    """

    def __init__(self, inner: BisectionPartition):
        self._inner = inner
        self.diam_bound = inner.diam_bound
        self.separation = inner.separation
        self.shrink = inner.shrink
        self.norm = inner.norm
        self.dim = inner.dim
        self.arity = inner.arity

    def cell_bounds(self, key):
        return self._inner.cell_bounds(key)

    def children(self, key):
        return self._inner.children(key)

    def feasible(self, key):
        return self._inner.feasible(key)

    def representative(self, key):
        if key.depth >= 2:
            lo, hi = self._inner.cell_bounds(ROOT)
            return (lo + hi) / 2.0
        return self._inner.representative(key)


def test_verify_assumptions_generic_path_flags_bad_reps():
    broken = ShrunkenRepPartition(BisectionPartition(Box(np.zeros(1), np.ones(1))))
    result = verify_assumptions(broken, max_depth=3)
    assert not result.ok
    kind = result.violation["kind"]
    assert kind in ("separation", "representative-outside-cell")


def test_verify_assumptions_generic_path_accepts_wrapped_good_partition():
    class PassThrough(ShrunkenRepPartition):
        def representative(self, key):
            return self._inner.representative(key)

    wrapped = PassThrough(BisectionPartition(Box(np.zeros(2), np.ones(2))))
    result = verify_assumptions(wrapped, max_depth=3)
    assert result.ok, result.violation


def test_verify_assumptions_is_deterministic():
    part = BisectionPartition(Box(np.zeros(2), np.ones(2)))
    a = verify_assumptions(part, max_depth=4, seed=5)
    b = verify_assumptions(part, max_depth=4, seed=5)
    assert (a.ok, a.cells_checked, a.pairs_checked) == (
        b.ok,
        b.cells_checked,
        b.pairs_checked,
    )


def test_verify_assumptions_rejects_negative_depth(unit2):
    with pytest.raises(ValueError):
        verify_assumptions(unit2, max_depth=-1)
