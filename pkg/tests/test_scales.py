"""Dyadic accuracy schedule and gap classification."""

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lipcert import ComplexityScale


def test_schedule_for_unit_scale():
    scale = ComplexityScale.from_accuracy(eps0=1.0, eps=0.25)
    assert scale.m_eps == 2
    assert scale.schedule == (1.0, 0.5, 0.25)
    assert scale.accuracy_for_class(0) == 0.25
    # class k >= 1 holds gaps in (schedule[k], schedule[k-1]]; its
    # matched packing accuracy is the class's lower edge
    assert scale.accuracy_for_class(1) == 0.5
    assert scale.accuracy_for_class(2) == 0.25


def test_m_eps_counts_halvings():
    assert ComplexityScale.from_accuracy(1.0, 1.0).m_eps == 0
    assert ComplexityScale.from_accuracy(1.0, 0.6).m_eps == 1
    assert ComplexityScale.from_accuracy(1.0, 0.5).m_eps == 1
    assert ComplexityScale.from_accuracy(1.0, 0.49).m_eps == 2
    assert ComplexityScale.from_accuracy(8.0, 1.0).m_eps == 3


def test_m_eps_exact_powers_are_not_overcounted():
    # eps0 / eps = 2^k computed in floats must give exactly k halvings
    for k in range(1, 40):
        scale = ComplexityScale.from_accuracy(1.0, 2.0**-k)
        assert scale.m_eps == k, k


def test_final_class_is_the_target_accuracy():
    scale = ComplexityScale.from_accuracy(1.0, 0.3)
    assert scale.m_eps == 2
    assert scale.schedule == (1.0, 0.5, 0.3)


def test_classify_layers():
    scale = ComplexityScale.from_accuracy(1.0, 0.25)
    gaps = np.array([0.0, 0.2, 0.25, 0.26, 0.5, 0.51, 0.9, 1.0])
    # class 0 collects everything within eps; class k>0 is the k-th
    # halving, larger gaps landing in lower-numbered classes
    labels = scale.classify(gaps)
    assert labels.tolist() == [0, 0, 0, 2, 2, 1, 1, 1]


def test_classify_rejects_gaps_beyond_trivial_scale():
    scale = ComplexityScale.from_accuracy(1.0, 0.25)
    with pytest.raises(ValueError):
        scale.classify(np.array([1.1]))
    # a hair above eps0 from rounding still classifies
    assert scale.classify(np.array([1.0 * (1 + 1e-12)])).tolist() == [1]


def test_invalid_inputs():
    with pytest.raises(ValueError):
        ComplexityScale.from_accuracy(0.0, 0.1)
    with pytest.raises(ValueError):
        ComplexityScale.from_accuracy(1.0, 0.0)
    with pytest.raises(ValueError):
        ComplexityScale.from_accuracy(1.0, 2.0)


@given(
    st.floats(min_value=1e-6, max_value=1e6, allow_nan=False),
    st.integers(min_value=0, max_value=30),
    st.floats(min_value=0.5, max_value=1.0, exclude_min=True),
)
@settings(deadline=None)
def test_schedule_invariants(eps0, k, frac):
    eps = eps0 * frac * 2.0**-k
    scale = ComplexityScale.from_accuracy(eps0, eps)
    sched = scale.schedule
    assert sched[0] == eps0
    assert sched[-1] == eps
    assert len(sched) == scale.m_eps + 1
    # strictly decreasing, each interior step an exact halving
    for a, b in zip(sched, sched[1:]):
        assert b < a
    for i in range(1, scale.m_eps):
        assert sched[i] == eps0 * 2.0**-i


@given(
    st.floats(min_value=1e-3, max_value=1e3, allow_nan=False),
    st.floats(min_value=1e-6, max_value=1.0, exclude_max=True),
    st.lists(st.floats(min_value=0.0, max_value=1.0), min_size=1, max_size=20),
)
@settings(deadline=None)
def test_classify_matches_interval_membership(eps0, ratio, fracs):
    eps = eps0 * ratio
    scale = ComplexityScale.from_accuracy(eps0, eps)
    gaps = np.asarray(fracs) * eps0
    labels = scale.classify(gaps)
    for gap, label in zip(gaps, labels):
        if label == 0:
            assert gap <= scale.accuracy_for_class(0) * (1 + 1e-9)
        else:
            hi = scale.schedule[label - 1]
            lo = scale.schedule[label]
            # half-open membership up to float tolerance at the edges
            assert gap <= hi * (1 + 1e-9)
            assert gap > lo * (1 - 1e-9)
