"""Benchmark objectives with exact metadata.

Every entry's maximum, maximizer set, and Lipschitz constant are exact
dyadic values, so traces and estimates computed against them are
reproducible bitwise and gaps near the maximum are exact zeros rather
than rounding noise.  All functions scale linearly with the bound
parameter: values, exact constants, and maxima are proportional to it.
"""

from __future__ import annotations

import numpy as np

from ..core import EUCLIDEAN, SUP, Ball, Box, TestFunction

LABELS = (
    "constant-d1",
    "tent-d1",
    "halftent-d1",
    "slope-d1",
    "multibump-d1",
    "constant-d2",
    "cone-d2",
    "multibump-d2",
)


def _constant(lip: float, dim: int) -> TestFunction:
    return TestFunction(
        label=f"constant-d{dim}",
        domain=Box(np.zeros(dim), np.ones(dim)),
        norm=SUP,
        lip_bound=lip,
        evaluator=lambda x: np.zeros(len(x)),
        exact_lip=0.0,
        known_max=0.0,
        argmax_note="every point of the cube",
    )


def _tent(lip: float) -> TestFunction:
    return TestFunction(
        label="tent-d1",
        domain=Box(np.zeros(1), np.ones(1)),
        norm=SUP,
        lip_bound=lip,
        evaluator=lambda x, L=lip: -L * np.abs(x[:, 0] - 0.5),
        exact_lip=lip,
        known_max=0.0,
        argmax_note="the single point 1/2",
    )


def _halftent(lip: float) -> TestFunction:
    # Trapezoid at half the declared slope: flat top on [3/8, 5/8],
    # shoulders falling at rate lip / 2.  The headroom between the true
    # constant and the bound is what the adversarial audit exploits.
    return TestFunction(
        label="halftent-d1",
        domain=Box(np.zeros(1), np.ones(1)),
        norm=SUP,
        lip_bound=lip,
        evaluator=lambda x, L=lip: -(L / 2.0)
        * np.maximum(np.abs(x[:, 0] - 0.5) - 0.125, 0.0),
        exact_lip=lip / 2.0,
        known_max=0.0,
        argmax_note="the plateau [3/8, 5/8]",
    )


def _slope(lip: float) -> TestFunction:
    # Linear decrease at the full rate; its sandwich integral has the
    # closed form log((eps0 + eps) / eps) / lip in one dimension.
    return TestFunction(
        label="slope-d1",
        domain=Box(np.zeros(1), np.ones(1)),
        norm=SUP,
        lip_bound=lip,
        evaluator=lambda x, L=lip: -L * x[:, 0],
        exact_lip=lip,
        known_max=0.0,
        argmax_note="the left endpoint 0",
    )


def _multibump_1d(lip: float) -> TestFunction:
    centers = np.array([7.0 / 64.0, 0.5, 57.0 / 64.0])
    widths = np.array([1.0 / 16.0, 1.0 / 32.0, 1.0 / 32.0])
    heights = np.array([0.0, -1.0 / 128.0, -1.0 / 64.0])

    def evaluate(x: np.ndarray, L: float = lip) -> np.ndarray:
        dist = np.abs(x[:, 0][:, None] - centers)
        plateaus = L * heights - (L / 2.0) * np.maximum(dist - widths, 0.0)
        return plateaus.max(axis=1)

    return TestFunction(
        label="multibump-d1",
        domain=Box(np.zeros(1), np.ones(1)),
        norm=SUP,
        lip_bound=lip,
        evaluator=evaluate,
        exact_lip=lip / 2.0,
        known_max=0.0,
        argmax_note="the plateau [3/64, 11/64] of the tallest bump",
    )


def _cone_2d(lip: float) -> TestFunction:
    return TestFunction(
        label="cone-d2",
        domain=Ball(np.zeros(2), 1.0, EUCLIDEAN),
        norm=EUCLIDEAN,
        lip_bound=lip,
        evaluator=lambda x, L=lip: L * np.sqrt((x * x).sum(axis=1)),
        exact_lip=lip,
        known_max=lip,
        argmax_note="the whole boundary circle",
    )


def _multibump_2d(lip: float) -> TestFunction:
    centers = np.array([[5.0 / 16.0, 5.0 / 16.0], [0.75, 0.25], [0.25, 0.75]])
    widths = np.array([3.0 / 16.0, 1.0 / 32.0, 1.0 / 32.0])
    heights = np.array([0.0, -1.0 / 128.0, -1.0 / 64.0])

    def evaluate(x: np.ndarray, L: float = lip) -> np.ndarray:
        dist = np.abs(x[:, None, :] - centers).max(axis=2)
        plateaus = L * heights - (L / 2.0) * np.maximum(dist - widths, 0.0)
        return plateaus.max(axis=1)

    return TestFunction(
        label="multibump-d2",
        domain=Box(np.zeros(2), np.ones(2)),
        norm=SUP,
        lip_bound=lip,
        evaluator=evaluate,
        exact_lip=lip / 2.0,
        known_max=0.0,
        argmax_note="the square plateau [1/8, 1/2]^2 of the tallest bump",
    )


def registry(lip: float = 1.0) -> tuple[TestFunction, ...]:
    """All benchmark objectives at a common Lipschitz bound."""
    if not lip > 0:
        raise ValueError(f"Lipschitz bound must be positive, got {lip}")
    return (
        _constant(lip, 1),
        _tent(lip),
        _halftent(lip),
        _slope(lip),
        _multibump_1d(lip),
        _constant(lip, 2),
        _cone_2d(lip),
        _multibump_2d(lip),
    )


def get_function(label: str, lip: float = 1.0) -> TestFunction:
    """Look one benchmark up by label."""
    for fn in registry(lip):
        if fn.label == label:
            return fn
    raise ValueError(f"unknown function {label!r}; known labels: {', '.join(LABELS)}")


def default_algorithm(fn: TestFunction) -> str:
    """Certified algorithm used when none is requested: candidate-set
    sawtooth on ball domains, certified tree search elsewhere."""
    return "psgrid" if isinstance(fn.domain, Ball) else "cdoo"
