"""Objective wrapper pairing an evaluator with its certification metadata.

A test function carries the domain, the norm its regularity is stated in,
a Lipschitz bound the certification machinery may rely on, and optional
ground truth (exact Lipschitz constant, exact maximum) used by audits and
validity checks.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Optional, Union

import numpy as np

from .geometry import Ball, Box, Domain, Norm


@dataclass(frozen=True)
class TestFunction:
    """Deterministic objective with Lipschitz metadata.

    Attributes:
      label: short identifier used in traces, reports, and CSV rows.
      domain: box or ball the function is defined on.
      norm: norm in which the Lipschitz bounds are stated.
      lip_bound: bound the algorithms are allowed to use; must dominate
        the true constant for certificates to be meaningful.
      evaluator: vectorized callable mapping ``(n, d)`` to ``(n,)``.
        Evaluations must be deterministic and side-effect free.
      exact_lip: true Lipschitz constant when known, else None.  Audits
        require it to sit strictly below ``lip_bound``.
      known_max: exact maximum value when known, else None.
      argmax_note: human-readable description of where the maximum sits.
    """

    label: str
    domain: Domain
    norm: Norm
    lip_bound: float
    evaluator: Callable[[np.ndarray], np.ndarray]
    exact_lip: Optional[float] = None
    known_max: Optional[float] = None
    argmax_note: str = ""

    def __post_init__(self) -> None:
        if not isinstance(self.domain, (Box, Ball)):
            raise TypeError(f"unsupported domain type {type(self.domain).__name__}")
        if not self.lip_bound > 0:
            raise ValueError(f"Lipschitz bound must be positive, got {self.lip_bound}")
        if self.exact_lip is not None:
            if self.exact_lip < 0:
                raise ValueError("exact Lipschitz constant cannot be negative")
            if self.exact_lip > self.lip_bound * (1 + 1e-12):
                raise ValueError(
                    f"exact Lipschitz constant {self.exact_lip} exceeds the "
                    f"declared bound {self.lip_bound}"
                )

    @property
    def dim(self) -> int:
        return self.domain.dim

    def __call__(self, x: np.ndarray) -> Union[float, np.ndarray]:
        """Evaluate at a point ``(d,)``, a batch ``(n, d)``, or, for
        one-dimensional domains, a scalar or flat batch ``(n,)``."""
        x = np.asarray(x, dtype=float)
        if x.ndim == 0 and self.dim == 1:
            return float(self.evaluator(x.reshape(1, 1))[0])
        if x.ndim == 1:
            if x.shape[0] == self.dim:
                return float(self.evaluator(x[None, :])[0])
            if self.dim == 1:
                return np.asarray(self.evaluator(x[:, None]), dtype=float)
        elif x.ndim == 2 and x.shape[1] == self.dim:
            return np.asarray(self.evaluator(x), dtype=float)
        raise ValueError(
            f"expected shape ({self.dim},) or (n, {self.dim}), got {x.shape}"
        )

    def shifted(self, offset: float) -> "TestFunction":
        """Same function plus a constant; gaps and layer structure are
        unchanged, which the estimators' invariance tests rely on."""
        inner = self.evaluator
        return replace(
            self,
            label=f"{self.label}+{offset:g}",
            evaluator=lambda x, _inner=inner, _o=float(offset): _inner(x) + _o,
            known_max=None if self.known_max is None else self.known_max + offset,
        )
