"""Decomposed Gaussian BIC over a fixed covariance matrix.

Local score of a node v with parent set P:

    n * ln(residual variance of v on P) + lambda * ln(n) * |P|

Lower is better.  Constants that do not depend on the graph are dropped;
they cancel in every comparison the search makes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import linalg


@dataclass(frozen=True)
class ScoreConfig:
    n: int
    lam: float = 2.0
    log_n: float = field(init=False)

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("need at least 2 samples")
        if self.lam <= 0:
            raise ValueError("penalty multiplier must be positive")
        object.__setattr__(self, "log_n", math.log(self.n))


def score_tolerance(value: float) -> float:
    """Strict-improvement tolerance; prevents float-noise cycling."""
    return 1e-9 * abs(value) + 1e-9


def improves(new: float, old: float) -> bool:
    return new < old - score_tolerance(old)


def local_score(v, parents, sigma: np.ndarray, cfg: ScoreConfig) -> float:
    parents = list(parents)
    if v in parents:
        raise ValueError("node cannot be its own parent")
    F = linalg.CholeskyFactor.from_subset(sigma, parents)
    cv = linalg.conditional_variance(sigma, F, v)
    return cfg.n * math.log(cv) + cfg.lam * cfg.log_n * len(parents)


def total_score(dag, sigma: np.ndarray, cfg: ScoreConfig) -> float:
    """Sum of local scores over the DAG's parent sets."""
    return sum(
        local_score(v, dag.parents[v], sigma, cfg) for v in range(dag.p)
    )
