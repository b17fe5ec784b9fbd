"""
Noncontextual Hidden-Variable Models
====================================

A noncontextual model assigns joint values to (Sigma, Sigma', Lambda,
Lambda') with a probability distribution over the sixteen sign patterns
(rows numbered 1..16, all signs -1 first, Lambda' varying fastest). The
four Hardy marginals are sums over fixed row sets, which makes

    P4 <= P1 + P2 + P3

a linear inequality whose maximum over the simplex sits on a vertex.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from typing import Dict, List, NamedTuple, Optional, Tuple

import numpy as np
from scipy.optimize import linprog

from .conf import lab_setting
from .errors import InvalidDistributionError, OptimizationError
from .hardy import (
    PARADOX_EVENT, ZERO_EVENTS, HardyEvent, JointProbabilityTable, ObservableKind, hardy_probabilities,
)

logger = logging.getLogger(__name__)


OBSERVABLE_ORDER = (
    ObservableKind.SIGMA,
    ObservableKind.SIGMA_PRIME,
    ObservableKind.LAMBDA,
    ObservableKind.LAMBDA_PRIME,
)
TABLE_I: Tuple[Tuple[int, int, int, int], ...] = tuple(itertools.product((-1, +1), repeat=4))
N_ROWS = len(TABLE_I)
SIMPLEX_TOLERANCE = 1e-12

# 1-based row numbers contributing to each Hardy marginal
MARGINAL_INDEX_SETS: Dict[HardyEvent, Tuple[int, ...]] = {
    HardyEvent.SIGMA_LAMBDA_PP: (11, 12, 15, 16),
    HardyEvent.SIGMAP_LAMBDA_MM: (1, 2, 9, 10),
    HardyEvent.SIGMA_LAMBDAP_MM: (1, 3, 5, 7),
    HardyEvent.SIGMAP_LAMBDAP_MM: (1, 3, 9, 11),
}


def rows_for_event(event: HardyEvent) -> Tuple[int, ...]:
    """Rows of the value table realizing the event's joint outcome."""
    i = OBSERVABLE_ORDER.index(event.obs_a)
    j = OBSERVABLE_ORDER.index(event.obs_b)
    return tuple(
        n for n, row in enumerate(TABLE_I, start=1)
        if row[i] == event.a and row[j] == event.b
    )


class HardyMarginals(JointProbabilityTable):
    """Hardy marginals induced by a hidden-variable model"""
    pass


@dataclass(frozen=True, eq=False)
class NCHVDistribution:
    """Probability vector over the sixteen value assignments"""
    p: np.ndarray

    def __post_init__(self):
        p = np.array(self.p, dtype=float).reshape(-1)
        if p.size != N_ROWS:
            raise InvalidDistributionError(f"Distribution needs {N_ROWS} entries, got {p.size}")
        if not np.all(np.isfinite(p)) or np.any(p < 0.0):
            raise InvalidDistributionError("Distribution entries must be finite and non-negative")
        total = float(p.sum())
        if abs(total - 1.0) > SIMPLEX_TOLERANCE:
            raise InvalidDistributionError(f"Distribution sums to {total!r}, expected 1")
        p.setflags(write=False)
        object.__setattr__(self, 'p', p)

    @classmethod
    def vertex(cls, n: int) -> 'NCHVDistribution':
        """Deterministic model concentrated on row n (1-based)."""
        if not 1 <= n <= N_ROWS:
            raise InvalidDistributionError(f"Row number must be in 1..{N_ROWS}, got {n}")
        p = np.zeros(N_ROWS)
        p[n - 1] = 1.0
        return cls(p)

    @classmethod
    def uniform(cls) -> 'NCHVDistribution':
        return cls(np.full(N_ROWS, 1.0 / N_ROWS))

    @classmethod
    def random(cls, rng: np.random.Generator) -> 'NCHVDistribution':
        p = rng.dirichlet(np.ones(N_ROWS))
        return cls(p / p.sum())

    @staticmethod
    def sample(rng: np.random.Generator, size: int) -> np.ndarray:
        """(size, 16) array of flat-Dirichlet distributions, unvalidated."""
        return rng.dirichlet(np.ones(N_ROWS), size=size)

    def mixture(self, other: 'NCHVDistribution', weight: float) -> 'NCHVDistribution':
        if not 0.0 <= weight <= 1.0:
            raise InvalidDistributionError(f"Mixture weight must be in [0, 1], got {weight!r}")
        p = (1.0 - weight) * self.p + weight * other.p
        return NCHVDistribution(p / p.sum())


def marginal_matrix() -> np.ndarray:
    """(4, 16) 0/1 matrix mapping a distribution to the Hardy marginals."""
    m = np.zeros((len(HardyEvent), N_ROWS))
    for k, event in enumerate(HardyEvent):
        m[k, [n - 1 for n in MARGINAL_INDEX_SETS[event]]] = 1.0
    return m


def gap_weights() -> np.ndarray:
    """Per-row contribution to P4 - P1 - P2 - P3."""
    m = marginal_matrix()
    events = list(HardyEvent)
    w = m[events.index(PARADOX_EVENT)].copy()
    for event in ZERO_EVENTS:
        w -= m[events.index(event)]
    return w


def marginals(d: NCHVDistribution) -> HardyMarginals:
    values = marginal_matrix() @ d.p
    return HardyMarginals(*[float(v) for v in values])


def inequality_gap(m: JointProbabilityTable) -> float:
    """P4 - (P1 + P2 + P3); positive values violate noncontextuality."""
    return m[PARADOX_EVENT] - sum(m[event] for event in ZERO_EVENTS)


def vertex_gaps() -> List[float]:
    return [inequality_gap(marginals(NCHVDistribution.vertex(n))) for n in range(1, N_ROWS + 1)]


class ModelBound(NamedTuple):
    max_gap: float
    argmax_vertex: int


def max_gap_over_models() -> ModelBound:
    """Maximum inequality gap over the simplex, found on its vertices."""
    gaps = vertex_gaps()
    best = int(np.argmax(gaps))
    logger.debug(f"Vertex gaps: {gaps}")
    return ModelBound(gaps[best], best + 1)


def max_gap_linprog() -> float:
    """Same maximum from a linear program over the simplex."""
    res = linprog(
        c=-gap_weights(),
        A_eq=np.ones((1, N_ROWS)),
        b_eq=[1.0],
        bounds=[(0.0, 1.0)] * N_ROWS,
        method='highs',
    )
    if not res.success:
        raise OptimizationError(f"Linear program failed: {res.message}")
    return float(-res.fun)


def p123_zero_implies_p4_zero(d: NCHVDistribution, tol: Optional[float] = None) -> bool:
    tol = lab_setting('HARDYLAB_ZERO_TOLERANCE', 1e-12) if tol is None else tol
    m = marginals(d)
    if any(m[event] > tol for event in ZERO_EVENTS):
        return True
    return m[PARADOX_EVENT] <= len(ZERO_EVENTS) * tol


def event_covered_structurally() -> bool:
    """Every row realizing P4 also realizes one of P1, P2, P3."""
    covered = set().union(*(MARGINAL_INDEX_SETS[event] for event in ZERO_EVENTS))
    return set(MARGINAL_INDEX_SETS[PARADOX_EVENT]) <= covered


def quantum_marginals(gamma: float, exploration: bool = False) -> HardyMarginals:
    table = hardy_probabilities(gamma, exploration)
    return HardyMarginals.from_mapping(table.as_dict())
