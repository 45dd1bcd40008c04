"""Koopman optimal search: detection law, detection probability, the optimal
coverage level and the two controller mismatch fields."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grid import ScalarField, require_same_grid


def detection_function(c):
    """Exponential saturation ``1 - exp(-c)``."""
    arr = np.asarray(c, dtype=float)
    if np.any(arr < 0):
        raise ValueError("coverage must be nonnegative")
    out = -np.expm1(-arr)
    return float(out) if np.ndim(c) == 0 else out


def detection_probability(p: ScalarField, c_sigma: ScalarField) -> float:
    require_same_grid(p, c_sigma)
    c = np.maximum(c_sigma.values, 0.0)
    return float(np.sum(p.values * -np.expm1(-c)) * p.grid.cell_area)


def default_floor(p: ScalarField) -> float:
    return 1e-12 / p.grid.cell_area


def _log_density(p: ScalarField, p_floor: float):
    support = p.values > p_floor
    logp = np.full(p.values.shape, -np.inf)
    logp[support] = np.log(p.values[support])
    return logp, support


@dataclass(frozen=True, eq=False)
class KoopmanPlan:
    alpha: float
    c_opt: ScalarField
    budget: float


def _level(l, cell_area, budget):
    """Root of ``sum max(l - alpha, 0) * dA = budget`` for descending ``l``.

    With the top m cells active the budget is ``dA * (S_m - m * alpha)``;
    ``G`` holds its value at each breakpoint ``alpha = l[m]``.
    """
    cum = np.cumsum(l)
    m = np.arange(1, len(l))
    G = cell_area * (cum[:-1] - m * l[1:])
    active = int(np.searchsorted(G, budget, side="left")) + 1
    return (cum[active - 1] - budget / cell_area) / active


def solve_alpha(p: ScalarField, total_budget: float, p_floor: float | None = None) -> KoopmanPlan:
    """Optimal coverage ``max(ln p - alpha, 0)`` spending ``total_budget`` agent-hours.

    The budget function is piecewise linear in ``alpha``, so the root is
    found exactly from the sorted log-density rather than by iteration.
    Cells with ``p <= p_floor`` are outside the support and get no coverage.
    """
    if total_budget < 0:
        raise ValueError("budget must be nonnegative")
    if p_floor is None:
        p_floor = default_floor(p)
    logp, support = _log_density(p, p_floor)
    if not support.any():
        return KoopmanPlan(-math.inf, p.with_values(np.zeros_like(p.values)), total_budget)
    l = np.sort(logp[support])[::-1]
    if total_budget == 0:
        alpha = float(l[0])
    else:
        alpha = float(_level(l, p.grid.cell_area, total_budget))
    c = np.where(support, np.maximum(logp - alpha, 0.0), 0.0)
    return KoopmanPlan(alpha, p.with_values(c), total_budget)


def budget_used(p: ScalarField, alpha: float, p_floor: float | None = None) -> float:
    if p_floor is None:
        p_floor = default_floor(p)
    logp, support = _log_density(p, p_floor)
    return float(np.sum(np.maximum(logp[support] - alpha, 0.0)) * p.grid.cell_area)


@dataclass(frozen=True, eq=False)
class MismatchField:
    field: ScalarField
    variant: str

    @property
    def values(self):
        return self.field.values


def mismatch_mdsmc(p: ScalarField, alpha: float, c_sigma: ScalarField,
                   p_floor: float | None = None) -> MismatchField:
    """``max(ln p - alpha - c_sigma, 0)``; zero off the support and where over-searched."""
    require_same_grid(p, c_sigma)
    if p_floor is None:
        p_floor = default_floor(p)
    logp, support = _log_density(p, p_floor)
    s = np.zeros_like(p.values)
    s[support] = np.maximum(logp[support] - alpha - c_sigma.values[support], 0.0)
    return MismatchField(p.with_values(s), "mdsmc")


def mismatch_dsmc(p: ScalarField, coverage: ScalarField, n_agents: float, t: float) -> MismatchField:
    """``p - coverage / (N t)``; with ``t == 0`` this is ``p``."""
    require_same_grid(p, coverage)
    if t < 0 or n_agents < 0:
        raise ValueError("N and t must be nonnegative")
    effort = n_agents * t
    if effort == 0:
        return MismatchField(p.with_values(p.values.copy()), "dsmc")
    return MismatchField(p.with_values(p.values - coverage.values / effort), "dsmc")
