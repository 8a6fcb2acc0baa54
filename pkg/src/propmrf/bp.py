"""Loopy belief propagation on the clause factor graph, and the proposals
built from its output.

The factor graph has one variable node per model variable and one factor per
clause (hard and soft).  A soft clause factor takes value exp(w) when the
clause is satisfied and 1 otherwise; a hard factor takes 1/0.  Messages are
updated synchronously with damping until the largest change drops below the
tolerance or the iteration cap is hit.  Hard-factor zeros stay exact zeros in
message space; a variable whose belief normalizes to zero mass indicates
contradictory hard constraints and raises an error naming it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .model import Clause, PropMRF
from .sat import unit_propagate

_CLAMP = 1e-9


class DegenerateBeliefError(RuntimeError):
    def __init__(self, var: int):
        super().__init__(
            f"variable {var} has an all-zero belief under the hard constraints"
        )
        self.var = var


@dataclass(frozen=True)
class BpConfig:
    max_iters: int = 1000
    damping: float = 0.5
    tol: float = 1e-8

    def __post_init__(self) -> None:
        if not 0.0 <= self.damping < 1.0:
            raise ValueError("damping must lie in [0, 1)")
        if self.max_iters < 1:
            raise ValueError("max_iters must be positive")


@dataclass
class BpMarginals:
    """Per-variable P(true) estimates plus per-factor joint beliefs.

    Factors are ordered hard-then-soft in declaration order; factor_tables[k]
    is a normalized array of shape (2,) * len(factor_scopes[k]) with the
    scope's variables ascending.
    """

    variable_p_true: np.ndarray
    factor_scopes: tuple[tuple[int, ...], ...]
    factor_tables: tuple[np.ndarray, ...]
    n_hard: int
    converged: bool
    iterations: int

    def soft_factor(self, i: int) -> tuple[tuple[int, ...], np.ndarray]:
        return self.factor_scopes[self.n_hard + i], self.factor_tables[self.n_hard + i]


def _clause_potential(clause: Clause, scope: tuple[int, ...], weight: float | None):
    """Linear-space table: exp(weight)/1 for soft, 1/0 for hard (weight None)."""
    size = len(scope)
    sat = np.zeros((2,) * size, dtype=bool)
    for lit in clause.literals:
        axis = scope.index(abs(lit))
        shape = [1] * size
        shape[axis] = 2
        sat |= np.array([lit < 0, lit > 0], dtype=bool).reshape(shape)
    if weight is None:
        return sat.astype(np.float64)
    return np.where(sat, math.exp(weight), 1.0)


def _axis_vector(vec: np.ndarray, axis: int, ndim: int) -> np.ndarray:
    shape = [1] * ndim
    shape[axis] = 2
    return vec.reshape(shape)


def run_bp(m: PropMRF, config: BpConfig = BpConfig()) -> BpMarginals:
    """Sum-product messages to (approximate) variable and factor marginals.

    Exact on factor graphs without cycles; a fixed point elsewhere.  Messages
    start uniform, so the run is deterministic.
    """
    scopes: list[tuple[int, ...]] = []
    tables: list[np.ndarray] = []
    for clause in m.hard:
        scope = tuple(sorted(clause.variables))
        scopes.append(scope)
        tables.append(_clause_potential(clause, scope, None))
    for sc in m.soft:
        scope = tuple(sorted(sc.clause.variables))
        scopes.append(scope)
        tables.append(_clause_potential(sc.clause, scope, sc.weight))

    neighbors: dict[int, list[int]] = {v: [] for v in range(1, m.num_vars + 1)}
    for fi, scope in enumerate(scopes):
        for v in scope:
            neighbors[v].append(fi)

    uniform = np.array([0.5, 0.5])
    f2v = {(fi, v): uniform.copy() for fi, scope in enumerate(scopes) for v in scope}
    v2f = {(v, fi): uniform.copy() for (fi, v) in f2v}
    d = config.damping

    converged = False
    iterations = 0
    for iterations in range(1, config.max_iters + 1):
        delta = 0.0
        for (v, fi), old in v2f.items():
            product = np.ones(2)
            for fj in neighbors[v]:
                if fj != fi:
                    product = product * f2v[(fj, v)]
            total = product.sum()
            if total <= 0.0:
                raise DegenerateBeliefError(v)
            new = d * old + (1.0 - d) * (product / total)
            delta = max(delta, float(np.max(np.abs(new - old))))
            v2f[(v, fi)] = new
        for (fi, v), old in f2v.items():
            scope = scopes[fi]
            tensor = tables[fi]
            for axis, u in enumerate(scope):
                if u != v:
                    tensor = tensor * _axis_vector(v2f[(u, fi)], axis, len(scope))
            keep = scope.index(v)
            message = np.apply_over_axes(
                np.sum, tensor, [a for a in range(len(scope)) if a != keep]
            ).reshape(2)
            total = message.sum()
            if total <= 0.0:
                raise DegenerateBeliefError(v)
            new = d * old + (1.0 - d) * (message / total)
            delta = max(delta, float(np.max(np.abs(new - old))))
            f2v[(fi, v)] = new
        if delta < config.tol:
            converged = True
            break

    p_true = np.full(m.num_vars, 0.5)
    for v in range(1, m.num_vars + 1):
        if not neighbors[v]:
            continue
        belief = np.ones(2)
        for fi in neighbors[v]:
            belief = belief * f2v[(fi, v)]
        total = belief.sum()
        if total <= 0.0:
            raise DegenerateBeliefError(v)
        p_true[v - 1] = belief[1] / total

    factor_tables: list[np.ndarray] = []
    for fi, scope in enumerate(scopes):
        tensor = tables[fi].copy()
        for axis, u in enumerate(scope):
            tensor = tensor * _axis_vector(v2f[(u, fi)], axis, len(scope))
        total = tensor.sum()
        if total <= 0.0:
            raise DegenerateBeliefError(scope[0])
        factor_tables.append(tensor / total)

    return BpMarginals(
        variable_p_true=p_true,
        factor_scopes=tuple(scopes),
        factor_tables=tuple(factor_tables),
        n_hard=len(m.hard),
        converged=converged,
        iterations=iterations,
    )


def variable_proposal(marginals: BpMarginals) -> np.ndarray:
    """Fully factorized proposal Q: per-variable Bernoulli(P(true)), clamped
    away from 0 and 1 so every assignment keeps positive probability."""
    return np.clip(marginals.variable_p_true, _CLAMP, 1.0 - _CLAMP)


def formula_proposal(
    m: PropMRF,
    marginals: BpMarginals,
    h_prefix: Sequence[tuple[int, bool]],
    i: int,
) -> float:
    """Probability that soft clause i is satisfied, given earlier clause values.

    The prefix lists (soft clause index, value) pairs already decided: a true
    clause joins the constraint set whole, a false one contributes the
    negations of its literals.  The constraint set is unit propagated; rows of
    clause i's factor belief that contradict a forced literal are excluded,
    and the result is the satisfied mass over the total restricted mass.
    Both masses zero (or a propagation conflict) yields 0.5; otherwise the
    value is clamped to keep both branches possible.
    """
    constraints: list[Clause] = list(m.hard)
    for j, value in h_prefix:
        clause = m.soft[j].clause
        if value:
            constraints.append(clause)
        else:
            constraints.extend(Clause([-l]) for l in clause.sorted_literals())
    result = unit_propagate(constraints)
    if result.conflict is not None:
        return 0.5
    forced = result.assignment

    scope, table = marginals.soft_factor(i)
    size = len(scope)
    consistent = np.ones((2,) * size, dtype=bool)
    for axis, v in enumerate(scope):
        if v in forced:
            pick = np.zeros(2, dtype=bool)
            pick[int(forced[v])] = True
            consistent &= _axis_vector(pick, axis, size)
    sat = np.zeros((2,) * size, dtype=bool)
    for lit in m.soft[i].clause.literals:
        axis = scope.index(abs(lit))
        shape = [1] * size
        shape[axis] = 2
        sat |= np.array([lit < 0, lit > 0], dtype=bool).reshape(shape)

    sat_mass = float(table[consistent & sat].sum())
    unsat_mass = float(table[consistent & ~sat].sum())
    total = sat_mass + unsat_mass
    if total <= 0.0:
        return 0.5
    return float(min(max(sat_mass / total, _CLAMP), 1.0 - _CLAMP))
