"""Bucket elimination over dense log-space factors.

Each clause becomes one factor over its variables: a soft clause takes value
w when satisfied and 0 otherwise (natural-log potentials), a hard clause 0
when satisfied and -inf otherwise.  Factors are placed in the bucket of their
earliest variable in the elimination order; processing a bucket multiplies
its factors (log addition), sums the bucket variable out with log-sum-exp,
and forwards the result.  A variable whose bucket is empty when reached is
unconstrained and contributes ln 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .graph import minfill_width
from .model import Clause, PropMRF

LN2 = math.log(2.0)


class VeWidthError(RuntimeError):
    """An intermediate table would exceed the width bound."""

    def __init__(self, width: int, bound: int):
        super().__init__(f"factor width {width} exceeds bound {bound}")
        self.width = width
        self.bound = bound


@dataclass
class Factor:
    scope: tuple[int, ...]  # ascending variable indices
    table: np.ndarray  # shape (2,) * len(scope), natural-log values


def clause_to_factor(clause: Clause, log_sat: float, log_unsat: float) -> Factor:
    scope = tuple(sorted(clause.variables))
    size = len(scope)
    sat = np.zeros((2,) * size, dtype=bool)
    for lit in clause.literals:
        axis = scope.index(abs(lit))
        shape = [1] * size
        shape[axis] = 2
        sat |= np.array([lit < 0, lit > 0], dtype=bool).reshape(shape)
    table = np.where(sat, np.float64(log_sat), np.float64(log_unsat))
    return Factor(scope, table)


def clauses_to_factors(m: PropMRF, max_width: int = 20) -> list[Factor]:
    """One factor per clause, hard clauses first then soft, in declaration order."""
    factors: list[Factor] = []
    for clause in m.hard:
        if len(clause) > max_width:
            raise VeWidthError(len(clause), max_width)
        factors.append(clause_to_factor(clause, 0.0, float("-inf")))
    for sc in m.soft:
        if len(sc.clause) > max_width:
            raise VeWidthError(len(sc.clause), max_width)
        factors.append(clause_to_factor(sc.clause, sc.weight, 0.0))
    return factors


def _multiply(f: Factor, g: Factor, max_width: int) -> Factor:
    scope = tuple(sorted(set(f.scope) | set(g.scope)))
    if len(scope) > max_width:
        raise VeWidthError(len(scope), max_width)
    axis = {v: i for i, v in enumerate(scope)}

    def aligned(factor: Factor) -> np.ndarray:
        shape = [1] * len(scope)
        for v in factor.scope:
            shape[axis[v]] = 2
        src_axes = sorted(range(len(factor.scope)), key=lambda i: axis[factor.scope[i]])
        return np.transpose(factor.table, src_axes).reshape(shape)

    return Factor(scope, aligned(f) + aligned(g))


def _sum_out(f: Factor, var: int) -> Factor:
    axis = f.scope.index(var)
    table = np.logaddexp.reduce(f.table, axis=axis)
    scope = f.scope[:axis] + f.scope[axis + 1 :]
    return Factor(scope, table)


def bucket_elimination(
    factors: Sequence[Factor], order: Sequence[int], max_width: int = 20
) -> float:
    """Log of the sum over all assignments of the factor product.

    Every variable in any factor scope must appear in the order; variables in
    the order touched by no factor each contribute ln 2.
    """
    position = {v: i for i, v in enumerate(order)}
    for f in factors:
        for v in f.scope:
            if v not in position:
                raise ValueError(f"variable {v} missing from elimination order")

    buckets: list[list[Factor]] = [[] for _ in order]
    constant = 0.0
    for f in factors:
        if not f.scope:
            constant += float(f.table)
            continue
        buckets[min(position[v] for v in f.scope)].append(f)

    for i, v in enumerate(order):
        bucket = buckets[i]
        if not bucket:
            constant += LN2
            continue
        product = bucket[0]
        for f in bucket[1:]:
            product = _multiply(f, product, max_width)
        summed = _sum_out(product, v)
        if not summed.scope:
            constant += float(summed.table)
        else:
            buckets[min(position[u] for u in summed.scope)].append(summed)
    return constant


def ve_count(
    m: PropMRF, max_width: int = 20, order: Sequence[int] | None = None
) -> float:
    """Partition function of m by bucket elimination (min-fill order by default)."""
    factors = clauses_to_factors(m, max_width)
    if order is None:
        order = minfill_width(m).order
    covered = set(order) | m.occurring_variables()
    log_z = bucket_elimination(factors, order, max_width)
    return log_z + LN2 * (m.num_vars - len(covered))
