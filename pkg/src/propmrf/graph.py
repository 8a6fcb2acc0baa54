"""Primal-graph structure: connected components and greedy min-fill width.

The primal graph has one vertex per variable occurring in some clause and an
edge between every pair of variables sharing a clause.  Variables occurring in
no clause are not vertices; simplification accounts for them separately.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import Clause, PropMRF, SoftClause, compact_model


@dataclass(frozen=True)
class Component:
    """One connected component: its original variables and a compacted submodel."""

    variables: frozenset[int]
    model: PropMRF


@dataclass(frozen=True)
class WidthEstimate:
    width: int
    order: tuple[int, ...]


def primal_adjacency(m: PropMRF) -> dict[int, set[int]]:
    adj: dict[int, set[int]] = {}
    for clause in m.iter_clauses():
        scope = sorted(clause.variables)
        for v in scope:
            adj.setdefault(v, set())
        for i, u in enumerate(scope):
            for v in scope[i + 1 :]:
                adj[u].add(v)
                adj[v].add(u)
    return adj


def connected_components(m: PropMRF) -> list[Component]:
    """Split m along its primal graph; components are ordered by smallest variable.

    Each component model is renumbered over its own variables, so the
    partition function of m (when every declared variable occurs in a clause)
    is the product of the component partition functions.
    """
    adj = primal_adjacency(m)
    label: dict[int, int] = {}
    roots: list[int] = []
    for start in sorted(adj):
        if start in label:
            continue
        roots.append(start)
        stack = [start]
        label[start] = start
        while stack:
            u = stack.pop()
            for v in adj[u]:
                if v not in label:
                    label[v] = start
                    stack.append(v)

    by_root_hard: dict[int, list[Clause]] = {r: [] for r in roots}
    by_root_soft: dict[int, list[SoftClause]] = {r: [] for r in roots}
    for clause in m.hard:
        root = label[min(clause.variables)]
        by_root_hard[root].append(clause)
    for sc in m.soft:
        root = label[min(sc.clause.variables)]
        by_root_soft[root].append(sc)

    components = []
    for root in roots:
        variables = frozenset(v for v, r in label.items() if r == root)
        components.append(
            Component(
                variables,
                compact_model(tuple(by_root_hard[root]), tuple(by_root_soft[root])),
            )
        )
    return components


def minfill_width(m: PropMRF) -> WidthEstimate:
    """Greedy min-fill elimination order and its induced width (an upper bound
    on treewidth).

    At each step the variable adding the fewest fill edges is eliminated (ties
    broken by smallest index); the width is the largest neighborhood met along
    the way.
    """
    adj = {v: set(nbrs) for v, nbrs in primal_adjacency(m).items()}
    order: list[int] = []
    width = 0
    while adj:
        best_v = -1
        best_fill = None
        for v in sorted(adj):
            nbrs = adj[v]
            fill = 0
            nbr_list = sorted(nbrs)
            for i, u in enumerate(nbr_list):
                for w in nbr_list[i + 1 :]:
                    if w not in adj[u]:
                        fill += 1
            if best_fill is None or fill < best_fill:
                best_fill = fill
                best_v = v
        nbrs = adj.pop(best_v)
        width = max(width, len(nbrs))
        for u in nbrs:
            adj[u].discard(best_v)
        nbr_list = sorted(nbrs)
        for i, u in enumerate(nbr_list):
            for w in nbr_list[i + 1 :]:
                adj[u].add(w)
                adj[w].add(u)
        order.append(best_v)
    return WidthEstimate(width, tuple(order))
