"""Exact partition functions by recursive decomposition and clause conditioning.

Each recursive call simplifies its model, splits it into independent
components along the primal graph, and otherwise conditions on a branching
clause R: the model's partition function is the sum of the partition
functions of the true branch (R appended as a hard clause) and the false
branch (every literal of R forced false).  Branching clauses may be whole
sub-clauses shared between clauses ("formula" mode) or single variables
("variable" mode).

A call counts as a leaf when simplification resolves it outright (zero or
scalar), when a single clause remains (closed form: a hard clause of size s
admits 2^s - 1 models; a soft one contributes (2^s - 1)e^w + 1), or when the
model's min-fill width is small enough to hand it to bucket elimination.
Conditioning contributes one node and two child calls; decomposition children
accumulate their own counts without adding a node.

Component results are cached under a canonical renaming, so structurally
identical submodels met on different branches are solved once.
"""

from __future__ import annotations

import itertools
import math
import sys
from dataclasses import dataclass

import numpy as np

from .graph import connected_components, minfill_width
from .model import Clause, PropMRF, literal_key
from .simplify import SimplifyStatus, simplify
from .ve import bucket_elimination, clauses_to_factors

FORMULA = "formula"
VARIABLE = "variable"
_MODES = (FORMULA, VARIABLE)


class InstanceTooLargeError(ValueError):
    pass


@dataclass
class SearchStats:
    nodes: int = 0
    leaves: int = 0
    cache_hits: int = 0
    cache_entries: int = 0


@dataclass(frozen=True)
class BranchCandidate:
    clause: Clause
    occurrence_count: int
    size: int


@dataclass(frozen=True)
class ExactResult:
    log_z: float
    stats: SearchStats


def condition_on_clause(m: PropMRF, r: Clause) -> tuple[PropMRF, PropMRF]:
    """The two conditioned models: r holds / every literal of r fails.

    Z(m) = Z(true branch) + Z(false branch), since the branches partition the
    assignments of m.
    """
    if not r.literals:
        raise ValueError("cannot condition on the empty clause")
    for lit in r.literals:
        if abs(lit) > m.num_vars:
            raise ValueError(f"literal {lit} out of range for {m.num_vars} variables")
    m_true = PropMRF(m.num_vars, m.hard + (r,), m.soft)
    units = tuple(Clause([-l]) for l in r.sorted_literals())
    m_false = PropMRF(m.num_vars, m.hard + units, m.soft)
    return m_true, m_false


def _literal_seq_key(lits: frozenset[int]) -> tuple[tuple[int, bool], ...]:
    return tuple(literal_key(l) for l in sorted(lits, key=literal_key))


def choose_branch_clause(m: PropMRF, mode: str = FORMULA) -> BranchCandidate:
    """Branching heuristic: the largest sub-clause common to the most clauses.

    Formula mode scans all pairwise literal-set intersections and maximizes
    (occurrence count, size), breaking ties toward the smallest sorted literal
    sequence; if every intersection is empty it falls back to the most
    frequent single literal.  Variable mode picks the variable occurring in
    the most clauses (smallest index on ties) as a positive unit clause.
    """
    if mode not in _MODES:
        raise ValueError(f"unknown branching mode {mode!r}")
    clauses = [c.literals for c in m.iter_clauses()]
    if not clauses:
        raise ValueError("model has no clauses to branch on")

    if mode == VARIABLE:
        counts: dict[int, int] = {}
        for lits in clauses:
            for lit in lits:
                counts[abs(lit)] = counts.get(abs(lit), 0) + 1
        best_var = min(counts, key=lambda v: (-counts[v], v))
        return BranchCandidate(Clause([best_var]), counts[best_var], 1)

    intersections: set[frozenset[int]] = set()
    for i, a in enumerate(clauses):
        for b in clauses[i + 1 :]:
            common = a & b
            if common:
                intersections.add(common)
    if intersections:
        occurrence = {
            r: sum(1 for lits in clauses if r <= lits) for r in intersections
        }
        best = min(
            intersections,
            key=lambda r: (-occurrence[r], -len(r), _literal_seq_key(r)),
        )
        return BranchCandidate(Clause(best), occurrence[best], len(best))

    lit_counts: dict[int, int] = {}
    for lits in clauses:
        for lit in lits:
            lit_counts[lit] = lit_counts.get(lit, 0) + 1
    best_lit = min(lit_counts, key=lambda l: (-lit_counts[l], literal_key(l)))
    return BranchCandidate(Clause([best_lit]), lit_counts[best_lit], 1)


def canonical_key(m: PropMRF, with_weights: bool = True):
    """Hashable form invariant under variable renaming (first-occurrence order)."""
    rename: dict[int, int] = {}

    def mapped(c: Clause) -> tuple[int, ...]:
        out = []
        for lit in c.sorted_literals():
            v = abs(lit)
            if v not in rename:
                rename[v] = len(rename) + 1
            out.append(rename[v] if lit > 0 else -rename[v])
        return tuple(sorted(out, key=literal_key))

    hard = tuple(mapped(c) for c in m.hard)
    if with_weights:
        soft = tuple((mapped(sc.clause), sc.weight) for sc in m.soft)
    else:
        soft = tuple((mapped(sc.clause),) for sc in m.soft)
    return (m.num_vars, tuple(sorted(hard)), tuple(sorted(soft)))


def _single_clause_log_z(m: PropMRF) -> float:
    """Closed form for a model reduced to exactly one clause over its variables."""
    if m.hard:
        size = len(m.hard[0])
        return math.log(2**size - 1)
    sc = m.soft[0]
    size = len(sc.clause)
    return float(np.logaddexp(math.log(2**size - 1) + sc.weight, 0.0))


def fdc_count(
    m: PropMRF,
    mode: str = FORMULA,
    use_cache: bool = True,
    ve_width_threshold: int = 16,
) -> ExactResult:
    """Exact log partition function; -inf when the hard clauses are unsatisfiable.

    ve_width_threshold hands any component whose min-fill width is below the
    threshold to bucket elimination; 0 disables the fallback.  Cache on and
    off produce identical values; only the statistics differ.
    """
    if mode not in _MODES:
        raise ValueError(f"unknown branching mode {mode!r}")
    sys.setrecursionlimit(max(sys.getrecursionlimit(), 100_000))
    stats = SearchStats()
    cache: dict | None = {} if use_cache else None

    def solve(model: PropMRF) -> float:
        out = simplify(model)
        if out.status is SimplifyStatus.ZERO:
            stats.leaves += 1
            return float("-inf")
        if out.status is SimplifyStatus.SCALAR:
            stats.leaves += 1
            return out.log_weight
        components = connected_components(out.model)
        if len(components) == 1:
            return out.log_weight + solve_component(out.model)
        return out.log_weight + sum(solve_component(c.model) for c in components)

    def solve_component(model: PropMRF) -> float:
        if cache is None:
            return expand(model)
        key = canonical_key(model)
        hit = cache.get(key)
        if hit is not None:
            stats.cache_hits += 1
            return hit
        value = expand(model)
        cache[key] = value
        stats.cache_entries = len(cache)
        return value

    def expand(model: PropMRF) -> float:
        if model.num_clauses == 1:
            stats.leaves += 1
            return _single_clause_log_z(model)
        if ve_width_threshold > 0:
            estimate = minfill_width(model)
            if estimate.width < ve_width_threshold:
                stats.leaves += 1
                bound = estimate.width + 1
                return bucket_elimination(
                    clauses_to_factors(model, max_width=bound),
                    estimate.order,
                    max_width=bound,
                )
        candidate = choose_branch_clause(model, mode)
        stats.nodes += 1
        m_true, m_false = condition_on_clause(model, candidate.clause)
        return float(np.logaddexp(solve(m_true), solve(m_false)))

    return ExactResult(solve(m), stats)


def _branch_candidates(m: PropMRF, mode: str) -> list[Clause]:
    if mode == VARIABLE:
        return [Clause([v]) for v in range(1, m.num_vars + 1)]
    hard_sets = [c.literals for c in m.hard]
    soft_sets = [sc.clause.literals for sc in m.soft]
    subsets: set[frozenset[int]] = set()
    for lits in hard_sets + soft_sets:
        ordered = sorted(lits, key=literal_key)
        for size in range(1, len(ordered) + 1):
            for combo in itertools.combinations(ordered, size):
                subsets.add(frozenset(combo))
    progressive = [
        r
        for r in subsets
        if any(r <= s for s in soft_sets)
        or any(r < h for h in hard_sets)
    ]
    progressive.sort(key=lambda r: (len(r), _literal_seq_key(r)))
    return [Clause(r) for r in progressive]


def minimal_search_space(m: PropMRF, mode: str = FORMULA) -> SearchStats:
    """Exhaustively minimized (leaves, nodes) over every branching choice.

    Uses the same leaf convention as fdc_count but with caching off and no
    bucket-elimination fallback, so the counts describe the smallest pure
    conditioning/decomposition search space.  Only practical for tiny models.
    """
    if mode not in _MODES:
        raise ValueError(f"unknown branching mode {mode!r}")
    if m.num_vars > 10 or m.num_clauses > 6:
        raise InstanceTooLargeError(
            f"minimal_search_space supports at most 10 variables and 6 clauses, "
            f"got {m.num_vars} and {m.num_clauses}"
        )
    sys.setrecursionlimit(max(sys.getrecursionlimit(), 100_000))
    memo: dict = {}

    def best(model: PropMRF) -> tuple[int, int]:
        out = simplify(model)
        if out.status is not SimplifyStatus.OPEN:
            return (1, 0)
        leaves = 0
        nodes = 0
        for component in connected_components(out.model):
            c_leaves, c_nodes = best_component(component.model)
            leaves += c_leaves
            nodes += c_nodes
        return (leaves, nodes)

    def best_component(model: PropMRF) -> tuple[int, int]:
        key = canonical_key(model, with_weights=False)
        cached = memo.get(key)
        if cached is not None:
            return cached
        if model.num_clauses == 1:
            memo[key] = (1, 0)
            return (1, 0)
        best_cost: tuple[int, int] | None = None
        for r in _branch_candidates(model, mode):
            m_true, m_false = condition_on_clause(model, r)
            t_leaves, t_nodes = best(m_true)
            f_leaves, f_nodes = best(m_false)
            cost = (t_leaves + f_leaves, t_nodes + f_nodes + 1)
            if best_cost is None or cost < best_cost:
                best_cost = cost
        assert best_cost is not None
        memo[key] = best_cost
        return best_cost

    leaves, nodes = best(m)
    return SearchStats(nodes=nodes, leaves=leaves)


def exact_marginals(
    m: PropMRF,
    mode: str = FORMULA,
    use_cache: bool = True,
    ve_width_threshold: int = 16,
) -> np.ndarray:
    """Exact P(v = true) for every variable: the partition function with v
    fixed true over the unconditioned partition function."""
    base = fdc_count(
        m, mode=mode, use_cache=use_cache, ve_width_threshold=ve_width_threshold
    ).log_z
    if base == -math.inf:
        raise ValueError("all assignments have zero weight; marginals undefined")
    marginals = np.zeros(m.num_vars)
    for v in range(1, m.num_vars + 1):
        conditioned = PropMRF(
            num_vars=m.num_vars, hard=m.hard + (Clause([v]),), soft=m.soft
        )
        log_zv = fdc_count(
            conditioned,
            mode=mode,
            use_cache=use_cache,
            ve_width_threshold=ve_width_threshold,
        ).log_z
        marginals[v - 1] = math.exp(log_zv - base)
    return np.clip(marginals, 0.0, 1.0)
