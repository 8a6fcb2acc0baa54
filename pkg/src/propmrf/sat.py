"""Unit propagation and a small chronological-backtracking DPLL solver.

Propagation visits clauses in declaration order and reports the first
falsified clause it sees.  The solver branches on the lowest-index unassigned
variable, trying true first; both rules are fixed so that runs are
deterministic.  Clause learning is deliberately out of scope: the inputs this
package feeds the solver are small.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .model import Assignment, Clause, ClauseStatus, clause_status


@dataclass
class PropagationResult:
    assignment: Assignment
    conflict: Clause | None

    @property
    def ok(self) -> bool:
        return self.conflict is None


def unit_propagate(
    clauses: Sequence[Clause], assignment: Mapping[int, bool] | None = None
) -> PropagationResult:
    """Extend the assignment with all forced literals, to fixpoint.

    Returns the extended assignment and the first falsified clause found, if
    any (the assignment then reflects the state at detection time).
    """
    a: Assignment = dict(assignment) if assignment else {}
    changed = True
    while changed:
        changed = False
        for clause in clauses:
            unassigned: int | None = None
            n_unassigned = 0
            satisfied = False
            for lit in clause.literals:
                value = a.get(abs(lit))
                if value is None:
                    n_unassigned += 1
                    unassigned = lit
                elif value == (lit > 0):
                    satisfied = True
                    break
            if satisfied:
                continue
            if n_unassigned == 0:
                return PropagationResult(a, clause)
            if n_unassigned == 1:
                assert unassigned is not None
                a[abs(unassigned)] = unassigned > 0
                changed = True
    return PropagationResult(a, None)


def is_satisfiable(
    clauses: Sequence[Clause], assignment: Mapping[int, bool] | None = None
) -> bool:
    """DPLL satisfiability of a clause conjunction under a partial assignment."""
    result = unit_propagate(clauses, assignment)
    if result.conflict is not None:
        return False
    a = result.assignment
    open_vars: set[int] = set()
    for clause in clauses:
        if clause_status(clause, a) is ClauseStatus.UNDETERMINED:
            for lit in clause.literals:
                if abs(lit) not in a:
                    open_vars.add(abs(lit))
    if not open_vars:
        return True
    branch_var = min(open_vars)
    for value in (True, False):
        trial = dict(a)
        trial[branch_var] = value
        if is_satisfiable(clauses, trial):
            return True
    return False
