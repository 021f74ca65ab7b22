"""Heuristic directive semantics over partial assignments.

Satisfaction of signed condition literals follows the six-row truth table
(plain atom, +, -, and their default negations, against unassigned/F/M/T),
conditions require every literal satisfied, and an applicable directive
additionally needs its head atom assigned neither T nor F.  Selection picks
from the applicable directives with maximal level, then maximal weight.
"""

from __future__ import annotations

import heapq

from .assignment import FALSE, MBT, TRUE
from .grounding import CondLiteral
from .syntax import SIGN_NEG, SIGN_NONE, SIGN_POS, Variable


def signed_atom_holds(assignment, sign, atom_id):
    """Is the signed atom in the signed projection of the assignment?"""
    v = assignment.value(atom_id)
    if sign == SIGN_NONE:
        return v == TRUE or v == MBT
    if sign == SIGN_POS:
        return v == TRUE
    return v == FALSE


def _pattern_holds(assignment, store, sign, pattern):
    """Does any instance of the pattern (anonymous slots free) hold?"""
    for aid in store.ids_by_signature(pattern.signature):
        candidate = store.atom(aid)
        if all(isinstance(p, Variable) or p == g
               for p, g in zip(pattern.args, candidate.args)):
            if signed_atom_holds(assignment, sign, aid):
                return True
    return False


def literal_satisfied(assignment, store, lit):
    """One cell of the satisfaction table, generalized to `not` patterns
    with anonymous variables (satisfied iff no instance holds)."""
    if lit.pattern is not None:
        return not _pattern_holds(assignment, store, lit.sign, lit.pattern)
    holds = signed_atom_holds(assignment, lit.sign, lit.atom_id)
    return not holds if lit.negated else holds


def condition_satisfied(assignment, store, directive):
    # Negated literals first: they are what usually invalidates a stale
    # pool entry, and evaluation order is irrelevant to the conjunction.
    cond = directive.condition
    for lit in cond:
        if lit.negated and not literal_satisfied(assignment, store, lit):
            return False
    for lit in cond:
        if not lit.negated and not literal_satisfied(assignment, store, lit):
            return False
    return True


def is_applicable(assignment, store, directive):
    """Condition satisfied and head assigned neither T nor F; a head at M
    keeps the directive applicable."""
    v = assignment.value(directive.head_atom)
    if v == TRUE or v == FALSE:
        return False
    return condition_satisfied(assignment, store, directive)


def applicability_state(assignment, store, directive):
    """ "applicable", or why not: "parked" for failures that cannot be
    undone before the next backtrack (head already assigned, or a negated
    condition literal contradicted; the signed projection only grows within
    a branch), "pending" for positive condition literals not yet covered."""
    v = assignment.value(directive.head_atom)
    if v == TRUE or v == FALSE:
        return "parked"
    pending = False
    for lit in directive.condition:
        if lit.negated and not literal_satisfied(assignment, store, lit):
            return "parked"
    for lit in directive.condition:
        if not lit.negated and not literal_satisfied(assignment, store, lit):
            pending = True
            break
    return "pending" if pending else "applicable"


class HeuristicPool:
    """All ground directives seen so far, ordered by (level, weight) with
    directive id as the deterministic tie-break.

    Directives are never dropped.  select() pops entries and revalidates
    them: entries whose inapplicability is permanent for the current branch
    are parked on a side list and return to the heap on the next backtrack;
    entries waiting on positive condition atoms are pushed straight back.
    """

    def __init__(self):
        self.directives = {}
        self._heap = []
        self._side = []

    def add(self, directive):
        self.directives[directive.id] = directive
        heapq.heappush(self._heap,
                       (-directive.level, -directive.weight, directive.id))

    def __len__(self):
        return len(self.directives)

    def reactivate(self):
        """Return parked entries to the heap (called after backtracking)."""
        for entry in self._side:
            heapq.heappush(self._heap, entry)
        self._side = []

    def select(self, assignment, store, rng=None, skip=frozenset()):
        """Best applicable directive not in `skip`, or None.

        With an rng, ties on (level, weight) are broken uniformly at random
        instead of by smallest id."""
        popped = []
        chosen = None
        while self._heap:
            entry = heapq.heappop(self._heap)
            directive = self.directives[entry[2]]
            state = applicability_state(assignment, store, directive)
            if state == "parked":
                self._side.append(entry)
                continue
            popped.append(entry)
            if state == "pending" or entry[2] in skip:
                continue
            if rng is None:
                chosen = directive
                break
            ties = [directive]
            while self._heap and self._heap[0][:2] == entry[:2]:
                nxt = heapq.heappop(self._heap)
                d2 = self.directives[nxt[2]]
                state = applicability_state(assignment, store, d2)
                if state == "parked":
                    self._side.append(nxt)
                    continue
                popped.append(nxt)
                if state == "applicable" and nxt[2] not in skip:
                    ties.append(d2)
            chosen = rng.choice(ties)
            break
        for entry in popped:
            heapq.heappush(self._heap, entry)
        return chosen

    def applicable(self, assignment, store):
        """All currently applicable directives (id order); used by tests and
        by the selection cross-check."""
        return [d for _, d in sorted(self.directives.items())
                if is_applicable(assignment, store, d)]


def make_literal(negated, sign, atom_id):
    """Convenience constructor used by tests exercising the truth table."""
    return CondLiteral(negated, sign, atom_id=atom_id)
