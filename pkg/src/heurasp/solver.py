"""Backtracking search over body choice points with three-valued propagation,
interleaved with the lazy grounder and the heuristic pool.

Propagation implements, to fixpoint:
  P1  a rule whose positive body is all-T and negative body all-F fires:
      its body atom and head become T (justified truth);
  P2  a true body atom forces its negative body F, promotes unassigned
      positive body atoms to M, and marks the head M once the body holds;
  P3  a contradicted body (some positive atom F, some negative atom T or M)
      forces the body atom F;
  P4  a ground constraint with one open literal and the rest satisfied
      forces the complement (positive literal to F, negated atom to M);
      a fully satisfied constraint is a conflict;
  P5  newly T/M atoms are fed back to the grounder and new instances are
      integrated;
  P6  an atom whose predicate is defined only by ground rules becomes F as
      soon as all of those rules are dead (the support-completion step that
      lets a negative heuristic decision propagate the head to false).

Decisions target body atoms only.  Conflicts are resolved by chronological
backtracking with flip marking; enumeration continues past accepted models
the same way.
"""

from __future__ import annotations

import time
from collections import defaultdict, deque
from dataclasses import dataclass, field
from typing import Optional

from .aggregates import compile_aggregates
from .assignment import FALSE, MBT, TRUE, PartialAssignment
from .grounding import BODY_PREDICATE, Grounder
from .heuristics import HeuristicPool, is_applicable
from .normalize import normalize
from .syntax import SIGN_NEG, Atom

_REASON_DECISION = "decision"
_REASON_COMPLETION = "completion"
_REASON_FLIP = "decision"


@dataclass
class SolverConfig:
    heuristics: bool = True
    trace: bool = False
    seed: Optional[int] = None
    ground_cap: int = 10 ** 6
    max_decisions: Optional[int] = None


@dataclass
class Statistics:
    decisions: int = 0
    heuristic_decisions: int = 0
    backtracks: int = 0
    ground_rules: int = 0
    ground_directives: int = 0
    models: int = 0
    wall_time: float = 0.0

    def lines(self):
        return [f"decisions:           {self.decisions}",
                f"heuristic decisions: {self.heuristic_decisions}",
                f"backtracks:          {self.backtracks}",
                f"ground rules:        {self.ground_rules}",
                f"ground directives:   {self.ground_directives}",
                f"wall time:           {self.wall_time:.3f}s"]


@dataclass
class SolveResult:
    answer_sets: list
    stats: Statistics
    trace: list
    warnings: list
    status: str  # "sat", "unsat", or "budget"


@dataclass
class _Decision:
    level: int
    beta: int
    value: str
    flipped: bool = False
    directive_id: Optional[int] = None


@dataclass
class _StaticRule:
    """Fully ground source rule, tracked for support completion even before
    the grounder emits it."""

    head: Atom
    pos: tuple
    neg: tuple
    beta: Optional[int] = None  # filled in once the instance is emitted


class Conflict(Exception):
    pass


class Solver:
    def __init__(self, program, config=None):
        self.config = config or SolverConfig()
        self.program = compile_aggregates(normalize(program))
        self.grounder = Grounder(self.program, cap=self.config.ground_cap)
        self.store = self.grounder.store
        self.assignment = PartialAssignment()
        self.pool = HeuristicPool()
        self.stats = Statistics()
        self.trace = []
        self.warnings = []
        self.rng = None
        if self.config.seed is not None:
            import random
            self.rng = random.Random(self.config.seed)

        self.rules = []  # shared with grounder.rules
        self.constraints = []
        self.by_beta = defaultdict(list)
        self.occ_pos = defaultdict(list)
        self.occ_neg = defaultdict(list)
        self.occ_head = defaultdict(list)
        self.occ_constraint = defaultdict(list)
        self.decisions = []
        self._queue = deque()
        self._pending_eval = deque()
        self._newly_known = []
        self._ground_started = False
        self._completion_cursor = 0
        self._rule_head_sigs = set()
        self._warned_headless = set()

        # Support completion applies only to predicates defined exclusively
        # by ground rules, where the full set of potential derivations is
        # known statically.
        sig_rules = defaultdict(list)
        for rule in self.program.rules:
            if rule.head is not None:
                sig_rules[rule.head.signature].append(rule)
                self._rule_head_sigs.add(rule.head.signature)
        self._closed_sigs = set()
        self._static_by_head = defaultdict(list)
        self._static_watch = defaultdict(list)
        for sig, rules in sig_rules.items():
            if all(_rule_is_ground(r) for r in rules):
                self._closed_sigs.add(sig)
        for rule in self.program.rules:
            if (rule.head is not None
                    and rule.head.signature in self._closed_sigs):
                pos = tuple(a for a in rule.positive_body if isinstance(a, Atom))
                entry = _StaticRule(rule.head, pos, tuple(rule.negative_body))
                self._static_by_head[rule.head].append(entry)
                for a in pos + entry.neg:
                    self._static_watch[a].append(rule.head)
        self._static_by_source = {}
        for idx, rule in enumerate(self.program.rules):
            if (rule.head is not None
                    and rule.head.signature in self._closed_sigs):
                for entry in self._static_by_head[rule.head]:
                    pos = tuple(a for a in rule.positive_body if isinstance(a, Atom))
                    if entry.pos == pos and entry.neg == tuple(rule.negative_body):
                        self._static_by_source[idx] = entry
                        break

    # ------------------------------------------------------------------
    # assignment plumbing
    # ------------------------------------------------------------------

    def _assign(self, atom, value, reason):
        result = self.assignment.assign(atom, value, reason)
        if result == "conflict":
            raise Conflict(atom)
        if result == "noop":
            return
        if self.config.trace:
            name = self.store.text(atom)
            self.trace.append(f"ASSIGN {name}={value} "
                              f"@{self.assignment.current_level} reason={reason}")
        if value in (TRUE, MBT) and result == "ok":
            self._newly_known.append(atom)
        self._queue.append(atom)

    # ------------------------------------------------------------------
    # propagation
    # ------------------------------------------------------------------

    def _recheck_rule(self, rid):
        rule = self.rules[rid]
        value = self.assignment.value
        dead = False
        all_pos_true = True
        all_pos_holds = True
        for p in rule.pos:
            v = value(p)
            if v == FALSE:
                dead = True
                break
            if v != TRUE:
                all_pos_true = False
                if v is None:
                    all_pos_holds = False
        all_neg_false = True
        if not dead:
            for n in rule.neg:
                v = value(n)
                if v == TRUE or v == MBT:
                    dead = True
                    break
                if v != FALSE:
                    all_neg_false = False
        if dead:
            self._assign(rule.beta, FALSE, f"rule:{rid}")
            self._schedule_completion_atom(rule.head)
            return
        if all_pos_true and all_neg_false:
            self._assign(rule.beta, TRUE, f"rule:{rid}")
            self._assign(rule.head, TRUE, f"rule:{rid}")
            return
        if self.assignment.value(rule.beta) == TRUE:
            for n in rule.neg:
                self._assign(n, FALSE, f"rule:{rid}")
            for p in rule.pos:
                if value(p) is None:
                    self._assign(p, MBT, f"rule:{rid}")
            if all_pos_holds and all(value(n) == FALSE for n in rule.neg):
                if value(rule.head) is None:
                    self._assign(rule.head, MBT, f"rule:{rid}")

    def _check_constraint(self, rid):
        rule = self.rules[rid]
        value = self.assignment.value
        open_pos = None
        open_neg = None
        open_count = 0
        for p in rule.pos:
            v = value(p)
            if v == FALSE:
                return
            if v is None:
                open_count += 1
                open_pos = p
        for n in rule.neg:
            v = value(n)
            if v == TRUE or v == MBT:
                return
            if v is None:
                open_count += 1
                open_neg = n
        if open_count == 0:
            raise Conflict(rid)
        if open_count == 1:
            if open_pos is not None:
                self._assign(open_pos, FALSE, f"constraint:{rid}")
            else:
                self._assign(open_neg, MBT, f"constraint:{rid}")

    def _schedule_completion_atom(self, atom_id):
        if atom_id is not None:
            self._queue.append(("complete", atom_id))

    def _check_completion(self, atom_id):
        """Support completion: all potential derivations of a closed-predicate
        atom are dead, so it can only be false.  Atoms of predicates that
        occur in no rule head at all can never be derived."""
        if not self.assignment.is_unassigned(atom_id):
            return
        atom = self.store.atom(atom_id)
        if atom.predicate == BODY_PREDICATE:
            return
        if atom.signature in self._rule_head_sigs:
            if atom.signature not in self._closed_sigs:
                return
            for entry in self._static_by_head.get(atom, ()):
                if not self._static_dead(entry):
                    return
        self._assign(atom_id, FALSE, _REASON_COMPLETION)

    def _static_dead(self, entry):
        value = self.assignment.value
        if entry.beta is not None and value(entry.beta) == FALSE:
            return True
        for a in entry.pos:
            aid = self.store.id_of(a)
            if aid is not None and value(aid) == FALSE:
                return True
        for a in entry.neg:
            aid = self.store.id_of(a)
            if aid is not None and value(aid) in (TRUE, MBT):
                return True
        return False

    def _drain(self):
        while self._queue:
            item = self._queue.popleft()
            if isinstance(item, tuple):
                self._check_completion(item[1])
                continue
            atom = item
            for rid in self.by_beta.get(atom, ()):
                self._recheck_rule(rid)
                if self.assignment.value(atom) == FALSE:
                    self._schedule_completion_atom(self.rules[rid].head)
            for rid in self.occ_pos.get(atom, ()):
                self._recheck_rule(rid)
            for rid in self.occ_neg.get(atom, ()):
                self._recheck_rule(rid)
            for rid in self.occ_constraint.get(atom, ()):
                self._check_constraint(rid)
            obj = self.store.atom(atom)
            for head in self._static_watch.get(obj, ()):
                hid = self.store.id_of(head)
                if hid is not None:
                    self._schedule_completion_atom(hid)

    def _integrate(self, new_rules, new_directives):
        # Index everything first: a conflict during evaluation must not lose
        # rules from the same batch (the grounder never re-emits them).
        for rule in new_rules:
            rid = rule.id
            while len(self.rules) <= rid:
                self.rules.append(None)
            self.rules[rid] = rule
            if rule.head is None:
                self.constraints.append(rid)
                for p in rule.pos:
                    self.occ_constraint[p].append(rid)
                for n in rule.neg:
                    self.occ_constraint[n].append(rid)
            else:
                self.by_beta[rule.beta].append(rid)
                self.occ_head[rule.head].append(rid)
                for p in rule.pos:
                    self.occ_pos[p].append(rid)
                for n in rule.neg:
                    self.occ_neg[n].append(rid)
                entry = self._static_by_source.get(rule.source_index)
                if entry is not None and entry.beta is None:
                    if self.store.atom(rule.head) == entry.head:
                        entry.beta = rule.beta
        for gd in new_directives:
            self.pool.add(gd)
            sig = self.store.atom(gd.head_atom).signature
            if sig not in self._rule_head_sigs and gd.source_index not in self._warned_headless:
                self._warned_headless.add(gd.source_index)
                self.warnings.append(
                    f"directive {gd.source_index}: head predicate "
                    f"{sig[0]}/{sig[1]} never occurs in a rule head")
        # Newly registered atoms may be underivable already.
        for aid in range(self._completion_cursor, len(self.store)):
            atom = self.store.atom(aid)
            if atom.predicate != BODY_PREDICATE:
                self._schedule_completion_atom(aid)
        self._completion_cursor = len(self.store)
        # Queue initial evaluations; they may raise a conflict, and whatever
        # is left re-runs on the next propagate call.
        for rule in new_rules:
            self._pending_eval.append(rule.id)

    def propagate(self):
        """Run P1-P6 and grounding feedback to a global fixpoint.

        Returns "fixpoint" or "conflict"."""
        try:
            while True:
                while self._pending_eval:
                    rid = self._pending_eval[0]
                    rule = self.rules[rid]
                    if rule.head is None:
                        self._check_constraint(rid)
                    else:
                        self._recheck_rule(rid)
                    self._pending_eval.popleft()
                self._drain()
                if self._pending_eval:
                    continue
                delta = self._newly_known
                self._newly_known = []
                if self._ground_started and not delta:
                    return "fixpoint"
                self._ground_started = True
                new_rules, new_dirs = self.grounder.ground_new(delta)
                if not new_rules and not new_dirs and not self._queue:
                    return "fixpoint"
                self._integrate(new_rules, new_dirs)
        except Conflict:
            self._queue.clear()
            return "conflict"

    # ------------------------------------------------------------------
    # decisions
    # ------------------------------------------------------------------

    def _rule_applicable(self, rule):
        value = self.assignment.value
        for p in rule.pos:
            if value(p) not in (TRUE, MBT):
                return False
        for n in rule.neg:
            if value(n) in (TRUE, MBT):
                return False
        return True

    def _decide_on_beta(self, rule, value, directive=None):
        level = self.assignment.open_level()
        decision = _Decision(level, rule.beta, value,
                             directive_id=directive.id if directive else None)
        self.decisions.append(decision)
        self.stats.decisions += 1
        if self.config.trace:
            if directive is not None:
                name = self.store.text(directive.head_atom)
                self.trace.append(
                    f"DECIDE {name}={'T' if value == TRUE else 'F'} "
                    f"dir={directive.id} w={directive.weight} l={directive.level}")
            else:
                self.trace.append(
                    f"DECIDE {self.store.text(rule.beta)}=T dir=fallback w=0 l=0")
        try:
            self._assign(rule.beta, value, _REASON_DECISION)
        except Conflict:
            # Cannot happen: candidates have an unassigned body atom.
            raise

    def _try_directive(self, directive):
        """Route a directive's head decision through a deriving rule's body
        atom.  Returns True when a decision was made."""
        head = directive.head_atom
        sign_true = directive.head_sign != SIGN_NEG
        candidates = [self.rules[rid] for rid in self.occ_head.get(head, ())
                      if self.assignment.is_unassigned(self.rules[rid].beta)
                      and self._rule_applicable(self.rules[rid])]
        if not candidates:
            self.warnings.append(
                f"E_NO_DERIVING_RULE: directive {directive.id} head "
                f"{self.store.text(head)} has no applicable deriving rule; skipped")
            return False
        if not sign_true:
            live = [self.rules[rid] for rid in self.occ_head.get(head, ())
                    if not self._rule_dead(self.rules[rid])]
            if len(live) > 1:
                self.warnings.append(
                    f"E_AMBIGUOUS_NEGATIVE: directive {directive.id} head "
                    f"{self.store.text(head)} is derivable by several rules; skipped")
                return False
        rule = min(candidates, key=lambda r: r.id)
        self._decide_on_beta(rule, TRUE if sign_true else FALSE, directive)
        self.stats.heuristic_decisions += 1
        return True

    def _rule_dead(self, rule):
        value = self.assignment.value
        if value(rule.beta) == FALSE:
            return True
        for p in rule.pos:
            if value(p) == FALSE:
                return True
        for n in rule.neg:
            if value(n) in (TRUE, MBT):
                return True
        return False

    def decide(self):
        """Heuristic decision if one is applicable, else the fallback guess
        on the active choice point with the smallest body atom id."""
        if self.config.heuristics and len(self.pool):
            skip = set()
            while True:
                directive = self.pool.select(self.assignment, self.store,
                                             self.rng, skip)
                if directive is None:
                    break
                if self._try_directive(directive):
                    return True
                skip.add(directive.id)
        best = None
        for rule in self.rules:
            if rule is None or rule.head is None:
                continue
            if not self.assignment.is_unassigned(rule.beta):
                continue
            if self.assignment.value(rule.head) in (TRUE, FALSE):
                continue  # firing it would add nothing or conflict
            if not self._rule_applicable(rule):
                continue
            if best is None or rule.beta < best.beta:
                best = rule
        if best is None:
            return False
        self._decide_on_beta(best, TRUE)
        return True

    # ------------------------------------------------------------------
    # conflicts and enumeration
    # ------------------------------------------------------------------

    def resolve_conflict(self):
        """Chronological backtracking: flip the most recent unflipped
        decision; False when the tree is exhausted."""
        self.stats.backtracks += 1
        self.pool.reactivate()
        while self.decisions:
            decision = self.decisions[-1]
            self.assignment.backtrack_to(decision.level - 1)
            if decision.flipped:
                self.decisions.pop()
                continue
            decision.flipped = True
            decision.value = FALSE if decision.value == TRUE else TRUE
            self.assignment.open_level()
            if self.config.trace:
                self.trace.append(
                    f"DECIDE {self.store.text(decision.beta)}="
                    f"{decision.value} dir=flip w=0 l=0")
            try:
                self._assign(decision.beta, decision.value, _REASON_FLIP)
            except Conflict:
                continue
            return True
        return False

    def check_answer_set(self):
        """accept, or reject(reason) as a string."""
        value = self.assignment.value
        for atom in self.assignment.assigned_atoms():
            if value(atom) == MBT:
                return f"reject:unjustified-M:{self.store.text(atom)}"
        for rid in self.constraints:
            rule = self.rules[rid]
            if all(value(p) == TRUE for p in rule.pos) and \
                    all(value(n) != TRUE for n in rule.neg):
                return f"reject:violated-constraint:{rid}"
        for rule in self.rules:
            if rule is None or rule.head is None:
                continue
            if all(value(p) == TRUE for p in rule.pos) and \
                    all(value(n) != TRUE for n in rule.neg):
                if value(rule.head) != TRUE:
                    return f"reject:unsatisfied-rule:{rule.id}"
        return "accept"

    def current_model(self):
        atoms = []
        for atom in self.assignment.assigned_atoms():
            if self.assignment.value(atom) == TRUE:
                obj = self.store.atom(atom)
                if not obj.predicate.startswith("_"):
                    atoms.append(str(obj))
        return tuple(sorted(atoms))

    # ------------------------------------------------------------------
    # main loop
    # ------------------------------------------------------------------

    def solve(self, models=1):
        """Enumerate up to `models` answer sets (0 means all)."""
        start = time.perf_counter()
        found = []
        seen = set()
        status = None
        while True:
            if self.propagate() == "conflict":
                if self.assignment.current_level == 0 or not self.resolve_conflict():
                    break
                continue
            if self.config.max_decisions is not None and \
                    self.stats.decisions >= self.config.max_decisions:
                status = "budget"
                break
            if self.decide():
                continue
            verdict = self.check_answer_set()
            if verdict == "accept":
                model = self.current_model()
                if model not in seen:
                    seen.add(model)
                    found.append(model)
                    self.stats.models += 1
                    if models and len(found) >= models:
                        break
            if not self.resolve_conflict():
                break
        self.stats.wall_time = time.perf_counter() - start
        self.stats.ground_rules = len(self.grounder.rules)
        self.stats.ground_directives = len(self.grounder.directives)
        if status is None:
            status = "sat" if found else "unsat"
        return SolveResult(found, self.stats, self.trace, self.warnings, status)


def _rule_is_ground(rule):
    from .syntax import element_variables
    vs = set()
    if isinstance(rule.head, Atom):
        element_variables(rule.head, vs)
    for el in rule.positive_body:
        element_variables(el, vs)
    for el in rule.negative_body:
        element_variables(el, vs)
    return not vs


def solve(program, models=1, config=None):
    """Parse-level entry point: normalize, ground lazily, search."""
    solver = Solver(program, config)
    return solver.solve(models)
