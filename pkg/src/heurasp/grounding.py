"""Ground instantiation: the lazy grounder driven by newly assigned atoms,
and the exhaustive grounding used by the oracle and the `ground` command.

A rule instance is emitted once its positive body can be matched inside the
set of atoms the solver has ever assigned true or must-be-true.  Heuristic
directives instead instantiate against every *registered* atom, so that
conditions over strongly negative atoms (which may only ever be false) can
still bind their variables.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import Optional

from .errors import CapError, EvalError
from .syntax import (
    SIGN_NONE,
    Aggregate, Arith, Atom, Comparison, HeuristicAtom, Integer, Symbol,
    Variable, element_variables, eval_ground_term, evaluate_term,
    ground_atom, substitute_term,
)

BODY_PREDICATE = "_body"


class AtomStore:
    """Bijection between ground atoms and dense integer ids, with per
    (signature, argument position, value) candidate lists for joins."""

    def __init__(self):
        self._atoms = []
        self._ids = {}
        self._by_sig = defaultdict(list)
        self._by_arg = defaultdict(list)

    def register(self, atom):
        aid = self._ids.get(atom)
        if aid is not None:
            return aid, False
        aid = len(self._atoms)
        self._atoms.append(atom)
        self._ids[atom] = aid
        self._by_sig[atom.signature].append(aid)
        for pos, arg in enumerate(atom.args):
            self._by_arg[(atom.predicate, pos, arg)].append(aid)
        return aid, True

    def atom(self, aid):
        return self._atoms[aid]

    def id_of(self, atom):
        return self._ids.get(atom)

    def ids_by_signature(self, sig):
        return self._by_sig.get(sig, ())

    def ids_by_argument(self, predicate, pos, value):
        return self._by_arg.get((predicate, pos, value), ())

    def text(self, aid):
        return str(self._atoms[aid])

    def __len__(self):
        return len(self._atoms)

    def __iter__(self):
        return iter(range(len(self._atoms)))


# ---------------------------------------------------------------------------
# Builtin evaluation
# ---------------------------------------------------------------------------

def eval_builtin(comp, binding=None):
    """Evaluate a ground (or fully bound) comparison.  Equality works on any
    ground terms; order comparisons require integers."""
    binding = binding or {}
    left = eval_ground_term(substitute_term(comp.left, binding))
    right = eval_ground_term(substitute_term(comp.right, binding))
    if comp.op == "=":
        return left == right
    if comp.op == "!=":
        return left != right
    if not isinstance(left, Integer) or not isinstance(right, Integer):
        raise EvalError(
            f"comparison {left} {comp.op} {right} needs integer operands")
    lv, rv = left.value, right.value
    if comp.op == "<":
        return lv < rv
    if comp.op == "<=":
        return lv <= rv
    if comp.op == ">":
        return lv > rv
    if comp.op == ">=":
        return lv >= rv
    raise EvalError(f"unknown comparison operator {comp.op!r}")


_OPS = {"<": lambda a, b: a < b, "<=": lambda a, b: a <= b,
        ">": lambda a, b: a > b, ">=": lambda a, b: a >= b,
        "=": lambda a, b: a == b, "!=": lambda a, b: a != b}


def _compile_comparison(comp):
    """Fast check(binding) for the common variable/integer operand shapes;
    anything with arithmetic falls back to eval_builtin."""
    left, right, op = comp.left, comp.right, _OPS[comp.op]
    ordered = comp.op not in ("=", "!=")

    def side(term):
        if isinstance(term, Variable):
            name = term.name
            return lambda b: b[name]
        if isinstance(term, (Integer, Symbol)):
            return lambda b, t=term: t
        return None

    lf, rf = side(left), side(right)
    if lf is None or rf is None:
        return lambda b: eval_builtin(comp, b)
    if ordered:
        def check(b):
            lv, rv = lf(b), rf(b)
            if not isinstance(lv, Integer) or not isinstance(rv, Integer):
                raise EvalError(
                    f"comparison {lv} {comp.op} {rv} needs integer operands")
            return op(lv.value, rv.value)
        return check
    return lambda b: op(lf(b), rf(b))


def ground_atom_partial(atom, binding):
    """Substitute and evaluate arguments, keeping anonymous variables as
    wildcards (used for negated condition patterns)."""
    out = []
    for a in atom.args:
        t = substitute_term(a, binding)
        if isinstance(t, Variable):
            out.append(t)
        else:
            out.append(eval_ground_term(t))
    return Atom(atom.predicate, tuple(out))


# ---------------------------------------------------------------------------
# Ground objects
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GroundAggregate:
    """Aggregate kept intact for the oracle: distinct satisfied tuples are
    counted or summed and compared against the lower bound."""

    function: str
    bound: int
    elements: tuple  # tuple of (value_tuple, condition_atom_ids)

    def value(self, true_ids):
        seen = set()
        for values, cond in self.elements:
            if values not in seen and all(c in true_ids for c in cond):
                seen.add(values)
        if self.function == "count":
            return len(seen)
        return sum(v[0] for v in seen)

    def satisfied(self, true_ids):
        return self.bound <= self.value(true_ids)


@dataclass
class GroundRule:
    id: int
    head: Optional[int]
    pos: tuple
    neg: tuple
    beta: Optional[int]
    aggregates: tuple = ()
    source_index: int = -1

    @property
    def is_constraint(self):
        return self.head is None

    def text(self, store):
        parts = [store.text(a) for a in self.pos]
        parts += [str(g) for g in self.aggregates]
        parts += [f"not {store.text(a)}" for a in self.neg]
        body = ", ".join(parts)
        if self.head is None:
            return f":- {body}."
        if not body:
            return f"{store.text(self.head)}."
        return f"{store.text(self.head)} :- {body}."

    def fingerprint_text(self, store):
        head = store.text(self.head) if self.head is not None else ""
        return (head,
                tuple(sorted(store.text(a) for a in self.pos)),
                tuple(sorted(store.text(a) for a in self.neg)))


@dataclass(frozen=True)
class CondLiteral:
    """One evaluated condition literal of a ground directive.  Ground atoms
    carry their id; negated atoms with anonymous variables keep a pattern
    meaning `no matching instance`."""

    negated: bool
    sign: str
    atom_id: Optional[int] = None
    pattern: Optional[Atom] = None

    def text(self, store):
        body = store.text(self.atom_id) if self.atom_id is not None else str(self.pattern)
        s = f"{self.sign}{body}"
        return f"not {s}" if self.negated else s


@dataclass
class GroundDirective:
    id: int
    head_sign: str
    head_atom: int
    condition: tuple  # tuple of CondLiteral
    weight: int
    level: int
    source_index: int = -1

    def text(self, store):
        sign = "true" if self.head_sign != "-" else "false"
        head = (f"_h({store.text(self.head_atom)}, {self.weight}, "
                f"{self.level}, {sign})")
        if not self.condition:
            return f"{head}."
        return f"{head} :- {', '.join(c.text(store) for c in self.condition)}."


# ---------------------------------------------------------------------------
# Matching
# ---------------------------------------------------------------------------

def _bind_atom(pattern, candidate, binding):
    """Extend binding so that pattern matches the ground candidate, or None.
    Arithmetic argument positions (internal rules only) are evaluated under
    the binding built so far."""
    out = binding
    copied = False
    for p, g in zip(pattern.args, candidate.args):
        if isinstance(p, Variable):
            cur = out.get(p.name)
            if cur is None:
                if not copied:
                    out = dict(out)
                    copied = True
                out[p.name] = g
            elif cur != g:
                return None
        elif isinstance(p, Arith):
            if eval_ground_term(substitute_term(p, out)) != g:
                return None
        elif p != g:
            return None
    return out


def _candidates_for(store, pattern, binding):
    """Candidate ids through the index of the first bound argument."""
    for pos, arg in enumerate(pattern.args):
        if isinstance(arg, Variable):
            arg = binding.get(arg.name)
            if arg is None:
                continue
        elif isinstance(arg, Arith):
            arg = eval_ground_term(substitute_term(arg, binding))
        return store.ids_by_argument(pattern.predicate, pos, arg)
    return store.ids_by_signature(pattern.signature)


def _eval_ready(builtins, binding):
    """Evaluate every builtin whose variables are all bound.  Returns
    (ok, remaining)."""
    remaining = []
    for comp, vs in builtins:
        if all(v in binding for v in vs):
            if not eval_builtin(comp, binding):
                return False, None
        else:
            remaining.append((comp, vs))
    return True, remaining


class BodyMatcher:
    """Join plan for a list of positive atom patterns plus builtins.

    Atoms are matched in textual order; each builtin is evaluated at the
    earliest position where all of its variables are bound (a static
    schedule, since binding order does not depend on the seed).  Guard
    atoms and comparisons are checked existentially once the main atoms
    are matched; they never contribute to the produced binding."""

    def __init__(self, atoms, builtins, guard_atoms=(), guard_comps=()):
        self.atoms = list(atoms)
        self.guard_atoms = tuple(guard_atoms)
        self.guard_comps = tuple(_compile_comparison(c) for c in guard_comps)
        self.schedule = [[] for _ in range(len(self.atoms) + 1)]
        bound = set()
        cumulative = [set()]
        for a in self.atoms:
            bound = bound | {t.name for t in a.args if isinstance(t, Variable)}
            cumulative.append(bound)
        for comp, vs in builtins:
            for i, have in enumerate(cumulative):
                if vs <= have:
                    self.schedule[i].append(_compile_comparison(comp))
                    break
            else:
                # Safety guarantees bound variables; an unbound builtin can
                # only mean the body is unsatisfiable.
                self.schedule[0].append(_compile_comparison(comp))

    def _guard_holds(self, store, available, binding):
        guard_atoms = self.guard_atoms

        def rec(i, b):
            if i == len(guard_atoms):
                return all(c(b) for c in self.guard_comps)
            pattern = guard_atoms[i]
            for aid in tuple(_candidates_for(store, pattern, b)):
                if available is not None and aid not in available:
                    continue
                cand = store.atom(aid)
                if cand.signature != pattern.signature:
                    continue
                nb = _bind_atom(pattern, cand, b)
                if nb is not None and rec(i + 1, nb):
                    return True
            return False

        return rec(0, binding)

    def matches(self, store, available, seed=None):
        """All bindings over atoms in `available` (set of ids, or None for
        every registered atom), with position seed[0] fixed to seed[1]."""
        for check in self.schedule[0]:
            if not check({}):
                return
        atoms = self.atoms
        schedule = self.schedule
        n = len(atoms)
        guarded = bool(self.guard_atoms or self.guard_comps)

        def rec(i, binding):
            if i == n:
                if not guarded or self._guard_holds(store, available, binding):
                    yield binding
                return
            pattern = atoms[i]
            if seed is not None and i == seed[0]:
                candidates = (seed[1],)
            else:
                candidates = tuple(_candidates_for(store, pattern, binding))
            checks = schedule[i + 1]
            for aid in candidates:
                if available is not None and aid not in available:
                    continue
                cand = store.atom(aid)
                if cand.signature != pattern.signature:
                    continue
                b = _bind_atom(pattern, cand, binding)
                if b is None:
                    continue
                if checks and not all(c(b) for c in checks):
                    continue
                yield from rec(i + 1, b)

        yield from rec(0, {})


def _split_body(rule):
    """Positive atoms, builtins, and guard parts of a compiled rule."""
    atoms, builtins = [], []
    for el in rule.positive_body:
        if isinstance(el, Atom):
            atoms.append(el)
        elif isinstance(el, Comparison):
            builtins.append((el, frozenset(element_variables(el))))
        else:
            raise AssertionError("aggregates must be compiled before grounding")
    guard_atoms = tuple(el for el in rule.guard if isinstance(el, Atom))
    guard_comps = tuple(el for el in rule.guard if isinstance(el, Comparison))
    return atoms, builtins, guard_atoms, guard_comps


def _seed_positions(atoms):
    """(signature, position) pairs usable as match seeds: an atom is only
    seedable when binding it needs no prior arithmetic evaluation."""
    out = []
    for pos, a in enumerate(atoms):
        if all(isinstance(t, (Variable, Integer, Symbol)) for t in a.args):
            out.append((a.signature, pos))
        else:
            out.append((a.signature, None))
    return out


def _split_directive(directive):
    atoms, builtins = [], []
    for el in directive.positive_condition:
        if isinstance(el, Comparison):
            builtins.append((el, frozenset(element_variables(el))))
        else:
            atoms.append(el.atom)
    return atoms, builtins


# ---------------------------------------------------------------------------
# Lazy grounder
# ---------------------------------------------------------------------------

class Grounder:
    """Incremental grounder over a normalized, aggregate-free program.

    ground_new() is fed the atoms newly assigned T or M; rules fire once
    their positive body lies inside that growing set.  Directive instances
    additionally key on atom registration (see module docstring).
    """

    def __init__(self, program, cap=10 ** 6):
        self.program = program
        self.cap = cap
        self.store = AtomStore()
        self.known = set()
        self.rules = []
        self.directives = []
        self.emission_log = []
        self._fingerprints = set()
        self._dir_fingerprints = set()
        self._body_keys = {}
        self._registered_queue = []
        self._started = False

        self._rule_bodies = []
        self._rule_index = defaultdict(list)
        self._seedless_rules = []
        for idx, rule in enumerate(program.rules):
            atoms, builtins, gatoms, gcomps = _split_body(rule)
            matcher = BodyMatcher(atoms, builtins, gatoms, gcomps)
            self._rule_bodies.append((rule, atoms, matcher))
            if atoms:
                for sig, pos in _seed_positions(atoms):
                    self._rule_index[sig].append((idx, pos))
                for a in gatoms:
                    self._rule_index[a.signature].append((idx, None))
            else:
                self._seedless_rules.append(idx)

        self._dir_bodies = []
        self._dir_index = defaultdict(list)
        self._seedless_dirs = []
        for idx, d in enumerate(program.directives):
            atoms, builtins = _split_directive(d)
            self._dir_bodies.append((d, atoms, BodyMatcher(atoms, builtins)))
            if atoms:
                for pos, a in enumerate(atoms):
                    self._dir_index[a.signature].append((idx, pos))
            else:
                self._seedless_dirs.append(idx)

    # -- registration -------------------------------------------------------

    def _register(self, atom):
        aid, new = self.store.register(atom)
        if new:
            self._registered_queue.append(aid)
        return aid

    # -- emission -----------------------------------------------------------

    def _emit_rule(self, rule_idx, binding, out):
        rule, atoms, _ = self._rule_bodies[rule_idx]
        try:
            head_id = (self._register(ground_atom(rule.head, binding))
                       if rule.head is not None else None)
            pos_ids = tuple(self.store.id_of(ground_atom(a, binding))
                            for a in atoms)
            neg_ids = tuple(self._register(ground_atom(a, binding))
                            for a in rule.negative_body)
        except EvalError as exc:
            raise EvalError(f"in instance of rule `{rule}`: {exc}") from exc
        fp = (head_id, tuple(sorted(pos_ids)), tuple(sorted(neg_ids)))
        if fp in self._fingerprints:
            return
        self._fingerprints.add(fp)
        if len(self.rules) >= self.cap:
            raise CapError(f"ground rule cap of {self.cap} exceeded")
        beta = None
        if rule.head is not None:
            key = (fp[1], fp[2])
            beta = self._body_keys.get(key)
            if beta is None:
                beta = self._register(Atom(BODY_PREDICATE,
                                           (Integer(len(self._body_keys)),)))
                self._body_keys[key] = beta
        gr = GroundRule(len(self.rules), head_id, pos_ids, neg_ids, beta,
                        source_index=rule_idx)
        self.rules.append(gr)
        self.emission_log.append(
            (gr.id, pos_ids, all(p in self.known for p in pos_ids)))
        out.append(gr)

    def _emit_directive(self, dir_idx, binding, out):
        directive, atoms, _ = self._dir_bodies[dir_idx]
        try:
            head_id = self._register(ground_atom(directive.head.atom, binding))
            condition = []
            for el in directive.positive_condition:
                if isinstance(el, Comparison):
                    continue
                aid = self.store.id_of(ground_atom(el.atom, binding))
                condition.append(CondLiteral(False, el.sign, atom_id=aid))
            for ha in directive.negative_condition:
                atom = ground_atom_partial(ha.atom, binding)
                if any(isinstance(a, Variable) for a in atom.args):
                    condition.append(CondLiteral(True, ha.sign, pattern=atom))
                else:
                    condition.append(
                        CondLiteral(True, ha.sign, atom_id=self._register(atom)))
            weight = evaluate_term(directive.weight, binding)
            level = evaluate_term(directive.level, binding)
        except EvalError as exc:
            raise EvalError(f"in instance of `{directive}`: {exc}") from exc
        cond = tuple(condition)
        fp = (dir_idx, directive.head.sign, head_id,
              tuple((c.negated, c.sign, c.atom_id, str(c.pattern)) for c in cond),
              weight, level)
        if fp in self._dir_fingerprints:
            return
        self._dir_fingerprints.add(fp)
        gd = GroundDirective(len(self.directives), directive.head.sign,
                             head_id, cond, weight, level, dir_idx)
        self.directives.append(gd)
        out.append(gd)

    # -- grounding rounds -----------------------------------------------------

    def ground_new(self, delta):
        """Instantiate everything newly matchable given atoms `delta` just
        assigned T or M.  Returns (new ground rules, new ground directives)."""
        new_rules, new_dirs = [], []
        delta = [a for a in delta if a not in self.known]
        self.known.update(delta)

        if not self._started:
            self._started = True
            for idx in self._seedless_rules:
                rule, atoms, matcher = self._rule_bodies[idx]
                for binding in matcher.matches(self.store, self.known):
                    self._emit_rule(idx, binding, new_rules)
            for idx in self._seedless_dirs:
                d, atoms, matcher = self._dir_bodies[idx]
                for binding in matcher.matches(self.store, None):
                    self._emit_directive(idx, binding, new_dirs)

        rematch = set()
        for aid in delta:
            sig = self.store.atom(aid).signature
            for rule_idx, pos in self._rule_index.get(sig, ()):
                if pos is None:
                    rematch.add(rule_idx)
                    continue
                rule, atoms, matcher = self._rule_bodies[rule_idx]
                for binding in matcher.matches(self.store, self.known,
                                               seed=(pos, aid)):
                    self._emit_rule(rule_idx, binding, new_rules)
        # Rules triggered through a guard atom or an arithmetic argument
        # position re-match as a whole, once per round.
        for rule_idx in sorted(rematch):
            rule, atoms, matcher = self._rule_bodies[rule_idx]
            for binding in matcher.matches(self.store, self.known):
                self._emit_rule(rule_idx, binding, new_rules)

        # Directive instantiation keys on registration, which grows while we
        # emit, so drain the queue to a fixpoint.
        while self._registered_queue:
            aid = self._registered_queue.pop(0)
            sig = self.store.atom(aid).signature
            for dir_idx, pos in self._dir_index.get(sig, ()):
                d, atoms, matcher = self._dir_bodies[dir_idx]
                for binding in matcher.matches(self.store, None,
                                               seed=(pos, aid)):
                    self._emit_directive(dir_idx, binding, new_dirs)

        return new_rules, new_dirs

    def register_fact_atoms(self):
        """Register every fact head up front and return their ids (the
        initial queue the solver assigns true at level 0)."""
        out = []
        for rule in self.program.rules:
            if rule.is_fact:
                out.append(self._register(ground_atom(rule.head, {})))
        return out


# ---------------------------------------------------------------------------
# Exhaustive grounding
# ---------------------------------------------------------------------------

@dataclass
class GroundProgram:
    store: AtomStore
    rules: list
    directives: list

    def rule_texts(self):
        return [r.text(self.store) for r in self.rules]

    def directive_texts(self):
        return [d.text(self.store) for d in self.directives]


def full_grounding(program, cap=10 ** 6):
    """Exhaustive instantiation over the derivable-atom closure.

    An aggregate-free program is ground by running the incremental grounder
    to saturation (feeding every derived head back as if it had been
    assigned), so the result contains exactly the instances the lazy
    grounder could ever emit.  Programs with aggregate atoms go through a
    two-phase pass instead: saturate the closure treating aggregates as
    satisfiable, then emit instances with aggregate elements enumerated
    over the final closure.
    """
    has_aggregates = any(isinstance(el, Aggregate)
                         for rule in program.rules
                         for el in rule.positive_body)
    if not has_aggregates:
        grounder = Grounder(program, cap)
        fed = set()
        new_rules, _ = grounder.ground_new([])
        while True:
            frontier = []
            for gr in new_rules:
                if gr.head is not None and gr.head not in fed:
                    fed.add(gr.head)
                    frontier.append(gr.head)
            if not frontier:
                break
            new_rules, _ = grounder.ground_new(frontier)
        return GroundProgram(grounder.store, grounder.rules,
                             grounder.directives)

    store = AtomStore()
    bodies = []
    for rule in program.rules:
        atoms, builtins, aggs = [], [], []
        for el in rule.positive_body:
            if isinstance(el, Atom):
                atoms.append(el)
            elif isinstance(el, Comparison):
                builtins.append((el, frozenset(element_variables(el))))
            else:
                aggs.append(el)
        gatoms = tuple(el for el in rule.guard if isinstance(el, Atom))
        gcomps = tuple(el for el in rule.guard if isinstance(el, Comparison))
        bodies.append((rule, atoms, BodyMatcher(atoms, builtins, gatoms, gcomps),
                       aggs))

    # Phase 1: closure.
    index = defaultdict(list)
    seedless = []
    for idx, (rule, atoms, matcher, _) in enumerate(bodies):
        if atoms:
            for sig, pos in _seed_positions(atoms):
                index[sig].append((idx, pos))
            for a in matcher.guard_atoms:
                index[a.signature].append((idx, None))
        else:
            seedless.append(idx)

    queue = []

    def add_atom(atom):
        aid, new = store.register(atom)
        if new:
            if len(store) > cap:
                raise CapError(f"grounding closure exceeded cap of {cap}")
            queue.append(aid)
        return aid

    for idx in seedless:
        rule, atoms, matcher, _ = bodies[idx]
        if rule.head is not None:
            for binding in matcher.matches(store, None):
                add_atom(ground_atom(rule.head, binding))
    pending_rematch = set()
    while queue or pending_rematch:
        while queue:
            aid = queue.pop(0)
            sig = store.atom(aid).signature
            for idx, pos in index.get(sig, ()):
                rule, atoms, matcher, _ = bodies[idx]
                if rule.head is None:
                    continue
                if pos is None:
                    pending_rematch.add(idx)
                    continue
                for binding in matcher.matches(store, None, seed=(pos, aid)):
                    add_atom(ground_atom(rule.head, binding))
        batch, pending_rematch = sorted(pending_rematch), set()
        for idx in batch:
            rule, atoms, matcher, _ = bodies[idx]
            for binding in matcher.matches(store, None):
                add_atom(ground_atom(rule.head, binding))

    # Phase 2: emission over the final closure.
    rules = []
    fingerprints = set()
    body_keys = {}
    for idx, (rule, atoms, matcher, aggs) in enumerate(bodies):
        for binding in matcher.matches(store, None):
            head_id = (store.register(ground_atom(rule.head, binding))[0]
                       if rule.head is not None else None)
            pos_ids = tuple(store.id_of(ground_atom(a, binding)) for a in atoms)
            neg_ids = tuple(store.register(ground_atom(a, binding))[0]
                            for a in rule.negative_body)
            ground_aggs = tuple(_ground_aggregate(agg, binding, store)
                                for agg in aggs)
            fp = (head_id, tuple(sorted(pos_ids)), tuple(sorted(neg_ids)),
                  ground_aggs)
            if fp in fingerprints:
                continue
            fingerprints.add(fp)
            if len(rules) >= cap:
                raise CapError(f"ground rule cap of {cap} exceeded")
            beta = None
            if rule.head is not None:
                key = (fp[1], fp[2], ground_aggs)
                beta = body_keys.get(key)
                if beta is None:
                    beta = store.register(
                        Atom(BODY_PREDICATE, (Integer(len(body_keys)),)))[0]
                    body_keys[key] = beta
            rules.append(GroundRule(len(rules), head_id, pos_ids, neg_ids,
                                    beta, ground_aggs, idx))

    directives = []
    dir_fps = set()
    for d in program.directives:
        atoms, builtins = _split_directive(d)
        for binding in BodyMatcher(atoms, builtins).matches(store, None):
            _emit_full_directive(d, binding, store, directives, dir_fps)
    return GroundProgram(store, rules, directives)


def _term_value(term, binding):
    """Evaluated tuple component: int for integers/arithmetic, name for
    symbols (symbol names never collide with decimal strings)."""
    t = eval_ground_term(substitute_term(term, binding))
    return t.value if isinstance(t, Integer) else t.name


def _ground_aggregate(agg, binding, store):
    bound = evaluate_term(agg.bound, binding)
    elements = []
    seen = set()
    for el in agg.elements:
        atoms, builtins = [], []
        for c in el.condition:
            if isinstance(c, Atom):
                atoms.append(c)
            else:
                builtins.append((c, frozenset(element_variables(c))))
        # Local variables may shadow nothing: rule binding seeds the match.
        ok, pending = _eval_ready(builtins, binding)
        if not ok:
            continue

        def rec(i, b, pending):
            if i == len(atoms):
                if pending:
                    return
                values = tuple(_term_value(t, b) for t in el.terms)
                cond_ids = tuple(store.id_of(ground_atom(a, b)) for a in atoms)
                key = (values, cond_ids)
                if key not in seen:
                    seen.add(key)
                    elements.append((values, cond_ids))
                return
            pattern = atoms[i]
            for aid in tuple(store.ids_by_signature(pattern.signature)):
                nb = _bind_atom(pattern, store.atom(aid), b)
                if nb is None:
                    continue
                ok, rest = _eval_ready(pending, nb)
                if not ok:
                    continue
                rec(i + 1, nb, rest)

        rec(0, dict(binding), pending)
    if agg.function == "sum":
        for values, _ in elements:
            if not isinstance(values[0], int):
                raise EvalError(f"#sum over non-integer term {values[0]}")
            if values[0] < 0:
                raise EvalError("#sum over negative terms is not supported")
    return GroundAggregate(agg.function, bound,
                           tuple(sorted(elements, key=repr)))


def _emit_full_directive(directive, binding, store, directives, fps):
    head_id = store.register(ground_atom(directive.head.atom, binding))[0]
    condition = []
    for el in directive.positive_condition:
        if isinstance(el, Comparison):
            continue
        aid = store.register(ground_atom(el.atom, binding))[0]
        condition.append(CondLiteral(False, el.sign, atom_id=aid))
    for ha in directive.negative_condition:
        atom = ground_atom_partial(ha.atom, binding)
        if any(isinstance(a, Variable) for a in atom.args):
            condition.append(CondLiteral(True, ha.sign, pattern=atom))
        else:
            condition.append(
                CondLiteral(True, ha.sign, atom_id=store.register(atom)[0]))
    weight = evaluate_term(directive.weight, binding)
    level = evaluate_term(directive.level, binding)
    cond = tuple(condition)
    fp = (directive.head.sign, head_id,
          tuple((c.negated, c.sign, c.atom_id, str(c.pattern)) for c in cond),
          weight, level)
    if fp in fps:
        return
    fps.add(fp)
    directives.append(GroundDirective(len(directives), directive.head.sign,
                                      head_id, cond, weight, level))
