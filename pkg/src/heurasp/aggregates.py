"""Compilation of lower-bounded #count/#sum atoms into monotone chain rules.

A body atom `k <= #sum { t : cond }` turns into internal rules that derive
partial sums over lexicographically increasing element tuples and project
them onto reachable levels:

    _aggN(key, tuple, w)     :- cond.                       (single tuple)
    _aggN(key, tuple, S + w) :- _aggN(key, tuple', S), cond, tuple' <lex tuple
                                [guard: S < M for some ceiling M]
    _aggN_ge(key, S)         :- _aggN(key, tuple, S).
    _aggN_ge(key, S - 1)     :- _aggN_ge(key, S), 1 <= S.
    _aggN_cap(key, bound)    :- <host body without the aggregate>.

and the host rule splits into an empty-subset variant (`k <= 0`) and the
exact-level variant (`_aggN_ge(key, k)`).  Ceiling atoms only bound chain
growth during grounding (they sit in the rules' guard), so instances stay
independent of which ceiling matched.  Only non-negative integer weights
keep the chain monotone, which grounding enforces.
"""

from __future__ import annotations

from .syntax import (
    Aggregate, Arith, Atom, Comparison, Integer, Program, Rule, Variable,
    element_variables, term_variables,
)


def _chain_atom(name, key_vars, tuple_terms, sum_term):
    args = tuple(Variable(v) for v in key_vars) + tuple(tuple_terms) + (sum_term,)
    return Atom(name, args)


def _ge_atom(name, key_vars, level_term):
    return Atom(f"{name}_ge", tuple(Variable(v) for v in key_vars) + (level_term,))


def _compile_occurrence(rule, agg, index):
    """Internal rules for one aggregate occurrence plus its replacement
    body element (the exact-level atom)."""
    name = f"_agg{index}"
    host_atoms = tuple(el for el in rule.positive_body if isinstance(el, Atom))

    # Key: aggregate variables also used outside of it in this rule.
    outside = set()
    for el in rule.positive_body:
        if el is not agg:
            element_variables(el, outside)
    for el in rule.negative_body:
        element_variables(el, outside)
    if isinstance(rule.head, Atom):
        element_variables(rule.head, outside)
    inside = set()
    for e in agg.elements:
        for t in e.terms:
            term_variables(t, inside)
        for c in e.condition:
            element_variables(c, inside)
    key_vars = sorted(inside & outside)

    arity = len(agg.elements[0].terms)
    internal = []

    cap_var = Variable(f"_m{index}")
    cap_atom = Atom(f"{name}_cap",
                    tuple(Variable(v) for v in key_vars) + (cap_var,))
    for e in agg.elements:
        cond = tuple(e.condition)
        cond_bound = set()
        for c in cond:
            if isinstance(c, Atom):
                for a in c.args:
                    if isinstance(a, Variable):
                        cond_bound.add(a.name)
        needed = set(key_vars)
        for t in e.terms:
            term_variables(t, needed)
        extra = host_atoms if needed - cond_bound else ()
        body_atoms = cond + extra

        weight = e.terms[0] if agg.function == "sum" else Integer(1)
        internal.append(Rule(_chain_atom(name, key_vars, e.terms, weight),
                             body_atoms, ()))

        # Extension rules, one per lexicographic case over the tuple.  The
        # ceiling join lives in the guard: it bounds instantiation without
        # multiplying instances.
        prev = tuple(Variable(f"_x{index}_{j}") for j in range(arity))
        prev_sum = Variable(f"_s{index}")
        for j in range(arity):
            lex = tuple(Comparison("=", prev[i], e.terms[i]) for i in range(j))
            lex += (Comparison("<", prev[j], e.terms[j]),)
            chain_prev = _chain_atom(name, key_vars, prev, prev_sum)
            head = _chain_atom(name, key_vars, e.terms,
                               Arith("+", prev_sum, weight))
            internal.append(Rule(head, (chain_prev,) + body_atoms + lex, (),
                                 guard=(cap_atom,
                                        Comparison("<", prev_sum, cap_var))))

    # Level projection, closed downward so hosts can join their bound exactly.
    any_tuple = tuple(Variable(f"_v{index}_{j}") for j in range(arity))
    level = Variable(f"_t{index}")
    internal.append(Rule(_ge_atom(name, key_vars, level),
                         (_chain_atom(name, key_vars, any_tuple, level),), ()))
    internal.append(Rule(_ge_atom(name, key_vars, Arith("-", level, Integer(1))),
                         (_ge_atom(name, key_vars, level),
                          Comparison("<=", Integer(1), level)), ()))

    # Ceiling: one atom per host binding of the bound expression.
    internal.append(Rule(Atom(f"{name}_cap",
                              tuple(Variable(v) for v in key_vars) + (agg.bound,)),
                         host_atoms, ()))

    empty_variant = Comparison("<=", agg.bound, Integer(0))
    exact_variant = _ge_atom(name, key_vars, agg.bound)
    return internal, (empty_variant, exact_variant)


def compile_aggregates(program):
    """Rewrite every aggregate occurrence; other rules pass through."""
    rules = []
    counter = 0
    for rule in program.rules:
        occurrences = [el for el in rule.positive_body
                       if isinstance(el, Aggregate)]
        if not occurrences:
            rules.append(rule)
            continue
        internal_all = []
        replacements = {}
        for agg in occurrences:
            counter += 1
            internal, variants = _compile_occurrence(rule, agg, counter)
            internal_all.extend(internal)
            replacements[id(agg)] = variants
        # Host variants: non-aggregate elements keep their order, aggregate
        # replacements go last so their bound expressions are bound by then.
        prefix = tuple(el for el in rule.positive_body
                       if not isinstance(el, Aggregate))
        variants = [prefix]
        for agg in occurrences:
            variants = [v + (choice,)
                        for v in variants
                        for choice in replacements[id(agg)]]
        for body in variants:
            rules.append(Rule(rule.head, body, rule.negative_body))
        rules.extend(internal_all)
    return Program(tuple(rules), program.directives)
