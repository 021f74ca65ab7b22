"""Program normalization: interval-fact expansion, choice compilation,
safety checking, and the rule view of heuristic directives.

After normalize() a program contains only plain rules (facts, normal
rules, constraints) and safe heuristic directives; choice heads and
intervals are gone.
"""

from __future__ import annotations

import itertools
import warnings

from .errors import EvalError, SafetyError
from .syntax import (
    SIGN_NEG,
    Aggregate, Arith, Atom, ChoiceHead, Comparison, HeuristicDirective,
    HeuristicRule, Integer, Interval, Program, Rule, Symbol, Variable,
    atom_variables, element_variables, evaluate_term, term_variables,
)

COMPLEMENT_PREFIX = "_c_"


def complement_atom(atom):
    return Atom(COMPLEMENT_PREFIX + atom.predicate, atom.args)


def is_internal_predicate(name):
    return name.startswith("_")


# ---------------------------------------------------------------------------
# Binding positions
# ---------------------------------------------------------------------------

def _top_level_vars(atom):
    """Variables in plain top-level argument positions (the positions that
    can bind during matching)."""
    out = set()
    for a in atom.args:
        if isinstance(a, Variable):
            out.add(a.name)
    return out


def _check_matchable_args(atom, context):
    for a in atom.args:
        if isinstance(a, Interval):
            raise SafetyError(
                f"interval argument in {context} atom {atom} (intervals are "
                f"only allowed in facts)", statement=str(atom))
        if isinstance(a, Arith):
            raise SafetyError(
                f"arithmetic argument in {context} atom {atom} is not "
                f"supported; bind the value with a comparison instead",
                statement=str(atom))


def _no_intervals(term, context):
    if isinstance(term, Interval):
        raise SafetyError(f"interval not allowed in {context}",
                          statement=str(term))
    if isinstance(term, Arith):
        _no_intervals(term.left, context)
        _no_intervals(term.right, context)


# ---------------------------------------------------------------------------
# Rule safety
# ---------------------------------------------------------------------------

def check_rule_safety(rule):
    """Every variable of the head, negative body, comparisons, and aggregate
    bound must be bound by a positive non-builtin body atom."""
    bound = set()
    for el in rule.positive_body:
        if isinstance(el, Atom):
            _check_matchable_args(el, "positive body")
            bound |= _top_level_vars(el)
        elif isinstance(el, Aggregate):
            for ae in el.elements:
                for c in ae.condition:
                    if isinstance(c, Atom):
                        _check_matchable_args(c, "aggregate condition")

    def require(vars_needed, what):
        for v in sorted(vars_needed):
            if v not in bound and not v.startswith("_"):
                raise SafetyError(
                    f"unsafe variable {v} in {what} of rule: {rule}",
                    variable=v, statement=str(rule))

    head = rule.head
    if isinstance(head, Atom):
        require(atom_variables(head), "head")
        for a in head.args:
            if isinstance(a, Interval) and not rule.is_fact:
                raise SafetyError(
                    f"interval in non-fact head of rule: {rule}",
                    statement=str(rule))
    for atom in rule.negative_body:
        for a in atom.args:
            if isinstance(a, Variable) and a.is_anonymous:
                raise SafetyError(
                    "anonymous variable under `not` is only supported in "
                    f"heuristic conditions, not in rule: {rule}",
                    variable="_", statement=str(rule))
            _no_intervals(a, "negative body")
        require(atom_variables(atom), "negative body")
    for el in rule.positive_body:
        if isinstance(el, Comparison):
            _no_intervals(el.left, "comparison")
            _no_intervals(el.right, "comparison")
            require(element_variables(el), "comparison")
        elif isinstance(el, Aggregate):
            _no_intervals(el.bound, "aggregate bound")
            require(term_variables(el.bound), "aggregate bound")
            for ae in el.elements:
                local_bound = set(bound)
                for c in ae.condition:
                    if isinstance(c, Atom):
                        local_bound |= _top_level_vars(c)
                needed = set()
                for t in ae.terms:
                    _no_intervals(t, "aggregate element")
                    term_variables(t, needed)
                for c in ae.condition:
                    if isinstance(c, Comparison):
                        element_variables(c, needed)
                for v in sorted(needed):
                    if v not in local_bound and not v.startswith("_"):
                        raise SafetyError(
                            f"unsafe variable {v} in aggregate element of "
                            f"rule: {rule}", variable=v, statement=str(rule))


def check_directive_safety(directive):
    """Def-style safety: every variable of the directive occurs in a
    positive-condition atom.  Anonymous variables under `not` are exempt
    (they quantify over instances)."""
    bound = set()
    for el in directive.positive_condition:
        if isinstance(el, Comparison):
            continue
        _check_matchable_args(el.atom, "heuristic condition")
        bound |= _top_level_vars(el.atom)

    def require(vars_needed, what):
        for v in sorted(vars_needed):
            if v not in bound:
                raise SafetyError(
                    f"unsafe variable {'_' if v.startswith('_') else v} in "
                    f"{what} of directive: {directive}",
                    variable=v, statement=str(directive))

    require(atom_variables(directive.head.atom), "head")
    for el in directive.positive_condition:
        if isinstance(el, Comparison):
            require(element_variables(el), "condition comparison")
    for ha in directive.negative_condition:
        needed = {v for v in atom_variables(ha.atom) if not v.startswith("_")}
        require(needed, "negative condition")
        for a in ha.atom.args:
            _no_intervals(a, "negative condition")
    require({v for v in term_variables(directive.weight)}, "weight")
    require({v for v in term_variables(directive.level)}, "level")
    _no_intervals(directive.weight, "weight")
    _no_intervals(directive.level, "level")


# ---------------------------------------------------------------------------
# Interval facts
# ---------------------------------------------------------------------------

def expand_interval_fact(rule):
    """Expand interval arguments of a fact into the cross product of facts."""
    head = rule.head
    ranges = []
    for a in head.args:
        if isinstance(a, Interval):
            try:
                low = evaluate_term(a.low)
                high = evaluate_term(a.high)
            except EvalError as exc:
                raise SafetyError(f"non-integer interval endpoint in fact "
                                  f"{rule}: {exc}") from exc
            if low > high:
                warnings.warn(f"E_BAD_INTERVAL: {a} in fact {rule} is empty",
                              stacklevel=2)
            ranges.append([Integer(v) for v in range(low, high + 1)])
        else:
            ranges.append([a])
    return [Rule(Atom(head.predicate, combo))
            for combo in itertools.product(*ranges)]


# ---------------------------------------------------------------------------
# Choice compilation
# ---------------------------------------------------------------------------

def compile_choice_rule(rule):
    """Compile each choice element {a : cond} <- body into the guessing pair
    a <- body, cond, not a' and a' <- body, cond, not a with a complement
    predicate a' reserved to the `_c_` namespace."""
    out = []
    for el in rule.head.elements:
        comp = complement_atom(el.atom)
        body = rule.positive_body + el.condition
        out.append(Rule(el.atom, body, rule.negative_body + (comp,)))
        out.append(Rule(comp, body, rule.negative_body + (el.atom,)))
    return out


# ---------------------------------------------------------------------------
# Directive -> heuristic rule
# ---------------------------------------------------------------------------

def directive_to_heuristic_rule(directive):
    """Rule form of a directive with the `_h` head carrying atom, weight,
    level and sign; the body keeps the signed condition."""
    return HeuristicRule(
        head_atom=directive.head.atom,
        weight=directive.weight,
        level=directive.level,
        sign_true=directive.head.sign != SIGN_NEG,
        positive_condition=directive.positive_condition,
        negative_condition=directive.negative_condition,
    )


# ---------------------------------------------------------------------------
# normalize
# ---------------------------------------------------------------------------

def normalize(program):
    rules = []
    for rule in program.rules:
        if isinstance(rule.head, ChoiceHead):
            compiled = compile_choice_rule(rule)
            for r in compiled:
                check_rule_safety(r)
            rules.extend(compiled)
        elif rule.is_fact and any(isinstance(a, Interval) for a in rule.head.args):
            rules.extend(expand_interval_fact(rule))
        else:
            check_rule_safety(rule)
            rules.append(rule)
    for directive in program.directives:
        check_directive_safety(directive)
    return Program(tuple(rules), program.directives)
