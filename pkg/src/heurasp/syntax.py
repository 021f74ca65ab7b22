"""Abstract syntax for the input language: terms, atoms, rules, directives.

All nodes are immutable dataclasses.  str() on any node produces concrete
syntax that parses back to a structurally equal node.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from .errors import EvalError

# Sign symbols used in heuristic atoms.
SIGN_NONE = ""
SIGN_POS = "+"
SIGN_NEG = "-"

COMPARISON_OPS = ("=", "!=", "<", "<=", ">", ">=")


# ---------------------------------------------------------------------------
# Terms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Integer:
    value: int

    def __str__(self):
        return str(self.value)


@dataclass(frozen=True)
class Symbol:
    """Symbolic constant (lowercase identifier)."""

    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Variable:
    """Variable (uppercase identifier).  Anonymous `_` gets a fresh name
    `_<n>` assigned by the parser and prints back as `_`; other `_`-prefixed
    names are reserved for internally generated variables."""

    name: str

    @property
    def is_anonymous(self):
        return self.name.startswith("_") and self.name[1:].isdigit()

    def __str__(self):
        return "_" if self.is_anonymous else self.name


@dataclass(frozen=True)
class Arith:
    """Binary arithmetic expression; `\\` is Euclidean modulo."""

    op: str  # one of + - * \
    left: "Term"
    right: "Term"

    def __str__(self):
        def wrap(t):
            if isinstance(t, Arith) and t.op in "+-" and self.op in "*\\":
                return f"({t})"
            return str(t)

        return f"{wrap(self.left)} {self.op} {wrap(self.right)}"


@dataclass(frozen=True)
class Interval:
    """Integer interval lo..hi; only allowed in facts, expanded there."""

    low: "Term"
    high: "Term"

    def __str__(self):
        return f"{self.low}..{self.high}"


Term = Union[Integer, Symbol, Variable, Arith, Interval]


# ---------------------------------------------------------------------------
# Atoms and body elements
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Atom:
    predicate: str
    args: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "signature", (self.predicate, len(self.args)))

    def __str__(self):
        if not self.args:
            return self.predicate
        return f"{self.predicate}({','.join(str(a) for a in self.args)})"


@dataclass(frozen=True)
class Comparison:
    op: str  # one of COMPARISON_OPS
    left: Term
    right: Term

    def __str__(self):
        return f"{self.left} {self.op} {self.right}"


@dataclass(frozen=True)
class AggregateElement:
    terms: tuple  # tuple of Term, the first one is summed for #sum
    condition: tuple  # tuple of Atom | Comparison, all positive

    def __str__(self):
        lhs = ",".join(str(t) for t in self.terms)
        if self.condition:
            return f"{lhs} : {', '.join(str(c) for c in self.condition)}"
        return lhs


@dataclass(frozen=True)
class Aggregate:
    """Lower-bounded aggregate atom in canonical form `bound <= #fn {...}`.

    Strict relations are folded into the bound during parsing, so only
    `<=` remains.
    """

    function: str  # "count" or "sum"
    elements: tuple  # tuple of AggregateElement
    bound: Term

    def __str__(self):
        body = "; ".join(str(e) for e in self.elements)
        return f"{self.bound} <= #{self.function} {{ {body} }}"


BodyElement = Union[Atom, Comparison, Aggregate]


# ---------------------------------------------------------------------------
# Rule heads
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ChoiceElement:
    atom: Atom
    condition: tuple = ()  # tuple of Atom | Comparison

    def __str__(self):
        if self.condition:
            return f"{self.atom} : {', '.join(str(c) for c in self.condition)}"
        return str(self.atom)


@dataclass(frozen=True)
class ChoiceHead:
    elements: tuple  # tuple of ChoiceElement

    def __str__(self):
        return "{ " + " ; ".join(str(e) for e in self.elements) + " }"


@dataclass(frozen=True)
class Rule:
    """Normal rule, fact (empty body), constraint (no head), or choice rule.

    `guard` holds instantiation-time filters (atoms and comparisons) that
    internal rules use to bound their own grounding; guards are checked
    existentially while matching and never appear in emitted instances.
    Source-level rules always have an empty guard."""

    head: Optional[Union[Atom, ChoiceHead]]
    positive_body: tuple = ()  # tuple of BodyElement
    negative_body: tuple = ()  # tuple of Atom
    guard: tuple = ()

    @property
    def is_constraint(self):
        return self.head is None

    @property
    def is_fact(self):
        return self.head is not None and not self.positive_body and not self.negative_body

    def body_str(self):
        parts = [str(b) for b in self.positive_body]
        parts += [f"not {b}" for b in self.negative_body]
        return ", ".join(parts)

    def __str__(self):
        body = self.body_str()
        if self.head is None:
            return f":- {body}."
        if not body:
            return f"{self.head}."
        return f"{self.head} :- {body}."


# ---------------------------------------------------------------------------
# Heuristic directives
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HeuristicAtom:
    sign: str  # SIGN_NONE | SIGN_POS | SIGN_NEG
    atom: Atom

    def __str__(self):
        return f"{self.sign}{self.atom}"


@dataclass(frozen=True)
class HeuristicDirective:
    head: HeuristicAtom
    positive_condition: tuple = ()  # tuple of HeuristicAtom | Comparison
    negative_condition: tuple = ()  # tuple of HeuristicAtom
    weight: Term = Integer(0)
    level: Term = Integer(0)

    def condition_str(self):
        parts = [str(c) for c in self.positive_condition]
        parts += [f"not {c}" for c in self.negative_condition]
        return ", ".join(parts)

    def __str__(self):
        cond = self.condition_str()
        head = f"#heuristic {self.head}"
        if cond:
            head += f" : {cond}"
        return f"{head}. [{self.weight}@{self.level}]"


@dataclass(frozen=True)
class HeuristicRule:
    """Printable rule view of a directive: `_h(atom, w, l, sign) :- condition`.

    The condition keeps its sign symbols so it can be evaluated against a
    partial assignment later; this object exists for grounding keys and for
    the `ground` dump.
    """

    head_atom: Atom
    weight: Term
    level: Term
    sign_true: bool  # False only for strongly negative directive heads
    positive_condition: tuple
    negative_condition: tuple

    def __str__(self):
        h = (f"_h({self.head_atom}, {self.weight}, {self.level}, "
             f"{'true' if self.sign_true else 'false'})")
        parts = [str(c) for c in self.positive_condition]
        parts += [f"not {c}" for c in self.negative_condition]
        if not parts:
            return f"{h}."
        return f"{h} :- {', '.join(parts)}."


@dataclass(frozen=True)
class Program:
    rules: tuple = ()
    directives: tuple = ()

    def __str__(self):
        lines = [str(r) for r in self.rules]
        lines += [str(d) for d in self.directives]
        return "\n".join(lines) + ("\n" if lines else "")


# ---------------------------------------------------------------------------
# Variables, substitution, evaluation
# ---------------------------------------------------------------------------

def term_variables(term, acc=None):
    acc = set() if acc is None else acc
    if isinstance(term, Variable):
        acc.add(term.name)
    elif isinstance(term, Arith):
        term_variables(term.left, acc)
        term_variables(term.right, acc)
    elif isinstance(term, Interval):
        term_variables(term.low, acc)
        term_variables(term.high, acc)
    return acc


def atom_variables(atom, acc=None):
    acc = set() if acc is None else acc
    for a in atom.args:
        term_variables(a, acc)
    return acc


def element_variables(el, acc=None):
    """Variables of any body element (atom, comparison, aggregate)."""
    acc = set() if acc is None else acc
    if isinstance(el, Atom):
        atom_variables(el, acc)
    elif isinstance(el, Comparison):
        term_variables(el.left, acc)
        term_variables(el.right, acc)
    elif isinstance(el, Aggregate):
        term_variables(el.bound, acc)
        for e in el.elements:
            for t in e.terms:
                term_variables(t, acc)
            for c in e.condition:
                element_variables(c, acc)
    return acc


def substitute_term(term, binding):
    if isinstance(term, Variable):
        return binding.get(term.name, term)
    if isinstance(term, Arith):
        return Arith(term.op, substitute_term(term.left, binding),
                     substitute_term(term.right, binding))
    if isinstance(term, Interval):
        return Interval(substitute_term(term.low, binding),
                        substitute_term(term.high, binding))
    return term


def substitute_atom(atom, binding):
    return Atom(atom.predicate, tuple(substitute_term(a, binding) for a in atom.args))


def term_is_ground(term):
    if isinstance(term, Variable):
        return False
    if isinstance(term, Arith):
        return term_is_ground(term.left) and term_is_ground(term.right)
    if isinstance(term, Interval):
        return term_is_ground(term.low) and term_is_ground(term.high)
    return True


def atom_is_ground(atom):
    return all(term_is_ground(a) for a in atom.args)


def evaluate_term(term, binding=None):
    """Evaluate a term to an integer.  Symbols and unbound variables raise."""
    if binding:
        term = substitute_term(term, binding)
    if isinstance(term, Integer):
        return term.value
    if isinstance(term, Arith):
        left = evaluate_term(term.left)
        right = evaluate_term(term.right)
        if term.op == "+":
            return left + right
        if term.op == "-":
            return left - right
        if term.op == "*":
            return left * right
        if term.op == "\\":
            if right == 0:
                raise EvalError("modulo by zero")
            # Euclidean modulo: result is always in [0, |right|).
            return left % abs(right)
        raise EvalError(f"unknown operator {term.op!r}")
    raise EvalError(f"cannot evaluate non-integer term {term}")


def eval_ground_term(term):
    """Evaluate arithmetic inside a ground term, keeping symbols as symbols."""
    if isinstance(term, (Integer, Symbol)):
        return term
    if isinstance(term, Arith):
        return Integer(evaluate_term(term))
    raise EvalError(f"term {term} is not ground")


def ground_atom(atom, binding):
    """Substitute and evaluate arithmetic in all argument positions."""
    out = []
    for a in atom.args:
        t = substitute_term(a, binding)
        out.append(eval_ground_term(t))
    return Atom(atom.predicate, tuple(out))
