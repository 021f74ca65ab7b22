import pytest

from heurasp import CapError, EvalError, parse_program
from heurasp.aggregates import compile_aggregates
from heurasp.grounding import Grounder, eval_builtin, full_grounding
from heurasp.normalize import normalize
from heurasp.syntax import Arith, Atom, Comparison, Integer, Symbol, Variable

EXAMPLE5 = """
x(1..2). {a(X) : x(X)}.
b(X) :- x(X), not c(X). c(X) :- x(X), not b(X).
#heuristic b(X) : x(X), not a(X). [X@2]
"""


def compiled(src):
    return compile_aggregates(normalize(parse_program(src)))


def grounder_rounds(src):
    """Run the grounder as the solver would: feed every emitted head back."""
    g = Grounder(compiled(src))
    fed = set()
    rules, dirs = g.ground_new([])
    while True:
        frontier = [r.head for r in rules if r.head is not None
                    and r.head not in fed]
        fed.update(frontier)
        if not frontier:
            break
        rules, new_dirs = g.ground_new(frontier)
        dirs += new_dirs
    return g


# -- eval_builtin --------------------------------------------------------

def test_eval_builtin_paper_values():
    c_ge = Comparison(">=", Variable("C"),
                      Arith("+", Variable("F"), Variable("I")))
    assert eval_builtin(c_ge, {"C": Integer(5), "F": Integer(0),
                               "I": Integer(5)})
    mod = Comparison("!=", Arith("\\", Integer(9), Integer(2)), Integer(0))
    assert eval_builtin(mod)
    ident = Comparison("=", Variable("X"), Variable("X"))
    assert eval_builtin(ident, {"X": Integer(7)})


def test_euclidean_modulo():
    assert eval_builtin(Comparison("=", Arith("\\", Integer(-7), Integer(3)),
                                   Integer(2)))
    assert eval_builtin(Comparison("=", Arith("\\", Integer(7), Integer(-3)),
                                   Integer(1)))


def test_eval_builtin_symbol_equality_but_no_order():
    assert eval_builtin(Comparison("=", Symbol("x"), Symbol("x")))
    assert eval_builtin(Comparison("!=", Symbol("x"), Integer(1)))
    with pytest.raises(EvalError):
        eval_builtin(Comparison("<", Symbol("x"), Integer(1)))


def test_arith_on_symbol_is_error():
    with pytest.raises(EvalError):
        eval_builtin(Comparison("=", Arith("+", Symbol("x"), Integer(1)),
                                Integer(2)))


# -- lazy grounding -------------------------------------------------------

def test_empty_program_empty_state():
    g = Grounder(compiled(""))
    rules, dirs = g.ground_new([])
    assert rules == [] and dirs == []


def test_example5_facts_queued():
    g = Grounder(compiled(EXAMPLE5))
    facts = g.register_fact_atoms()
    assert [g.store.text(a) for a in facts] == ["x(1)", "x(2)"]


def test_example5_produces_full_grounding_at_once():
    g = Grounder(compiled(EXAMPLE5))
    rules, dirs = g.ground_new([])
    fact_ids = [r.head for r in rules]
    rules2, dirs2 = g.ground_new(fact_ids)
    texts = sorted(r.text(g.store) for r in rules2)
    assert len([t for t in texts if "_c_a" in t]) == 4  # compiled choice
    assert len([t for t in texts if t.startswith(("b(", "c("))]) == 4
    assert len(dirs + dirs2) == 2
    weights = sorted((d.weight, d.level) for d in dirs + dirs2)
    assert weights == [(1, 2), (2, 2)]


def test_no_delta_grounds_nothing():
    g = Grounder(compiled(EXAMPLE5))
    g.ground_new([])
    rules, dirs = g.ground_new([])
    assert rules == [] and dirs == []


def test_emission_is_deduplicated_and_deterministic():
    g1 = grounder_rounds(EXAMPLE5)
    g2 = grounder_rounds(EXAMPLE5)
    fps1 = [r.fingerprint_text(g1.store) for r in g1.rules]
    fps2 = [r.fingerprint_text(g2.store) for r in g2.rules]
    assert fps1 == fps2
    assert len(fps1) == len(set(fps1))


def test_emitted_rules_respect_known_precondition():
    g = grounder_rounds(EXAMPLE5)
    assert all(ok for _, _, ok in g.emission_log)


def test_shared_bodies_share_choice_atom():
    g = grounder_rounds("p :- q, not r. s :- q, not r. q.")
    headed = [r for r in g.rules if r.head is not None
              and g.store.text(r.head) in ("p", "s")]
    assert len({r.beta for r in headed}) == 1


def test_directive_instance_waits_for_condition_atoms():
    src = open_corpus_bpp()
    g = Grounder(compiled(src))
    rules, dirs = g.ground_new([])
    assert dirs == []  # nothing registered yet
    # Feed facts and derived atoms until filled_at_least(1,0) appears.
    fed = set()
    while True:
        frontier = [r.head for r in rules if r.head is not None
                    and r.head not in fed]
        fed.update(frontier)
        if not frontier:
            break
        rules, new_dirs = g.ground_new(frontier)
        dirs += new_dirs
    by_head = {g.store.text(d.head_atom) for d in dirs}
    assert "in(5,1)" in by_head
    filled = g.store.id_of(Atom("filled_at_least", (Integer(1), Integer(0))))
    assert filled is not None


def open_corpus_bpp():
    from heurasp import corpus_text
    return corpus_text("bpp_paper.lp")


# -- full grounding ---------------------------------------------------------

def test_full_matches_lazy_on_example5():
    g = grounder_rounds(EXAMPLE5)
    fg = full_grounding(compiled(EXAMPLE5))
    lazy = {r.fingerprint_text(g.store) for r in g.rules}
    full = {r.fingerprint_text(fg.store) for r in fg.rules}
    assert lazy == full


def test_full_grounding_counts_choice_program():
    fg = full_grounding(compiled("{ a(2) ; a(4) ; a(6) ; a(8) ; a(5) }."))
    assert len(fg.rules) == 10  # two per element


def test_full_grounding_no_matching_facts():
    fg = full_grounding(compiled("p(X) :- q(X)."))
    assert fg.rules == []


def test_lazy_soundness_on_corpus(corpus_sources):
    for path, src in corpus_sources.items():
        if "bpp" in path:
            continue  # covered separately at scale
        g = grounder_rounds(src)
        fg = full_grounding(compiled(src))
        lazy = {r.fingerprint_text(g.store) for r in g.rules}
        full = {r.fingerprint_text(fg.store) for r in fg.rules}
        assert lazy <= full, path


def test_cap_exceeded():
    with pytest.raises(CapError):
        full_grounding(compiled("n(1..50). p(X,Y) :- n(X), n(Y)."), cap=100)
    g = Grounder(compiled("n(1..50)."), cap=10)
    with pytest.raises(CapError):
        g.ground_new([])


def test_head_arithmetic_chain():
    fg = full_grounding(compiled(
        "possible(0). possible(F+1) :- possible(F), cap(C), F < C. cap(3)."))
    heads = sorted(r.text(fg.store) for r in fg.rules
                   if r.text(fg.store).startswith("possible"))
    assert "possible(3) :- possible(2), cap(3)." in heads
    assert not any("possible(4)" in h for h in heads)


def test_weight_eval_error_reported():
    g = Grounder(compiled("q(a).\n#heuristic p(X) : q(X). [X]"))
    with pytest.raises(EvalError):
        g.ground_new([])
