import random

from hypothesis import given, settings
from hypothesis import strategies as st

from heurasp.assignment import FALSE, MBT, TRUE, PartialAssignment
from heurasp.grounding import AtomStore, CondLiteral, GroundDirective
from heurasp.heuristics import (HeuristicPool, condition_satisfied,
                                is_applicable, literal_satisfied,
                                make_literal, signed_atom_holds)
from heurasp.syntax import Atom, Integer, Variable

STATES = [None, FALSE, MBT, TRUE]

# (negated, sign) -> expected satisfaction per state (unassigned, F, M, T)
TABLE = {
    (False, ""): (False, False, True, True),
    (False, "+"): (False, False, False, True),
    (False, "-"): (False, True, False, False),
    (True, ""): (True, True, False, False),
    (True, "+"): (True, True, True, False),
    (True, "-"): (True, False, True, True),
}


def state_assignment(value):
    pa = PartialAssignment()
    if value is not None:
        pa.assign(0, value, "x")
    return pa


def test_literal_satisfaction_table():
    store = AtomStore()
    store.register(Atom("a"))
    for (negated, sign), row in TABLE.items():
        for value, expected in zip(STATES, row):
            pa = state_assignment(value)
            lit = make_literal(negated, sign, 0)
            assert literal_satisfied(pa, store, lit) == expected, \
                (negated, sign, value)


def test_negation_complement_property():
    store = AtomStore()
    store.register(Atom("a"))
    for sign in ("", "+", "-"):
        for value in STATES:
            pa = state_assignment(value)
            plain = literal_satisfied(pa, store, make_literal(False, sign, 0))
            negated = literal_satisfied(pa, store, make_literal(True, sign, 0))
            assert negated == (not plain)


def test_strong_implies_plain():
    for value in STATES:
        pa = state_assignment(value)
        if signed_atom_holds(pa, "+", 0):
            assert signed_atom_holds(pa, "", 0)
        if signed_atom_holds(pa, "-", 0):
            assert not signed_atom_holds(pa, "", 0)


def _directive(did, head, cond, weight=0, level=0, sign=""):
    return GroundDirective(did, sign, head, tuple(cond), weight, level)


def test_condition_satisfaction_worked_example():
    # Directives over a(4), a(5), a(6): ids 4, 5, 6 in the store.
    store = AtomStore()
    for v in (4, 5, 6):
        store.register(Atom("a", (Integer(v),)))
    ids = {4: 0, 5: 1, 6: 2}

    d6 = _directive(0, ids[5], [CondLiteral(False, "", atom_id=ids[4])], sign="-")
    d7 = _directive(1, ids[6], [CondLiteral(False, "-", atom_id=ids[5]),
                                CondLiteral(False, "+", atom_id=ids[4])])
    d5 = _directive(2, ids[4], [CondLiteral(True, "", atom_id=ids[5])])

    pa = PartialAssignment()
    assert not condition_satisfied(pa, store, d7)
    assert condition_satisfied(pa, store, d5)

    pa.assign(ids[4], TRUE, "x")
    assert condition_satisfied(pa, store, d6)

    pa.assign(ids[5], FALSE, "x")
    assert condition_satisfied(pa, store, d5)  # still satisfied
    assert condition_satisfied(pa, store, d7)


def test_applicability_head_rules():
    store = AtomStore()
    store.register(Atom("a", (Integer(4),)))
    store.register(Atom("a", (Integer(5),)))
    empty_cond = _directive(0, 1, [])
    pa = PartialAssignment()
    assert is_applicable(pa, store, empty_cond)

    pa.assign(1, MBT, "x")  # head at M stays applicable
    assert is_applicable(pa, store, empty_cond)

    pa2 = PartialAssignment()
    pa2.assign(1, FALSE, "x")
    assert not is_applicable(pa2, store, empty_cond)

    d5 = _directive(1, 0, [CondLiteral(True, "", atom_id=1)])
    pa3 = PartialAssignment()
    pa3.assign(0, TRUE, "x")
    pa3.assign(1, FALSE, "x")
    assert condition_satisfied(pa3, store, d5)
    assert not is_applicable(pa3, store, d5)  # head already assigned


def test_pattern_literal_over_anonymous():
    store = AtomStore()
    i1 = store.register(Atom("in", (Integer(5), Integer(1))))[0]
    store.register(Atom("in", (Integer(5), Integer(2))))
    pattern = Atom("in", (Integer(5), Variable("_1")))
    lit = CondLiteral(True, "", pattern=pattern)
    pa = PartialAssignment()
    assert literal_satisfied(pa, store, lit)  # no instance anywhere
    pa.assign(i1, MBT, "x")
    assert not literal_satisfied(pa, store, lit)

    other = CondLiteral(True, "", pattern=Atom("in", (Integer(6), Variable("_1"))))
    assert literal_satisfied(pa, store, other)


def _maxpriority(directives):
    """Two-step reference: maximal level first, then maximal weight."""
    top_level = max(d.level for d in directives)
    at_level = [d for d in directives if d.level == top_level]
    top_weight = max(d.weight for d in at_level)
    return [d for d in at_level if d.weight == top_weight]


def test_selection_prefers_level_over_weight():
    store = AtomStore()
    for i in range(2):
        store.register(Atom("h", (Integer(i),)))
    pool = HeuristicPool()
    pool.add(_directive(0, 0, [], weight=9, level=0))
    pool.add(_directive(1, 1, [], weight=1, level=1))
    pa = PartialAssignment()
    assert pool.select(pa, store).id == 1


def test_selection_weight_and_tiebreak():
    store = AtomStore()
    for i in range(3):
        store.register(Atom("h", (Integer(i),)))
    pool = HeuristicPool()
    pool.add(_directive(0, 0, [], weight=1))
    pool.add(_directive(1, 1, [], weight=2))
    pool.add(_directive(2, 2, [], weight=2))
    pa = PartialAssignment()
    assert pool.select(pa, store).id == 1  # highest weight, smallest id


def test_selection_random_seed_stays_in_maxpriority():
    store = AtomStore()
    for i in range(6):
        store.register(Atom("h", (Integer(i),)))
    pool = HeuristicPool()
    dirs = [_directive(i, i, [], weight=i % 2, level=0) for i in range(6)]
    for d in dirs:
        pool.add(d)
    pa = PartialAssignment()
    rng = random.Random(5)
    reference = {d.id for d in _maxpriority(dirs)}
    for _ in range(20):
        assert pool.select(pa, store, rng=rng).id in reference


def test_selection_skips_and_reconsiders():
    store = AtomStore()
    for i in range(2):
        store.register(Atom("h", (Integer(i),)))
    pool = HeuristicPool()
    pool.add(_directive(0, 0, [], weight=5))
    pool.add(_directive(1, 1, [], weight=1))
    pa = PartialAssignment()
    assert pool.select(pa, store, skip={0}).id == 1
    assert pool.select(pa, store).id == 0  # still available afterwards


def test_parked_entries_return_after_reactivate():
    store = AtomStore()
    for i in range(2):
        store.register(Atom("h", (Integer(i),)))
    pool = HeuristicPool()
    pool.add(_directive(0, 0, [], weight=5))
    pool.add(_directive(1, 1, [], weight=1))
    pa = PartialAssignment()
    pa.open_level()
    pa.assign(0, TRUE, "x")  # head of directive 0 assigned: parked
    assert pool.select(pa, store).id == 1
    pa.backtrack_to(0)
    pool.reactivate()
    assert pool.select(pa, store).id == 0


@given(st.integers(0, 10 ** 6))
@settings(max_examples=50)
def test_condition_matches_projection_formulation(seed):
    """Evaluating literal by literal agrees with the set formulation over
    the signed projection: positive condition inside, negated disjoint."""
    rng = random.Random(seed)
    store = AtomStore()
    n = 6
    for i in range(n):
        store.register(Atom("p", (Integer(i),)))
    pa = PartialAssignment()
    for atom in range(n):
        value = rng.choice([None, TRUE, FALSE, MBT])
        if value is not None:
            pa.assign(atom, value, "x")
    cond = []
    for _ in range(rng.randint(0, 4)):
        cond.append(CondLiteral(rng.random() < 0.5,
                                rng.choice(["", "+", "-"]),
                                atom_id=rng.randrange(n)))
    d = _directive(0, rng.randrange(n), cond)

    proj = pa.project()
    expected = all((lit.sign, lit.atom_id) in proj for lit in cond
                   if not lit.negated) and \
        not any((lit.sign, lit.atom_id) in proj for lit in cond if lit.negated)
    assert condition_satisfied(pa, store, d) == expected
