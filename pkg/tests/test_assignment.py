import random

from hypothesis import given, settings
from hypothesis import strategies as st

from heurasp.assignment import FALSE, MBT, TRUE, PartialAssignment


def test_legal_transitions():
    pa = PartialAssignment()
    assert pa.assign(0, TRUE, "fact") == "ok"
    assert pa.assign(1, MBT, "constraint:0") == "ok"
    assert pa.assign(1, TRUE, "rule:0") == "promoted"
    assert pa.assign(2, FALSE, "completion") == "ok"


def test_conflicting_transitions_leave_state():
    pa = PartialAssignment()
    pa.assign(0, TRUE, "fact")
    assert pa.assign(0, FALSE, "x") == "conflict"
    assert pa.value(0) == TRUE
    pa.assign(1, MBT, "x")
    assert pa.assign(1, FALSE, "x") == "conflict"
    pa.assign(2, FALSE, "x")
    assert pa.assign(2, MBT, "x") == "conflict"
    assert pa.assign(2, TRUE, "x") == "conflict"


def test_weaker_requests_are_noops():
    pa = PartialAssignment()
    pa.assign(0, TRUE, "x")
    assert pa.assign(0, MBT, "x") == "noop"
    assert pa.assign(0, TRUE, "x") == "noop"
    assert pa.value(0) == TRUE


def test_projection_from_worked_states():
    # A0 empty, A1 = {T a(4)}, A2 = {T a(4), F a(5)}: the projection gains
    # the plain and strong atom together for T, and the negative one for F.
    pa = PartialAssignment()
    assert pa.project().plain == frozenset()

    pa.assign(4, TRUE, "decision")
    proj = pa.project()
    assert proj.plain == {4} and proj.pos == {4} and proj.neg == frozenset()

    pa.assign(5, FALSE, "completion")
    proj = pa.project()
    assert proj.plain == {4} and proj.pos == {4} and proj.neg == {5}


def test_projection_mbt_is_plain_only():
    pa = PartialAssignment()
    pa.assign(7, MBT, "constraint:1")
    proj = pa.project()
    assert 7 in proj.plain and 7 not in proj.pos and 7 not in proj.neg


def test_projection_never_contains_both_signs():
    pa = PartialAssignment()
    ops = [(0, TRUE), (1, FALSE), (2, MBT), (2, TRUE), (3, MBT)]
    for atom, value in ops:
        pa.assign(atom, value, "x")
    proj = pa.project()
    assert not (proj.plain & proj.neg)
    assert proj.pos <= proj.plain


def test_backtrack_restores_levels():
    pa = PartialAssignment()
    pa.assign(0, TRUE, "fact")
    pa.open_level()
    pa.assign(1, TRUE, "decision")
    pa.open_level()
    pa.assign(2, FALSE, "x")
    pa.open_level()
    pa.assign(3, MBT, "x")
    changed = pa.backtrack_to(1)
    assert changed == {2, 3}
    assert pa.value(0) == TRUE and pa.value(1) == TRUE
    assert pa.value(2) is None and pa.value(3) is None
    assert pa.current_level == 1


def test_backtrack_reverts_promotion():
    pa = PartialAssignment()
    pa.open_level()
    pa.assign(0, MBT, "constraint:0")
    pa.open_level()
    pa.assign(0, TRUE, "rule:1")
    pa.backtrack_to(1)
    assert pa.value(0) == MBT


def test_backtrack_to_current_level_is_identity():
    pa = PartialAssignment()
    pa.open_level()
    pa.assign(0, TRUE, "decision")
    assert pa.backtrack_to(pa.current_level) == set()
    assert pa.value(0) == TRUE


@given(st.lists(st.tuples(st.integers(0, 5),
                          st.sampled_from([TRUE, FALSE, MBT])),
                max_size=20),
       st.lists(st.tuples(st.integers(0, 5),
                          st.sampled_from([TRUE, FALSE, MBT])),
                max_size=20))
@settings(max_examples=200)
def test_assign_backtrack_roundtrip(base_ops, level_ops):
    pa = PartialAssignment()
    for atom, value in base_ops:
        pa.assign(atom, value, "x")
    snapshot = {a: pa.value(a) for a in range(6)}
    level = pa.open_level()
    for atom, value in level_ops:
        pa.assign(atom, value, "x")
    pa.backtrack_to(level - 1)
    assert {a: pa.value(a) for a in range(6)} == snapshot


def test_projection_monotone_within_branch():
    rng = random.Random(11)
    pa = PartialAssignment()
    pa.open_level()
    previous = pa.project()
    for _ in range(40):
        pa.assign(rng.randrange(8), rng.choice([TRUE, FALSE, MBT]), "x")
        current = pa.project()
        assert previous.plain <= current.plain
        assert previous.pos <= current.pos
        assert previous.neg <= current.neg
        previous = current


def test_states_partition():
    pa = PartialAssignment()
    pa.assign(0, TRUE, "x")
    pa.assign(1, FALSE, "x")
    pa.assign(2, MBT, "x")
    for atom in range(4):
        states = [pa.is_unassigned(atom), pa.is_false(atom),
                  pa.is_mbt(atom), pa.is_true(atom)]
        assert states.count(True) == 1
