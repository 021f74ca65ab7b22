"""Three-valued partial assignment (T, F, M) as a trail with decision levels.

Legal transitions are unassigned -> {T, F, M} and the promotion M -> T;
anything else that would change a value is a conflict.  Backtracking to a
level restores exactly the map that held when the level was opened.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

TRUE = "T"
FALSE = "F"
MBT = "M"  # must-be-true: forced true but not yet derived by a firing rule


@dataclass(frozen=True)
class TrailEntry:
    atom: int
    old: Optional[str]
    new: str
    reason: str
    level: int


@dataclass(frozen=True)
class SignedProjection:
    """The signed atom view of an assignment: plain atoms hold when T or M,
    + only when T, - only when F."""

    plain: frozenset
    pos: frozenset
    neg: frozenset

    def __contains__(self, signed):
        sign, atom = signed
        if sign == "":
            return atom in self.plain
        if sign == "+":
            return atom in self.pos
        return atom in self.neg


class PartialAssignment:
    def __init__(self):
        self._value = {}
        self.trail = []
        self._level_marks = [0]

    @property
    def current_level(self):
        return len(self._level_marks) - 1

    def value(self, atom):
        return self._value.get(atom)

    def is_true(self, atom):
        return self._value.get(atom) == TRUE

    def is_false(self, atom):
        return self._value.get(atom) == FALSE

    def is_mbt(self, atom):
        return self._value.get(atom) == MBT

    def holds_plain(self, atom):
        """Atom is in the signed projection without a sign (T or M)."""
        return self._value.get(atom) in (TRUE, MBT)

    def is_unassigned(self, atom):
        return atom not in self._value

    def assigned_atoms(self):
        return self._value.keys()

    # -- transitions ---------------------------------------------------------

    def assign(self, atom, value, reason):
        """Apply a transition at the current level.

        Returns "ok", "promoted" (M -> T), "noop" (no strengthening needed),
        or "conflict" (the state is left unchanged)."""
        old = self._value.get(atom)
        if old is None:
            self._value[atom] = value
            self.trail.append(TrailEntry(atom, None, value, reason,
                                         self.current_level))
            return "ok"
        if old == value or (old == TRUE and value == MBT):
            return "noop"
        if old == MBT and value == TRUE:
            self._value[atom] = TRUE
            self.trail.append(TrailEntry(atom, MBT, TRUE, reason,
                                         self.current_level))
            return "promoted"
        return "conflict"

    def open_level(self):
        self._level_marks.append(len(self.trail))
        return self.current_level

    def backtrack_to(self, level):
        """Pop trail entries above `level` in reverse, restoring old values.
        Returns the atoms whose value changed."""
        assert level <= self.current_level
        mark = self._level_marks[level + 1] if level + 1 < len(self._level_marks) \
            else len(self.trail)
        changed = set()
        while len(self.trail) > mark:
            entry = self.trail.pop()
            if entry.old is None:
                del self._value[entry.atom]
            else:
                self._value[entry.atom] = entry.old
            changed.add(entry.atom)
        del self._level_marks[level + 1:]
        return changed

    # -- projection ------------------------------------------------------------

    def project(self):
        plain, pos, neg = set(), set(), set()
        for atom, value in self._value.items():
            if value == FALSE:
                neg.add(atom)
            else:
                plain.add(atom)
                if value == TRUE:
                    pos.add(atom)
        return SignedProjection(frozenset(plain), frozenset(pos),
                                frozenset(neg))

    def trace_line(self, entry, name):
        return f"ASSIGN {name}={entry.new} @{entry.level} reason={entry.reason}"
