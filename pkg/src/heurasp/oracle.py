"""Brute-force reference semantics over a ground program.

Candidates are subsets of the Herbrand base, checked with the FLP reduct:
a candidate must be a model of the program, and no proper subset may
satisfy every rule whose body the candidate satisfies.  Aggregates are
evaluated directly on each (sub)candidate, which is what makes the FLP
variant the primary check here; the Gelfond-Lifschitz least-model check is
kept alongside for aggregate-free programs and is asserted equal in tests.
"""

from __future__ import annotations

from .errors import CapError
from .grounding import BODY_PREDICATE, GroundProgram, full_grounding
from .normalize import normalize


def ground_for_oracle(program, cap=10 ** 6):
    """Exhaustive grounding of a normalized program, aggregates intact."""
    return full_grounding(normalize(program), cap)


class _BitProgram:
    """Rules compiled to bitmasks over the ground program's base atoms."""

    def __init__(self, gp: GroundProgram, atom_cap):
        base = set()
        for rule in gp.rules:
            if rule.head is not None:
                base.add(rule.head)
            base.update(rule.pos)
            base.update(rule.neg)
            for agg in rule.aggregates:
                for _, cond in agg.elements:
                    base.update(cond)
        base = {a for a in base
                if gp.store.atom(a).predicate != BODY_PREDICATE}
        self.atoms = sorted(base)
        if len(self.atoms) > atom_cap:
            raise CapError(
                f"Herbrand base has {len(self.atoms)} atoms, cap is {atom_cap}")
        self.bit = {a: i for i, a in enumerate(self.atoms)}
        self.store = gp.store

        self.rules = []
        for rule in gp.rules:
            head = self.bit[rule.head] if rule.head is not None else None
            pos = 0
            for a in rule.pos:
                pos |= 1 << self.bit[a]
            neg = 0
            for a in rule.neg:
                neg |= 1 << self.bit[a]
            aggs = []
            for agg in rule.aggregates:
                elements = []
                for values, cond in agg.elements:
                    mask = 0
                    for a in cond:
                        mask |= 1 << self.bit[a]
                    elements.append((values, mask))
                aggs.append((agg.function, agg.bound, tuple(elements)))
            self.rules.append((head, pos, neg, tuple(aggs)))

    def body_satisfied(self, rule, mask):
        head, pos, neg, aggs = rule
        if pos & mask != pos or neg & mask:
            return False
        for function, bound, elements in aggs:
            seen = set()
            for values, cond_mask in elements:
                if values not in seen and cond_mask & mask == cond_mask:
                    seen.add(values)
            value = len(seen) if function == "count" else sum(v[0] for v in seen)
            if value < bound:
                return False
        return True

    def is_model(self, mask):
        for rule in self.rules:
            if self.body_satisfied(rule, mask):
                head = rule[0]
                if head is None or not (mask >> head) & 1:
                    return False
        return True

    def is_flp_answer_set(self, mask):
        if not self.is_model(mask):
            return False
        reduct = [r for r in self.rules if self.body_satisfied(r, mask)]
        sub = (mask - 1) & mask
        while sub != mask:
            if all(not self.body_satisfied(r, sub) or (sub >> r[0]) & 1
                   for r in reduct):
                return False
            if sub == 0:
                break
            sub = (sub - 1) & mask
        return True

    def least_model_gl(self, mask):
        """Least model of the Gelfond-Lifschitz reduct wrt mask; only valid
        on aggregate-free programs."""
        kept = [(head, pos) for head, pos, neg, aggs in self.rules
                if head is not None and not (neg & mask)]
        lm = 0
        changed = True
        while changed:
            changed = False
            for head, pos in kept:
                bit = 1 << head
                if not lm & bit and pos & lm == pos:
                    lm |= bit
                    changed = True
        return lm

    def is_gl_answer_set(self, mask):
        for head, pos, neg, aggs in self.rules:
            if aggs:
                raise ValueError("GL check requires an aggregate-free program")
            if head is None and pos & mask == pos and not (neg & mask):
                return False
        return self.least_model_gl(mask) == mask

    def visible(self, mask):
        out = []
        for a in self.atoms:
            if (mask >> self.bit[a]) & 1:
                atom = self.store.atom(a)
                if not atom.predicate.startswith("_"):
                    out.append(str(atom))
        return frozenset(out)

    def mask_of(self, atom_names):
        names = set(atom_names)
        mask = 0
        matched = set()
        for a in self.atoms:
            text = str(self.store.atom(a))
            if text in names:
                mask |= 1 << self.bit[a]
                matched.add(text)
        if matched != names:
            raise ValueError(f"atoms not in Herbrand base: {names - matched}")
        return mask


def enumerate_answer_sets(gp: GroundProgram, atom_cap=24):
    """All answer sets of the ground program (directives ignored), reported
    as frozensets of user-visible atom names, in deterministic order."""
    bp = _BitProgram(gp, atom_cap)
    out = []
    seen = set()
    for mask in range(1 << len(bp.atoms)):
        if bp.is_flp_answer_set(mask):
            model = bp.visible(mask)
            if model not in seen:
                seen.add(model)
                out.append(model)
    return out


def is_answer_set(gp: GroundProgram, atom_names, atom_cap=24):
    """FLP check of one candidate, given as an iterable of ground atom
    names over the full base (complement atoms included where relevant)."""
    bp = _BitProgram(gp, atom_cap)
    return bp.is_flp_answer_set(bp.mask_of(atom_names))


def stable_models_gl(gp: GroundProgram, atom_cap=24):
    """All stable models under the Gelfond-Lifschitz reduct; aggregate-free
    programs only.  Used as the cross-check for the FLP route."""
    bp = _BitProgram(gp, atom_cap)
    out = []
    seen = set()
    for mask in range(1 << len(bp.atoms)):
        if bp.is_gl_answer_set(mask):
            model = bp.visible(mask)
            if model not in seen:
                seen.add(model)
                out.append(model)
    return out
