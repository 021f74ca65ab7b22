"""Shared test utilities: solver/oracle wrappers and a random program
generator used by the neutrality suite."""

import random

from heurasp import (SolverConfig, enumerate_answer_sets, ground_for_oracle,
                     parse_program, solve)


def solve_sets(src, models=0, heuristics=True, **kwargs):
    config = SolverConfig(heuristics=heuristics, **kwargs)
    result = solve(parse_program(src), models=models, config=config)
    return {frozenset(m) for m in result.answer_sets}


def oracle_sets(src, atom_cap=24):
    gp = ground_for_oracle(parse_program(src))
    return set(enumerate_answer_sets(gp, atom_cap=atom_cap))


_ATOMS = ["a", "b", "c", "p(1)", "p(2)", "q(1)", "q(2)"]
_SIGNS = ["", "+", "-"]


def random_program(rng: random.Random) -> str:
    """Small random program over a fixed atom pool: normal rules, some
    constraints, an optional choice rule, plus random safe (ground)
    directives."""
    lines = []
    pool = list(_ATOMS)
    if rng.random() < 0.6:
        guessed = rng.sample(pool, rng.randint(1, 2))
        lines.append("{ " + " ; ".join(guessed) + " }.")
    for _ in range(rng.randint(2, 5)):
        head = rng.choice(pool)
        n_pos = rng.randint(0, 2)
        n_neg = rng.randint(0, 2)
        body = rng.sample(pool, min(n_pos + n_neg, len(pool)))
        pos, neg = body[:n_pos], body[n_pos:]
        parts = pos + [f"not {a}" for a in neg]
        if parts:
            lines.append(f"{head} :- {', '.join(parts)}.")
        else:
            lines.append(f"{head}.")
    for _ in range(rng.randint(0, 2)):
        body = rng.sample(pool, rng.randint(1, 2))
        parts = [a if rng.random() < 0.7 else f"not {a}" for a in body]
        lines.append(f":- {', '.join(parts)}.")
    return "\n".join(lines) + "\n"


def random_directives(rng: random.Random, count=None) -> str:
    lines = []
    for _ in range(rng.randint(1, 3) if count is None else count):
        head = rng.choice(_SIGNS) + rng.choice(_ATOMS)
        condition = []
        for atom in rng.sample(_ATOMS, rng.randint(0, 2)):
            lit = rng.choice(_SIGNS) + atom
            condition.append(f"not {lit}" if rng.random() < 0.4 else lit)
        weight = rng.randint(0, 5)
        level = rng.randint(0, 2)
        body = f" : {', '.join(condition)}" if condition else ""
        lines.append(f"#heuristic {head}{body}. [{weight}@{level}]")
    return "\n".join(lines) + "\n"
