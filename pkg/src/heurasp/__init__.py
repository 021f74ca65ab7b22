"""heurasp: a miniature lazy-grounding answer set solver whose heuristic
directives are evaluated against the solver's three-valued partial
assignment, together with a brute-force answer-set oracle."""

from importlib import resources

from .aggregates import compile_aggregates
from .assignment import FALSE, MBT, TRUE, PartialAssignment
from .errors import ArgsError, CapError, EvalError, LPError, ParseError, SafetyError
from .generator import packable_instance
from .grounding import Grounder, eval_builtin, full_grounding
from .heuristics import (HeuristicPool, condition_satisfied, is_applicable,
                         literal_satisfied, make_literal)
from .normalize import directive_to_heuristic_rule, normalize
from .oracle import (enumerate_answer_sets, ground_for_oracle, is_answer_set,
                     stable_models_gl)
from .parser import parse_program
from .solver import Solver, SolverConfig, SolveResult, Statistics, solve

__version__ = "0.1.0"


def corpus_path(name):
    """Filesystem path of a bundled corpus program, e.g. "example3.lp" or
    "small/s02_two_stable.lp"."""
    return resources.files(__package__) / "corpus" / name


def corpus_text(name):
    return corpus_path(name).read_text(encoding="utf-8")
