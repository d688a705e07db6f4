"""Exact solving and reduction gadgets for budget-constrained reachability.

Models are finite-state processes whose transitions carry non-negative
integer costs; queries ask for the best or worst probability that the
cost accumulated on reaching the target satisfies a Boolean budget
formula. All probabilities are exact rationals end to end.
"""

from .chain_solver import TruncatedDistribution, cost_distribution, solve_chain
from .errors import (
    CostOddsError,
    CyclicProcessError,
    FormulaSyntaxError,
    GuardExceededError,
    ModelFormatError,
    NotAChainError,
    NotValidatedError,
    PreconditionError,
    SchedulerGapError,
    SingularMatrixError,
    ThresholdRangeError,
)
from .formula import (
    And,
    Atom,
    CostFormula,
    Formula,
    IntervalSet,
    Not,
    Or,
    is_constant_formula,
    max_constant,
    normalize,
    parse,
    satisfies,
    to_text,
)
from .mc import SampleReport, estimate, sample_run
from .mdp_solver import (
    Scheduler,
    SolveResult,
    TOP,
    decide,
    decide_cost_utility,
    decide_qualitative,
    induce_chain,
    scheduler_from_json,
    scheduler_to_json,
    solve_acyclic,
    solve_max,
    solve_min,
)
from .model import (
    CostChain,
    CostProcess,
    CostUtilityProcess,
    CostUtilityTransition,
    Finding,
    Transition,
    ValidationReport,
    build_chain,
    build_cost_utility_process,
    build_process,
    cost_utility_from_json,
    cost_utility_to_json,
    is_acyclic,
    is_chain,
    model_from_json,
    model_to_json,
    validate,
    validate_cost_utility,
)
from .quantile import QuantileBounds, budget_upper_bound, ln_upper, quantile_query
from .rational import format_rational, parse_cost, parse_rational

__version__ = "0.1.0"

__all__ = [
    "And",
    "Atom",
    "CostChain",
    "CostFormula",
    "CostOddsError",
    "CostProcess",
    "CostUtilityProcess",
    "CostUtilityTransition",
    "CyclicProcessError",
    "Finding",
    "Formula",
    "FormulaSyntaxError",
    "GuardExceededError",
    "IntervalSet",
    "ModelFormatError",
    "Not",
    "NotAChainError",
    "NotValidatedError",
    "Or",
    "PreconditionError",
    "QuantileBounds",
    "SampleReport",
    "Scheduler",
    "SchedulerGapError",
    "SingularMatrixError",
    "SolveResult",
    "TOP",
    "ThresholdRangeError",
    "Transition",
    "TruncatedDistribution",
    "ValidationReport",
    "budget_upper_bound",
    "build_chain",
    "build_cost_utility_process",
    "build_process",
    "cost_distribution",
    "cost_utility_from_json",
    "cost_utility_to_json",
    "decide",
    "decide_cost_utility",
    "decide_qualitative",
    "estimate",
    "format_rational",
    "induce_chain",
    "is_acyclic",
    "is_chain",
    "is_constant_formula",
    "ln_upper",
    "max_constant",
    "model_from_json",
    "model_to_json",
    "normalize",
    "parse",
    "parse_cost",
    "parse_rational",
    "quantile_query",
    "sample_run",
    "satisfies",
    "scheduler_from_json",
    "scheduler_to_json",
    "solve_acyclic",
    "solve_chain",
    "solve_max",
    "solve_min",
    "to_text",
    "validate",
    "validate_cost_utility",
    "__version__",
]
