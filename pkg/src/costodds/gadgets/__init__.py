"""Reduction gadgets: generators for models with certified exact answers."""

from .chainify import (
    GadgetCertificate,
    TypedCostChain,
    circuit_to_chain,
    dfa_to_typed_chain,
    padding_degree,
    posslp_instance,
    scale_factor,
    typed_to_chain,
)
from .circuits import (
    ArithmeticCircuit,
    Gate,
    check_circuit,
    circuit_from_json,
    circuit_to_json,
    eval_circuit,
    lift_gate,
    make_circuit,
    normalize_circuit,
)
from .costutility import qualitative_to_cost_utility
from .countdown import (
    CountdownGame,
    countdown_brute,
    countdown_from_json,
    countdown_to_json,
    countdown_to_process,
    make_countdown,
)
from .parikh import PATH_GUARD, ParikhDfa, circuit_to_dfa, count_parikh_paths
from .subsetsum import (
    qsubsetsum_brute,
    qsubsetsum_to_process,
    universal_qsubsetsum_to_process,
)
from .threshold import threshold_to_half

__all__ = [
    "ArithmeticCircuit",
    "CountdownGame",
    "Gate",
    "GadgetCertificate",
    "ParikhDfa",
    "PATH_GUARD",
    "TypedCostChain",
    "check_circuit",
    "circuit_from_json",
    "circuit_to_chain",
    "circuit_to_dfa",
    "circuit_to_json",
    "count_parikh_paths",
    "countdown_brute",
    "countdown_from_json",
    "countdown_to_json",
    "countdown_to_process",
    "dfa_to_typed_chain",
    "eval_circuit",
    "lift_gate",
    "make_circuit",
    "make_countdown",
    "normalize_circuit",
    "padding_degree",
    "posslp_instance",
    "qsubsetsum_brute",
    "qsubsetsum_to_process",
    "qualitative_to_cost_utility",
    "scale_factor",
    "threshold_to_half",
    "typed_to_chain",
    "universal_qsubsetsum_to_process",
]
