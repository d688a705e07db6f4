"""Lifting qualitative cost questions into the two-counter setting."""

from __future__ import annotations

from ..errors import NotValidatedError
from ..model import CostProcess, CostUtilityProcess, build_cost_utility_process, validate

__all__ = ["qualitative_to_cost_utility"]


def qualitative_to_cost_utility(process: CostProcess, total: int) -> CostUtilityProcess:
    """Duplicate every cost onto the utility track.

    A scheduler hits accumulated cost exactly ``total`` almost surely
    in the input iff the result satisfies the cost-utility query with
    cost cap ``total`` and utility goal ``total``: staying under the cap
    while earning the goal forces both counters to land on it.
    """
    if not isinstance(total, int) or isinstance(total, bool) or total < 0:
        raise ValueError(f"total must be a non-negative int, got {total!r}")
    report = validate(process)
    if not report.ok:
        raise NotValidatedError(report)
    entries = [
        (state, action, entry.successor, entry.cost, entry.cost, entry.prob)
        for state in process.states
        if state != process.target
        for action in process.enabled[state]
        for entry in process.transitions[(state, action)]
    ]
    return build_cost_utility_process(
        entries, process.initial, process.target, states=process.states
    )
