"""Quantile queries: smallest budget that makes staying on budget likely enough.

For a threshold below 1 the answer is found by binary search over the
budget, using an a-priori bound: with p_min the smallest transition
probability, k_max the largest cost and n the number of states, every
scheduler satisfies P(K <= B) >= tau once

    B >= k_max * ceil(n * (L / p_min**n + 1)),   L >= -ln(1 - tau).

Any rational upper bound L works, so ln is evaluated in exact dyadic
arithmetic with directed upward rounding instead of floating point: the
bound stays a bound, bit for bit. At tau = 1 probabilities stop
mattering and the question degenerates to worst-case path cost, solved
by an integer fixpoint on the control structure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import NotValidatedError, ThresholdRangeError
from .formula import parse
from .mdp_solver import solve_max, solve_min
from .model import CostProcess, validate

__all__ = ["QuantileBounds", "budget_upper_bound", "quantile_query", "ln_upper"]


@dataclass(frozen=True)
class QuantileBounds:
    """Ingredients and result of the a-priori budget bound.

    ``log_bound`` is the rational L >= -ln(1 - tau) actually used; it is
    dyadic (a power-of-two denominator) by construction.
    """

    p_min: Fraction
    k_max: int
    B_bound: int
    log_bound: Fraction


def ln_upper(value: Fraction, frac_bits: int = 64) -> Fraction:
    """A dyadic rational upper bound on ln(value), for value >= 1.

    Range-reduces to [1, 2) against an upper bound on ln 2, sums the
    atanh series with an explicit tail estimate, and rounds the total
    upward to ``frac_bits`` fractional bits. Tightening ``frac_bits``
    only ever lowers the result toward the true logarithm.
    """
    if value < 1:
        raise ValueError(f"ln_upper needs value >= 1, got {value}")
    exponent = 0
    reduced = value
    while reduced >= 2:
        reduced /= 2
        exponent += 1
    total = _atanh_ln(reduced, frac_bits)
    if exponent:
        total += exponent * _atanh_ln(Fraction(2), frac_bits)
    return _round_up_dyadic(total, frac_bits)


def _atanh_ln(value: Fraction, frac_bits: int) -> Fraction:
    """Exact-series upper bound on ln(value) for value in [1, 2]."""
    if value == 1:
        return Fraction(0)
    z = (value - 1) / (value + 1)
    z2 = z * z
    term = z
    total = Fraction(0)
    n = 0
    threshold = Fraction(1, 2 ** (frac_bits + 2))
    while True:
        total += term / (2 * n + 1)
        # Tail after the z^(2n+1) term is below z^(2n+3)/((2n+3)(1-z^2)).
        tail = term * z2 / ((2 * n + 3) * (1 - z2))
        if tail <= threshold:
            return 2 * (total + tail)
        term *= z2
        n += 1


def _round_up_dyadic(value: Fraction, frac_bits: int) -> Fraction:
    scale = 1 << frac_bits
    return Fraction(math.ceil(value * scale), scale)


def _description_extremes(process: CostProcess) -> tuple[Fraction, int]:
    p_min = Fraction(1)
    k_max = 0
    for state in process.states:
        for action in process.enabled[state]:
            for _, cost, prob in process.transitions[(state, action)]:
                if prob < p_min:
                    p_min = prob
                if cost > k_max:
                    k_max = cost
    return p_min, k_max


def budget_upper_bound(process: CostProcess, threshold: Fraction) -> QuantileBounds:
    """Budget guaranteed to satisfy P(K <= B) >= threshold for every scheduler.

    Args:
        process: validated cost process.
        threshold: rational in [0, 1).

    Returns:
        The bound record. The precision of the logarithm starts at 64
        fractional bits and doubles until the rounded budget stops
        changing; every intermediate bound is already valid, so this only
        trims slack.
    """
    if not 0 <= threshold < 1:
        raise ThresholdRangeError(
            f"threshold must be in [0, 1) for the budget bound, got {threshold}"
        )
    report = validate(process)
    if not report.ok:
        raise NotValidatedError(report)
    p_min, k_max = _description_extremes(process)
    n = len(process.states)
    if threshold == 0:
        return QuantileBounds(p_min, k_max, k_max * n, Fraction(0))
    bits = 64
    log_bound = ln_upper(1 / (1 - threshold), bits)
    bound = k_max * math.ceil(n * (log_bound / p_min**n + 1))
    while True:
        bits *= 2
        tighter_log = ln_upper(1 / (1 - threshold), bits)
        tighter = k_max * math.ceil(n * (tighter_log / p_min**n + 1))
        if tighter == bound:
            return QuantileBounds(p_min, k_max, bound, log_bound)
        bound, log_bound = tighter, tighter_log


def quantile_query(
    process: CostProcess, threshold: Fraction, quantifier: str
) -> "int | None":
    """Smallest budget B whose threshold query succeeds, or None for infinity.

    For threshold < 1: binary search on [0, B_bound], one optimal solve
    per probe; soundness of the upper end comes from the a-priori bound.
    At threshold 1 the answer is the optimal worst-case path cost:
    minimized over schedulers for "exists", maximized for "forall";
    None signals that a positive-cost cycle makes it unbounded.
    """
    if not 0 <= threshold <= 1:
        raise ThresholdRangeError(f"threshold must be in [0, 1], got {threshold}")
    if quantifier not in ("exists", "forall"):
        raise ValueError(f"quantifier must be 'exists' or 'forall', got {quantifier!r}")
    report = validate(process)
    if not report.ok:
        raise NotValidatedError(report)

    if threshold == 1:
        return _worst_case_cost(process, "min" if quantifier == "exists" else "max")

    solver = solve_max if quantifier == "exists" else solve_min
    upper = budget_upper_bound(process, threshold).B_bound
    lo, hi = 0, upper
    while lo < hi:
        mid = (lo + hi) // 2
        if solver(process, parse(f"x<={mid}")).value >= threshold:
            hi = mid
        else:
            lo = mid + 1
    return lo


def _worst_case_cost(process: CostProcess, mode: str) -> "int | None":
    """Optimal supremum of accumulated cost over the run support.

    Least fixpoint of D(q) = opt_a max_succ (cost + D(succ)) with
    D(target) = 0, over the integers capped just above |Q| * k_max:
    finite values never exceed that product (zero-cost cycles add
    nothing, and any finite-valued strategy avoids positive-cost cycles),
    so crossing the cap proves the true value is infinite.
    """
    target = process.target
    _, k_max = _description_extremes(process)
    cap = len(process.states) * k_max
    infinite = cap + 1
    dist = {q: 0 for q in process.states}
    changed = True
    while changed:
        changed = False
        for state in process.states:
            if state == target:
                continue
            best: "int | None" = None
            for action in process.enabled[state]:
                worst = 0
                for succ, cost, _ in process.transitions[(state, action)]:
                    reach = dist[succ]
                    candidate = infinite if reach >= infinite else cost + reach
                    if candidate > worst:
                        worst = candidate
                if worst > infinite:
                    worst = infinite
                if best is None or (worst < best if mode == "min" else worst > best):
                    best = worst
            assert best is not None
            if best != dist[state]:
                dist[state] = best
                changed = True
    value = dist[process.initial]
    return None if value >= infinite else value
