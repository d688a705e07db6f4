"""Optimal budget-formula probabilities over schedulers, with witnesses.

The decision variable is a deterministic cost-aware memoryless scheduler:
a map from (state, accumulated cost) to an enabled action. Costs above
the formula's largest constant are indistinguishable, so the cost
component saturates into a single ``TOP`` bucket whose value is the
formula's constant tail verdict. That truncation makes the search space
finite and the optimum attainable by backward induction over cost levels.

Within one cost level only zero-cost transitions matter, and they may
form cycles; those are resolved by exact policy iteration (evaluate a
policy with one rational linear solve, switch only on strict improvement,
terminate because policies never repeat). Acyclic processes skip all of
that and use a memoized recursion instead. Both engines tie-break equal
actions toward the lowest canonical index so schedulers are reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Final, Iterable, Mapping

from .errors import (
    CyclicProcessError,
    ModelFormatError,
    NotValidatedError,
    SchedulerGapError,
    ThresholdRangeError,
)
from .formula import Formula, max_constant, parse, satisfies
from .linalg import solve_linear_system
from .model import (
    CostChain,
    CostProcess,
    CostUtilityProcess,
    build_chain,
    is_acyclic,
    validate,
    validate_cost_utility,
)

__all__ = [
    "TOP",
    "Scheduler",
    "SolveResult",
    "solve_max",
    "solve_min",
    "solve_acyclic",
    "decide",
    "decide_qualitative",
    "decide_cost_utility",
    "induce_chain",
    "scheduler_to_json",
    "scheduler_from_json",
]

# Saturation marker for accumulated costs beyond the formula's last constant.
TOP: Final[str] = "top"

SchedulerKey = tuple[str, "int | str"]


@dataclass(frozen=True)
class Scheduler:
    """Deterministic cost-aware memoryless scheduler.

    ``entries`` records a choice for every reachable (state, saturated
    cost) pair at which more than one action is enabled; states with a
    single action need no entry. ``budget`` is the saturation point:
    costs above it map to ``TOP``.
    """

    budget: int
    entries: Mapping[SchedulerKey, str]

    def action_at(self, process: CostProcess, state: str, cost: "int | str") -> str:
        """The action this scheduler plays at ``state`` with the given cost."""
        acts = process.enabled[state]
        if len(acts) == 1:
            return acts[0]
        if cost == TOP or (isinstance(cost, int) and cost > self.budget):
            key: SchedulerKey = (state, TOP)
        else:
            key = (state, cost)
        try:
            return self.entries[key]
        except KeyError:
            raise SchedulerGapError(
                f"scheduler has no entry for state {state!r} at cost {key[1]}"
            ) from None


@dataclass(frozen=True)
class SolveResult:
    """An optimal value together with a scheduler attaining it."""

    value: Fraction
    scheduler: Scheduler
    mode: str


def solve_max(process: CostProcess, formula: Formula) -> SolveResult:
    """Maximal probability over schedulers that the final cost satisfies the formula."""
    return _solve(process, formula, "max")


def solve_min(process: CostProcess, formula: Formula) -> SolveResult:
    """Minimal probability over schedulers; otherwise as ``solve_max``."""
    return _solve(process, formula, "min")


def solve_acyclic(process: CostProcess, formula: Formula, mode: str) -> SolveResult:
    """Optimize on an acyclic process by plain memoized recursion.

    Same contract as ``solve_max``/``solve_min`` but refuses cyclic
    inputs instead of falling back to policy iteration.
    """
    _check_mode(mode)
    report = validate(process)
    if not report.ok:
        raise NotValidatedError(report)
    if not is_acyclic(process):
        raise CyclicProcessError("control graph has a cycle")
    return _solve_dag(process, formula, mode)


def decide(
    process: CostProcess,
    formula: Formula,
    threshold: Fraction,
    quantifier: str,
) -> tuple[bool, Scheduler]:
    """Threshold query: does some (or every) scheduler reach the threshold?

    Args:
        process: validated cost process.
        formula: budget formula over the accumulated cost.
        threshold: rational in [0, 1].
        quantifier: "exists" (some scheduler) or "forall" (all schedulers).

    Returns:
        The verdict plus the optimizing scheduler: a witness for a true
        "exists", a counter-witness for a false "forall".
    """
    if not 0 <= threshold <= 1:
        raise ThresholdRangeError(f"threshold must be in [0, 1], got {threshold}")
    if quantifier == "exists":
        result = solve_max(process, formula)
    elif quantifier == "forall":
        result = solve_min(process, formula)
    else:
        raise ValueError(f"quantifier must be 'exists' or 'forall', got {quantifier!r}")
    return result.value >= threshold, result.scheduler


def decide_qualitative(process: CostProcess, total: int) -> tuple[bool, Scheduler]:
    """Can some scheduler make the accumulated cost equal ``total`` almost surely?"""
    if not isinstance(total, int) or isinstance(total, bool) or total < 0:
        raise ValueError(f"total must be a non-negative int, got {total!r}")
    result = solve_max(process, parse(f"x={total}"))
    return result.value == 1, result.scheduler


def induce_chain(process: CostProcess, scheduler: Scheduler) -> CostChain:
    """Fix the scheduler's choices, yielding the chain it induces.

    Product states pair an original state with a saturated cost; all
    target copies collapse into the original target so the result is a
    well-formed chain. Transition costs are preserved, hence the chain's
    accumulated cost distribution equals the process's under this
    scheduler.
    """
    report = validate(process)
    if not report.ok:
        raise NotValidatedError(report)
    target = process.target
    if process.initial == target:
        return build_chain([], target, target)

    def name(state: str, cost: "int | str") -> str:
        return f"{state}@{cost}"

    start = (process.initial, 0 if scheduler.budget >= 0 else TOP)
    seen = {start}
    frontier = [start]
    rows: list[tuple[str, str, int, Fraction]] = []
    used_names = {target, name(*start)}
    while frontier:
        state, cost = frontier.pop()
        action = scheduler.action_at(process, state, cost)
        for succ, step, prob in process.transitions[(state, action)]:
            if succ == target:
                rows.append((name(state, cost), target, step, prob))
                continue
            if cost == TOP:
                nxt: "int | str" = TOP
            else:
                total = cost + step
                nxt = total if total <= scheduler.budget else TOP
            rows.append((name(state, cost), name(succ, nxt), step, prob))
            key = (succ, nxt)
            if key not in seen:
                seen.add(key)
                frontier.append(key)
                label = name(succ, nxt)
                if label in used_names:
                    raise ModelFormatError(f"state name collision on {label!r}")
                used_names.add(label)
    return build_chain(rows, name(*start), target)


def decide_cost_utility(process: CostUtilityProcess, cost_cap: int, goal: int) -> bool:
    """Almost-sure combined query: cost at most ``cost_cap`` and utility at least ``goal``.

    Maximizes over schedulers on the product truncation where cost is
    pruned above the cap (such runs can never satisfy the conjunction)
    and utility saturates at the goal.
    """
    for label, bound in (("cost_cap", cost_cap), ("goal", goal)):
        if not isinstance(bound, int) or isinstance(bound, bool) or bound < 0:
            raise ValueError(f"{label} must be a non-negative int, got {bound!r}")
    report = validate_cost_utility(process)
    if not report.ok:
        raise NotValidatedError(report)
    target = process.target
    if process.initial == target:
        return goal == 0

    start = (process.initial, 0, 0)
    levels: dict[tuple[int, int], set[str]] = {}
    seen = {start}
    frontier = [start]
    while frontier:
        state, c, u = frontier.pop()
        levels.setdefault((c, u), set()).add(state)
        for action in process.enabled[state]:
            for succ, kc, ku, _ in process.transitions[(state, action)]:
                if succ == target:
                    continue
                c2 = c + kc
                if c2 > cost_cap:
                    continue
                u2 = min(u + ku, goal)
                key = (succ, c2, u2)
                if key not in seen:
                    seen.add(key)
                    frontier.append(key)

    value: dict[tuple[str, int, int], Fraction] = {}
    for c, u in sorted(levels, key=lambda cu: cu[0] + cu[1], reverse=True):
        members = sorted(levels[(c, u)])
        options: dict[str, list[tuple[Fraction, list[tuple[str, Fraction]]]]] = {}
        for state in members:
            per_action = []
            for action in process.enabled[state]:
                const = Fraction(0)
                zeros: list[tuple[str, Fraction]] = []
                for succ, kc, ku, prob in process.transitions[(state, action)]:
                    c2 = c + kc
                    u2 = min(u + ku, goal)
                    if c2 > cost_cap:
                        continue
                    if succ == target:
                        if u2 == goal:
                            const += prob
                    elif (c2, u2) == (c, u):
                        zeros.append((succ, prob))
                    else:
                        const += prob * value[(succ, c2, u2)]
                per_action.append((const, zeros))
            options[state] = per_action
        vals, _ = _resolve_level(members, options, "max")
        for state in members:
            value[(state, c, u)] = vals[state]
    return value[(process.initial, 0, 0)] == 1


# ---------------------------------------------------------------------------
# Serialization


def scheduler_to_json(scheduler: Scheduler) -> list[dict[str, str]]:
    """Serialize as a list of {"state", "cost", "action"} records."""

    def order(key: SchedulerKey) -> tuple[str, int, int]:
        state, cost = key
        if cost == TOP:
            return (state, 1, 0)
        return (state, 0, cost)  # type: ignore[return-value]

    return [
        {"state": state, "cost": str(cost), "action": scheduler.entries[(state, cost)]}
        for state, cost in sorted(scheduler.entries, key=order)
    ]


def scheduler_from_json(data: object) -> Scheduler:
    """Parse the list format of ``scheduler_to_json``; budget is inferred.

    The inferred budget is the largest integer cost among the entries,
    which reproduces the original saturation behavior on the process the
    scheduler was solved for: every reachable multi-action pair below the
    solve-time budget is recorded explicitly, so lookups can only differ
    beyond the last recorded level, where all costs share the TOP choice.
    """
    if not isinstance(data, list):
        raise ModelFormatError("scheduler file must be a JSON list")
    entries: dict[SchedulerKey, str] = {}
    budget = 0
    for row in data:
        if not isinstance(row, dict):
            raise ModelFormatError(f"scheduler rows must be objects, got {row!r}")
        try:
            state, cost, action = row["state"], row["cost"], row["action"]
        except KeyError as missing:
            raise ModelFormatError(f"scheduler row is missing key {missing}") from None
        if not isinstance(state, str) or not isinstance(action, str):
            raise ModelFormatError(f"state and action must be strings: {row!r}")
        if cost == TOP:
            key: SchedulerKey = (state, TOP)
        else:
            if isinstance(cost, str) and cost.isdigit():
                cost = int(cost)
            if not isinstance(cost, int) or isinstance(cost, bool) or cost < 0:
                raise ModelFormatError(f"cost must be a non-negative int or 'top': {row!r}")
            key = (state, cost)
            budget = max(budget, cost)
        if key in entries and entries[key] != action:
            raise ModelFormatError(f"conflicting scheduler entries for {key}")
        entries[key] = action
    return Scheduler(budget, entries)


# ---------------------------------------------------------------------------
# Engines


def _check_mode(mode: str) -> None:
    if mode not in ("max", "min"):
        raise ValueError(f"mode must be 'max' or 'min', got {mode!r}")


def _solve(process: CostProcess, formula: Formula, mode: str) -> SolveResult:
    report = validate(process)
    if not report.ok:
        raise NotValidatedError(report)
    if is_acyclic(process):
        return _solve_dag(process, formula, mode)
    return _solve_cyclic(process, formula, mode)


def _trivial_initial(process: CostProcess, formula: Formula, mode: str) -> SolveResult:
    value = Fraction(1 if satisfies(0, formula) else 0)
    return SolveResult(value, Scheduler(max_constant(formula), {}), mode)


def _solve_cyclic(process: CostProcess, formula: Formula, mode: str) -> SolveResult:
    if process.initial == process.target:
        return _trivial_initial(process, formula, mode)
    budget = max_constant(formula)
    tail = Fraction(1 if satisfies(budget + 1, formula) else 0)
    target = process.target

    # Forward sweep: which (state, cost) pairs can the walk visit at all?
    levels: dict[int, set[str]] = {}
    sat_seeds: set[str] = set()
    seen = {(process.initial, 0)}
    frontier = [(process.initial, 0)]
    while frontier:
        state, cost = frontier.pop()
        levels.setdefault(cost, set()).add(state)
        for action in process.enabled[state]:
            for succ, step, _ in process.transitions[(state, action)]:
                if succ == target:
                    continue
                total = cost + step
                if total > budget:
                    sat_seeds.add(succ)
                elif (succ, total) not in seen:
                    seen.add((succ, total))
                    frontier.append((succ, total))

    value: dict[tuple[str, int], Fraction] = {}
    entries: dict[SchedulerKey, str] = {}
    for cost in sorted(levels, reverse=True):
        members = sorted(levels[cost])
        options: dict[str, list[tuple[Fraction, list[tuple[str, Fraction]]]]] = {}
        for state in members:
            per_action = []
            for action in process.enabled[state]:
                const = Fraction(0)
                zeros: list[tuple[str, Fraction]] = []
                for succ, step, prob in process.transitions[(state, action)]:
                    if succ == target:
                        if satisfies(cost + step, formula):
                            const += prob
                    elif step == 0:
                        zeros.append((succ, prob))
                    else:
                        total = cost + step
                        const += prob * (tail if total > budget else value[(succ, total)])
                per_action.append((const, zeros))
            options[state] = per_action
        vals, choice = _resolve_level(members, options, mode)
        for state in members:
            value[(state, cost)] = vals[state]
            if len(process.enabled[state]) > 1:
                entries[(state, cost)] = process.enabled[state][choice[state]]

    _add_saturated_entries(process, sat_seeds, entries)
    return SolveResult(
        value[(process.initial, 0)], Scheduler(budget, entries), mode
    )


def _solve_dag(process: CostProcess, formula: Formula, mode: str) -> SolveResult:
    if process.initial == process.target:
        return _trivial_initial(process, formula, mode)
    budget = max_constant(formula)
    tail = Fraction(1 if satisfies(budget + 1, formula) else 0)
    target = process.target

    memo: dict[tuple[str, int], Fraction] = {}
    entries: dict[SchedulerKey, str] = {}
    sat_seeds: set[str] = set()
    stack = [(process.initial, 0)]
    while stack:
        state, cost = stack[-1]
        if (state, cost) in memo:
            stack.pop()
            continue
        blocked = False
        for action in process.enabled[state]:
            for succ, step, _ in process.transitions[(state, action)]:
                if succ == target:
                    continue
                total = cost + step
                if total > budget:
                    sat_seeds.add(succ)
                elif (succ, total) not in memo:
                    stack.append((succ, total))
                    blocked = True
        if blocked:
            continue
        best: Fraction | None = None
        best_index = 0
        for index, action in enumerate(process.enabled[state]):
            acc = Fraction(0)
            for succ, step, prob in process.transitions[(state, action)]:
                total = cost + step
                if succ == target:
                    if satisfies(total, formula):
                        acc += prob
                elif total > budget:
                    acc += prob * tail
                else:
                    acc += prob * memo[(succ, total)]
            if best is None or (acc > best if mode == "max" else acc < best):
                best, best_index = acc, index
        memo[(state, cost)] = best  # type: ignore[assignment]
        if len(process.enabled[state]) > 1:
            entries[(state, cost)] = process.enabled[state][best_index]
        stack.pop()

    _add_saturated_entries(process, sat_seeds, entries)
    return SolveResult(
        memo[(process.initial, 0)], Scheduler(budget, entries), mode
    )


def _add_saturated_entries(
    process: CostProcess, seeds: Iterable[str], entries: dict[SchedulerKey, str]
) -> None:
    """Record TOP choices for multi-action states reachable once saturated.

    Beyond the budget every continuation has the same (tail) value, so
    the lowest-index action is the canonical choice.
    """
    seen = set(seeds)
    frontier = list(seen)
    while frontier:
        state = frontier.pop()
        if state == process.target:
            continue
        if len(process.enabled[state]) > 1:
            entries[(state, TOP)] = process.enabled[state][0]
        for action in process.enabled[state]:
            for succ, _, _ in process.transitions[(state, action)]:
                if succ not in seen:
                    seen.add(succ)
                    frontier.append(succ)


def _resolve_level(
    states: list,
    options: Mapping,
    mode: str,
) -> tuple[dict, dict]:
    """Optimize one cost level whose internal edges all cost zero.

    Args:
        states: level members (hashable keys).
        options: per member, one (constant, zero-edges) pair per enabled
            action in canonical order; zero-edges point at level members.
        mode: "max" or "min".

    Returns:
        (values, choices): the optimal value per member and the index of
        the lowest-index optimal action.

    Acyclic levels resolve by one pass in dependency order. Cyclic ones
    run policy iteration from the all-first-action policy; evaluation is
    an exact linear solve, guaranteed nonsingular because a zero-cost
    recurrent class under some policy would be a forbidden end component.
    """
    dependencies: dict = {
        q: {succ for _, zeros in options[q] for succ, _ in zeros} for q in states
    }
    order = _dependency_order(states, dependencies)
    if order is not None:
        values: dict = {}
        choices: dict = {}
        for q in order:
            best = None
            best_index = 0
            for index, (const, zeros) in enumerate(options[q]):
                acc = const
                for succ, prob in zeros:
                    acc += prob * values[succ]
                if best is None or (acc > best if mode == "max" else acc < best):
                    best, best_index = acc, index
            values[q] = best
            choices[q] = best_index
        return values, choices

    policy = {q: 0 for q in states}
    while True:
        values = _evaluate_policy(states, options, policy)
        improved = False
        for q in states:
            current = values[q]
            best_index = policy[q]
            best = current
            for index, (const, zeros) in enumerate(options[q]):
                acc = const
                for succ, prob in zeros:
                    acc += prob * values[succ]
                if (acc > best) if mode == "max" else (acc < best):
                    best, best_index = acc, index
            if best_index != policy[q]:
                policy[q] = best_index
                improved = True
        if not improved:
            break

    choices = {}
    for q in states:
        chosen = None
        for index, (const, zeros) in enumerate(options[q]):
            acc = const
            for succ, prob in zeros:
                acc += prob * values[succ]
            if acc == values[q]:
                chosen = index
                break
        if chosen is None:
            raise AssertionError("policy iteration left a non-optimal fixpoint")
        choices[q] = chosen
    return values, choices


def _dependency_order(states: list, dependencies: Mapping) -> "list | None":
    """Topological order with dependencies first, or None on a cycle."""
    indegree = {q: 0 for q in states}
    dependents: dict = {q: [] for q in states}
    for q in states:
        for dep in dependencies[q]:
            if dep == q:
                return None
            indegree[q] += 1
            dependents[dep].append(q)
    ready = [q for q in states if indegree[q] == 0]
    order = []
    while ready:
        q = ready.pop()
        order.append(q)
        for follower in dependents[q]:
            indegree[follower] -= 1
            if indegree[follower] == 0:
                ready.append(follower)
    if len(order) != len(states):
        return None
    return order


def _evaluate_policy(states: list, options: Mapping, policy: Mapping) -> dict:
    index = {q: i for i, q in enumerate(states)}
    n = len(states)
    matrix = [[Fraction(0)] * n for _ in range(n)]
    rhs = [Fraction(0)] * n
    for q in states:
        row = index[q]
        matrix[row][row] += Fraction(1)
        const, zeros = options[q][policy[q]]
        rhs[row] = const
        for succ, prob in zeros:
            matrix[row][index[succ]] -= prob
    solution = solve_linear_system(matrix, rhs)
    return {q: solution[index[q]] for q in states}
