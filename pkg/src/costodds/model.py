"""Cost processes and chains: construction, validation, classification.

A cost process is a finite MDP whose transitions carry non-negative
integer costs and exact rational probabilities. A cost chain is the
special case with exactly one enabled action per state, i.e. a Markov
chain. Two structural assumptions make accumulated cost well defined:

  (i)  the target state is absorbing via a single zero-cost self-loop;
  (ii) under every scheduler the target is reached almost surely, which
       holds exactly when every maximal end component reachable from the
       initial state is the singleton target.

``validate`` checks both (plus distribution sums) and reports findings as
data rather than exceptions; solvers refuse processes whose report is not
clean. Validation, chain-ness, and acyclicity are cached per instance
since models are immutable once built.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping, NamedTuple

from .errors import ModelFormatError
from .rational import format_rational, parse_cost, parse_rational

__all__ = [
    "Transition",
    "CostProcess",
    "CostChain",
    "CostUtilityTransition",
    "CostUtilityProcess",
    "Finding",
    "ValidationReport",
    "ControlGraph",
    "build_process",
    "build_chain",
    "build_cost_utility_process",
    "validate",
    "validate_cost_utility",
    "is_chain",
    "is_acyclic",
    "model_from_json",
    "model_to_json",
    "cost_utility_from_json",
    "cost_utility_to_json",
]


class Transition(NamedTuple):
    """One weighted edge of a distribution: successor, cost, probability."""

    successor: str
    cost: int
    prob: Fraction


class CostUtilityTransition(NamedTuple):
    """Two-counter variant: successor, cost, utility, probability."""

    successor: str
    cost: int
    utility: int
    prob: Fraction


@dataclass(frozen=True)
class Finding:
    """A single validation violation.

    Attributes:
        code: one of "bad-distribution", "bad-target-loop",
            "unreachable-target", "bad-mec".
        subject: the offending states (or state/action pair) in canonical
            order.
        message: human-readable explanation.
    """

    code: str
    subject: tuple[str, ...]
    message: str


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of ``validate``; ``ok`` is true iff no violations."""

    ok: bool
    violations: tuple[Finding, ...]

    def __str__(self) -> str:
        if self.ok:
            return "ok"
        return "; ".join(f"{f.code}{list(f.subject)}: {f.message}" for f in self.violations)


@dataclass(frozen=True)
class ControlGraph:
    """Successor structure with the target's outgoing edges removed."""

    vertices: tuple[str, ...]
    edges: frozenset[tuple[str, str]]


@dataclass(frozen=True, eq=False)
class CostProcess:
    """An immutable cost process.

    Attributes:
        states: all control states in canonical (first-appearance) order.
        initial: starting state.
        target: absorbing goal state.
        enabled: per-state tuple of enabled actions, in canonical order.
        transitions: distribution per (state, action) as a tuple of
            ``Transition`` entries, duplicates already merged.
    """

    states: tuple[str, ...]
    initial: str
    target: str
    enabled: Mapping[str, tuple[str, ...]]
    transitions: Mapping[tuple[str, str], tuple[Transition, ...]]

    @cached_property
    def actions(self) -> tuple[str, ...]:
        """Global action alphabet in first-appearance order."""
        seen: dict[str, None] = {}
        for state in self.states:
            for action in self.enabled[state]:
                seen.setdefault(action)
        return tuple(seen)

    @cached_property
    def control_graph(self) -> ControlGraph:
        edges = set()
        for state in self.states:
            if state == self.target:
                continue
            for action in self.enabled[state]:
                for entry in self.transitions[(state, action)]:
                    edges.add((state, entry.successor))
        return ControlGraph(self.states, frozenset(edges))

    @cached_property
    def reachable(self) -> frozenset[str]:
        """States reachable from the initial state under any actions."""
        seen = {self.initial}
        frontier = [self.initial]
        while frontier:
            state = frontier.pop()
            for action in self.enabled[state]:
                for entry in self.transitions[(state, action)]:
                    if entry.successor not in seen:
                        seen.add(entry.successor)
                        frontier.append(entry.successor)
        return frozenset(seen)

    @cached_property
    def _chain(self) -> bool:
        return all(len(self.enabled[q]) == 1 for q in self.states)

    @cached_property
    def _acyclic(self) -> bool:
        return _digraph_acyclic(self.states, self.control_graph.edges)

    @cached_property
    def _report(self) -> ValidationReport:
        return _validate_generic(
            states=self.states,
            initial=self.initial,
            target=self.target,
            enabled=self.enabled,
            distributions={
                key: tuple((e.successor, e.prob) for e in entries)
                for key, entries in self.transitions.items()
            },
            target_loop_ok=_target_loop_ok(self),
        )


# A cost chain is a cost process with a single enabled action everywhere;
# the alias documents intent at call sites.
CostChain = CostProcess


@dataclass(frozen=True, eq=False)
class CostUtilityProcess:
    """Cost process whose transitions carry a (cost, utility) pair each."""

    states: tuple[str, ...]
    initial: str
    target: str
    enabled: Mapping[str, tuple[str, ...]]
    transitions: Mapping[tuple[str, str], tuple[CostUtilityTransition, ...]]

    @cached_property
    def _report(self) -> ValidationReport:
        ok_loop = False
        acts = self.enabled[self.target]
        if len(acts) == 1:
            entries = self.transitions[(self.target, acts[0])]
            ok_loop = entries == (
                CostUtilityTransition(self.target, 0, 0, Fraction(1)),
            )
        return _validate_generic(
            states=self.states,
            initial=self.initial,
            target=self.target,
            enabled=self.enabled,
            distributions={
                key: tuple((e.successor, e.prob) for e in entries)
                for key, entries in self.transitions.items()
            },
            target_loop_ok=ok_loop,
        )


def _target_loop_ok(process: CostProcess) -> bool:
    acts = process.enabled[process.target]
    if len(acts) != 1:
        return False
    entries = process.transitions[(process.target, acts[0])]
    return entries == (Transition(process.target, 0, Fraction(1)),)


# ---------------------------------------------------------------------------
# Construction


def _check_prob(prob: Fraction, where: str) -> Fraction:
    if not isinstance(prob, Fraction):
        raise ModelFormatError(f"probability at {where} must be a Fraction, got {prob!r}")
    if prob <= 0 or prob > 1:
        raise ModelFormatError(f"probability at {where} must be in (0, 1], got {prob}")
    return prob


def _check_cost(cost: int, where: str) -> int:
    if not isinstance(cost, int) or isinstance(cost, bool) or cost < 0:
        raise ModelFormatError(f"cost at {where} must be a non-negative int, got {cost!r}")
    return cost


def build_process(
    entries: Iterable[tuple[str, str, str, int, Fraction]],
    initial: str,
    target: str,
    states: Iterable[str] | None = None,
) -> CostProcess:
    """Assemble a ``CostProcess`` from raw transition tuples.

    Args:
        entries: tuples (state, action, successor, cost, prob). Order fixes
            the canonical action ordering per state and, absent an explicit
            ``states`` list, the canonical state ordering. Duplicate
            (state, action, successor, cost) rows merge by summing probs.
        initial: initial state id.
        target: target state id. If it never appears in ``entries``, the
            mandatory absorbing self-loop is added automatically.
        states: optional explicit state ordering (must cover all ids used).

    Returns:
        An immutable process; no validation is performed here beyond local
        type/range checks (use ``validate``).
    """
    order: dict[str, None] = {}
    enabled: dict[str, dict[str, None]] = {}
    merged: dict[tuple[str, str], dict[tuple[str, int], Fraction]] = {}

    order.setdefault(initial)
    for state, action, successor, cost, prob in entries:
        where = f"({state}, {action}) -> {successor}"
        order.setdefault(state)
        order.setdefault(successor)
        enabled.setdefault(state, {}).setdefault(action)
        bucket = merged.setdefault((state, action), {})
        key = (successor, _check_cost(cost, where))
        bucket[key] = bucket.get(key, Fraction(0)) + _check_prob(prob, where)
    order.setdefault(target)

    if target not in enabled:
        enabled[target] = {"a": None}
        merged[(target, "a")] = {(target, 0): Fraction(1)}

    if states is not None:
        explicit = list(states)
        missing = [s for s in order if s not in explicit]
        if missing:
            raise ModelFormatError(f"states list is missing {missing}")
        state_order = tuple(dict.fromkeys(explicit))
    else:
        state_order = tuple(order)

    for state in state_order:
        if state not in enabled:
            raise ModelFormatError(f"state {state!r} has no enabled action")

    transitions = {
        key: tuple(
            Transition(succ, cost, prob)
            for (succ, cost), prob in bucket.items()
        )
        for key, bucket in merged.items()
    }
    enabled_final = {state: tuple(acts) for state, acts in enabled.items()}
    return CostProcess(state_order, initial, target, enabled_final, transitions)


def build_chain(
    entries: Iterable[tuple[str, str, int, Fraction]],
    initial: str,
    target: str,
    states: Iterable[str] | None = None,
) -> CostChain:
    """Assemble a cost chain; every state gets the single action "a"."""
    return build_process(
        ((state, "a", succ, cost, prob) for state, succ, cost, prob in entries),
        initial,
        target,
        states,
    )


def build_cost_utility_process(
    entries: Iterable[tuple[str, str, str, int, int, Fraction]],
    initial: str,
    target: str,
    states: Iterable[str] | None = None,
) -> CostUtilityProcess:
    """Assemble a two-counter process from (state, action, succ, cost, utility, prob) rows."""
    order: dict[str, None] = {}
    enabled: dict[str, dict[str, None]] = {}
    merged: dict[tuple[str, str], dict[tuple[str, int, int], Fraction]] = {}

    order.setdefault(initial)
    for state, action, successor, cost, utility, prob in entries:
        where = f"({state}, {action}) -> {successor}"
        order.setdefault(state)
        order.setdefault(successor)
        enabled.setdefault(state, {}).setdefault(action)
        bucket = merged.setdefault((state, action), {})
        key = (successor, _check_cost(cost, where), _check_cost(utility, where))
        bucket[key] = bucket.get(key, Fraction(0)) + _check_prob(prob, where)
    order.setdefault(target)

    if target not in enabled:
        enabled[target] = {"a": None}
        merged[(target, "a")] = {(target, 0, 0): Fraction(1)}

    if states is not None:
        explicit = list(states)
        missing = [s for s in order if s not in explicit]
        if missing:
            raise ModelFormatError(f"states list is missing {missing}")
        state_order = tuple(dict.fromkeys(explicit))
    else:
        state_order = tuple(order)

    for state in state_order:
        if state not in enabled:
            raise ModelFormatError(f"state {state!r} has no enabled action")

    transitions = {
        key: tuple(
            CostUtilityTransition(succ, cost, utility, prob)
            for (succ, cost, utility), prob in bucket.items()
        )
        for key, bucket in merged.items()
    }
    enabled_final = {state: tuple(acts) for state, acts in enabled.items()}
    return CostUtilityProcess(state_order, initial, target, enabled_final, transitions)


# ---------------------------------------------------------------------------
# Classification and validation


def is_chain(process: CostProcess) -> bool:
    """True iff every state has exactly one enabled action."""
    return process._chain


def is_acyclic(process: CostProcess) -> bool:
    """True iff the control graph (no edges out of target) has no cycle."""
    return process._acyclic


def validate(process: CostProcess) -> ValidationReport:
    """Check distribution sums, target absorption, and a.s. reachability.

    Returns:
        A report whose findings are data, never exceptions. ``ok`` holds
        exactly when (a) every enabled distribution sums to 1, (b) the
        target has precisely the mandated zero-cost self-loop, and (c)
        every maximal end component reachable from the initial state is
        the singleton target (equivalently: the target is reached almost
        surely under every scheduler).
    """
    return process._report


def validate_cost_utility(process: CostUtilityProcess) -> ValidationReport:
    """Same checks as ``validate`` for two-counter processes."""
    return process._report


def _validate_generic(
    states: tuple[str, ...],
    initial: str,
    target: str,
    enabled: Mapping[str, tuple[str, ...]],
    distributions: Mapping[tuple[str, str], tuple[tuple[str, Fraction], ...]],
    target_loop_ok: bool,
) -> ValidationReport:
    findings: list[Finding] = []

    for state in states:
        for action in enabled[state]:
            total = sum((p for _, p in distributions[(state, action)]), Fraction(0))
            if total != 1:
                findings.append(
                    Finding(
                        "bad-distribution",
                        (state, action),
                        f"probabilities sum to {format_rational(total)}, not 1",
                    )
                )

    if not target_loop_ok:
        findings.append(
            Finding(
                "bad-target-loop",
                (target,),
                "target needs exactly one action with a single zero-cost self-loop of probability 1",
            )
        )

    support: dict[tuple[str, str], tuple[str, ...]] = {
        key: tuple(succ for succ, _ in entries) for key, entries in distributions.items()
    }

    reachable = {initial}
    frontier = [initial]
    while frontier:
        state = frontier.pop()
        for action in enabled[state]:
            for succ in support[(state, action)]:
                if succ not in reachable:
                    reachable.add(succ)
                    frontier.append(succ)

    co_reach = _backward_reachable(states, enabled, support, target)
    stranded = sorted(q for q in reachable if q not in co_reach)
    if stranded:
        findings.append(
            Finding(
                "unreachable-target",
                tuple(stranded),
                "these reachable states have no path to the target",
            )
        )

    for component in _maximal_end_components(sorted(reachable), enabled, support):
        if component != frozenset((target,)):
            findings.append(
                Finding(
                    "bad-mec",
                    tuple(sorted(component)),
                    "end component other than the target singleton is reachable",
                )
            )

    return ValidationReport(not findings, tuple(findings))


def _backward_reachable(
    states: tuple[str, ...],
    enabled: Mapping[str, tuple[str, ...]],
    support: Mapping[tuple[str, str], tuple[str, ...]],
    target: str,
) -> set[str]:
    predecessors: dict[str, set[str]] = {q: set() for q in states}
    for state in states:
        for action in enabled[state]:
            for succ in support[(state, action)]:
                predecessors[succ].add(state)
    seen = {target}
    frontier = [target]
    while frontier:
        state = frontier.pop()
        for pred in predecessors[state]:
            if pred not in seen:
                seen.add(pred)
                frontier.append(pred)
    return seen


def _maximal_end_components(
    states: Iterable[str],
    enabled: Mapping[str, tuple[str, ...]],
    support: Mapping[tuple[str, str], tuple[str, ...]],
) -> list[frozenset[str]]:
    """Standard iterative SCC-refinement MEC decomposition.

    A candidate set shrinks by (1) dropping actions whose support leaves
    the set, (2) dropping states left with no action, then (3) splitting
    into strongly connected components; a candidate that survives intact
    and is strongly connected is a MEC.
    """
    mecs: list[frozenset[str]] = []
    work: list[frozenset[str]] = [frozenset(states)]
    while work:
        component = work.pop()
        current = set(component)
        while True:
            kept_actions = {
                q: [
                    a
                    for a in enabled[q]
                    if all(s in current for s in support[(q, a)])
                ]
                for q in current
            }
            doomed = [q for q, acts in kept_actions.items() if not acts]
            if not doomed:
                break
            current.difference_update(doomed)
        if not current:
            continue
        edges = {
            q: sorted(
                {s for a in kept_actions[q] for s in support[(q, a)] if s != q}
            )
            for q in current
        }
        sccs = _strongly_connected(sorted(current), edges)
        if len(sccs) == 1 and sccs[0] == current:
            mecs.append(frozenset(current))
        else:
            for scc in sccs:
                # Single states need a self-loop action to stay candidates.
                if len(scc) == 1:
                    (q,) = scc
                    if any(
                        all(s == q for s in support[(q, a)]) for a in enabled[q]
                    ):
                        mecs.append(frozenset(scc))
                else:
                    work.append(frozenset(scc))
    return mecs


def _strongly_connected(
    vertices: list[str], edges: Mapping[str, list[str]]
) -> list[set[str]]:
    """Tarjan's algorithm, non-recursive."""
    index: dict[str, int] = {}
    lowlink: dict[str, int] = {}
    on_stack: set[str] = set()
    stack: list[str] = []
    result: list[set[str]] = []
    counter = 0

    for root in vertices:
        if root in index:
            continue
        call_stack: list[tuple[str, int]] = [(root, 0)]
        while call_stack:
            vertex, edge_pos = call_stack.pop()
            if edge_pos == 0:
                index[vertex] = lowlink[vertex] = counter
                counter += 1
                stack.append(vertex)
                on_stack.add(vertex)
            advanced = False
            successors = edges.get(vertex, [])
            while edge_pos < len(successors):
                succ = successors[edge_pos]
                edge_pos += 1
                if succ not in index:
                    call_stack.append((vertex, edge_pos))
                    call_stack.append((succ, 0))
                    advanced = True
                    break
                if succ in on_stack:
                    lowlink[vertex] = min(lowlink[vertex], index[succ])
            if advanced:
                continue
            if lowlink[vertex] == index[vertex]:
                component = set()
                while True:
                    member = stack.pop()
                    on_stack.discard(member)
                    component.add(member)
                    if member == vertex:
                        break
                result.append(component)
            if call_stack:
                parent = call_stack[-1][0]
                lowlink[parent] = min(lowlink[parent], lowlink[vertex])
    return result


def _digraph_acyclic(vertices: tuple[str, ...], edges: frozenset[tuple[str, str]]) -> bool:
    adjacency: dict[str, list[str]] = {v: [] for v in vertices}
    for src, dst in edges:
        adjacency[src].append(dst)
    WHITE, GRAY, BLACK = 0, 1, 2
    color = {v: WHITE for v in vertices}
    for root in vertices:
        if color[root] != WHITE:
            continue
        stack: list[tuple[str, int]] = [(root, 0)]
        color[root] = GRAY
        while stack:
            vertex, pos = stack.pop()
            if pos < len(adjacency[vertex]):
                stack.append((vertex, pos + 1))
                succ = adjacency[vertex][pos]
                if color[succ] == GRAY:
                    return False
                if color[succ] == WHITE:
                    color[succ] = GRAY
                    stack.append((succ, 0))
            else:
                color[vertex] = BLACK
    return True


# ---------------------------------------------------------------------------
# JSON serialization


def model_to_json(process: CostProcess) -> dict:
    """Serialize to the interchange dict; chains omit the "action" field."""
    chain = is_chain(process)
    rows = []
    for state in process.states:
        for action in process.enabled[state]:
            for entry in process.transitions[(state, action)]:
                row = {"from": state}
                if not chain:
                    row["action"] = action
                row.update(
                    to=entry.successor,
                    cost=str(entry.cost),
                    prob=format_rational(entry.prob),
                )
                rows.append(row)
    return {
        "states": list(process.states),
        "initial": process.initial,
        "target": process.target,
        "transitions": rows,
    }


def model_from_json(data: object) -> CostProcess:
    """Parse the interchange dict produced by ``model_to_json``."""
    rows, states, initial, target = _parse_model_shell(data)
    has_action = [isinstance(row, dict) and "action" in row for row in rows]
    if any(has_action) and not all(has_action):
        raise ModelFormatError("either every transition names an action or none does")
    entries = []
    for row in rows:
        src, dst = _parse_endpoint(row)
        action = row["action"] if "action" in row else "a"
        if not isinstance(action, str):
            raise ModelFormatError(f"action must be a string, got {action!r}")
        entries.append(
            (
                src,
                action,
                dst,
                parse_cost(row.get("cost"), f"cost of {src}->{dst}"),
                parse_rational(row.get("prob"), f"prob of {src}->{dst}"),
            )
        )
    return build_process(entries, initial, target, states)


def cost_utility_to_json(process: CostUtilityProcess) -> dict:
    rows = []
    for state in process.states:
        for action in process.enabled[state]:
            for entry in process.transitions[(state, action)]:
                rows.append(
                    {
                        "from": state,
                        "action": action,
                        "to": entry.successor,
                        "cost": str(entry.cost),
                        "utility": str(entry.utility),
                        "prob": format_rational(entry.prob),
                    }
                )
    return {
        "states": list(process.states),
        "initial": process.initial,
        "target": process.target,
        "transitions": rows,
    }


def cost_utility_from_json(data: object) -> CostUtilityProcess:
    rows, states, initial, target = _parse_model_shell(data)
    entries = []
    for row in rows:
        src, dst = _parse_endpoint(row)
        action = row.get("action", "a")
        if not isinstance(action, str):
            raise ModelFormatError(f"action must be a string, got {action!r}")
        entries.append(
            (
                src,
                action,
                dst,
                parse_cost(row.get("cost"), f"cost of {src}->{dst}"),
                parse_cost(row.get("utility"), f"utility of {src}->{dst}"),
                parse_rational(row.get("prob"), f"prob of {src}->{dst}"),
            )
        )
    return build_cost_utility_process(entries, initial, target, states)


def _parse_model_shell(data: object) -> tuple[list, list[str], str, str]:
    if not isinstance(data, dict):
        raise ModelFormatError("model file must be a JSON object")
    try:
        states = data["states"]
        initial = data["initial"]
        target = data["target"]
        rows = data["transitions"]
    except KeyError as missing:
        raise ModelFormatError(f"model file is missing key {missing}") from None
    if not isinstance(states, list) or not all(isinstance(s, str) for s in states):
        raise ModelFormatError("states must be a list of strings")
    if not isinstance(initial, str) or not isinstance(target, str):
        raise ModelFormatError("initial and target must be strings")
    if not isinstance(rows, list):
        raise ModelFormatError("transitions must be a list")
    return rows, states, initial, target


def _parse_endpoint(row: object) -> tuple[str, str]:
    if not isinstance(row, dict):
        raise ModelFormatError(f"transition rows must be objects, got {row!r}")
    src = row.get("from")
    dst = row.get("to")
    if not isinstance(src, str) or not isinstance(dst, str):
        raise ModelFormatError(f"transition endpoints must be strings: {row!r}")
    return src, dst
