"""Shared fixtures, independent oracles, and instance generators.

Everything the suite compares solver output against lives here and
deliberately avoids the package's own algorithms: truncated
distributions come from product-space state elimination, optimal values
from exhaustive enumeration of scheduler assignments, path counts and
game verdicts from direct recursion over the instance.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from random import Random

import costodds as co
from costodds.gadgets import ArithmeticCircuit, CountdownGame, make_circuit, make_countdown

HALF = Fraction(1, 2)
ONE = Fraction(1)

# Product-space sink for runs whose accumulated cost left the budget.
OVER = ("#over", -1)


# ---------------------------------------------------------------------------
# Fixed models


def choice_example() -> co.CostProcess:
    """Three-state process with one real decision, taken at q1 knowing the cost so far."""
    return co.build_process(
        [
            ("q0", "a", "q1", 1, HALF),
            ("q0", "a", "q1", 3, HALF),
            ("q1", "a1", "t", 3, ONE),
            ("q1", "a2", "t", 6, HALF),
            ("q1", "a2", "t", 1, HALF),
        ],
        "q0",
        "t",
    )


def two_flip_chain() -> co.CostChain:
    """One step to the target, cost 1 or 3 with equal odds."""
    return co.build_chain([("q0", "t", 1, HALF), ("q0", "t", 3, HALF)], "q0", "t")


def geometric_chain() -> co.CostChain:
    """Pay 1 per failed coin flip until the first success."""
    return co.build_chain([("q0", "q0", 1, HALF), ("q0", "t", 0, HALF)], "q0", "t")


def zero_loop_chain() -> co.CostChain:
    """A free two-state cycle that forces a linear solve per cost level."""
    return co.build_chain(
        [
            ("q0", "q1", 0, HALF),
            ("q0", "t", 1, HALF),
            ("q1", "q0", 0, HALF),
            ("q1", "t", 0, HALF),
        ],
        "q0",
        "t",
    )


def mc_fixture_corpus() -> list[tuple[co.CostProcess, object, co.CostFormula, Fraction]]:
    """(process, scheduler, formula, exact value) rows for sampling checks."""
    deterministic = co.build_chain([("q0", "t", 4, ONE)], "q0", "t")
    rows: list[tuple[co.CostProcess, object, co.CostFormula, Fraction]] = [
        (deterministic, None, co.parse("x<=5"), ONE),
        (geometric_chain(), None, co.parse("x<=1"), Fraction(3, 4)),
    ]
    process = choice_example()
    best = co.solve_max(process, co.parse("x<=5"))
    rows.append((process, best.scheduler, co.parse("x<=5"), best.value))
    return rows


# ---------------------------------------------------------------------------
# Chain oracle: product construction plus state elimination


def chain_distribution_oracle(
    chain: co.CostChain, budget: int
) -> tuple[dict[int, Fraction], Fraction]:
    """Exact truncated cost distribution of a validated chain.

    Unrolls the chain over accumulated costs up to the budget, then
    eliminates interior states one by one, rescaling by the escape
    probability; what remains are direct edges from the start to the
    absorbing (target, cost) nodes and the overflow sink.
    """
    if chain.initial == chain.target:
        return {0: ONE}, Fraction(0)

    start = (chain.initial, 0)
    edges: dict[tuple[str, int], dict[tuple[str, int], Fraction]] = {}
    absorbing: set[tuple[str, int]] = {OVER}
    queue = [start]
    while queue:
        node = queue.pop()
        if node in edges or node in absorbing:
            continue
        state, cost = node
        if state == chain.target:
            absorbing.add(node)
            continue
        out: dict[tuple[str, int], Fraction] = {}
        (action,) = chain.enabled[state]
        for entry in chain.transitions[(state, action)]:
            paid = cost + entry.cost
            succ = OVER if paid > budget else (entry.successor, paid)
            out[succ] = out.get(succ, Fraction(0)) + entry.prob
        edges[node] = out
        queue.extend(out)

    for node in [n for n in edges if n != start]:
        out = edges.pop(node)
        stay = out.pop(node, Fraction(0))
        out = {succ: p / (1 - stay) for succ, p in out.items()}
        for table in edges.values():
            weight = table.pop(node, None)
            if weight is not None:
                for succ, p in out.items():
                    table[succ] = table.get(succ, Fraction(0)) + weight * p

    table = edges[start]
    stay = table.pop(start, Fraction(0))
    mass: dict[int, Fraction] = {}
    overflow = Fraction(0)
    for node, p in table.items():
        p /= 1 - stay
        if node == OVER:
            overflow += p
        else:
            mass[node[1]] = mass.get(node[1], Fraction(0)) + p
    return mass, overflow


def chain_value_oracle(chain: co.CostChain, formula: co.CostFormula) -> Fraction:
    """P(final cost satisfies formula), via the elimination oracle."""
    bound = co.max_constant(formula)
    mass, overflow = chain_distribution_oracle(chain, bound)
    value = sum(
        (p for cost, p in mass.items() if co.satisfies(cost, formula)), Fraction(0)
    )
    if co.satisfies(bound + 1, formula):
        value += overflow
    return value


# ---------------------------------------------------------------------------
# Process oracle: exhaustive scheduler assignments on the truncated space


def choice_points(process: co.CostProcess, cap: int) -> list[tuple[str, int]]:
    """(state, cost) pairs below the cap where several actions are enabled
    and some run can arrive, whatever the scheduler does."""
    seen = {(process.initial, 0)}
    queue = [(process.initial, 0)]
    while queue:
        state, cost = queue.pop()
        if state == process.target or cost == cap:
            continue
        for action in process.enabled[state]:
            for entry in process.transitions[(state, action)]:
                node = (entry.successor, min(cap, cost + entry.cost))
                if node not in seen:
                    seen.add(node)
                    queue.append(node)
    return sorted(
        (state, cost)
        for state, cost in seen
        if cost < cap and state != process.target and len(process.enabled[state]) > 1
    )


def optimal_value_oracle(
    process: co.CostProcess, formula: co.CostFormula, mode: str, limit: int = 12
) -> Fraction:
    """Optimal probability by trying every deterministic cost-aware choice.

    Requires that the zero-cost part of the control graph is acyclic away
    from the target, so a fixed assignment evaluates by plain recursion.
    """
    cap = co.max_constant(formula) + 1
    sat = {c: Fraction(1 if co.satisfies(c, formula) else 0) for c in range(cap + 1)}
    points = choice_points(process, cap)
    if len(points) > limit:
        raise ValueError(f"too many choice points to enumerate: {len(points)}")

    def evaluate(assignment: dict[tuple[str, int], str]) -> Fraction:
        memo: dict[tuple[str, int], Fraction] = {}
        busy: set[tuple[str, int]] = set()

        def value(state: str, cost: int) -> Fraction:
            if state == process.target or cost == cap:
                # The target is reached almost surely and the verdict
                # can no longer change once the cost saturates.
                return sat[cost]
            node = (state, cost)
            if node in memo:
                return memo[node]
            if node in busy:
                raise AssertionError(f"zero-cost cycle through {node}")
            busy.add(node)
            acts = process.enabled[state]
            action = acts[0] if len(acts) == 1 else assignment[node]
            total = sum(
                (
                    entry.prob * value(entry.successor, min(cap, cost + entry.cost))
                    for entry in process.transitions[(state, action)]
                ),
                Fraction(0),
            )
            busy.discard(node)
            memo[node] = total
            return total

        return value(process.initial, 0)

    pick = max if mode == "max" else min
    best: Fraction | None = None
    for actions in itertools.product(*(process.enabled[state] for state, _ in points)):
        value = evaluate(dict(zip(points, actions)))
        best = value if best is None else pick(best, value)
    assert best is not None
    return best


# ---------------------------------------------------------------------------
# Random models


def random_chain(rng: Random, max_states: int = 5, max_cost: int = 3) -> co.CostChain:
    """A validated chain; one edge per state always points toward the target."""
    for _ in range(1000):
        n = rng.randint(2, max_states)
        states = [f"q{i}" for i in range(n - 1)] + ["t"]
        entries = []
        for i, state in enumerate(states[:-1]):
            fanout = rng.choice((1, 2))
            share = Fraction(1, fanout)
            entries.append(
                (state, states[rng.randint(i + 1, n - 1)], rng.randint(0, max_cost), share)
            )
            for _ in range(fanout - 1):
                entries.append(
                    (state, states[rng.randrange(n)], rng.randint(0, max_cost), share)
                )
        chain = co.build_chain(entries, "q0", "t")
        if co.validate(chain).ok:
            return chain
    raise AssertionError("chain generator kept producing invalid models")


def random_process(
    rng: Random, max_states: int = 5, max_cost: int = 3
) -> co.CostProcess:
    """A validated process with one or two actions per state."""
    for _ in range(1000):
        n = rng.randint(2, max_states)
        states = [f"q{i}" for i in range(n - 1)] + ["t"]
        entries = []
        for i, state in enumerate(states[:-1]):
            for action in ("a", "b")[: rng.choice((1, 2))]:
                fanout = rng.choice((1, 2))
                share = Fraction(1, fanout)
                entries.append(
                    (
                        state,
                        action,
                        states[rng.randint(i + 1, n - 1)],
                        rng.randint(0, max_cost),
                        share,
                    )
                )
                for _ in range(fanout - 1):
                    entries.append(
                        (
                            state,
                            action,
                            states[rng.randrange(n)],
                            rng.randint(0, max_cost),
                            share,
                        )
                    )
        process = co.build_process(entries, "q0", "t")
        if co.validate(process).ok:
            return process
    raise AssertionError("process generator kept producing invalid models")


def random_branching_process(
    rng: Random,
    max_states: int = 4,
    max_cost: int = 3,
    cap: int = 7,
    limit: int = 10,
) -> co.CostProcess:
    """Like ``random_process`` but tailored for exhaustive enumeration.

    Zero costs only occur on forward edges, so the zero-cost control
    graph is acyclic, and the potentially reachable choice points below
    the cap are few enough for ``optimal_value_oracle``.
    """
    for _ in range(2000):
        n = rng.randint(2, max_states)
        states = [f"q{i}" for i in range(n - 1)] + ["t"]
        entries = []
        for i, state in enumerate(states[:-1]):
            for action in ("a", "b")[: rng.choice((1, 2))]:
                fanout = rng.choice((1, 2))
                share = Fraction(1, fanout)
                for edge in range(fanout):
                    if edge == 0:
                        j = rng.randint(i + 1, n - 1)
                    else:
                        j = rng.randrange(n)
                    # Backward and self edges must make progress in cost.
                    low = 0 if j > i else 1
                    entries.append(
                        (state, action, states[j], rng.randint(low, max_cost), share)
                    )
        process = co.build_process(entries, "q0", "t")
        if co.validate(process).ok and len(choice_points(process, cap)) <= limit:
            return process
    raise AssertionError("branching generator kept producing unusable models")


def random_formula(rng: Random, max_bound: int = 6) -> co.CostFormula:
    """A small Boolean combination of budget atoms."""

    def leaf() -> co.CostFormula:
        atom = co.Atom(rng.randint(0, max_bound))
        return co.Not(atom) if rng.random() < 0.5 else atom

    formula = leaf()
    for _ in range(rng.randint(0, 2)):
        other = leaf()
        formula = co.And(formula, other) if rng.random() < 0.5 else co.Or(formula, other)
    return formula


# ---------------------------------------------------------------------------
# Circuit corpora


LEAF_ROWS: tuple[tuple[str, str, tuple[str, ...]], ...] = (
    ("zero", "zero", ()),
    ("one", "one", ()),
)


def _pairings(ids: list[str]) -> list[tuple[str, str]]:
    """Unordered input pairs over one level, repetition allowed."""
    return [(a, b) for pos, a in enumerate(ids) for b in ids[pos:]]


def fixed_circuit_corpus() -> list[tuple[ArithmeticCircuit, str]]:
    """Every alternating circuit over shared 0/1 leaves for a fixed set of
    per-level gate-count profiles, paired with each top-level gate."""
    profiles = [(1,), (2,), (1, 1), (2, 1), (2, 2), (1, 1, 1), (2, 1, 1), (2, 2, 1)]
    corpus: list[tuple[ArithmeticCircuit, str]] = []

    def grow(profile, level, prior, rows):
        if level > len(profile):
            circuit = make_circuit(rows)
            corpus.extend((circuit, top) for top in prior)
            return
        kind = "plus" if level % 2 else "times"
        for combo in itertools.combinations(_pairings(prior), profile[level - 1]):
            ids = [f"g{level}_{pos}" for pos in range(len(combo))]
            grow(
                profile,
                level + 1,
                ids,
                rows + [(gid, kind, pair) for gid, pair in zip(ids, combo)],
            )

    for profile in profiles:
        grow(profile, 1, ["zero", "one"], list(LEAF_ROWS))
    return corpus


def random_circuit(
    rng: Random, max_level: int = 3
) -> tuple[ArithmeticCircuit, str]:
    """A random alternating circuit with at most 8 gates, and a gate in it."""
    rows = list(LEAF_ROWS)
    prior = ["zero", "one"]
    for level in range(1, rng.randint(1, max_level) + 1):
        kind = "plus" if level % 2 else "times"
        ids = []
        for pos in range(rng.randint(1, 2)):
            gid = f"g{level}_{pos}"
            rows.append((gid, kind, (rng.choice(prior), rng.choice(prior))))
            ids.append(gid)
        prior = ids
    return make_circuit(rows), rng.choice(prior)


def posslp_corpus() -> list[tuple[ArithmeticCircuit, list[str]]]:
    """Circuits with gate lists covering ties, zeros, strict orders, and
    square gates (which make the comparison chains cyclic)."""
    sums = make_circuit(
        [
            *LEAF_ROWS,
            ("p", "plus", ("one", "one")),
            ("q", "plus", ("one", "zero")),
            ("r", "plus", ("zero", "zero")),
            ("m", "times", ("p", "q")),
            ("s", "times", ("p", "p")),
        ]
    )
    towers = make_circuit(
        [
            *LEAF_ROWS,
            ("x", "plus", ("one", "one")),
            ("x0", "plus", ("zero", "one")),
            ("y", "times", ("x", "x")),
            ("y2", "times", ("x", "x0")),
            ("z", "plus", ("y", "y")),
            ("z2", "plus", ("y2", "y2")),
        ]
    )
    nils = make_circuit(
        [
            ("zero", "zero", ()),
            ("n1", "plus", ("zero", "zero")),
            ("n2", "times", ("n1", "n1")),
            ("n3", "plus", ("n2", "n2")),
        ]
    )
    return [
        (sums, ["p", "q", "r", "m", "s"]),
        (towers, ["x", "x0", "y", "y2", "z", "z2"]),
        (nils, ["n1", "n2", "n3"]),
    ]


# ---------------------------------------------------------------------------
# Game corpora


def random_countdown(rng: Random, max_states: int = 3, max_total: int = 12) -> CountdownGame:
    """A countdown game with at most 3 announceable values per state."""
    n = rng.randint(1, max_states)
    states = [f"s{i}" for i in range(n)]
    moves = []
    for state in states:
        for step in rng.sample(range(1, 5), rng.randint(0, 3)):
            for succ in rng.sample(states, rng.randint(1, n)):
                moves.append((state, step, succ))
    return make_countdown(states, "s0", rng.randint(1, max_total), moves)


def subset_sum_corpus(tops: tuple[int, ...] = (2, 4)):
    """Every game with the given player-pair counts, weights <= 4, T <= 16."""
    for count in tops:
        for weights in itertools.product(range(5), repeat=count):
            for total in range(17):
                yield weights, total
