"""Optimal scheduling over processes: values, witnesses, dual routes."""

from fractions import Fraction
from random import Random

import pytest

import costodds as co
from costodds import (
    TOP,
    CyclicProcessError,
    ModelFormatError,
    NotValidatedError,
    Scheduler,
    SchedulerGapError,
    ThresholdRangeError,
)

from helpers import (
    HALF,
    ONE,
    choice_example,
    chain_value_oracle,
    optimal_value_oracle,
    random_branching_process,
    random_chain,
    random_formula,
    two_flip_chain,
)


def all_stationary_values(formula):
    """Every deterministic choice at q1's two decision points, evaluated
    by inducing the chain and solving it."""
    process = choice_example()
    values = {}
    for low in ("a1", "a2"):
        for high in ("a1", "a2"):
            scheduler = Scheduler(
                budget=co.max_constant(formula),
                entries={("q1", 1): low, ("q1", 3): high, ("q1", TOP): "a1"},
            )
            chain = co.induce_chain(process, scheduler)
            values[(low, high)] = co.solve_chain(chain, formula)
    return values


def test_choice_example_max_value_and_witness():
    result = co.solve_max(choice_example(), co.parse("x<=5"))
    assert result.value == Fraction(3, 4)
    assert dict(result.scheduler.entries) == {("q1", 1): "a1", ("q1", 3): "a2"}


def test_choice_example_min_value_and_witness():
    result = co.solve_min(choice_example(), co.parse("x<=5"))
    assert result.value == Fraction(1, 4)
    assert dict(result.scheduler.entries) == {("q1", 1): "a2", ("q1", 3): "a1"}


def test_choice_example_against_full_enumeration():
    values = all_stationary_values(co.parse("x<=5"))
    assert values == {
        ("a1", "a1"): HALF,
        ("a1", "a2"): Fraction(3, 4),
        ("a2", "a1"): Fraction(1, 4),
        ("a2", "a2"): HALF,
    }
    assert co.solve_max(choice_example(), co.parse("x<=5")).value == max(values.values())
    assert co.solve_min(choice_example(), co.parse("x<=5")).value == min(values.values())


def test_tight_budget_forces_the_cheap_arm():
    result = co.solve_max(choice_example(), co.parse("x<=3"))
    assert result.value == Fraction(1, 4)
    assert result.scheduler.entries[("q1", 1)] == "a2"


def test_induced_chain_reproduces_the_optimum():
    process = choice_example()
    formula = co.parse("x<=5")
    result = co.solve_max(process, formula)
    chain = co.induce_chain(process, result.scheduler)
    assert co.is_chain(chain)
    assert co.validate(chain).ok
    assert co.solve_chain(chain, formula) == result.value


def test_decide_thresholds():
    process = choice_example()
    formula = co.parse("x<=5")
    assert co.decide(process, formula, Fraction(3, 4), "exists")[0]
    assert not co.decide(process, formula, Fraction(4, 5), "exists")[0]
    assert co.decide(process, formula, Fraction(1, 4), "forall")[0]
    assert not co.decide(process, formula, Fraction(3, 4), "forall")[0]


def test_decide_argument_checks():
    process = choice_example()
    formula = co.parse("x<=5")
    with pytest.raises(ThresholdRangeError):
        co.decide(process, formula, Fraction(3, 2), "exists")
    with pytest.raises(ValueError):
        co.decide(process, formula, HALF, "sometimes")


def test_decide_qualitative():
    sure = co.build_chain([("q0", "t", 4, ONE)], "q0", "t")
    assert co.decide_qualitative(sure, 4)[0]
    assert not co.decide_qualitative(sure, 5)[0]
    with pytest.raises(ValueError):
        co.decide_qualitative(sure, -1)
    with pytest.raises(ValueError):
        co.decide_qualitative(sure, True)


def test_solvers_reject_invalid_processes():
    broken = co.build_process([("q0", "a", "t", 1, HALF)], "q0", "t")
    with pytest.raises(NotValidatedError):
        co.solve_max(broken, co.parse("x<=1"))


def test_scheduler_entries_only_at_choice_states():
    result = co.solve_max(choice_example(), co.parse("x<=5"))
    for state, _ in result.scheduler.entries:
        assert len(choice_example().enabled[state]) > 1


def test_scheduler_action_at():
    result = co.solve_max(choice_example(), co.parse("x<=5"))
    scheduler = result.scheduler
    process = choice_example()
    assert scheduler.action_at(process, "q0", 0) == "a"
    assert scheduler.action_at(process, "q1", 1) == "a1"
    assert scheduler.action_at(process, "q1", 3) == "a2"
    with pytest.raises(SchedulerGapError):
        scheduler.action_at(process, "q1", 2)


def test_scheduler_json_round_trip():
    result = co.solve_max(choice_example(), co.parse("x<=5"))
    doc = co.scheduler_to_json(result.scheduler)
    assert doc == [
        {"state": "q1", "cost": "1", "action": "a1"},
        {"state": "q1", "cost": "3", "action": "a2"},
    ]
    back = co.scheduler_from_json(doc)
    assert dict(back.entries) == dict(result.scheduler.entries)


def test_scheduler_from_json_rejects_malformed_rows():
    with pytest.raises(ModelFormatError):
        co.scheduler_from_json({"state": "q1"})
    with pytest.raises(ModelFormatError):
        co.scheduler_from_json([{"state": "q1", "cost": "x", "action": "a"}])
    with pytest.raises(ModelFormatError):
        co.scheduler_from_json([{"state": "q1", "cost": "1"}])


def test_top_entries_serialize():
    scheduler = Scheduler(budget=2, entries={("q1", TOP): "a2"})
    doc = co.scheduler_to_json(scheduler)
    assert doc == [{"state": "q1", "cost": "top", "action": "a2"}]
    assert dict(co.scheduler_from_json(doc).entries) == {("q1", TOP): "a2"}


def test_chains_collapse_max_min_and_solve_chain():
    rng = Random(17)
    for _ in range(25):
        chain = random_chain(rng)
        formula = random_formula(rng)
        direct = co.solve_chain(chain, formula)
        assert co.solve_max(chain, formula).value == direct
        assert co.solve_min(chain, formula).value == direct


def test_values_match_exhaustive_scheduler_enumeration():
    rng = Random(18)
    for _ in range(50):
        process = random_branching_process(rng)
        formula = random_formula(rng)
        assert co.solve_max(process, formula).value == optimal_value_oracle(
            process, formula, "max"
        )
        assert co.solve_min(process, formula).value == optimal_value_oracle(
            process, formula, "min"
        )


def test_max_dominates_min():
    rng = Random(19)
    for _ in range(30):
        process = random_branching_process(rng)
        formula = random_formula(rng)
        assert co.solve_max(process, formula).value >= co.solve_min(process, formula).value


def test_duality_max_is_one_minus_min_of_negation():
    rng = Random(20)
    for _ in range(30):
        process = random_branching_process(rng)
        formula = random_formula(rng)
        assert co.solve_max(process, formula).value == 1 - co.solve_min(
            process, co.Not(formula)
        ).value


def test_witness_schedulers_attain_the_reported_value():
    rng = Random(21)
    for _ in range(30):
        process = random_branching_process(rng)
        formula = random_formula(rng)
        for solver in (co.solve_max, co.solve_min):
            result = solver(process, formula)
            induced = co.induce_chain(process, result.scheduler)
            assert co.solve_chain(induced, formula) == result.value


def test_solve_acyclic_agrees_and_refuses_cycles():
    rng = Random(22)
    seen = 0
    while seen < 15:
        process = random_branching_process(rng)
        formula = random_formula(rng)
        if co.is_acyclic(process):
            for mode, solver in (("max", co.solve_max), ("min", co.solve_min)):
                assert (
                    co.solve_acyclic(process, formula, mode).value
                    == solver(process, formula).value
                )
            seen += 1
    cyclic = co.build_chain(
        [("q0", "q0", 1, HALF), ("q0", "t", 0, HALF)], "q0", "t"
    )
    with pytest.raises(CyclicProcessError):
        co.solve_acyclic(cyclic, co.parse("x<=1"), "max")


def test_constant_formulas_solve_to_zero_or_one():
    process = choice_example()
    assert co.solve_max(process, co.parse("x>=0")).value == 1
    assert co.solve_min(process, co.parse("x>=0")).value == 1
    assert co.solve_max(process, co.parse("x<=3 & x>=5")).value == 0


def test_saturated_choices_use_the_top_entry():
    # With bound 2 the cost-3 arrival at q1 is already saturated (and
    # worthless), so it is recorded under TOP; the cost-1 arrival still
    # has a real choice and picks the cheap arm of a2.
    process = choice_example()
    result = co.solve_max(process, co.parse("x<=2"))
    assert result.value == Fraction(1, 4)
    assert set(result.scheduler.entries) == {("q1", 1), ("q1", TOP)}
    assert result.scheduler.entries[("q1", 1)] == "a2"


def test_cost_utility_decision():
    process = co.build_cost_utility_process(
        [("q0", "a", "t", 2, 3, ONE)], "q0", "t"
    )
    assert co.decide_cost_utility(process, 2, 3)
    assert not co.decide_cost_utility(process, 1, 3)
    assert not co.decide_cost_utility(process, 2, 4)
