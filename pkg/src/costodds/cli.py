"""Command-line front end.

One verb per capability: validate, solve, dist, quantile, scheduler,
gadget (model generators), brute (oracles), sample. Exit codes: 0 for
an answered query (or a "yes" decision), 1 for a "no" decision, 2 for
usage or validation problems. All numbers print as exact rationals;
``--json`` switches to machine-readable reports carrying the same
values.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .chain_solver import cost_distribution, solve_chain
from .errors import CostOddsError, NotValidatedError, ThresholdRangeError
from .formula import max_constant, parse, satisfies, to_text
from .gadgets import (
    circuit_from_json,
    circuit_to_chain,
    circuit_to_dfa,
    count_parikh_paths,
    countdown_brute,
    countdown_from_json,
    countdown_to_process,
    lift_gate,
    posslp_instance,
    qsubsetsum_brute,
    qsubsetsum_to_process,
    qualitative_to_cost_utility,
    threshold_to_half,
    universal_qsubsetsum_to_process,
)
from .mc import estimate
from .mdp_solver import scheduler_from_json, scheduler_to_json, solve_max, solve_min
from .model import (
    cost_utility_from_json,
    cost_utility_to_json,
    is_chain,
    model_from_json,
    model_to_json,
    validate,
    validate_cost_utility,
)
from .quantile import quantile_query
from .rational import format_rational, parse_rational

__all__ = ["main", "canonical_json"]


def canonical_json(data: object) -> str:
    """The one serialization used for all JSON output, so round-trips are stable."""
    return json.dumps(data, indent=2, sort_keys=False)


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return args.handler(args)
    except CostOddsError as exc:
        if isinstance(exc, NotValidatedError):
            for finding in exc.report.violations:
                print(
                    f"error: {finding.code} at {finding.subject}: {finding.message}",
                    file=sys.stderr,
                )
        else:
            print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="costodds",
        description="Exact budget-probability queries on cost processes.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    sp = _command(commands, "validate", "Check a model file and report findings.")
    sp.add_argument("--model", required=True)
    sp.add_argument("--kind", choices=("cost", "cost-utility"), default="cost")
    sp.set_defaults(handler=_cmd_validate)

    sp = _command(commands, "solve", "Optimal probability that the final cost fits the formula.")
    sp.add_argument("--model", required=True)
    sp.add_argument("--formula", required=True)
    sp.add_argument("--tau", help="decision threshold, as num/den")
    sp.add_argument("--quant", choices=("exists", "forall"))
    sp.set_defaults(handler=_cmd_solve)

    sp = _command(commands, "dist", "Truncated distribution of the accumulated cost of a chain.")
    sp.add_argument("--model", required=True)
    sp.add_argument("--budget", required=True, type=int)
    sp.set_defaults(handler=_cmd_dist)

    sp = _command(commands, "quantile", "Smallest budget whose probability meets the threshold.")
    sp.add_argument("--model", required=True)
    sp.add_argument("--tau", required=True)
    sp.add_argument("--quant", choices=("exists", "forall"), required=True)
    sp.set_defaults(handler=_cmd_quantile)

    sp = _command(commands, "scheduler", "Emit the optimizing scheduler as JSON.")
    sp.add_argument("--model", required=True)
    sp.add_argument("--formula", required=True)
    sp.add_argument("--quant", choices=("exists", "forall"), required=True)
    sp.set_defaults(handler=_cmd_scheduler)

    gadget = commands.add_parser("gadget", help="Generate models with certified answers.")
    gadgets = gadget.add_subparsers(dest="gadget", required=True)

    sp = _command(gadgets, "half", "Move an arbitrary threshold to 1/2.")
    sp.add_argument("--model", required=True)
    sp.add_argument("--formula", required=True)
    sp.add_argument("--tau", required=True)
    sp.set_defaults(handler=_cmd_gadget_half)

    sp = _command(gadgets, "circuit", "Chain whose exact-cost probability encodes a gate value.")
    sp.add_argument("--circuit", required=True)
    sp.add_argument("--gate", required=True)
    sp.set_defaults(handler=_cmd_gadget_circuit)

    sp = _command(gadgets, "posslp", "Chain and formula comparing two gate values at threshold 1/2.")
    sp.add_argument("--circuit", required=True)
    sp.add_argument("--g1", required=True)
    sp.add_argument("--g2", required=True)
    sp.set_defaults(handler=_cmd_gadget_posslp)

    sp = _command(gadgets, "qss", "Existential subset-sum game as a cost process.")
    sp.add_argument("--k", required=True, help="comma-separated weights")
    sp.add_argument("--T", required=True, type=int, dest="total")
    sp.set_defaults(handler=_cmd_gadget_qss)

    sp = _command(gadgets, "uqss", "Universal subset-sum game as a cost process.")
    sp.add_argument("--k", required=True, help="comma-separated weights")
    sp.add_argument("--T", required=True, type=int, dest="total")
    sp.set_defaults(handler=_cmd_gadget_uqss)

    sp = _command(gadgets, "countdown", "Countdown game as a qualitative cost process.")
    sp.add_argument("--game", required=True)
    sp.set_defaults(handler=_cmd_gadget_countdown)

    sp = _command(gadgets, "cu", "Mirror costs onto utilities for the two-counter query.")
    sp.add_argument("--model", required=True)
    sp.add_argument("--T", required=True, type=int, dest="total")
    sp.set_defaults(handler=_cmd_gadget_cu)

    brute = commands.add_parser("brute", help="Exhaustive oracles for small instances.")
    brutes = brute.add_subparsers(dest="brute", required=True)

    sp = _command(brutes, "qss", "Game-tree evaluation of a subset-sum game.")
    sp.add_argument("--k", required=True)
    sp.add_argument("--T", required=True, type=int, dest="total")
    sp.set_defaults(handler=_cmd_brute_qss)

    sp = _command(brutes, "countdown", "Win-set computation for a countdown game.")
    sp.add_argument("--game", required=True)
    sp.set_defaults(handler=_cmd_brute_countdown)

    sp = _command(brutes, "parikh", "Count budget-conforming paths in a circuit's DFA.")
    sp.add_argument("--circuit", required=True)
    sp.add_argument("--gate", required=True)
    sp.set_defaults(handler=_cmd_brute_parikh)

    sp = _command(commands, "sample", "Monte Carlo estimate under a fixed scheduler.")
    sp.add_argument("--model", required=True)
    sp.add_argument("--formula", required=True)
    sp.add_argument("--n", required=True, type=int)
    sp.add_argument("--seed", required=True, type=int)
    sp.add_argument("--scheduler", help="scheduler JSON file (optional for chains)")
    sp.set_defaults(handler=_cmd_sample)

    return parser


def _command(subparsers, name: str, help_text: str):
    sp = subparsers.add_parser(name, help=help_text, description=help_text)
    sp.add_argument("--json", action="store_true", help="emit a JSON report")
    return sp


def _load_json(path: str) -> object:
    with open(path, "r", encoding="utf-8") as handle:
        return json.load(handle)


def _emit(args, payload: dict, lines: list[str]) -> None:
    if args.json:
        print(canonical_json(payload))
    else:
        for line in lines:
            print(line)


def _threshold(text: str) -> Fraction:
    value = parse_rational(text, "threshold")
    if not 0 <= value <= 1:
        raise ThresholdRangeError(f"threshold must be in [0, 1], got {value}")
    return value


def _weights(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",")]
    except ValueError:
        raise ValueError(f"weights must be comma-separated integers, got {text!r}") from None


def _cmd_validate(args) -> int:
    data = _load_json(args.model)
    if args.kind == "cost-utility":
        report = validate_cost_utility(cost_utility_from_json(data))
    else:
        report = validate(model_from_json(data))
    payload = {
        "ok": report.ok,
        "findings": [
            {"code": f.code, "subject": f.subject, "message": f.message}
            for f in report.violations
        ],
    }
    lines = (
        ["valid"]
        if report.ok
        else [f"{f.code} at {f.subject}: {f.message}" for f in report.violations]
    )
    _emit(args, payload, lines)
    return 0 if report.ok else 2


def _cmd_solve(args) -> int:
    process = model_from_json(_load_json(args.model))
    formula = parse(args.formula)
    if is_chain(process):
        value = solve_chain(process, formula)
    elif args.quant is None:
        print("error: --quant is required for models with choices", file=sys.stderr)
        return 2
    else:
        solver = solve_max if args.quant == "exists" else solve_min
        value = solver(process, formula).value
    payload: dict = {"value": format_rational(value)}
    lines = [f"value {format_rational(value)}"]
    if args.tau is None:
        _emit(args, payload, lines)
        return 0
    threshold = _threshold(args.tau)
    verdict = value >= threshold
    payload["verdict"] = verdict
    _emit(args, payload, [("true" if verdict else "false"), *lines])
    return 0 if verdict else 1


def _cmd_dist(args) -> int:
    process = model_from_json(_load_json(args.model))
    result = cost_distribution(process, args.budget)
    payload = {
        "budget": result.budget,
        "mass": {str(k): format_rational(v) for k, v in sorted(result.mass.items())},
        "overflow": format_rational(result.overflow),
        "stats": dict(result.stats),
    }
    lines = [f"{k}: {format_rational(v)}" for k, v in sorted(result.mass.items())]
    lines.append(f"overflow: {format_rational(result.overflow)}")
    _emit(args, payload, lines)
    return 0


def _cmd_quantile(args) -> int:
    process = model_from_json(_load_json(args.model))
    budget = quantile_query(process, _threshold(args.tau), args.quant)
    payload = {"budget": budget}
    _emit(args, payload, ["infinity" if budget is None else str(budget)])
    return 0


def _cmd_scheduler(args) -> int:
    process = model_from_json(_load_json(args.model))
    solver = solve_max if args.quant == "exists" else solve_min
    result = solver(process, parse(args.formula))
    payload = {
        "value": format_rational(result.value),
        "scheduler": scheduler_to_json(result.scheduler),
    }
    lines = [f"value {format_rational(result.value)}"] + [
        f"{entry['state']} @ {entry['cost']} -> {entry['action']}"
        for entry in scheduler_to_json(result.scheduler)
    ]
    _emit(args, payload, lines)
    return 0


def _cmd_gadget_half(args) -> int:
    process = model_from_json(_load_json(args.model))
    formula = parse(args.formula)
    threshold = _threshold(args.tau)
    horizon = max_constant(formula)
    probes = range(horizon + 2)
    hit = next((v for v in probes if satisfies(v, formula)), None)
    miss = next((v for v in probes if not satisfies(v, formula)), None)
    if hit is None or miss is None:
        print("error: formula is constant; nothing to re-threshold", file=sys.stderr)
        return 2
    result = threshold_to_half(process, formula, threshold, miss, hit)
    payload = {"model": model_to_json(result), "tau": "1/2", "formula": args.formula}
    _emit(args, payload, [canonical_json(model_to_json(result))])
    return 0


def _cmd_gadget_circuit(args) -> int:
    circuit = circuit_from_json(_load_json(args.circuit))
    gate = args.gate
    if circuit.gate(gate).level % 2 == 0:
        circuit, gate = lift_gate(circuit, gate)
        print(f"note: even-level gate lifted to {gate!r}", file=sys.stderr)
    certificate = circuit_to_chain(circuit, gate)
    payload = {
        "model": model_to_json(certificate.model),
        "target": certificate.target_value,
        "scale": certificate.scale,
        "bookkeeping": _plain(certificate.bookkeeping),
    }
    lines = [
        f"target {certificate.target_value}",
        f"scale {certificate.scale}",
        canonical_json(model_to_json(certificate.model)),
    ]
    _emit(args, payload, lines)
    return 0


def _cmd_gadget_posslp(args) -> int:
    circuit = circuit_from_json(_load_json(args.circuit))
    model, formula, certificate = posslp_instance(circuit, args.g1, args.g2)
    payload = {
        "model": model_to_json(model),
        "formula": to_text(formula),
        "tau": "1/2",
        "target": certificate.target_value,
        "scale": certificate.scale,
        "bookkeeping": _plain(certificate.bookkeeping),
    }
    lines = [
        f"formula {to_text(formula)}",
        "tau 1/2",
        canonical_json(model_to_json(model)),
    ]
    _emit(args, payload, lines)
    return 0


def _cmd_gadget_qss(args) -> int:
    process, budget, threshold = qsubsetsum_to_process(_weights(args.k), args.total)
    payload = {
        "model": model_to_json(process),
        "B": budget,
        "tau": format_rational(threshold),
        "formula": f"x<={budget}",
    }
    lines = [
        f"B {budget}",
        f"tau {format_rational(threshold)}",
        canonical_json(model_to_json(process)),
    ]
    _emit(args, payload, lines)
    return 0


def _cmd_gadget_uqss(args) -> int:
    process, budget, threshold = universal_qsubsetsum_to_process(
        _weights(args.k), args.total
    )
    payload = {
        "model": model_to_json(process),
        "B": budget,
        "tau": format_rational(threshold),
        "formula": f"x<={budget - 1}",
    }
    lines = [
        f"B {budget}",
        f"tau {format_rational(threshold)}",
        canonical_json(model_to_json(process)),
    ]
    _emit(args, payload, lines)
    return 0


def _cmd_gadget_countdown(args) -> int:
    game = countdown_from_json(_load_json(args.game))
    process, total = countdown_to_process(game)
    payload = {"model": model_to_json(process), "total": total}
    _emit(args, payload, [f"total {total}", canonical_json(model_to_json(process))])
    return 0


def _cmd_gadget_cu(args) -> int:
    process = model_from_json(_load_json(args.model))
    result = qualitative_to_cost_utility(process, args.total)
    payload = {
        "model": cost_utility_to_json(result),
        "cost_cap": args.total,
        "goal": args.total,
    }
    _emit(args, payload, [canonical_json(cost_utility_to_json(result))])
    return 0


def _cmd_brute_qss(args) -> int:
    verdict = qsubsetsum_brute(_weights(args.k), args.total)
    _emit(args, {"verdict": verdict}, ["true" if verdict else "false"])
    return 0 if verdict else 1


def _cmd_brute_countdown(args) -> int:
    verdict = countdown_brute(countdown_from_json(_load_json(args.game)))
    _emit(args, {"verdict": verdict}, ["true" if verdict else "false"])
    return 0 if verdict else 1


def _cmd_brute_parikh(args) -> int:
    circuit = circuit_from_json(_load_json(args.circuit))
    dfa, budget, source, sink = circuit_to_dfa(circuit, args.gate)
    count = count_parikh_paths(dfa, source, sink, budget)
    _emit(args, {"count": count}, [str(count)])
    return 0


def _cmd_sample(args) -> int:
    process = model_from_json(_load_json(args.model))
    scheduler = (
        scheduler_from_json(_load_json(args.scheduler)) if args.scheduler else None
    )
    report = estimate(process, scheduler, parse(args.formula), args.n, args.seed)
    payload = {
        "n": report.n,
        "hits": report.hits,
        "estimate": format_rational(report.estimate),
        "ci_halfwidth": report.ci_halfwidth,
        "seed": report.seed,
        "guard_trips": report.guard_trips,
    }
    lines = [
        f"estimate {format_rational(report.estimate)}",
        f"hits {report.hits}/{report.n}",
        f"ci_halfwidth {report.ci_halfwidth}",
    ]
    _emit(args, payload, lines)
    return 0


def _plain(mapping) -> dict:
    return {
        key: list(value) if isinstance(value, tuple) else value
        for key, value in mapping.items()
    }


if __name__ == "__main__":
    sys.exit(main())
