"""Command-line interface: ``gridcon <command> ...``.

Every command prints a JSON report (command echo, input digests, settings,
result, per-phase wall-clock timing). Exit status is 0 on success, 1 on a
domain error and 2 on a usage error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from pathlib import Path

from . import __version__
from .cascade import DamageMetric, damage, run_cascade
from .contingency import Solver, exact_k_contingency
from .datasets import BUILDERS, build_dataset
from .entities import parse_token, tokens
from .errors import GridconError
from .events import DEFAULT_BUDGET_MS, read_events, self_updating_list
from .game import GameScenario, run_game
from .heuristic import heuristic_k_contingency
from .idr import Model
from .lpexport import export_ilp
from .network import dumps_network, load_network


class _Timer:
    def __init__(self):
        self.phases = {}

    def __call__(self, name):
        timer = self

        class _Phase:
            def __enter__(self):
                self.start = time.perf_counter()

            def __exit__(self, *exc):
                timer.phases[name] = round((time.perf_counter() - self.start) * 1000, 3)

        return _Phase()


def _digest(data):
    return "sha256:" + hashlib.sha256(data).hexdigest()


def _entity_list(text):
    if text is None:
        return []
    return [parse_token(t.strip()) for t in text.split(",") if t.strip()]


def _load_network(spec, inputs):
    """A network file path, or the name of a bundled dataset."""
    path = Path(spec)
    if path.exists():
        data = path.read_bytes()
        inputs[spec] = _digest(data)
        try:
            doc = json.loads(data)
        except json.JSONDecodeError as exc:
            raise GridconError(f"{spec} is not valid JSON: {exc}") from None
        return load_network(doc)
    if spec in BUILDERS:
        net = build_dataset(spec)
        inputs[spec] = _digest(dumps_network(net).encode())
        return net
    raise GridconError(f"no network file or bundled dataset named {spec!r}")


def _inject(network, fail, harden=()):
    if fail:
        unknown = [e for e in fail if e not in network.entities]
        if unknown:
            raise GridconError(f"unknown entities: {tokens(unknown)}")
        network = network.with_states({e: 0 for e in fail})
    if harden:
        network = network.with_hardened(harden)
    return network


def _emit(report, args, timer):
    report["timing"] = {} if args.deterministic else timer.phases
    text = json.dumps(report, indent=2) + "\n"
    if args.report:
        Path(args.report).write_text(text)
    else:
        sys.stdout.write(text)


# -- commands ---------------------------------------------------------------


def cmd_simulate(args, timer, inputs):
    with timer("load"):
        net = _load_network(args.network, inputs)
        fail = _entity_list(args.fail)
        hard = _entity_list(args.harden)
    with timer("cascade"):
        trace = run_cascade(net, fail, hard, model=args.model)
    if args.csv:
        Path(args.csv).write_text(trace.to_csv())
    return {
        "settings": {"model": args.model, "metric": args.metric, "fail": tokens(fail), "harden": tokens(hard)},
        "result": {
            "damage": damage(trace, args.metric),
            "steps": len(trace),
            "dropped": tokens(trace.dropped()),
            "trace": trace.to_json(),
        },
    }


def _contingency(net, args):
    excl = _entity_list(args.exclude)
    if args.solver == Solver.EXACT.value:
        return exact_k_contingency(net, args.k, args.metric, args.model, excl, args.workers)
    return heuristic_k_contingency(net, args.k, args.metric, args.model, excl)


def cmd_contingency(args, timer, inputs):
    with timer("load"):
        net = _inject(_load_network(args.network, inputs), _entity_list(args.fail))
    with timer("solve"):
        res = _contingency(net, args)
    return {
        "settings": {
            "k": args.k, "solver": args.solver, "metric": args.metric, "model": args.model,
            "fail": args.fail or "", "exclude": args.exclude or "",
        },
        "result": res.to_json(timing=not args.deterministic),
    }


def cmd_events(args, timer, inputs):
    with timer("load"):
        net = _inject(_load_network(args.network, inputs), _entity_list(args.fail))
        data = Path(args.events).read_bytes()
        inputs[args.events] = _digest(data)
        events = read_events(data.decode())
    with timer("replay"):
        updates = self_updating_list(
            net, events, args.k, args.solver, args.metric, args.model, args.horizon_ms, args.budget_ms
        )
    timing = not args.deterministic
    over = [u.t for u in updates if u.over_budget]
    return {
        "settings": {
            "k": args.k, "solver": args.solver, "metric": args.metric, "model": args.model,
            "budget_ms": args.budget_ms, "horizon_ms": args.horizon_ms,
        },
        "result": {
            "updates": [u.to_json(timing) for u in updates],
            "budget_violations": over if timing else [],
        },
    }


def cmd_export_ilp(args, timer, inputs):
    with timer("load"):
        net = _inject(_load_network(args.network, inputs), _entity_list(args.fail))
    with timer("export"):
        text = export_ilp(net, args.k, args.horizon)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return {
        "settings": {"k": args.k, "horizon": args.horizon},
        "result": {"out": args.out, "bytes": len(text.encode()), "digest": _digest(text.encode())},
    }


def cmd_game(args, timer, inputs):
    with timer("load"):
        net = _load_network(args.network, inputs)
        data = Path(args.scenario).read_bytes()
        inputs[args.scenario] = _digest(data)
        try:
            doc = json.loads(data)
        except json.JSONDecodeError as exc:
            raise GridconError(f"{args.scenario} is not valid JSON: {exc}") from None
        scenario = GameScenario.from_json(doc)
    with timer("game"):
        outcome = run_game(net, scenario)
    if args.csv:
        Path(args.csv).write_text(outcome.to_csv())
    return {"settings": scenario.to_json(), "result": outcome.to_json()}


def cmd_dataset(args, timer, inputs):
    with timer("build"):
        net = build_dataset(args.name)
        text = dumps_network(net)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return {
        "settings": {"name": args.name},
        "result": {
            "out": args.out,
            "entities": len(net.entities),
            "idrs": len(net.idrs),
            "buses": len(net.buses),
            "substations": len(net.substations),
            "digest": _digest(text.encode()),
        },
    }


# -- parser -----------------------------------------------------------------


def build_parser():
    p = argparse.ArgumentParser(prog="gridcon", description="Interdependent smart-grid contingency toolkit.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, network=True):
        if network:
            sp.add_argument("--network", required=True, help="network JSON file or bundled dataset name")
        sp.add_argument("--report", help="write the JSON report here instead of standard output")
        sp.add_argument("--deterministic", action="store_true", help="zero all timing fields")

    def modelling(sp):
        sp.add_argument("--model", choices=[m.value for m in Model], default=Model.MIIM.value)
        sp.add_argument("--metric", choices=[m.value for m in DamageMetric], default=DamageMetric.STATE_LOSS.value)

    sp = sub.add_parser("simulate", help="run a cascade")
    common(sp)
    modelling(sp)
    sp.add_argument("--fail", default="", help="comma-separated entities failing at t=0")
    sp.add_argument("--harden", default="", help="comma-separated hardened entities")
    sp.add_argument("--csv", help="write the trace as t,entity,state CSV")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("contingency", help="K-contingency list")
    common(sp)
    modelling(sp)
    sp.add_argument("-k", type=int, required=True)
    sp.add_argument("--solver", choices=[s.value for s in Solver], default=Solver.EXACT.value)
    sp.add_argument("--fail", default="", help="entities already failed before the analysis")
    sp.add_argument("--exclude", default="", help="entities the solver may not pick")
    sp.add_argument("--workers", type=int, help="process count for the exact solver")
    sp.set_defaults(func=cmd_contingency)

    sp = sub.add_parser("events", help="replay failure events with a self-updating list")
    common(sp)
    modelling(sp)
    sp.add_argument("--events", required=True, help="CSV of time_ms,entity,new_state")
    sp.add_argument("-k", type=int, default=1)
    sp.add_argument("--solver", choices=[s.value for s in Solver], default=Solver.HEURISTIC.value)
    sp.add_argument("--fail", default="")
    sp.add_argument("--budget-ms", type=float, default=DEFAULT_BUDGET_MS)
    sp.add_argument("--horizon-ms", type=int, default=0)
    sp.set_defaults(func=cmd_events)

    sp = sub.add_parser("export-ilp", help="write the K-contingency program in LP format")
    common(sp)
    sp.add_argument("-k", type=int, required=True)
    sp.add_argument("--out", help="LP file (default: standard output, report suppressed)")
    sp.add_argument("--horizon", type=int, help="time steps (default: entity count - 1)")
    sp.add_argument("--fail", default="")
    sp.set_defaults(func=cmd_export_ilp)

    sp = sub.add_parser("game", help="play a hardening game scenario")
    common(sp)
    sp.add_argument("--scenario", required=True, help="scenario JSON")
    sp.add_argument("--csv", help="write before/hardened/unhardened operational counts")
    sp.set_defaults(func=cmd_game)

    sp = sub.add_parser("dataset", help="emit a bundled network")
    common(sp, network=False)
    sp.add_argument("--name", required=True, choices=sorted(BUILDERS))
    sp.add_argument("--out", help="network file (default: standard output, report suppressed)")
    sp.set_defaults(func=cmd_dataset)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    timer = _Timer()
    inputs = {}
    try:
        body = args.func(args, timer, inputs)
    except GridconError as exc:
        print(f"gridcon: error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"gridcon: error: {exc}", file=sys.stderr)
        return 1
    # artifacts printed to stdout take the place of the report
    if getattr(args, "out", "unset") is None and not args.report:
        return 0
    report = {
        "command": args.command,
        "argv": list(sys.argv[1:] if argv is None else argv),
        "version": __version__,
        "inputs": inputs,
        **body,
    }
    _emit(report, args, timer)
    return 0


if __name__ == "__main__":
    sys.exit(main())
