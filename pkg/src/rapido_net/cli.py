"""Command-line front end.

Exit codes: 0 success, 1 usage or config error, 2 infeasible or failed
payment, 3 I/O failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .beacon import epoch_for
from .config import SimConfig, load_sim_config, parse_flat_config, sim_config_from_items
from .dhtlc import Ledger
from .experiments import (FIXTURES, ConfigMismatch, IoFailure, PaymentDriver,
                          experiment_config_from_file, run_experiment)
from .routing import NoCandidatePath, candidate_paths, proactive_update
from .topology import (DanglingEndpoint, MalformedSnapshot, assign_deposits,
                       generate_synthetic_graph, load_graph)
from .vdp import (NoFeasibleSplit, instance_from_dict, solution_to_dict,
                  solve_vdp)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INFEASIBLE = 2
EXIT_IO = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2
        raise UsageError(message)


def _add_graph_source(parser: _Parser) -> None:
    parser.add_argument("--snapshot", help="snapshot JSON file")
    parser.add_argument("--synth-nodes", type=int)
    parser.add_argument("--synth-channels", type=int)
    parser.add_argument("--synth-seed", type=int, default=1)
    parser.add_argument("--fixture", choices=sorted(FIXTURES))
    parser.add_argument("--config", help="flat key = value config file")


def _sim_config(args) -> SimConfig:
    if getattr(args, "config", None):
        return load_sim_config(args.config)
    return SimConfig()


def _load_source_graph(args, cfg: SimConfig):
    """Returns (graph, ledger-or-None). Fixtures carry their own balances."""
    if args.fixture:
        graph, ledger = FIXTURES[args.fixture](cfg)
        return graph, ledger
    if args.snapshot:
        graph = load_graph(Path(args.snapshot).read_bytes())
    elif args.synth_nodes and args.synth_channels:
        graph = generate_synthetic_graph(args.synth_nodes, args.synth_channels,
                                         args.synth_seed,
                                         capacity_min=cfg.synth_capacity_min,
                                         capacity_max=cfg.synth_capacity_max)
    else:
        raise UsageError("need --snapshot, --synth-nodes/--synth-channels, "
                         "or --fixture")
    return assign_deposits(graph), None


def build_parser() -> _Parser:
    parser = _Parser(prog="rapido-net")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="load a snapshot and print a summary")
    p.add_argument("snapshot")

    p = sub.add_parser("synth", help="generate a synthetic topology")
    p.add_argument("--nodes", type=int, required=True)
    p.add_argument("--channels", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", help="write the snapshot JSON here")
    p.add_argument("--config")

    p = sub.add_parser("route", help="print candidate paths as JSON lines")
    p.add_argument("--from", dest="src", required=True)
    p.add_argument("--to", dest="dst", required=True)
    _add_graph_source(p)

    p = sub.add_parser("split", help="solve a value-distribution instance")
    p.add_argument("--instance", required=True)

    p = sub.add_parser("pay", help="execute one payment")
    p.add_argument("--from", dest="src", required=True)
    p.add_argument("--to", dest="dst", required=True)
    p.add_argument("--amount", type=int, required=True)
    p.add_argument("--system", choices=("rapido", "ln"), required=True)
    p.add_argument("--fee-budget", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    _add_graph_source(p)

    p = sub.add_parser("experiment", help="run a scenario and write reports")
    p.add_argument("--scenario", choices=("hops", "s1", "s2", "naive"),
                   required=True)
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    return parser


def _cmd_ingest(args) -> int:
    graph = load_graph(Path(args.snapshot).read_bytes())
    print(json.dumps({"nodes": graph.node_count, "channels": graph.channel_count,
                      "total_capacity_sat": graph.total_capacity()}))
    return EXIT_OK


def _cmd_synth(args) -> int:
    cfg = _sim_config(args)
    graph = generate_synthetic_graph(args.nodes, args.channels, args.seed,
                                     capacity_min=cfg.synth_capacity_min,
                                     capacity_max=cfg.synth_capacity_max)
    if args.out:
        Path(args.out).write_text(json.dumps(graph.snapshot_dict(), sort_keys=True))
    degrees = sorted((graph.degree(n) for n in graph.nodes()), reverse=True)
    print(json.dumps({"nodes": graph.node_count, "channels": graph.channel_count,
                      "max_degree": degrees[0], "seed": args.seed}))
    return EXIT_OK


def _cmd_route(args) -> int:
    cfg = _sim_config(args)
    graph, _ = _load_source_graph(args, cfg)
    epoch = epoch_for(graph, cfg.beacon_count, 0, cfg.beacon_seed,
                      period_length=cfg.beacon_period_hours)
    state = proactive_update(graph, epoch)
    try:
        routes = candidate_paths(state, args.src, args.dst, epoch,
                                 max_candidates=cfg.routing_max_candidates)
    except NoCandidatePath:
        return EXIT_INFEASIBLE
    for route in routes:
        print(json.dumps({"hops": list(route.hops), "length": route.length}))
    return EXIT_OK


def _cmd_split(args) -> int:
    instance = instance_from_dict(json.loads(Path(args.instance).read_text()))
    try:
        solution = solve_vdp(instance)
    except NoFeasibleSplit as exc:
        print(json.dumps({"error": str(exc)}), file=sys.stderr)
        return EXIT_INFEASIBLE
    print(json.dumps(solution_to_dict(solution), sort_keys=True))
    return EXIT_OK


def _cmd_pay(args) -> int:
    cfg = _sim_config(args)
    graph, ledger = _load_source_graph(args, cfg)
    if ledger is None:
        ledger = Ledger.with_nodes(graph.nodes(), cfg.ledger_initial_onchain)
    driver = PaymentDriver(graph, cfg, args.seed, ledger=ledger)
    if args.system == "ln":
        outcome = driver.pay_ln(args.src, args.dst, args.amount)
    else:
        outcome = driver.pay_rapido(args.src, args.dst, args.amount,
                                    args.fee_budget)
    print(json.dumps({
        "system": outcome.system,
        "settled": outcome.settled,
        "shares": [s for s, ok in outcome.share_results if ok],
        "total_fee_paid": outcome.total_fee_paid,
        "hops_used": outcome.hops_used,
        "failure": outcome.failure,
        "on_chain_events": outcome.event_span[1] - outcome.event_span[0],
    }, sort_keys=True))
    return EXIT_OK if outcome.settled else EXIT_INFEASIBLE


def _cmd_experiment(args) -> int:
    exp = experiment_config_from_file(args.config)
    if args.scenario:
        exp.scenario = args.scenario
    paths = run_experiment(exp, args.out)
    print(json.dumps({"written": [str(p) for p in paths]}))
    return EXIT_OK


_COMMANDS = {
    "ingest": _cmd_ingest,
    "synth": _cmd_synth,
    "route": _cmd_route,
    "split": _cmd_split,
    "pay": _cmd_pay,
    "experiment": _cmd_experiment,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConfigMismatch as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (MalformedSnapshot, DanglingEndpoint) as exc:
        print(f"snapshot error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (IoFailure, OSError) as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (json.JSONDecodeError, KeyError, ValueError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
