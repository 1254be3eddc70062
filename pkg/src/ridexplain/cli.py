"""Command-line entry point: ``ridexplain <command> ...``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import game, mlp
from .agents import ALL_DESCRIPTORS, DEFAULT_SUBSET, axis_agent, pbe_agent, random_agent, validate_subset
from .assignment import Assignment, optimal_assignment
from .errors import ConfigurationError, RidexplainError
from .explanations import load_scenarios, save_scenarios
from .harness import (ExperimentConfig, generate_scenarios, ingest_trips, load_requests,
                      run_comparison, save_requests, write_report)
from .pricing import FareConfig, private_quote, public_quote
from .roadnet import (DEFAULT_SPEED_KMH, DistanceMatrix, all_pairs_shortest_paths, generate_grid,
                      load_network_dir, save_network)


def _emit(obj, out):
    text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _matrix(args, speed_kmh=DEFAULT_SPEED_KMH) -> DistanceMatrix:
    if getattr(args, "apsp", None):
        return DistanceMatrix.load(args.apsp)
    if getattr(args, "net", None):
        return all_pairs_shortest_paths(load_network_dir(args.net), speed_kmh)
    raise ConfigurationError("need --apsp or --net")


def _subset(args):
    return validate_subset(args.subset) if args.subset else DEFAULT_SUBSET


def assignment_to_dict(a: Assignment, origin: int) -> dict:
    return {
        "origin": origin,
        "objective_km": a.objective_km,
        "partitions_visited": a.partitions_visited,
        "memo_entries": a.memo_entries,
        "routes": [{
            "block": sorted(r.block),
            "passenger_order": list(r.passenger_order),
            "visit_order": list(r.visit_order),
            "total_distance_km": r.total_distance_km,
            "per_passenger": {str(p): {"ride_distance_km": r.per_passenger[p].ride_distance_km,
                                       "ride_time_min": r.per_passenger[p].ride_time_min}
                              for p in r.passenger_order},
        } for r in a.routes],
    }


def cmd_gen_graph(args):
    net = generate_grid(args.rows, args.cols, args.spacing, args.jitter, args.seed or 0)
    save_network(net, args.out)
    print(f"wrote {net.n} nodes, {len(net.edges)} edges to {args.out}")


def cmd_apsp(args):
    net = load_network_dir(args.net, directed=args.directed)
    m = all_pairs_shortest_paths(net, args.speed_kmh)
    out = args.out if str(args.out).endswith(".npz") else str(args.out) + ".npz"
    m.save(out)
    print(f"wrote {m.n}x{m.n} matrices to {out}")


def cmd_assign(args):
    m = _matrix(args)
    requests = load_requests(args.requests)
    a = optimal_assignment(args.origin, requests, m, args.capacity)
    _emit(assignment_to_dict(a, args.origin), args.out)


def cmd_quote(args):
    cfg = FareConfig.load(args.config) if args.config else FareConfig()
    m = _matrix(args, cfg.speed_kmh)
    pc, pt = private_quote(args.origin, args.dest, m, cfg)
    bc, bt, buses = public_quote(args.origin, args.dest, m, cfg)
    _emit({
        "origin": args.origin, "dest": args.dest,
        "distance_km": m.distance(args.origin, args.dest),
        "private": {"cost_usd": pc, "time_min": pt},
        "public": {"cost_usd": bc, "time_min": bt, "buses": buses},
        # a lone rider's shared ride is the private ride
        "shared_alone": {"cost_usd": pc, "time_min": pt},
    }, args.out)


def cmd_gen_scenarios(args):
    cfg = ExperimentConfig.load(args.config) if args.config else ExperimentConfig()
    overrides = {k: v for k, v in {
        "network_dir": args.net, "origin": args.origin, "passengers": args.passengers,
        "rounds": args.rounds, "request_seed": args.seed}.items() if v is not None}
    if overrides:
        cfg = ExperimentConfig.from_mapping({**_config_dict(cfg), **overrides})
    matrix = DistanceMatrix.load(args.apsp) if args.apsp else None
    requests = load_requests(args.requests) if args.requests else None
    scenarios, assignments = generate_scenarios(cfg, matrix, requests)
    save_scenarios(scenarios, args.out)
    if args.assignments_out:
        _emit([assignment_to_dict(a, cfg.origin) for a in assignments], args.assignments_out)
    print(f"wrote {len(scenarios)} scenarios from {len(assignments)} assignments "
          f"({sum(a.partitions_visited for a in assignments)} partitions searched) to {args.out}")


def _config_dict(cfg: ExperimentConfig) -> dict:
    d = {k: getattr(cfg, k) for k in cfg.__dataclass_fields__}
    d["fare"] = cfg.fare.to_dict()
    return d


def cmd_ingest_trips(args):
    net = load_network_dir(args.net)
    requests, skipped = ingest_trips(args.trips, net, args.cutoff_km)
    save_requests(requests, args.out)
    print(f"wrote {len(requests)} requests to {args.out}; skipped {skipped}")


def cmd_synth_labels(args):
    scenarios = load_scenarios(args.scenarios)
    subset = _subset(args)
    data = mlp.synth_labels(scenarios, subset, noise_rate=args.noise, seed=args.seed or 0)
    mlp.save_labeled(data, subset, args.out)
    print(f"wrote {len(data)} labelled scenarios to {args.out}")


def cmd_train(args):
    data, subset = mlp.load_labeled(args.data)
    cfg = mlp.TrainConfig.load(args.config) if args.config else mlp.TrainConfig()
    if args.seed is not None:
        cfg = mlp.TrainConfig(**{**cfg.__dict__, "seed": args.seed})
    model, hist = mlp.train(data, cfg)
    mlp.save(model, args.out)
    report = {"subset": list(subset), "config": cfg.__dict__, **hist.to_dict()}
    if args.report:
        Path(args.report).write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
    print(f"test per-label accuracy {hist.test_label_accuracy:.4f}, "
          f"exact match {hist.test_exact_match:.4f}, best epoch {hist.best_epoch}")


def _load_model(path):
    if not path:
        raise ConfigurationError("the axis agent needs --model")
    return mlp.load(path)


def cmd_explain(args):
    scenarios = load_scenarios(args.scenario)
    model = _load_model(args.model) if args.agent == "axis" else None
    lines = []
    for s in scenarios:
        if args.agent == "pbe":
            out = pbe_agent(s)
        elif args.agent == "random":
            out = random_agent(s, args.seed or 0, ALL_DESCRIPTORS)
        else:
            out = axis_agent(model, _subset(args), s)
        lines.append(json.dumps(out.to_dict(), sort_keys=True))
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_agents_compare(args):
    scenarios = load_scenarios(args.scenarios)
    model = _load_model(args.model)
    report = run_comparison(scenarios, model, _subset(args), args.seed or 0)
    summary_path = write_report(report, args.out)
    print(f"wrote {len(report.rows)} rows to {args.out} and summary to {summary_path}")


def cmd_game(args):
    prior = game.load_prior(args.prior)
    if args.game_cmd == "pbe":
        res = game.compute_pbe(prior)
        verdict = game.verify_pbe(prior, res.sender, res.receiver, res.quiet_belief)
        u1, u2 = game.expected_utilities(prior, res.sender, res.receiver)
        _emit({
            "support": list(prior.support), "probs": list(prior.probs),
            "reveal_prob": [res.sender.at(x) for x in prior.support],
            "on_quiet": res.receiver.on_quiet,
            "quiet_belief": {"support": list(res.quiet_belief.support),
                             "probs": list(res.quiet_belief.probs)},
            "sender_indifferent_at_min": res.sender_indifferent_at_min,
            "verified": verdict.ok,
            "failures": [{"condition": c, "detail": d} for c, d in verdict.failures],
            "sender_utility": u1, "receiver_utility": u2,
        }, args.out)
    elif args.game_cmd == "unravel":
        seq = game.unravel(prior, args.max_iters)
        _emit({"sequence": seq, "iterations": len(seq) - 1, "fixed_point": seq[-1]}, args.out)
    else:
        sender, receiver, (u1, u2) = game.simulate_threshold(prior, args.reveal_above)
        _emit({"reveal_above": args.reveal_above,
               "reveal_prob": [sender.at(x) for x in prior.support],
               "on_quiet": receiver.on_quiet,
               "sender_utility": u1, "receiver_utility": u2}, args.out)


NEEDS_OUT = {"gen-graph", "apsp", "gen-scenarios", "ingest-trips", "synth-labels", "train",
             "agents-compare"}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--config", default=None)
    common.add_argument("--out", default=None)
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="ridexplain", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, **kw):
        sp = sub.add_parser(name, parents=[common], **kw)
        sp.set_defaults(func=func)
        return sp

    sp = add("gen-graph", cmd_gen_graph, help="write a jittered grid network")
    sp.add_argument("--rows", type=int, required=True)
    sp.add_argument("--cols", type=int, required=True)
    sp.add_argument("--spacing", type=float, default=1.0)
    sp.add_argument("--jitter", type=float, default=0.0)

    sp = add("apsp", cmd_apsp, help="all-pairs shortest paths (.npz)")
    sp.add_argument("--net", required=True)
    sp.add_argument("--speed-kmh", type=float, default=DEFAULT_SPEED_KMH)
    sp.add_argument("--directed", action="store_true")

    sp = add("assign", cmd_assign, help="optimal single-origin assignment (JSON)")
    sp.add_argument("--net")
    sp.add_argument("--apsp")
    sp.add_argument("--origin", type=int, required=True)
    sp.add_argument("--requests", required=True)
    sp.add_argument("--capacity", type=int, default=4)

    sp = add("quote", cmd_quote, help="private / public quotes between two nodes")
    sp.add_argument("--net")
    sp.add_argument("--apsp")
    sp.add_argument("--origin", type=int, required=True)
    sp.add_argument("--dest", type=int, required=True)

    sp = add("gen-scenarios", cmd_gen_scenarios, help="scenarios from seeded assignments")
    sp.add_argument("--net")
    sp.add_argument("--apsp")
    sp.add_argument("--requests")
    sp.add_argument("--origin", type=int)
    sp.add_argument("--passengers", type=int)
    sp.add_argument("--rounds", type=int)
    sp.add_argument("--assignments-out")

    sp = add("ingest-trips", cmd_ingest_trips, help="snap trip dropoffs to network nodes")
    sp.add_argument("--trips", required=True)
    sp.add_argument("--net", required=True)
    sp.add_argument("--cutoff-km", type=float, default=2.0)

    sp = add("synth-labels", cmd_synth_labels, help="teacher-rule labels for scenarios")
    sp.add_argument("--scenarios", required=True)
    sp.add_argument("--noise", type=float, default=0.0)
    sp.add_argument("--subset", type=int, nargs=6)

    sp = add("train", cmd_train, help="train the selection network")
    sp.add_argument("--data", required=True)
    sp.add_argument("--report")

    sp = add("explain", cmd_explain, help="run one agent on a scenario file (JSON lines)")
    sp.add_argument("--agent", choices=["pbe", "random", "axis"], required=True)
    sp.add_argument("--scenario", required=True)
    sp.add_argument("--model")
    sp.add_argument("--subset", type=int, nargs=6)

    sp = add("agents-compare", cmd_agents_compare, help="CSV report of all three agents")
    sp.add_argument("--scenarios", required=True)
    sp.add_argument("--model")
    sp.add_argument("--subset", type=int, nargs=6)

    gp = sub.add_parser("game", help="disclosure signaling game")
    gsub = gp.add_subparsers(dest="game_cmd", required=True)
    for name in ("pbe", "unravel", "simulate"):
        g = gsub.add_parser(name, parents=[common])
        g.set_defaults(func=cmd_game)
        g.add_argument("--prior", required=True)
        if name == "unravel":
            g.add_argument("--max-iters", type=int, default=10_000)
        if name == "simulate":
            g.add_argument("--reveal-above", type=float, required=True)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command in NEEDS_OUT and not args.out:
        print(f"error[input]: {args.command} needs --out", file=sys.stderr)
        return 2
    try:
        args.func(args)
    except RidexplainError as exc:
        print(f"error[{exc.category}]: {exc}", file=sys.stderr)
        return exc.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
