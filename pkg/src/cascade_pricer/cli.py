"""Command-line entry point: ``cascade-pricer <subcommand> ...``.

Every output starts with a ``#`` comment block echoing the arguments that
determine it, so a file can be regenerated from its own header.
"""

from __future__ import annotations

import argparse
import os
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .cascade import set_threads
from .errors import BudgetError
from .experiment import ExperimentConfig, curves_csv, parse_grid, plan_repeats, run_experiment
from .graph import Graph, gap_example_graph, generate_preferential_attachment, load_edge_list
from .local_search import SearchConfig, local_search_improve
from .models import accept_half_model, default_model, load_model
from .oracles import (build_hardness_instance, optimal_adaptive_value,
                      optimal_nonadaptive_bruteforce, verify_hardness_structure)
from .strategy import DEFAULT_GRID, PricingStrategy, build_random_pricing, build_strategy_maxleaf
from .tape import ThresholdTape

EXIT_OK, EXIT_ERROR, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3
UNECHOED = {"threads", "output", "strategy_out", "layers_out", "func"}


class UsageError(Exception):
    pass


def _kv(tokens: list[str], keys: tuple[str, ...]) -> dict[str, int]:
    out = {}
    for tok in tokens:
        key, sep, val = tok.partition("=")
        if not sep or key not in keys:
            raise UsageError(f"expected {' '.join(k + '=<int>' for k in keys)}, got {tok!r}")
        try:
            out[key] = int(val)
        except ValueError:
            raise UsageError(f"{key} must be an integer, got {val!r}") from None
    missing = [k for k in keys if k not in out]
    if missing:
        raise UsageError(f"missing {', '.join(missing)}")
    return out


def _read_graph(path: str) -> Graph:
    p = Path(path)
    if not p.is_file():
        raise FileNotFoundError(f"graph file not found: {path}")
    return load_edge_list(p.read_bytes())


def _graph(args) -> Graph:
    if getattr(args, "gap_example", False):
        return gap_example_graph()
    if args.pa:
        kv = _kv(args.pa, ("n", "m"))
        return generate_preferential_attachment(kv["n"], kv["m"], args.seed)
    if args.graph:
        return _read_graph(args.graph)
    raise UsageError("give a graph with --graph FILE or --pa n=<int> m=<int>")


def _model(args, fallback):
    return load_model(args.model) if args.model else fallback()


def _seed_nodes(text: str | None, g: Graph) -> list[int]:
    if text is None:
        return [0]
    try:
        seeds = sorted({int(x) for x in text.split(",") if x.strip()})
    except ValueError:
        raise UsageError(f"bad seed node list {text!r}") from None
    if not seeds or seeds[0] < 0 or seeds[-1] >= g.n:
        raise UsageError(f"seed nodes must be ids in 0..{g.n - 1}")
    return seeds


def manifest(args) -> str:
    lines = [f"# cascade-pricer {__version__} {args.command}"]
    for key in sorted(vars(args)):
        if key in UNECHOED or key == "command":
            continue
        val = getattr(args, key)
        if isinstance(val, list):
            val = " ".join(map(str, val))
        lines.append(f"# {key}={val}")
    return "\n".join(lines) + "\n"


def _emit(args, body: str) -> None:
    text = manifest(args) + body
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_generate(args) -> None:
    _emit(args, _graph(args).to_edge_list())


def cmd_run(args) -> None:
    g = _graph(args)
    model = _model(args, default_model)
    strategies = ("maxleaf", "random") if args.strategy == "both" else (args.strategy,)
    cfg = ExperimentConfig(strategies=strategies, repeats=args.repeats, trials=args.trials,
                           iterations=args.iterations, seed_nodes=args.seed_nodes,
                           grid=parse_grid(args.grid), cashback_z=args.cashback_z,
                           epsilon=args.epsilon, epsilon_rule=args.epsilon_rule, seed=args.seed)
    _emit(args, curves_csv(run_experiment(g, model, cfg)))


def cmd_localsearch(args) -> None:
    g = _graph(args)
    model = _model(args, default_model)
    grid = parse_grid(args.grid)
    if args.seed_node_list is not None:
        seeds = _seed_nodes(args.seed_node_list, g)
        plan_strategy_seed, tape_seed = args.seed, args.seed
    else:
        plan = plan_repeats(g, ExperimentConfig(repeats=1, seed=args.seed))[0]
        seeds, plan_strategy_seed, tape_seed = list(plan.seeds), plan.strategy_seed, plan.tape_seed
    if args.start_file:
        path = Path(args.start_file)
        if not path.is_file():
            raise FileNotFoundError(f"strategy file not found: {args.start_file}")
        s0 = PricingStrategy.loads(path.read_text())
    elif args.start == "maxleaf":
        s0 = build_strategy_maxleaf(g, seeds, model, plan_strategy_seed)
    else:
        s0 = build_random_pricing(g, grid, plan_strategy_seed, seeds=seeds)
    cfg = SearchConfig(grid=grid, epsilon=args.epsilon, epsilon_rule=args.epsilon_rule,
                       trials=args.trials, max_passes=args.max_passes,
                       max_iterations=args.iterations)
    result = local_search_improve(g, seeds, s0, model, cfg, ThresholdTape(tape_seed))
    if args.strategy_out:
        Path(args.strategy_out).write_text(result.strategy.dumps())
    _emit(args, result.history_csv())


def _fmt(x) -> str:
    return f"{x}" if isinstance(x, Fraction) else repr(float(x))


def cmd_oracle(args) -> None:
    g = _graph(args)
    model = _model(args, accept_half_model)
    seeds = _seed_nodes(args.seed_node_list, g)
    grid = parse_grid(args.grid)
    adaptive = optimal_adaptive_value(g, seeds, model, grid)
    strategy, nonadaptive = optimal_nonadaptive_bruteforce(g, seeds, model, grid)
    ratio = adaptive / nonadaptive if nonadaptive else float("inf")
    prices = " ".join("seed" if p != p else f"{p:g}" for p in strategy.prices)
    body = ("quantity,value,float\n"
            f"adaptive,{_fmt(adaptive)},{float(adaptive)!r}\n"
            f"nonadaptive,{_fmt(nonadaptive)},{float(nonadaptive)!r}\n"
            f"ratio,{_fmt(ratio)},{float(ratio)!r}\n"
            f"nonadaptive_prices,{prices},\n")
    _emit(args, body)


def cmd_hardness(args) -> None:
    source = _read_graph(args.source)
    inst = build_hardness_instance(source, d=args.d, k=args.k)
    if args.output:
        # instance graph plus the layer sidecar; summary goes to stdout
        Path(args.output).write_text(manifest(args) + inst.graph.to_edge_list())
        Path(args.layers_out or args.output + ".layers").write_text(inst.layer_sidecar())
    report = verify_hardness_structure(inst) if args.verify else verify_hardness_structure(inst, 0)
    free = "" if report.optimal_free_set is None else " ".join(map(str, report.optimal_free_set))
    cells = [report.d, report.k, report.p, inst.graph.n, report.bound_value, report.exploit_value,
             report.identities_hold, free, report.min_cover_size, report.optimal_value,
             report.formula_value]
    body = ("d,k,p,nodes,bound_value,exploit_value,identities_hold,optimal_free_set,"
            "min_cover_size,optimal_value,formula_value\n"
            + ",".join("" if c is None else str(c) for c in cells) + "\n")
    sys.stdout.write(manifest(args) + body)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cascade-pricer",
                                     description="Pricing strategies for recommendation cascades.")
    parser.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="master seed for all randomness")
    common.add_argument("--threads", type=int, default=None,
                        help="cap estimator threads (default: $CASCADE_PRICER_THREADS or all)")
    common.add_argument("--output", help="write to this file instead of stdout")
    graph_src = argparse.ArgumentParser(add_help=False)
    graph_src.add_argument("--graph", help="edge-list file")
    graph_src.add_argument("--pa", nargs=2, metavar="K=V",
                           help="preferential attachment graph, e.g. --pa n=1000 m=2")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", parents=[common, graph_src], help="write a graph as an edge list")
    p.add_argument("--gap-example", action="store_true", help="the 6-node adaptivity-gap graph")
    p.set_defaults(func=cmd_generate)

    search = argparse.ArgumentParser(add_help=False)
    search.add_argument("--model", help="model config file (default: 4-step cost function)")
    search.add_argument("--trials", type=int, default=50)
    search.add_argument("--grid", default=",".join(map(str, DEFAULT_GRID)))
    search.add_argument("--epsilon", type=float, default=None)
    search.add_argument("--epsilon-rule", choices=("paired", "incumbent"), default="paired")

    p = sub.add_parser("run", parents=[common, graph_src, search],
                       help="compare strategies, optionally with local search")
    p.add_argument("--strategy", choices=("maxleaf", "random", "both"), default="both")
    p.add_argument("--repeats", type=int, default=10)
    p.add_argument("--iterations", type=int, default=0, help="local search visits per repeat")
    p.add_argument("--seed-nodes", type=int, default=1, help="random seed nodes per repeat")
    p.add_argument("--cashback-z", type=float, default=0.0)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("localsearch", parents=[common, graph_src, search],
                       help="improve one strategy and write its history")
    p.add_argument("--start", choices=("random", "maxleaf"), default="random")
    p.add_argument("--start-file", help="starting strategy file (overrides --start)")
    p.add_argument("--seed-node-list", help="comma-separated seed nodes (default: one random node)")
    p.add_argument("--iterations", type=int, default=None)
    p.add_argument("--max-passes", type=int, default=20)
    p.add_argument("--strategy-out", help="write the final strategy here")
    p.set_defaults(func=cmd_localsearch)

    p = sub.add_parser("oracle", parents=[common, graph_src],
                       help="exact adaptive and non-adaptive optima on a tiny graph")
    p.add_argument("--gap-example", action="store_true")
    p.add_argument("--model", help="model config file (default: buys w.p. 1/2 at any positive price)")
    p.add_argument("--grid", default="0,1")
    p.add_argument("--seed-node-list", default="0")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("hardness", parents=[common], help="vertex-cover reduction instance")
    p.add_argument("--source", required=True, help="source graph edge list")
    p.add_argument("--d", type=int, default=None)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--layers-out", help="layer sidecar path (default: <output>.layers)")
    p.add_argument("--verify", action="store_true",
                   help="brute-force the optimal free set (sources with <= 4 vertices)")
    p.set_defaults(func=cmd_hardness)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    threads = args.threads
    if threads is None and os.environ.get("CASCADE_PRICER_THREADS"):
        try:
            threads = int(os.environ["CASCADE_PRICER_THREADS"])
        except ValueError:
            parser.error("CASCADE_PRICER_THREADS must be an integer")
    set_threads(threads)
    try:
        args.func(args)
    except UsageError as exc:
        parser.error(str(exc))
    except BudgetError as exc:
        print(f"cascade-pricer: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (OSError, ValueError, NotImplementedError) as exc:
        print(f"cascade-pricer: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
