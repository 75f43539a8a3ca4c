import argparse
import logging
import os
import sys

import pandas as pd

from src.combinators.gamnet import gamnet_from_json, gamnet_to_json
from src.config import (
    DEFAULT_DEPTH, EXIT_BUDGET, EXIT_CONFIG, EXIT_FAULT, EXIT_OK, EXPLORE_STATE_BUDGET, OUTPUT_DIR,
    RUN_TIMEOUT,
)
from src.errors import (
    BudgetExceeded, ConfigError, ConnectionLost, GamnetError, InterfaceError, ParseError,
    ProtocolError, TypeCheckError, ValidationError,
)
from src.gametrace.arena import arena_from_json
from src.gametrace.legality import CONDITIONS, check_legal
from src.gametrace.opponent import GameOpponent
from src.hramnet.semantics import denotation_upto
from src.hramnet.serialize import read_json, write_json
from src.hramnet.trace import canonical, format_trace_set, read_trace, write_trace
from src.ica.compiler import CompilationUnit, compile_unit
from src.ica.parser import parse
from src.runtime.cluster import ClusterManager
from src.runtime.node import NodeConfig, run_distributed, serve_node
from src.runtime.scheduler import RoundRobin, Seeded, run_program
from src.utils.logging_setup import setup_logging

FRONTEND_ERRORS = (ParseError, TypeCheckError, ConfigError, InterfaceError, ValidationError)


def compile_source(path, root=None):
    with open(path, encoding="utf-8") as fh:
        term = parse(fh.read())
    return compile_unit(CompilationUnit(term, root=root))


def load_program(path):
    """A GAM net from either ICA source or a compiled IR file."""
    if path.endswith(".ica"):
        f, _ = compile_source(path)
        return f
    try:
        return gamnet_from_json(read_json(path))
    except (OSError, ValueError, KeyError) as e:
        raise ConfigError(f"cannot load IR {path}: {e}") from None


def cmd_compile(args):
    f, ty = compile_source(args.source, args.root)
    out = args.output or os.path.join(
        OUTPUT_DIR, os.path.splitext(os.path.basename(args.source))[0] + ".gamnet.json")
    doc = gamnet_to_json(f)
    doc["type"] = str(ty)
    write_json(out, doc)
    print(f"compiled {args.source}: {len(f.net.engines)} engines, type {ty} -> {out}")
    return EXIT_OK


def cmd_run(args):
    f = load_program(args.program)
    if args.nodes:
        cfg = NodeConfig.load(args.nodes)
        if args.workers == "processes":
            ir_path = args.program
            if args.program.endswith(".ica"):
                ir_path = os.path.join(OUTPUT_DIR, "cluster_run.gamnet.json")
                write_json(ir_path, gamnet_to_json(f))
            with ClusterManager(args.nodes, ir_path, args.shuffle_seed):
                result = run_distributed(f, cfg, timeout=args.timeout, spawn_local=False,
                                         shuffle_seed=args.shuffle_seed)
        else:
            result = run_distributed(f, cfg, timeout=args.timeout,
                                     spawn_local=args.workers == "threads",
                                     shuffle_seed=args.shuffle_seed)
    else:
        policy = RoundRobin() if args.round_robin else Seeded(args.seed)
        result = run_program(f, policy)

    if args.trace:
        write_trace(args.trace, result.trace)
    if result.answer is not None:
        print(f"answer: {result.value}")
    else:
        print("answer: none")
    if args.audit:
        print(result.audit)
    if args.audit_csv:
        result.audit.to_frame().to_csv(args.audit_csv, index=False)
        logging.info(f"heap audit saved to {args.audit_csv}")

    if result.faults:
        logging.error(f"{len(result.faults)} thread faults during the run")
        return EXIT_FAULT
    if result.answer is None:
        return EXIT_BUDGET
    return EXIT_OK


def cmd_serve(args):
    cfg = NodeConfig.load(args.config)
    if args.node not in cfg.nodes:
        raise ConfigError(f"node {args.node!r} is not in {args.config}")
    serve_node(args.node, load_program(args.ir), cfg, shuffle_seed=args.shuffle_seed)
    return EXIT_OK


def cmd_check_trace(args):
    conditions = args.conditions.split(",") if args.conditions else list(CONDITIONS)
    unknown = [c for c in conditions if c not in CONDITIONS]
    if unknown:
        raise ConfigError(f"unknown conditions {unknown}; known: {', '.join(CONDITIONS)}")
    try:
        trace = read_trace(args.trace)
        arena = arena_from_json(read_json(args.arena))
    except (ProtocolError, ValueError) as e:
        raise ConfigError(f"cannot read input: {e}") from None
    report = check_legal(trace, arena, conditions)
    print(report)
    if args.csv:
        report.to_frame().to_csv(args.csv, index=False)
    return EXIT_OK if report.ok else 1


def cmd_explore(args):
    f = load_program(args.program)
    values = tuple(int(v) for v in args.values.split(","))
    found = denotation_upto(f.net, args.depth, GameOpponent(f.arena, values=values),
                            state_budget=args.state_budget, progress=args.progress)
    lines = {canonical(t) for t in found}
    text = format_trace_set(lines)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    if args.summary:
        frame = pd.DataFrame({"length": [len(t) for t in lines]})
        frame.groupby("length").size().rename("traces").to_csv(args.summary)
    if found.partial:
        logging.warning("state budget exhausted; the dump is an under-approximation")
        return EXIT_BUDGET
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(description="gamnet: ICA to GAM net compiler and runtime")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compile", help="Compile an .ica source to a .gamnet.json IR file")
    p.add_argument("source")
    p.add_argument("-o", "--output", help="IR output path")
    p.add_argument("--root", help="Node for engines outside every placement annotation")
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("run", help="Run a program and print its answer")
    p.add_argument("program", help=".ica source or .gamnet.json IR")
    p.add_argument("--seed", type=int, default=0, help="Seed of the local scheduler")
    p.add_argument("--round-robin", action="store_true", help="Use the round-robin scheduler")
    p.add_argument("--nodes", help="Node config JSON for a distributed run")
    p.add_argument("--workers", choices=["threads", "processes", "external"], default="threads",
                   help="How non-root nodes are hosted in a distributed run")
    p.add_argument("--shuffle-seed", type=int, help="Delay incoming frames randomly (seeded)")
    p.add_argument("--timeout", type=float, default=RUN_TIMEOUT)
    p.add_argument("--trace", help="Write the observable trace to this file")
    p.add_argument("--audit", action="store_true", help="Print the heap audit")
    p.add_argument("--audit-csv", help="Save the heap audit as CSV")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("serve", help="Host one node of a distributed run")
    p.add_argument("--node", required=True)
    p.add_argument("--config", required=True)
    p.add_argument("--ir", required=True)
    p.add_argument("--shuffle-seed", type=int)
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("check-trace", help="Check a trace against the legality conditions")
    p.add_argument("trace")
    p.add_argument("--arena", required=True)
    p.add_argument("--conditions", help="Comma-separated condition names")
    p.add_argument("--csv", help="Save the per-condition report as CSV")
    p.set_defaults(func=cmd_check_trace)

    p = sub.add_parser("explore", help="Dump the bounded trace denotation of a net")
    p.add_argument("program")
    p.add_argument("--depth", type=int, default=DEFAULT_DEPTH)
    p.add_argument("--values", default="0", help="Comma-separated answer values Opponent may play")
    p.add_argument("--state-budget", type=int, default=EXPLORE_STATE_BUDGET)
    p.add_argument("--summary", help="Save trace counts per length as CSV")
    p.add_argument("--progress", action="store_true")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_explore)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    setup_logging()
    try:
        return args.func(args)
    except FRONTEND_ERRORS as e:
        logging.error(f"{type(e).__name__}: {e}")
        return EXIT_CONFIG
    except (ConnectionLost, ProtocolError) as e:
        logging.error(f"run aborted: {e}")
        return EXIT_FAULT
    except BudgetExceeded as e:
        logging.error(f"budget exceeded: {e}")
        return EXIT_BUDGET
    except GamnetError as e:
        logging.error(f"{type(e).__name__}: {e}")
        return EXIT_CONFIG
    except OSError as e:
        logging.error(f"I/O error: {e}")
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
