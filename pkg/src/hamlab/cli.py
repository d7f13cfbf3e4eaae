"""Command-line front end.

Subcommands: sample (graph models to edge-list files), count (exact counts
of a graph file), certify (expansion certificate as JSON), convert (factor
to Hamilton cycle as JSON), experiment (Monte Carlo pipelines to CSV/JSON).

Exit codes: 0 success, 2 failed per-trial assertion, 3 configuration,
format, or capacity error. Results (a non-expander certificate, an absent
conversion) are data, not errors, and exit 0.
"""

from __future__ import annotations

import argparse
import json
import sys

from .core import (
    CapacityError,
    FormatError,
    PreconditionError,
    format_edge_list,
    parse_edge_list,
)
from .count import (
    count_hamilton_cycles,
    count_perfect_matchings,
    count_two_factors,
    permanent,
)
from .generate import (
    ExposureStream,
    graph_at,
    parse_booster_lines,
    random_process,
    sample_gnm,
    sample_gnp,
)
from .harness import (
    TrialFailure,
    parse_experiment_config,
    run_experiment,
    write_results,
)
from .posa import (
    ConversionReport,
    RotationBudget,
    convert_factor_to_hamilton,
    parse_factor_lines,
)
from .structure import DEFAULT_CONSTANTS, certify_p_expander, parse_constants_profile


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; those are config errors here."""

    def error(self, message):
        self.exit(3, f"{self.prog}: error: {message}\n")


def _read(path: str) -> str:
    try:
        with open(path, "r", encoding="ascii") as fh:
            return fh.read()
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc}") from exc


def _write(path: str, text: str) -> None:
    try:
        with open(path, "w", encoding="ascii", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise FormatError(f"cannot write {path}: {exc}") from exc


def _cmd_sample(args) -> int:
    if args.emit_trace and args.model != "process":
        raise FormatError("--emit-trace applies only to --model process")
    if args.model == "gnp":
        if args.p is None:
            raise FormatError("--model gnp requires --p")
        g = sample_gnp(args.n, args.p, args.seed)
    elif args.model == "gnm":
        if args.m is None:
            raise FormatError("--model gnm requires --m")
        g = sample_gnm(args.n, args.m, args.seed)
    else:
        # the process graph is written at its degree-2 hitting time
        trace = random_process(args.n, args.seed)
        g = graph_at(trace, trace.tau_min_degree_2)
        if args.emit_trace:
            _write(args.emit_trace, json.dumps({
                "n": trace.n,
                "order": [[u, v] for u, v in trace.order],
                "tau1": trace.tau_min_degree_1,
                "tau2": trace.tau_min_degree_2,
                "tau_conn": trace.tau_connected,
            }, sort_keys=True) + "\n")
    _write(args.out, format_edge_list(g))
    return 0


def _cmd_count(args) -> int:
    g = parse_edge_list(_read(args.infile))
    if args.allow_isolated is not None and args.what != "two-factors":
        raise FormatError("--allow-isolated applies only to --what two-factors")
    census = None
    if args.what == "hamilton":
        count = count_hamilton_cycles(g)
    elif args.what == "matchings":
        count = count_perfect_matchings(g)
    elif args.what == "two-factors":
        result = count_two_factors(g, allow_isolated=args.allow_isolated or 0)
        count = result.total()
        census = {str(s): str(c) for s, c in sorted(result.by_cycles.items())}
    else:  # permanent of the symmetric 0/1 adjacency matrix
        matrix = [[(g.adj[u] >> v) & 1 for v in range(g.n)] for u in range(g.n)]
        count = permanent(matrix)
    if args.json:
        doc = {"what": args.what, "n": g.n, "count": str(count)}
        if census is not None:
            doc["census"] = census
        print(json.dumps(doc, sort_keys=True))
    else:
        print(count)
    return 0


def _cmd_certify(args) -> int:
    g = parse_edge_list(_read(args.infile))
    consts = DEFAULT_CONSTANTS
    if args.consts:
        consts = parse_constants_profile(_read(args.consts))
    cert = certify_p_expander(g, args.p, consts=consts, mode=args.mode, seed=args.seed)
    print(json.dumps({
        "is_expander": cert.is_expander,
        "d_set": sorted(cert.d_set),
        "violations": [
            {"property": v.property_id, "witness": list(v.witness)}
            for v in cert.violations
        ],
        "mode": cert.mode,
    }, sort_keys=True))
    return 0


def _report_to_dict(report: ConversionReport) -> dict:
    return {
        "hamilton": list(report.hamilton) if report.hamilton is not None else None,
        "hamming": report.hamming,
        "boosters_used": report.boosters_used,
        "rounds": [
            {
                "components_before": r.components_before,
                "rotations_used": r.rotations_used,
                "closing_edge": list(r.closing_edge),
                "was_booster": r.was_booster,
            }
            for r in report.rounds
        ],
        "diagnostics": report.diagnostics,
    }


def _cmd_convert(args) -> int:
    g = parse_edge_list(_read(args.graph))
    f = parse_factor_lines(_read(args.factor), g.n)
    if args.boosters:
        stream = parse_booster_lines(_read(args.boosters), g)
    else:
        stream = ExposureStream(base=g, boosters=())
    budget = RotationBudget(args.budget, args.target)
    report = convert_factor_to_hamilton(g, f, stream, budget)
    print(json.dumps(_report_to_dict(report), sort_keys=True))
    return 0


def _cmd_experiment(args) -> int:
    cfg = parse_experiment_config(_read(args.config))
    overrides = {}
    if args.name:
        overrides["name"] = args.name
    if args.out:
        overrides["output_path"] = args.out
    if args.format:
        overrides["format"] = args.format
    if args.workers:
        overrides["workers"] = args.workers
    if overrides:
        from dataclasses import replace
        cfg = replace(cfg, **overrides)
    if not cfg.name:
        raise FormatError("experiment name missing (config `name=` or --name)")
    result = run_experiment(cfg)
    if cfg.output_path:
        write_results(result.rows, result.summary, cfg.output_path,
                      cfg.format, cfg)
        print(f"{len(result.rows)} rows -> {cfg.output_path}")
    else:
        print(json.dumps(result.summary, sort_keys=True))
    return 0


def build_parser() -> argparse.ArgumentParser:
    top = _Parser(prog="hamlab", description=__doc__.split("\n")[0])
    sub = top.add_subparsers(dest="command", required=True)

    ps = sub.add_parser("sample", parents=[], help="sample a graph to an edge-list file")
    ps.add_argument("--model", choices=("gnp", "gnm", "process"), required=True)
    ps.add_argument("--n", type=int, required=True)
    ps.add_argument("--p", type=float)
    ps.add_argument("--m", type=int)
    ps.add_argument("--seed", type=int, default=0)
    ps.add_argument("--out", required=True)
    ps.add_argument("--emit-trace", metavar="FILE",
                    help="with --model process: write the full trace as JSON")
    ps.set_defaults(fn=_cmd_sample)

    pc = sub.add_parser("count", help="exact counts of a graph file")
    pc.add_argument("--in", dest="infile", required=True)
    pc.add_argument("--what", required=True,
                    choices=("hamilton", "matchings", "two-factors", "permanent"))
    pc.add_argument("--allow-isolated", type=int)
    pc.add_argument("--json", action="store_true")
    pc.set_defaults(fn=_cmd_count)

    pf = sub.add_parser("certify", help="expansion certificate as JSON")
    pf.add_argument("--in", dest="infile", required=True)
    pf.add_argument("--p", type=float, required=True)
    pf.add_argument("--mode", choices=("exact", "sampled"), default="exact")
    pf.add_argument("--seed", type=int, default=0)
    pf.add_argument("--consts", metavar="FILE")
    pf.set_defaults(fn=_cmd_certify)

    pv = sub.add_parser("convert", help="factor to Hamilton cycle as JSON")
    pv.add_argument("--graph", required=True)
    pv.add_argument("--factor", required=True)
    pv.add_argument("--boosters", metavar="FILE")
    pv.add_argument("--budget", type=int, required=True,
                    help="max rotations per merge")
    pv.add_argument("--target", type=int, required=True,
                    help="endpoint count at which rotation stops early")
    pv.set_defaults(fn=_cmd_convert)

    pe = sub.add_parser("experiment", help="run a Monte Carlo experiment")
    pe.add_argument("--name", choices=("expected", "concentration", "hitting",
                                       "factor-pipeline", "matchings"))
    pe.add_argument("--config", required=True)
    pe.add_argument("--out")
    pe.add_argument("--format", choices=("csv", "json"))
    pe.add_argument("--workers", type=int)
    pe.set_defaults(fn=_cmd_experiment)
    return top


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (TrialFailure, AssertionError) as exc:
        print(f"hamlab: assertion failure: {exc}", file=sys.stderr)
        return 2
    except (CapacityError, FormatError, PreconditionError) as exc:
        print(f"hamlab: error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
