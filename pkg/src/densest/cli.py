"""Command-line interface: ``densest {dsg,decompose,bench,fixture}``."""

from __future__ import annotations

import argparse
import json
import sys

from .bench import ALGORITHMS, COORDINATE, RunConfig, compare, run, write_summary, write_table
from .graph import EdgeListError, write_edge_list


def _common(p: argparse.ArgumentParser, algos, multi: bool = False):
    p.add_argument("--input", required=True, help="edge-list file (two ids per line, '#' comments)")
    if multi:
        p.add_argument("--algo", required=True, action="append",
                       help=f"algorithm id, repeatable or comma separated ({', '.join(algos)})")
        p.add_argument("--seed", type=int, nargs="+", default=[0], help="one run per seed for seeded methods")
    else:
        p.add_argument("--algo", required=True, choices=algos)
        p.add_argument("--seed", type=int, default=0)
    p.add_argument("--eps", type=float, default=0.1, help="accuracy for mwu and ac")
    p.add_argument("--passes", type=int, default=None, help="passes / epochs / Greedy++ rounds")
    p.add_argument("--init", choices=("greedy", "uniform"), default="greedy",
                   help="starting orientation for coordinate methods")
    p.add_argument("--out-metrics", help="per-iteration CSV")
    p.add_argument("--out-summary", help="JSON summary")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="densest", description="Densest subgraph and dense decomposition solvers.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dsg", help="approximate densest subgraph")
    _common(p, ALGORITHMS)

    p = sub.add_parser("decompose", help="dense decomposition via coordinate descent and fractional peeling")
    _common(p, COORDINATE)
    p.add_argument("--out-decomposition", help="JSON list of blocks")

    p = sub.add_parser("bench", help="run several algorithms on one input and merge their metrics")
    _common(p, ALGORITHMS, multi=True)
    p.add_argument("--plot-dir", help="write trajectory figures (needs matplotlib)")

    p = sub.add_parser("fixture", help="write a catalogue graph as an edge list")
    p.add_argument("name", help="e.g. triangle, k4, planted_clique(100,20,0.05,7), rmat(17,1000000,1)")
    p.add_argument("--out", help="output path (default: stdout)")
    return parser


def _config(args, algo, seed) -> RunConfig:
    return RunConfig(input=args.input, algo=algo, eps=args.eps, passes=args.passes, seed=seed, init=args.init,
                     out_metrics=getattr(args, "out_metrics", None), out_summary=getattr(args, "out_summary", None),
                     out_decomposition=getattr(args, "out_decomposition", None))


def _print_summary(summary: dict, out) -> None:
    print(f"{summary['algorithm']}: density {summary['density']:.6f} ({summary['density_fraction']}) "
          f"on {summary['best_set_size']} vertices, {summary['iterations']} iterations, "
          f"{summary['solve_ms']:.1f} ms", file=out)


def _bench(args, out) -> None:
    algos = [a.strip() for item in args.algo for a in item.split(",") if a.strip()]
    seeded = {"acdm", "acdm-ref", "rcdm"}
    configs = []
    for algo in algos:
        for seed in (args.seed if algo in seeded else args.seed[:1]):
            cfg = _config(args, algo, seed)
            cfg.out_metrics = cfg.out_summary = None
            configs.append(cfg)
    header, rows, results = compare(configs)
    if args.out_metrics:
        write_table(header, rows, args.out_metrics)
    if args.out_summary:
        write_summary({"runs": [r.summary for r in results]}, args.out_summary)
    for r in results:
        _print_summary(r.summary, out)
    if args.plot_dir:
        from .plotting import plot_runs

        labels = [h[: -len("_wall_ms")] for h in header if h.endswith("_wall_ms")] or [configs[0].algo]
        for path in plot_runs({lab: r.rows for lab, r in zip(labels, results)}, args.plot_dir):
            print(f"wrote {path}", file=out)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    out = sys.stdout
    try:
        if args.command == "fixture":
            from .fixtures import make_fixture

            graph = make_fixture(args.name)
            if args.out:
                with open(args.out, "w") as fh:
                    write_edge_list(graph, fh)
            else:
                write_edge_list(graph, out)
        elif args.command == "bench":
            _bench(args, out)
        else:
            result = run(_config(args, args.algo, args.seed))
            _print_summary(result.summary, out)
            if args.command == "decompose" and not args.out_decomposition:
                json.dump(result.decomposition, out, indent=2)
                out.write("\n")
    except (ValueError, OSError, EdgeListError) as exc:
        print(f"densest: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
