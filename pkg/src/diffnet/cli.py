"""Command-line interface: gen-graph, simulate, infer, ingest, eval, report, sweep."""
from __future__ import annotations

import argparse
import glob
import re
import sys
import time
from pathlib import Path

from . import cascades, evaluate, figures, graphs, inference, ingest, sweep


def _parse_matrix(text: str) -> tuple[tuple[float, float], tuple[float, float]]:
    values = [float(x) for x in text.split(",")]
    if len(values) != 4:
        raise argparse.ArgumentTypeError("matrix needs 4 comma-separated entries (row-major)")
    return ((values[0], values[1]), (values[2], values[3]))


def _parse_int_list(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x]


def _parse_lengths(text: str) -> list[int]:
    if "-" in text:
        lo, hi = text.split("-", 1)
        return list(range(int(lo), int(hi) + 1))
    return _parse_int_list(text)


def cmd_gen_graph(args: argparse.Namespace) -> int:
    seed = graphs.KroneckerSeed(
        entries=args.matrix, power=args.power, target_edges=args.edges, rng_seed=args.seed
    )
    graph = graphs.kronecker_generate(seed)
    graphs.write_graph(graph, args.out)
    print(f"wrote {graph.node_count} nodes, {len(graph.edges)} edges to {args.out}")
    return 0


def cmd_simulate(args: argparse.Namespace) -> int:
    graph = graphs.read_graph(args.graph)
    model = cascades.TransmissionModel(
        beta=args.beta, alpha_min=args.alpha_min, alpha_max=args.alpha_max, rng_seed=args.seed
    )
    result = cascades.generate_cascade_set(
        graph, model, args.count, args.coverage, horizon=args.horizon
    )
    cascades.write_cascades(result.cascade_set, args.out)
    print(
        f"wrote {args.count} cascades to {args.out} "
        f"(coverage {result.coverage:.3f}, {result.replacements} replacements)"
    )
    if result.coverage_warning:
        print(
            f"warning: coverage {result.coverage:.3f} below target {args.coverage}",
            file=sys.stderr,
        )
    return 0


def cmd_infer(args: argparse.Namespace) -> int:
    cascade_set = cascades.read_cascades(args.cascades)
    config = inference.InferenceConfig(
        k=args.k,
        alpha=args.alpha,
        beta=args.beta,
        epsilon=args.epsilon,
        gain_tolerance=args.gain_tolerance,
    )
    network = inference.infer(cascade_set, config)
    inference.write_inferred(network, args.out)
    print(
        f"selected {len(network.selections)} edges "
        f"(saturated={str(network.saturated).lower()}) -> {args.out}"
    )
    return 0


def cmd_ingest(args: argparse.Namespace) -> int:
    records = ingest.read_submission_log(args.infile)
    kept, dropped = ingest.clean(records)
    print(f"read {len(records)} records, dropped {dropped} without a node id")
    lists = ingest.build_event_lists(kept)

    lengths = args.stats_lengths if args.stats_lengths else [args.min_length]
    rows = ingest.threshold_sweep(lists, lengths, args.min_votes)
    if args.stats_out:
        ingest.write_stats_csv(rows, args.stats_out)
        print(f"wrote {len(rows)} stats rows to {args.stats_out}")
    if args.stats_plot:
        figures.plot_threshold_profile(rows, args.stats_plot)
        print(f"wrote threshold figure to {args.stats_plot}")

    if args.cascades_out:
        filtered = ingest.threshold(lists, args.min_length, args.min_votes)
        cascade_set = ingest.to_cascade_set(filtered)
        cascades.write_cascades(cascade_set, args.cascades_out)
        print(
            f"wrote {len(cascade_set.cascades)} cascades over "
            f"{len(cascade_set.labels)} nodes to {args.cascades_out}"
        )
    return 0


def cmd_eval(args: argparse.Namespace) -> int:
    network = inference.read_inferred(args.inferred)
    if args.truth:
        truth = graphs.read_graph(args.truth)
        report = evaluate.precision_recall(network, truth)
        print(
            f"true_edges={report.true_edges} inferred_edges={report.inferred_edges} "
            f"intersection={report.intersection} "
            f"precision={report.precision:.4f} recall={report.recall:.4f}"
        )
    baseline = inference.read_inferred(args.baseline) if args.baseline else None
    if args.out:
        document = evaluate.export_graph(network, baseline, args.format)
        Path(args.out).write_text(document, encoding="utf-8", newline="\n")
        print(f"wrote {args.format} export to {args.out}")
    if args.degrees_out:
        evaluate.write_degree_csv(evaluate.degree_table(network), args.degrees_out)
        print(f"wrote degree table to {args.degrees_out}")
    return 0


_RUN_NAME_RE = re.compile(r"^(?P<label>.+)\.k(?P<k>\d+)\.edges$")


def cmd_report(args: argparse.Namespace) -> int:
    runs = []
    for name in sorted(args.runs):
        match = _RUN_NAME_RE.match(Path(name).name)
        if match is None:
            raise ValueError(f"run file {name!r} does not match <dataset>.k<k>.edges")
        network = inference.read_inferred(name)
        runs.append((match.group("label"), int(match.group("k")), network))
    curve = evaluate.iteration_curve(runs)
    if args.curve_out:
        evaluate.write_curve_csv(curve, args.curve_out)
        print(f"wrote {len(curve.points)} curve points to {args.curve_out}")
    if args.plot:
        figures.plot_iteration_curve(curve, args.plot)
        print(f"wrote curve figure to {args.plot}")
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    datasets: list[str] = []
    for pattern in args.datasets:
        if glob.has_magic(pattern):
            datasets.extend(sorted(glob.glob(pattern)))
        else:
            datasets.append(pattern)
    config = inference.InferenceConfig(
        k=1, alpha=args.alpha, beta=args.beta, epsilon=args.epsilon
    )
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    tasks = sweep.build_matrix(datasets, args.ks, config, out_dir)
    print(f"{len(tasks)} tasks ({len(datasets)} datasets x {len(args.ks)} ks)")

    started = time.time()
    result = sweep.dispatch(
        tasks,
        args.workers,
        resume=args.resume,
        mem_cap=args.mem_cap,
        per_transmission_bytes=args.mem_per_transmission,
        log=out_dir / "sweep.log",
    )
    wall = time.time() - started
    busy = sum(t for _, t, _ in result.completed)
    print(
        f"completed={len(result.completed)} (skipped={len(result.skipped_ids)}) "
        f"failed={len(result.failed)} wall={wall:.1f}s "
        f"utilization={busy / (wall * args.workers):.0%}"
    )
    for task, error in result.failed:
        print(f"failed: {task.task_id}: {error}", file=sys.stderr)
    return 1 if result.failed else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="diffnet",
        description="Infer latent diffusion networks from per-contagion infection times.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-graph", help="generate a Kronecker ground-truth graph")
    p.add_argument("--power", type=int, required=True, help="node count is 2**power")
    p.add_argument("--edges", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--matrix", type=_parse_matrix, default=graphs.DEFAULT_SEED_MATRIX,
                   help="2x2 seed entries, row-major (default 0.9,0.5,0.5,0.3)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen_graph)

    p = sub.add_parser("simulate", help="simulate cascades over a graph")
    p.add_argument("--graph", required=True)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--beta", type=float, default=0.5)
    p.add_argument("--alpha-min", type=float, default=0.1)
    p.add_argument("--alpha-max", type=float, default=10.0)
    p.add_argument("--coverage", type=float, default=0.85)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--horizon", type=float, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("infer", help="infer the diffusion network from cascades")
    p.add_argument("--cascades", required=True)
    p.add_argument("--k", type=int, required=True, help="maximum edges to select")
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--beta", type=float, default=0.5)
    p.add_argument("--epsilon", type=float, default=1e-9)
    p.add_argument("--gain-tolerance", type=float, default=0.0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_infer)

    p = sub.add_parser("ingest", help="clean a resubmission log into cascades")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--min-length", type=int, required=True)
    p.add_argument("--min-votes", type=int, default=None)
    p.add_argument("--stats-out")
    p.add_argument("--stats-lengths", type=_parse_lengths, default=None,
                   help="lengths for the stats table, e.g. 2-20 (default: --min-length only)")
    p.add_argument("--stats-plot", help="render the stats table to this image")
    p.add_argument("--cascades-out")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("eval", help="score or export an inferred network")
    p.add_argument("--inferred", required=True)
    p.add_argument("--truth")
    p.add_argument("--baseline", help="mark this run's edges missing from --inferred red")
    p.add_argument("--format", choices=["dot", "edgelist"], default="dot")
    p.add_argument("--out")
    p.add_argument("--degrees-out")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("report", help="edges-vs-iterations curve across runs")
    p.add_argument("--runs", nargs="+", required=True, help="<dataset>.k<k>.edges files")
    p.add_argument("--curve-out")
    p.add_argument("--plot", help="render the curve to this image")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("sweep", help="run a dataset x iterations experiment matrix")
    p.add_argument("--datasets", nargs="+", required=True)
    p.add_argument("--ks", type=_parse_int_list, required=True)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--resume", action="store_true")
    p.add_argument("--mem-cap", type=int, default=None,
                   help="hold tasks until estimated in-flight bytes fit under this cap")
    p.add_argument("--mem-per-transmission", type=int, default=sweep.PER_TRANSMISSION_BYTES,
                   help="per-transmission bytes used by the task memory estimate")
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--beta", type=float, default=0.5)
    p.add_argument("--epsilon", type=float, default=1e-9)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_sweep)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
