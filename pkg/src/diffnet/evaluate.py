"""Score inferred networks against ground truth and export graphs."""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .graphs import DirectedGraph
from .inference import InferredNetwork


@dataclass(frozen=True)
class EvalReport:
    precision: float
    recall: float
    true_edges: int
    inferred_edges: int
    intersection: int


@dataclass(frozen=True)
class IterationCurve:
    points: list[tuple[str, int, int]]  # (dataset label, k, edges found)


def precision_recall(inferred: InferredNetwork, truth: DirectedGraph) -> EvalReport:
    """Set comparison of directed edges.  An empty inferred network scores
    precision 1.0 by convention (it made no false claims)."""
    if not truth.edges:
        raise ValueError("truth graph has no edges; recall is undefined")
    inferred_edges = inferred.edge_set()
    intersection = len(inferred_edges & truth.edges)
    return EvalReport(
        precision=intersection / len(inferred_edges) if inferred_edges else 1.0,
        recall=intersection / len(truth.edges),
        true_edges=len(truth.edges),
        inferred_edges=len(inferred_edges),
        intersection=intersection,
    )


def iteration_curve(runs: list[tuple[str, int, InferredNetwork]]) -> IterationCurve:
    points = [(label, k, len(network.selections)) for label, k, network in runs]
    points.sort(key=lambda p: (p[0], p[1]))
    return IterationCurve(points)


def write_curve_csv(curve: IterationCurve, destination: str | Path) -> None:
    lines = ["dataset,k,edges_found"]
    lines.extend(f"{label},{k},{found}" for label, k, found in curve.points)
    Path(destination).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def export_graph(
    inferred: InferredNetwork,
    baseline: InferredNetwork | None = None,
    fmt: str = "dot",
) -> str:
    """Render the selected edges as DOT or a plain edge list.

    With a baseline, DOT paints edges present in the baseline but missing
    from inferred red and everything inferred black, so the render shows
    exactly what a run failed to discover.
    """
    edges = inferred.edge_set()
    if fmt == "edgelist":
        return "".join(f"{u},{v}\n" for u, v in sorted(edges))
    if fmt != "dot":
        raise ValueError(f"unknown format {fmt!r}; expected 'dot' or 'edgelist'")

    lines = ["digraph G {"]
    if baseline is None:
        lines.extend(f"  {u} -> {v};" for u, v in sorted(edges))
    else:
        missing = baseline.edge_set() - edges
        for u, v in sorted(edges | missing):
            color = "red" if (u, v) in missing else "black"
            lines.append(f"  {u} -> {v} [color={color}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def degree_table(inferred: InferredNetwork) -> list[tuple[int, int, int]]:
    """(node, in-degree, out-degree) rows sorted by total degree descending.

    Hub nodes (heavy consumers that re-disperse widely) surface at the top.
    """
    in_deg: dict[int, int] = {}
    out_deg: dict[int, int] = {}
    for u, v in inferred.edge_set():
        out_deg[u] = out_deg.get(u, 0) + 1
        in_deg[v] = in_deg.get(v, 0) + 1
    nodes = sorted(set(in_deg) | set(out_deg))
    rows = [(n, in_deg.get(n, 0), out_deg.get(n, 0)) for n in nodes]
    rows.sort(key=lambda r: (-(r[1] + r[2]), r[0]))
    return rows


def write_degree_csv(rows: list[tuple[int, int, int]], destination: str | Path) -> None:
    lines = ["node,in_degree,out_degree"]
    lines.extend(f"{n},{i},{o}" for n, i, o in rows)
    Path(destination).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
