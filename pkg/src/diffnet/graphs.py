"""Directed graphs and the Kronecker ground-truth generator.

Ground-truth networks are sampled edge by edge with a recursive descent
through the Kronecker structure: each of the ``power`` levels picks one
quadrant of the 2x2 seed matrix with probability proportional to its entry,
so a full descent lands on cell (u, v) with probability proportional to the
(u, v) entry of the power-fold Kronecker product.  The product matrix is
never materialized.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

from .rng import stream

DEFAULT_SEED_MATRIX = ((0.9, 0.5), (0.5, 0.3))


@dataclass
class DirectedGraph:
    """A directed graph on nodes 0..node_count-1 with no self-loops."""

    node_count: int
    edges: set[tuple[int, int]]

    def __post_init__(self) -> None:
        if self.node_count <= 0:
            raise ValueError(f"node_count must be positive, got {self.node_count}")
        for u, v in self.edges:
            if u == v:
                raise ValueError(f"self-loop at node {u}")
            if not (0 <= u < self.node_count and 0 <= v < self.node_count):
                raise ValueError(f"edge ({u},{v}) outside node range 0..{self.node_count - 1}")

    @cached_property
    def out_adjacency(self) -> dict[int, list[int]]:
        """Out-neighbour lists, each sorted ascending.  Treat edges as frozen
        after first access."""
        adj: dict[int, list[int]] = {}
        for u, v in self.edges:
            adj.setdefault(u, []).append(v)
        for vs in adj.values():
            vs.sort()
        return adj


@dataclass(frozen=True)
class KroneckerSeed:
    """Parameters for one Kronecker graph draw."""

    entries: tuple[tuple[float, float], tuple[float, float]] = DEFAULT_SEED_MATRIX
    power: int = 9
    target_edges: int = 1024
    rng_seed: int = 0

    def __post_init__(self) -> None:
        if self.power < 1:
            raise ValueError("power must be >= 1")
        flat = self.flat_entries()
        if len(flat) != 4:
            raise ValueError("entries must be a 2x2 matrix")
        if any(not (0.0 <= e <= 1.0) for e in flat):
            raise ValueError(f"seed entries must lie in [0,1], got {flat}")
        if self.target_edges < 0:
            raise ValueError("target_edges must be nonnegative")
        n = 1 << self.power
        if self.target_edges > n * (n - 1):
            raise ValueError(
                f"target_edges={self.target_edges} exceeds the {n * (n - 1)} possible directed pairs"
            )

    def flat_entries(self) -> tuple[float, ...]:
        return tuple(float(e) for row in self.entries for e in row)


def kronecker_generate(seed: KroneckerSeed) -> DirectedGraph:
    """Sample a graph with 2**power nodes and exactly target_edges edges.

    Self-loops and duplicate edges are rejected and redrawn, so the seed must
    leave at least target_edges distinct off-diagonal cells with positive
    probability; otherwise the target is infeasible and a ValueError is
    raised.  Deterministic in seed.rng_seed.
    """
    n = 1 << seed.power
    flat = seed.flat_entries()
    if seed.target_edges == 0:
        return DirectedGraph(n, set())

    # Support of the Kronecker power factorizes: nnz of the p-fold product is
    # nnz(M)^p, and a diagonal cell is reachable only through diagonal seed cells.
    nnz = sum(1 for e in flat if e > 0.0)
    nnz_diag = sum(1 for e in (flat[0], flat[3]) if e > 0.0)
    reachable = nnz**seed.power - nnz_diag**seed.power
    if seed.target_edges > reachable:
        raise ValueError(
            f"infeasible target: seed matrix admits only {reachable} distinct "
            f"off-diagonal edges, target_edges={seed.target_edges}"
        )

    total = sum(flat)
    c0 = flat[0] / total
    c1 = c0 + flat[1] / total
    c2 = c1 + flat[2] / total

    rng = stream(seed.rng_seed)
    edges: set[tuple[int, int]] = set()
    while len(edges) < seed.target_edges:
        u = v = 0
        for _ in range(seed.power):
            r = rng.random()
            if r < c0:
                quadrant = 0
            elif r < c1:
                quadrant = 1
            elif r < c2:
                quadrant = 2
            else:
                quadrant = 3
            u = (u << 1) | (quadrant >> 1)
            v = (v << 1) | (quadrant & 1)
        if u != v:
            edges.add((u, v))
    return DirectedGraph(n, edges)


def write_graph(graph: DirectedGraph, destination: str | Path) -> None:
    """Write the bit-exact graph format: ``nodes:<N>`` then sorted ``u,v`` lines."""
    lines = [f"nodes:{graph.node_count}"]
    lines.extend(f"{u},{v}" for u, v in sorted(graph.edges))
    Path(destination).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def read_graph(source: str | Path) -> DirectedGraph:
    text = Path(source).read_text(encoding="utf-8")
    lines = text.splitlines()
    if not lines or not lines[0].startswith("nodes:"):
        raise ValueError("graph file must start with a 'nodes:<N>' header")
    node_count = int(lines[0][len("nodes:"):])
    edges: set[tuple[int, int]] = set()
    for lineno, line in enumerate(lines[1:], start=2):
        parts = line.split(",")
        if len(parts) != 2:
            raise ValueError(f"line {lineno}: expected 'u,v', got {line!r}")
        u, v = int(parts[0]), int(parts[1])
        if (u, v) in edges:
            raise ValueError(f"line {lineno}: duplicate edge ({u},{v})")
        edges.add((u, v))
    return DirectedGraph(node_count, edges)
