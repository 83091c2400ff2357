"""Cascades: contagion records, SI simulation, and the cascade file format.

Simulation semantics: the root is infected at time 0.  When a node u is
infected, it attempts each out-edge (u, v) to a not-yet-infected v exactly
once, succeeding with probability beta; a success proposes candidate time
t_u + delta with delta exponential of mean alpha.  A node's infection time
is the minimum over its candidates, so the process is an earliest-arrival
race resolved in time order.  Runs to exhaustion unless a horizon is given.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, TextIO

import numpy as np

from .graphs import DirectedGraph
from .rng import stream


@dataclass(frozen=True)
class TransmissionModel:
    """Contagion parameters shared by a batch of simulated cascades."""

    beta: float = 0.5
    alpha_min: float = 0.1
    alpha_max: float = 10.0
    epsilon: float = 1e-9
    rng_seed: int = 0

    def __post_init__(self) -> None:
        if not (0.0 < self.beta <= 1.0):
            raise ValueError(f"beta must be in (0,1], got {self.beta}")
        if not (0.0 < self.alpha_min <= self.alpha_max):
            raise ValueError(f"need 0 < alpha_min <= alpha_max, got [{self.alpha_min}, {self.alpha_max}]")
        if not (0.0 < self.epsilon < self.beta):
            raise ValueError(f"epsilon must be in (0, beta), got {self.epsilon}")


@dataclass
class Cascade:
    """One contagion: (node, infection time) events in nondecreasing time order.

    alpha is the simulated transmission rate; it is carried for bookkeeping
    only, never serialized and never visible to inference, so it is excluded
    from equality.
    """

    contagion_id: str
    events: list[tuple[int, float]]
    alpha: float | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        prev = None
        seen: set[int] = set()
        for node, t in self.events:
            if t < 0:
                raise ValueError(f"negative event time {t} in cascade {self.contagion_id!r}")
            if prev is not None and t < prev:
                raise ValueError(f"events out of time order in cascade {self.contagion_id!r}")
            if node in seen:
                raise ValueError(f"node {node} appears twice in cascade {self.contagion_id!r}")
            seen.add(node)
            prev = t

    def nodes(self) -> set[int]:
        return {node for node, _ in self.events}


@dataclass
class CascadeSet:
    """A batch of cascades over a shared node universe (labels keyed by id)."""

    labels: dict[int, str]
    cascades: list[Cascade]

    def __post_init__(self) -> None:
        seen_ids: set[str] = set()
        for cascade in self.cascades:
            if cascade.contagion_id in seen_ids:
                raise ValueError(f"duplicate contagion id {cascade.contagion_id!r}")
            seen_ids.add(cascade.contagion_id)
            for node, _ in cascade.events:
                if node not in self.labels:
                    raise ValueError(
                        f"cascade {cascade.contagion_id!r} references unknown node {node}"
                    )

    @property
    def node_universe(self) -> set[int]:
        return set(self.labels)

    def covered_nodes(self) -> set[int]:
        covered: set[int] = set()
        for cascade in self.cascades:
            covered.update(cascade.nodes())
        return covered

    def coverage(self) -> float:
        """Fraction of the universe appearing in at least one cascade."""
        if not self.labels:
            return 0.0
        return len(self.covered_nodes()) / len(self.labels)


def _exp_delay(rng: np.random.Generator, alpha: float) -> float:
    # Inverse transform; u == 0 would give an infinite delay and u -> 1 a zero
    # delay, neither of which is a legal transmission, so redraw.
    while True:
        u = rng.random()
        if u > 0.0:
            delta = -alpha * math.log(u)
            if delta > 0.0:
                return delta


def _spread(
    adjacency: dict[int, list[int]],
    root: int,
    coin: Callable[[int, int], bool],
    delay: Callable[[int, int], float],
) -> list[tuple[int, float]]:
    """Earliest-arrival race from root; returns events sorted by (time, node).

    coin/delay are invoked in a fixed order (nodes finalized by time, out
    neighbours ascending), so a given draw source yields one trajectory.
    """
    tentative: dict[int, float] = {root: 0.0}
    finalized: dict[int, float] = {}
    heap: list[tuple[float, int]] = [(0.0, root)]
    while heap:
        t, u = heapq.heappop(heap)
        if u in finalized:
            continue
        finalized[u] = t
        for v in adjacency.get(u, ()):
            if v in finalized:
                continue
            if coin(u, v):
                candidate = t + delay(u, v)
                if candidate < tentative.get(v, math.inf):
                    tentative[v] = candidate
                    heapq.heappush(heap, (candidate, v))
    return sorted(finalized.items(), key=lambda item: (item[1], item[0]))


def simulate_cascade(
    graph: DirectedGraph,
    root: int,
    model: TransmissionModel,
    alpha: float,
    *,
    rng: np.random.Generator | None = None,
    contagion_id: str = "c0",
    horizon: float | None = None,
) -> Cascade:
    """Simulate one contagion from root over graph."""
    if not (0 <= root < graph.node_count):
        raise ValueError(f"root {root} is not a node of the graph")
    if alpha <= 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    if rng is None:
        rng = stream(model.rng_seed)
    events = _spread(
        graph.out_adjacency,
        root,
        coin=lambda u, v: rng.random() < model.beta,
        delay=lambda u, v: _exp_delay(rng, alpha),
    )
    if horizon is not None:
        events = [(node, t) for node, t in events if t <= horizon]
    return Cascade(contagion_id, events, alpha=alpha)


@dataclass
class GenerationResult:
    cascade_set: CascadeSet
    coverage: float
    coverage_warning: bool
    replacements: int


def generate_cascade_set(
    graph: DirectedGraph,
    model: TransmissionModel,
    count: int,
    coverage_target: float = 0.0,
    *,
    horizon: float | None = None,
) -> GenerationResult:
    """Simulate `count` cascades with uniform random roots and alphas.

    If realized coverage falls short of coverage_target, single-event
    cascades are replaced by fresh ones rooted at still-uncovered nodes,
    up to a budget of 10*count attempts; a shortfall after that is flagged
    as a coverage warning rather than an error.

    Cascade i consumes only the stream (rng_seed, i) and replacement attempt
    j only (rng_seed, count + j), so generation parallelizes as a pure map.
    """
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    if not (0.0 <= coverage_target <= 1.0):
        raise ValueError(f"coverage_target must be in [0,1], got {coverage_target}")

    id_width = len(str(max(count - 1, 1)))

    def draw(index: int, rng: np.random.Generator, root: int | None = None) -> Cascade:
        if root is None:
            root = int(rng.integers(0, graph.node_count))
        alpha = model.alpha_min + (model.alpha_max - model.alpha_min) * rng.random()
        return simulate_cascade(
            graph, root, model, alpha,
            rng=rng, contagion_id=f"c{index:0{id_width}d}", horizon=horizon,
        )

    cascades = [draw(i, stream(model.rng_seed, i)) for i in range(count)]
    labels = {node: str(node) for node in range(graph.node_count)}
    cset = CascadeSet(labels, cascades)

    replacements = 0
    budget = 10 * count
    while cset.coverage() < coverage_target and replacements < budget:
        covered = cset.covered_nodes()
        uncovered = sorted(set(range(graph.node_count)) - covered)
        singles = [i for i, c in enumerate(cascades) if len(c.events) == 1]
        if not uncovered or not singles:
            break
        # Prefer sacrificing a single-event cascade whose root stays covered
        # through some other cascade, so its removal cannot undo progress.
        slot = next(
            (i for i in singles
             if any(cascades[i].events[0][0] in c.nodes() for j, c in enumerate(cascades) if j != i)),
            singles[0],
        )
        root = uncovered[replacements % len(uncovered)]
        rng = stream(model.rng_seed, count + replacements)
        replacement = draw(count + replacements, rng, root=root)
        replacement.contagion_id = cascades[slot].contagion_id
        cascades[slot] = replacement
        cset = CascadeSet(labels, cascades)
        replacements += 1

    coverage = cset.coverage()
    return GenerationResult(
        cascade_set=cset,
        coverage=coverage,
        coverage_warning=coverage < coverage_target,
        replacements=replacements,
    )


# ---------------------------------------------------------------------------
# Cascade file format (bit-exact, UTF-8, LF):
#   one line per node      <id>,<label>
#   one blank line
#   one line per cascade   <contagion_id>;<node>,<time>;<node>,<time>;...


class CascadeParseError(ValueError):
    def __init__(self, line_no: int, message: str):
        self.line_no = line_no
        super().__init__(f"line {line_no}: {message}")


def write_cascades(cascade_set: CascadeSet, destination: str | Path | TextIO) -> None:
    lines: list[str] = []
    for node in sorted(cascade_set.labels):
        label = cascade_set.labels[node]
        if "\n" in label:
            raise ValueError(f"label for node {node} contains a newline")
        lines.append(f"{node},{label}")
    lines.append("")
    for cascade in cascade_set.cascades:
        if ";" in cascade.contagion_id or "\n" in cascade.contagion_id:
            raise ValueError(f"contagion id {cascade.contagion_id!r} contains a reserved character")
        parts = [cascade.contagion_id]
        parts.extend(f"{node},{t!r}" for node, t in cascade.events)
        lines.append(";".join(parts))
    text = "\n".join(lines) + "\n"
    if hasattr(destination, "write"):
        destination.write(text)
    else:
        Path(destination).write_text(text, encoding="utf-8", newline="\n")


def read_cascades(source: str | Path | TextIO) -> CascadeSet:
    if hasattr(source, "read"):
        text = source.read()
    else:
        text = Path(source).read_text(encoding="utf-8")
    lines = text.splitlines()

    labels: dict[int, str] = {}
    cursor = 0
    for cursor, line in enumerate(lines):
        if line == "":
            break
        lineno = cursor + 1
        head, sep, label = line.partition(",")
        if not sep:
            raise CascadeParseError(lineno, f"expected '<id>,<label>', got {line!r}")
        try:
            node = int(head)
        except ValueError:
            raise CascadeParseError(lineno, f"node id {head!r} is not an integer") from None
        if node in labels:
            raise CascadeParseError(lineno, f"duplicate node id {node}")
        labels[node] = label
    else:
        raise CascadeParseError(len(lines) + 1, "missing blank separator line after header")

    cascades: list[Cascade] = []
    seen_ids: set[str] = set()
    for offset, line in enumerate(lines[cursor + 1:]):
        lineno = cursor + 2 + offset
        if line == "":
            raise CascadeParseError(lineno, "unexpected blank line in cascade section")
        fields = line.split(";")
        contagion_id = fields[0]
        if contagion_id in seen_ids:
            raise CascadeParseError(lineno, f"duplicate contagion id {contagion_id!r}")
        seen_ids.add(contagion_id)
        events: list[tuple[int, float]] = []
        seen_nodes: set[int] = set()
        prev_time: float | None = None
        for entry in fields[1:]:
            head, sep, tail = entry.partition(",")
            if not sep:
                raise CascadeParseError(lineno, f"expected '<node>,<time>', got {entry!r}")
            try:
                node = int(head)
                t = float(tail)
            except ValueError:
                raise CascadeParseError(lineno, f"malformed event {entry!r}") from None
            if node not in labels:
                raise CascadeParseError(lineno, f"unknown node id {node}")
            if t < 0:
                raise CascadeParseError(lineno, f"negative event time {t}")
            if node in seen_nodes:
                raise CascadeParseError(lineno, f"node {node} infected twice in {contagion_id!r}")
            if prev_time is not None and t < prev_time:
                raise CascadeParseError(
                    lineno, f"times not nondecreasing ({t} after {prev_time})"
                )
            seen_nodes.add(node)
            prev_time = t
            events.append((node, t))
        cascades.append(Cascade(contagion_id, events))
    return CascadeSet(labels, cascades)
