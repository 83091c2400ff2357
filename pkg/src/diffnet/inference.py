"""Greedy selection of the directed edges that best explain observed cascades.

Objective: within each cascade, every infected node is explained by a single
parent, either some earlier-infected node u reached through a selected edge
(log-weight log(beta) - (t_v - t_u)/alpha) or the background source
(log-weight log(epsilon)).  The score of an edge set is the sum over
cascades and nodes of the best allowed parent weight.  Adding an edge never
hurts and helps less the more edges are present (monotone submodular), which
is what licenses the lazy evaluation below.

The lazy path keeps candidates in a max-heap keyed by their last computed
gain.  A candidate's gain only changes when an edge pointing at the same
target node is selected, so each target carries a version counter and a
cached gain is trusted iff its stamp matches the current target version.
A popped stale candidate is recomputed and pushed back; a popped fresh one
is provably the maximum and gets selected.  Ties break lexicographically on
(u, v) in both the lazy and the naive path.
"""
from __future__ import annotations

import heapq
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple, TextIO

from .cascades import CascadeSet

NEG_INF = float("-inf")


@dataclass(frozen=True)
class InferenceConfig:
    """Knob set for one inference run; k is the maximum number of edges."""

    k: int
    alpha: float = 1.0
    beta: float = 0.5
    epsilon: float = 1e-9
    gain_tolerance: float = 0.0

    def __post_init__(self) -> None:
        if self.k < 0:
            raise ValueError(f"k must be nonnegative, got {self.k}")
        if self.alpha <= 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if not (0.0 < self.epsilon < self.beta <= 1.0):
            raise ValueError(
                f"need 0 < epsilon < beta <= 1, got epsilon={self.epsilon} beta={self.beta}"
            )
        if self.gain_tolerance < 0:
            raise ValueError(f"gain_tolerance must be nonnegative, got {self.gain_tolerance}")


class Selection(NamedTuple):
    edge: tuple[int, int]
    gain: float
    iteration: int


@dataclass
class EdgeCandidate:
    """A directed pair co-occurring in time order in at least one cascade."""

    edge: tuple[int, int]
    cached_gain: float
    stamp: int = 0  # target-version at which cached_gain was computed


@dataclass
class InferredNetwork:
    """Ordered greedy selections; saturated means the run stopped short of k."""

    selections: list[Selection]
    saturated: bool
    config: InferenceConfig | None = field(default=None, compare=False)

    def edge_set(self) -> set[tuple[int, int]]:
        return {s.edge for s in self.selections}


def edge_log_weight(t_u: float, t_v: float, config: InferenceConfig) -> float:
    """Log-weight of u explaining v; -inf when v did not strictly follow u."""
    if t_v <= t_u:
        return NEG_INF
    return math.log(config.beta) - (t_v - t_u) / config.alpha


class _CascadeIndex:
    """Per-cascade infection times plus the evolving best-parent weight table."""

    def __init__(self, cascade_set: CascadeSet, config: InferenceConfig):
        self.config = config
        self.log_eps = math.log(config.epsilon)
        self.times: list[dict[int, float]] = [dict(c.events) for c in cascade_set.cascades]
        # best[c][v]: weight of v's best allowed parent under the currently
        # selected edges; the background source floors it at log(epsilon).
        self.best: list[dict[int, float]] = [
            {node: self.log_eps for node in t} for t in self.times
        ]

    def candidate_terms(self) -> dict[tuple[int, int], list[tuple[int, float]]]:
        """Map each co-occurring ordered pair to its (cascade, weight) terms.

        Term lists are in ascending cascade order, fixing the summation order
        so repeated gain computations are bitwise identical.
        """
        log_beta = math.log(self.config.beta)
        alpha = self.config.alpha
        terms: dict[tuple[int, int], list[tuple[int, float]]] = {}
        for c_idx, times in enumerate(self.times):
            events = sorted(times.items(), key=lambda item: (item[1], item[0]))
            for j in range(1, len(events)):
                v, t_v = events[j]
                for i in range(j):
                    u, t_u = events[i]
                    if t_u < t_v:
                        w = log_beta - (t_v - t_u) / alpha
                        terms.setdefault((u, v), []).append((c_idx, w))
        return terms

    def gain(self, edge_terms: list[tuple[int, float]], v: int) -> float:
        total = 0.0
        for c_idx, w in edge_terms:
            improvement = w - self.best[c_idx][v]
            if improvement > 0.0:
                total += improvement
        return total

    def apply(self, edge_terms: list[tuple[int, float]], v: int) -> None:
        for c_idx, w in edge_terms:
            if w > self.best[c_idx][v]:
                self.best[c_idx][v] = w


def build_candidates(cascade_set: CascadeSet, config: InferenceConfig) -> list[EdgeCandidate]:
    """All candidate edges with gains evaluated against the empty edge set."""
    index = _CascadeIndex(cascade_set, config)
    terms = index.candidate_terms()
    return [
        EdgeCandidate(edge=edge, cached_gain=index.gain(edge_terms, edge[1]))
        for edge, edge_terms in sorted(terms.items())
    ]


def marginal_gain(
    edge: tuple[int, int],
    cascade_set: CascadeSet,
    parent_weights: list[dict[int, float]],
    config: InferenceConfig,
) -> float:
    """Gain of adding edge given the per-(cascade, node) best-parent table.

    parent_weights[c][v] must be v's current best allowed parent weight in
    cascade c (log(epsilon) floor included).
    """
    u, v = edge
    total = 0.0
    for c_idx, cascade in enumerate(cascade_set.cascades):
        times = dict(cascade.events)
        if u not in times or v not in times:
            continue
        w = edge_log_weight(times[u], times[v], config)
        if w == NEG_INF:
            continue
        improvement = w - parent_weights[c_idx][v]
        if improvement > 0.0:
            total += improvement
    return total


def infer(cascade_set: CascadeSet, config: InferenceConfig) -> InferredNetwork:
    """Lazy greedy: select up to k edges, stopping when no gain clears the
    tolerance.  Output matches naive_infer exactly, including tie-breaks."""
    index = _CascadeIndex(cascade_set, config)
    terms = index.candidate_terms()

    heap: list[tuple[float, int, int]] = []
    stamp: dict[tuple[int, int], int] = {}
    for (u, v), edge_terms in terms.items():
        heap.append((-index.gain(edge_terms, v), u, v))
        stamp[(u, v)] = 0
    heapq.heapify(heap)
    target_version: dict[int, int] = {}

    selections: list[Selection] = []
    while heap and len(selections) < config.k:
        neg_gain, u, v = heapq.heappop(heap)
        version = target_version.get(v, 0)
        if stamp[(u, v)] == version:
            gain = -neg_gain
            if gain <= config.gain_tolerance:
                break
            selections.append(Selection((u, v), gain, len(selections) + 1))
            index.apply(terms[(u, v)], v)
            target_version[v] = version + 1
        else:
            stamp[(u, v)] = version
            heapq.heappush(heap, (-index.gain(terms[(u, v)], v), u, v))

    return InferredNetwork(
        selections=selections,
        saturated=len(selections) < config.k,
        config=config,
    )


def naive_infer(cascade_set: CascadeSet, config: InferenceConfig) -> InferredNetwork:
    """Plain greedy with full gain recomputation every iteration.

    Exists as the verification twin of infer(); keep it free of the lazy
    machinery.
    """
    index = _CascadeIndex(cascade_set, config)
    terms = index.candidate_terms()
    candidates = sorted(terms)

    selections: list[Selection] = []
    selected: set[tuple[int, int]] = set()
    for iteration in range(1, config.k + 1):
        best_edge = None
        best_gain = config.gain_tolerance
        for edge in candidates:
            if edge in selected:
                continue
            gain = index.gain(terms[edge], edge[1])
            if gain > best_gain:
                best_gain = gain
                best_edge = edge
        if best_edge is None:
            break
        selections.append(Selection(best_edge, best_gain, iteration))
        selected.add(best_edge)
        index.apply(terms[best_edge], best_edge[1])

    return InferredNetwork(
        selections=selections,
        saturated=len(selections) < config.k,
        config=config,
    )


def total_log_score(
    cascade_set: CascadeSet, edges: set[tuple[int, int]], config: InferenceConfig
) -> float:
    """Objective value of an edge set, evaluated directly from definitions."""
    log_eps = math.log(config.epsilon)
    total = 0.0
    for cascade in cascade_set.cascades:
        for v, t_v in cascade.events:
            best = log_eps
            for u, t_u in cascade.events:
                if (u, v) in edges:
                    w = edge_log_weight(t_u, t_v, config)
                    if w > best:
                        best = w
            total += best
    return total


# ---------------------------------------------------------------------------
# Inferred-network file format (bit-exact, UTF-8, LF):
#   # k=<k> alpha=<a> beta=<b> epsilon=<e>
#   <iteration>,<u>,<v>,<gain to 9 decimal places>
#   # saturated=<true|false>

_HEADER_RE = re.compile(r"^# k=(\S+) alpha=(\S+) beta=(\S+) epsilon=(\S+)$")
_FOOTER_RE = re.compile(r"^# saturated=(true|false)$")


def write_inferred(network: InferredNetwork, destination: str | Path | TextIO) -> None:
    config = network.config
    if config is None:
        raise ValueError("network carries no config; cannot write header")
    lines = [f"# k={config.k} alpha={config.alpha!r} beta={config.beta!r} epsilon={config.epsilon!r}"]
    for edge, gain, iteration in network.selections:
        lines.append(f"{iteration},{edge[0]},{edge[1]},{gain:.9f}")
    lines.append(f"# saturated={'true' if network.saturated else 'false'}")
    text = "\n".join(lines) + "\n"
    if hasattr(destination, "write"):
        destination.write(text)
    else:
        Path(destination).write_text(text, encoding="utf-8", newline="\n")


def read_inferred(source: str | Path | TextIO) -> InferredNetwork:
    if hasattr(source, "read"):
        text = source.read()
    else:
        text = Path(source).read_text(encoding="utf-8")
    lines = text.splitlines()
    if not lines:
        raise ValueError("empty inferred-network file")
    header = _HEADER_RE.match(lines[0])
    if header is None:
        raise ValueError(f"bad header line: {lines[0]!r}")
    config = InferenceConfig(
        k=int(header.group(1)),
        alpha=float(header.group(2)),
        beta=float(header.group(3)),
        epsilon=float(header.group(4)),
    )
    footer = _FOOTER_RE.match(lines[-1])
    if footer is None:
        raise ValueError(f"bad or missing saturation footer: {lines[-1]!r}")
    selections = []
    for line in lines[1:-1]:
        it, u, v, gain = line.split(",")
        selections.append(Selection((int(u), int(v)), float(gain), int(it)))
    return InferredNetwork(
        selections=selections,
        saturated=footer.group(1) == "true",
        config=config,
    )
