"""Shared test oracles, deliberately independent of the engine internals.

exhaustive_greedy computes every gain as a from-scratch objective delta via
total_log_score, so it shares no selection machinery with infer().
"""
import numpy as np

from diffnet.cascades import Cascade, CascadeSet
from diffnet.inference import InferenceConfig, total_log_score


def random_instance(seed, max_nodes, max_cascades):
    rng = np.random.Generator(np.random.PCG64(seed))
    n = int(rng.integers(2, max_nodes + 1))
    labels = {i: str(i) for i in range(n)}
    cascades = []
    for idx in range(int(rng.integers(1, max_cascades + 1))):
        size = int(rng.integers(1, n + 1))
        nodes = [int(x) for x in rng.permutation(n)[:size]]
        times = np.sort(rng.uniform(0.0, 10.0, size))
        if size >= 2 and rng.random() < 0.3:
            j = int(rng.integers(1, size))
            times[j] = times[j - 1]  # exact tie exercises the t_u < t_v cut
            times.sort()
        cascades.append(Cascade(f"c{idx}", list(zip(nodes, [float(t) for t in times]))))
    config = InferenceConfig(
        k=int(rng.integers(1, 12)),
        alpha=float(rng.choice([0.5, 1.0, 2.0])),
        beta=float(rng.choice([0.3, 0.5, 0.9])),
        epsilon=1e-9,
    )
    return CascadeSet(labels, cascades), config


def exhaustive_greedy(cascade_set, config):
    """Oracle greedy: pick the objective-delta maximizer each round,
    lexicographic within a 1e-9 band, stop when nothing clears it."""
    candidates = set()
    for cascade in cascade_set.cascades:
        for u, t_u in cascade.events:
            for v, t_v in cascade.events:
                if t_u < t_v:
                    candidates.add((u, v))
    selected = []
    current: set[tuple[int, int]] = set()
    while len(selected) < config.k:
        base = total_log_score(cascade_set, current, config)
        best_edge, best_delta = None, config.gain_tolerance
        for edge in sorted(candidates - current):
            delta = total_log_score(cascade_set, current | {edge}, config) - base
            if delta > best_delta + 1e-9:
                best_edge, best_delta = edge, delta
        if best_edge is None:
            break
        selected.append((best_edge, best_delta))
        current.add(best_edge)
    return selected
