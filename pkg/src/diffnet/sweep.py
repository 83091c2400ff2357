"""Experiment matrix construction and a pull-scheduled worker pool.

Workers pull tasks from one shared queue as they go idle; no static
batching, so slow tasks never strand a core behind a prebuilt split.
Every output file is a pure function of its task, so any worker count
produces bytes identical to a serial run.  Outputs are committed by
temp-file rename: a crashed task leaves nothing at its output path and
resume can trust whatever exists.
"""
from __future__ import annotations

import dataclasses
import os
import time
from collections import deque
from concurrent.futures import FIRST_COMPLETED, ProcessPoolExecutor, wait
from dataclasses import dataclass
from pathlib import Path
from typing import TextIO

from .cascades import read_cascades
from .inference import InferenceConfig, infer, read_inferred, write_inferred

# Memory-estimate constants: candidate tables dominate a run, growing with
# transmission count.  Deliberately generous; override per CLI when tuning.
BASE_TASK_BYTES = 32 * 1024 * 1024
PER_TRANSMISSION_BYTES = 64 * 1024


@dataclass(frozen=True)
class ExperimentTask:
    """One (dataset, k) cell of a sweep; immutable once built."""

    dataset_path: Path
    k: int
    config: InferenceConfig  # carries this task's k
    output_path: Path

    @property
    def task_id(self) -> str:
        return f"{self.dataset_path.stem}.k{self.k}"


@dataclass
class SweepResult:
    completed: list[tuple[ExperimentTask, float, bool]]  # (task, wall seconds, saturated)
    failed: list[tuple[ExperimentTask, str]]
    skipped_ids: set[str]  # subset of completed that resume skipped


def build_matrix(
    datasets: list[str | Path],
    ks: list[int],
    config: InferenceConfig,
    out_dir: str | Path,
) -> list[ExperimentTask]:
    """Cross product datasets x ks, ordered by (dataset, k).

    Output naming is <dataset-stem>.k<k>.edges under out_dir, so duplicate
    dataset stems would collide and are rejected.  config supplies every
    knob except k, which each task overrides.
    """
    if not datasets:
        raise ValueError("datasets must be nonempty")
    if not ks:
        raise ValueError("ks must be nonempty")
    if any(k < 1 for k in ks):
        raise ValueError(f"all ks must be >= 1, got {sorted(ks)}")
    if len(set(ks)) != len(ks):
        raise ValueError("duplicate k values would collide on output paths")

    out_dir = Path(out_dir)
    paths = sorted((Path(d) for d in datasets), key=str)
    stems = [p.stem for p in paths]
    if len(set(stems)) != len(stems):
        dupes = sorted({s for s in stems if stems.count(s) > 1})
        raise ValueError(f"duplicate dataset stems would collide on output paths: {dupes}")

    tasks = []
    for path in paths:
        for k in sorted(ks):
            tasks.append(
                ExperimentTask(
                    dataset_path=path,
                    k=k,
                    config=dataclasses.replace(config, k=k),
                    output_path=out_dir / f"{path.stem}.k{k}.edges",
                )
            )
    return tasks


@dataclass(frozen=True)
class _Outcome:
    task_id: str
    started: float
    finished: float
    saturated: bool = False
    error: str | None = None

    @property
    def wall(self) -> float:
        return self.finished - self.started


def _execute_task(task: ExperimentTask) -> _Outcome:
    """Run one inference task; never raises, never leaves partial output."""
    started = time.time()
    tmp_path = task.output_path.with_name(task.output_path.name + ".tmp")
    try:
        cascade_set = read_cascades(task.dataset_path)
        network = infer(cascade_set, task.config)
        write_inferred(network, tmp_path)
        os.replace(tmp_path, task.output_path)
        return _Outcome(task.task_id, started, time.time(), saturated=network.saturated)
    except Exception as exc:  # noqa: BLE001 - failures isolate to their task
        tmp_path.unlink(missing_ok=True)
        return _Outcome(
            task.task_id, started, time.time(),
            error=f"{type(exc).__name__}: {exc}",
        )


def _valid_output(path: Path) -> bool | None:
    """Saturation flag of a parseable existing output, else None."""
    if not path.is_file():
        return None
    try:
        return read_inferred(path).saturated
    except (ValueError, OSError):
        return None


def _estimate_bytes(dataset_path: Path, per_transmission: int) -> int:
    transmissions = 0
    in_cascades = False
    with open(dataset_path, encoding="utf-8") as fh:
        for line in fh:
            if not in_cascades:
                if line == "\n":
                    in_cascades = True
                continue
            transmissions += line.count(";")
    return BASE_TASK_BYTES + per_transmission * transmissions


class _EventLog:
    """Sweep log: one `timestamp,event,task_id,detail` line per event."""

    def __init__(self, destination: str | Path | TextIO | None):
        self._own = not (destination is None or hasattr(destination, "write"))
        if destination is None:
            self._fh = None
        elif self._own:
            self._fh = open(destination, "a", encoding="utf-8", newline="\n")
        else:
            self._fh = destination

    def emit(self, timestamp: float, event: str, task_id: str, detail: str = "") -> None:
        if self._fh is not None:
            self._fh.write(f"{timestamp:.3f},{event},{task_id},{detail}\n")

    def close(self) -> None:
        if self._fh is not None and self._own:
            self._fh.close()


def _log_outcome(log: _EventLog, task: ExperimentTask, outcome: _Outcome) -> None:
    log.emit(outcome.started, "start", task.task_id)
    if outcome.error is None:
        log.emit(
            outcome.finished, "done", task.task_id,
            f"wall={outcome.wall:.3f}s saturated={str(outcome.saturated).lower()}",
        )
    else:
        log.emit(outcome.finished, "fail", task.task_id, outcome.error.replace(",", ";"))


def dispatch(
    tasks: list[ExperimentTask],
    worker_count: int,
    resume: bool = False,
    *,
    mem_cap: int | None = None,
    per_transmission_bytes: int = PER_TRANSMISSION_BYTES,
    log: str | Path | TextIO | None = None,
) -> SweepResult:
    """Run tasks on worker_count workers pulling from a shared queue.

    resume skips any task whose output already exists and parses.  mem_cap
    holds tasks back until the estimated in-flight footprint has headroom
    (a task is always admitted to an idle pool).  Task failures are recorded
    and never abort the sweep.
    """
    if worker_count < 1:
        raise ValueError(f"worker_count must be >= 1, got {worker_count}")
    seen_outputs = {t.output_path for t in tasks}
    if len(seen_outputs) != len(tasks):
        raise ValueError("tasks with colliding output paths")

    event_log = _EventLog(log)
    outcomes: dict[str, _Outcome] = {}
    skipped_ids: set[str] = set()
    pending: list[ExperimentTask] = []

    try:
        for task in tasks:
            saturated = _valid_output(task.output_path) if resume else None
            if saturated is not None:
                now = time.time()
                outcomes[task.task_id] = _Outcome(task.task_id, now, now, saturated=saturated)
                skipped_ids.add(task.task_id)
                event_log.emit(now, "skip", task.task_id, "output exists")
            else:
                task.output_path.parent.mkdir(parents=True, exist_ok=True)
                pending.append(task)

        if worker_count == 1:
            for task in pending:
                outcome = _execute_task(task)
                outcomes[task.task_id] = outcome
                _log_outcome(event_log, task, outcome)
        elif pending:
            estimates = {}
            if mem_cap is not None:
                by_dataset: dict[Path, int] = {}
                for task in pending:
                    if task.dataset_path not in by_dataset:
                        by_dataset[task.dataset_path] = _estimate_bytes(
                            task.dataset_path, per_transmission_bytes
                        )
                    estimates[task.task_id] = by_dataset[task.dataset_path]

            queue = deque(pending)
            with ProcessPoolExecutor(max_workers=worker_count) as pool:
                in_flight = {}
                in_flight_bytes = 0

                def admissible() -> bool:
                    if not queue:
                        return False
                    if mem_cap is None or not in_flight:
                        return True
                    return in_flight_bytes + estimates[queue[0].task_id] <= mem_cap

                while queue or in_flight:
                    while admissible():
                        task = queue.popleft()
                        future = pool.submit(_execute_task, task)
                        in_flight[future] = task
                        in_flight_bytes += estimates.get(task.task_id, 0)
                    done, _ = wait(in_flight, return_when=FIRST_COMPLETED)
                    for future in done:
                        task = in_flight.pop(future)
                        in_flight_bytes -= estimates.get(task.task_id, 0)
                        outcome = future.result()
                        outcomes[task.task_id] = outcome
                        _log_outcome(event_log, task, outcome)
    finally:
        event_log.close()

    completed, failed = [], []
    for task in tasks:
        outcome = outcomes[task.task_id]
        if outcome.error is None:
            completed.append((task, outcome.wall, outcome.saturated))
        else:
            failed.append((task, outcome.error))
    return SweepResult(completed=completed, failed=failed, skipped_ids=skipped_ids)
