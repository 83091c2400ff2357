"""Clean raw resubmission logs into cascade sets.

Pipeline: drop unattributed rows, group by contagion id, time-sort each
group (stable, so equal timestamps keep input order), optionally filter by
votes and minimum cascade length, then deduplicate to the earliest event
per node.  Threshold statistics are computed on the pre-dedup event lists;
the inference input is the post-dedup cascade set.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple

from .cascades import Cascade, CascadeSet

LOG_COLUMNS = ["contagion_id", "node_id", "community", "timestamp", "votes", "title"]


@dataclass(frozen=True)
class SubmissionRecord:
    """One resubmission-log row; node_id None marks an unattributed post."""

    contagion_id: str
    node_id: str | None
    community: str
    timestamp: int
    votes: int
    title: str | None = None

    def __post_init__(self) -> None:
        if not self.contagion_id:
            raise ValueError("contagion_id must be nonempty")
        if self.timestamp <= 0:
            raise ValueError(f"timestamp must be positive, got {self.timestamp}")


class Event(NamedTuple):
    node_id: str
    timestamp: int
    votes: int
    community: str


EventLists = dict[str, list[Event]]


@dataclass(frozen=True)
class ThresholdStats:
    min_length: int
    avg_length: float  # full precision; round only for display
    contagions: int
    transmissions: int


def read_submission_log(source: str | Path) -> list[SubmissionRecord]:
    """Parse the comma-separated log format (quoted fields permitted)."""
    with open(source, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or list(reader.fieldnames) != LOG_COLUMNS:
            raise ValueError(
                f"expected header {','.join(LOG_COLUMNS)!r}, got {reader.fieldnames}"
            )
        records = []
        for row in reader:
            records.append(
                SubmissionRecord(
                    contagion_id=row["contagion_id"],
                    node_id=row["node_id"] or None,
                    community=row["community"],
                    timestamp=int(row["timestamp"]),
                    votes=int(row["votes"]),
                    title=row["title"] or None,
                )
            )
    return records


def write_submission_log(records: list[SubmissionRecord], destination: str | Path) -> None:
    with open(destination, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(LOG_COLUMNS)
        for r in records:
            writer.writerow(
                [r.contagion_id, r.node_id or "", r.community, r.timestamp, r.votes, r.title or ""]
            )


def clean(records: list[SubmissionRecord]) -> tuple[list[SubmissionRecord], int]:
    """Drop rows without a node id; returns (kept in original order, dropped count)."""
    kept = [r for r in records if r.node_id is not None]
    return kept, len(records) - len(kept)


def build_event_lists(records: list[SubmissionRecord]) -> EventLists:
    """Group cleaned records by contagion and time-sort each group."""
    lists: EventLists = {}
    for r in records:
        if r.node_id is None:
            raise ValueError("build_event_lists requires cleaned records (node_id present)")
        lists.setdefault(r.contagion_id, []).append(
            Event(r.node_id, r.timestamp, r.votes, r.community)
        )
    for cid in lists:
        lists[cid] = sorted(lists[cid], key=lambda e: e.timestamp)
    return lists


def threshold(lists: EventLists, min_length: int, min_votes: int | None = None) -> EventLists:
    """Keep lists with at least min_length events, after any vote filter."""
    if min_length < 1:
        raise ValueError(f"min_length must be >= 1, got {min_length}")
    if min_votes is not None:
        lists = {
            cid: [e for e in events if e.votes >= min_votes] for cid, events in lists.items()
        }
    return {cid: events for cid, events in lists.items() if len(events) >= min_length}


def stats(lists: EventLists, min_length: int) -> ThresholdStats:
    """Contagion/transmission counts for lists already thresholded at min_length."""
    contagions = len(lists)
    transmissions = sum(len(events) for events in lists.values())
    avg = transmissions / contagions if contagions else math.nan
    return ThresholdStats(min_length, avg, contagions, transmissions)


def threshold_sweep(
    lists: EventLists, lengths: list[int], min_votes: int | None = None
) -> list[ThresholdStats]:
    return [stats(threshold(lists, L, min_votes), L) for L in lengths]


def write_stats_csv(rows: list[ThresholdStats], destination: str | Path) -> None:
    lines = ["min_length,avg_length,contagions,transmissions"]
    for row in rows:
        lines.append(f"{row.min_length},{row.avg_length:.1f},{row.contagions},{row.transmissions}")
    Path(destination).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def to_cascade_set(lists: EventLists) -> CascadeSet:
    """Dedup to the earliest event per node and keep contagions with >= 2 nodes.

    Node ids are assigned by sorted submitter name; the names become labels.
    """
    deduped: dict[str, list[Event]] = {}
    for cid, events in lists.items():
        seen: set[str] = set()
        firsts = []
        for e in events:
            if e.node_id not in seen:
                seen.add(e.node_id)
                firsts.append(e)
        if len(firsts) >= 2:
            deduped[cid] = firsts

    names = sorted({e.node_id for events in deduped.values() for e in events})
    ids = {name: i for i, name in enumerate(names)}
    cascades = [
        Cascade(cid, [(ids[e.node_id], float(e.timestamp)) for e in events])
        for cid, events in deduped.items()
    ]
    return CascadeSet(labels={i: name for name, i in ids.items()}, cascades=cascades)
