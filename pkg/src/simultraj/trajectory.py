"""Segmentation of monotonic plans into READ/WRITE chunk trajectories.

The meta trajectory is the minimum-latency schedule: a chunk opens whenever the
prefix requirement rises, reading exactly the newly required source span, and
consecutive targets with an unchanged requirement share one WRITE. Source tokens
left unread after the last write are flushed into the final chunk's READ; they
complete coverage but no write waits on them, so `read_counts_before_write`
accounts for them after the final writes when a plan is supplied.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Iterator

from simultraj.alignment import SentencePair
from simultraj.monotonic import MonotonicPlan

META = "meta"
MERGED = "merged"
MERGED_SHIFTED = "merged+shifted"
PROVENANCES = (META, MERGED, MERGED_SHIFTED)


@dataclass(frozen=True)
class Chunk:
    """One READ/WRITE pair over 1-based source and target positions.

    shifted_prefix_len counts leading write tokens moved in from the previous
    chunk by the shift augmentation; it is 0 in meta and merged trajectories.
    """

    read: tuple[int, ...]
    write: tuple[int, ...]
    shifted_prefix_len: int = 0


@dataclass(frozen=True)
class Trajectory:
    chunks: tuple[Chunk, ...]
    pair: SentencePair
    provenance: str = META

    @property
    def pair_id(self) -> int:
        return self.pair.id

    def read_words(self, chunk: Chunk) -> tuple[str, ...]:
        return tuple(self.pair.source[i - 1] for i in chunk.read)

    def write_words(self, chunk: Chunk) -> tuple[str, ...]:
        return tuple(self.pair.target[j - 1] for j in chunk.write)


def build_meta(plan: MonotonicPlan, pair: SentencePair) -> Trajectory:
    """Minimum-latency trajectory for a plan: one chunk per requirement increase."""
    if plan.target_len != pair.target_len or plan.source_len != pair.source_len:
        raise ValueError(f"record {pair.id}: plan shape does not match sentence pair")
    chunks: list[tuple[list[int], list[int]]] = []
    consumed = 0
    for j, m in enumerate(plan.prefix_req, start=1):
        if m > consumed:
            chunks.append((list(range(consumed + 1, m + 1)), [j]))
            consumed = m
        else:
            chunks[-1][1].append(j)
    # Trailing source the last write never waited on: flush into the final READ.
    if consumed < plan.source_len:
        chunks[-1][0].extend(range(consumed + 1, plan.source_len + 1))
    return Trajectory(
        tuple(Chunk(tuple(r), tuple(w)) for r, w in chunks),
        pair,
        META,
    )


def verify(traj: Trajectory, plan: MonotonicPlan | None = None) -> list[str]:
    """Audit trajectory invariants; returns one message per violation (empty = sound).

    The sufficiency check needs the plan and is skipped when plan is None.
    """
    violations: list[str] = []
    source_len = traj.pair.source_len
    target_len = traj.pair.target_len

    expected = 1
    ordered = True
    for c, chunk in enumerate(traj.chunks):
        for i in chunk.read:
            if i != expected:
                violations.append(f"source order violated @chunk {c}")
                ordered = False
                break
            expected += 1
        if not ordered:
            break
    if ordered and expected != source_len + 1:
        violations.append("source coverage violated")

    expected = 1
    ordered = True
    for c, chunk in enumerate(traj.chunks):
        for j in chunk.write:
            if j != expected:
                violations.append(f"target order violated @chunk {c}")
                ordered = False
                break
            expected += 1
        if not ordered:
            break
    if ordered and expected != target_len + 1:
        violations.append("target coverage violated")

    if len(traj.chunks) > source_len:
        violations.append("chunk count violated")

    for c, chunk in enumerate(traj.chunks):
        if not chunk.write:
            violations.append(f"empty write @chunk {c}")
        if chunk.shifted_prefix_len > len(chunk.write):
            violations.append(f"shifted prefix violated @chunk {c}")

    if plan is not None:
        cum = 0
        for c, chunk in enumerate(traj.chunks):
            cum += len(chunk.read)
            for j in chunk.write:
                if 1 <= j <= plan.target_len and plan.prefix_req[j - 1] > cum:
                    violations.append(f"write sufficiency violated @chunk {c}")
                    break
    return violations


def write_read_counts(traj: Trajectory) -> list[int]:
    """g[t] = source tokens read when target t is written, chunk reads before writes."""
    counts: list[int] = []
    cum = 0
    for chunk in traj.chunks:
        cum += len(chunk.read)
        counts.extend([cum] * len(chunk.write))
    return counts


def read_counts_before_write(traj: Trajectory, plan: MonotonicPlan) -> list[int]:
    """Like write_read_counts, but the final chunk's trailing flush (source past
    every write requirement) is read after the writes, not before."""
    counts = write_read_counts(traj)
    last = traj.chunks[-1]
    if last.write:
        need = max(plan.prefix_req[j - 1] for j in last.write)
        drained = sum(1 for i in last.read if i > need)
        for t in range(len(counts) - len(last.write), len(counts)):
            counts[t] -= drained
    return counts


def to_record(traj: Trajectory, debug_indices: bool = False) -> dict:
    """JSON-ready record with words materialized; positions only under debug."""
    record: dict = {
        "id": traj.pair_id,
        "provenance": traj.provenance,
        "chunks": [
            {
                "read": list(traj.read_words(chunk)),
                "write": list(traj.write_words(chunk)),
                "shifted": chunk.shifted_prefix_len,
            }
            for chunk in traj.chunks
        ],
    }
    if debug_indices:
        record["indices"] = [
            {"read": list(chunk.read), "write": list(chunk.write)} for chunk in traj.chunks
        ]
    return record


def from_record(record: dict) -> Trajectory:
    """Rebuild a trajectory from its JSONL record.

    Reads and writes are contiguous 1..I / 1..J in order, so positions are
    recovered by running counters over the word lists.
    """
    src: list[str] = []
    tgt: list[str] = []
    chunks: list[Chunk] = []
    for chunk in record["chunks"]:
        r0, w0 = len(src), len(tgt)
        src.extend(chunk["read"])
        tgt.extend(chunk["write"])
        chunks.append(
            Chunk(
                tuple(range(r0 + 1, len(src) + 1)),
                tuple(range(w0 + 1, len(tgt) + 1)),
                chunk.get("shifted", 0),
            )
        )
    pair = SentencePair(tuple(src), tuple(tgt), record["id"])
    return Trajectory(tuple(chunks), pair, record["provenance"])


def dump_jsonl(trajs: Iterable[Trajectory], path: str, debug_indices: bool = False) -> int:
    n = 0
    with open(path, "w", encoding="utf-8") as f:
        for traj in trajs:
            f.write(json.dumps(to_record(traj, debug_indices), ensure_ascii=False) + "\n")
            n += 1
    return n


def load_jsonl(path: str) -> Iterator[Trajectory]:
    with open(path, encoding="utf-8") as f:
        for line in f:
            if line.strip():
                yield from_record(json.loads(line))
