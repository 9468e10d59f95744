"""Sentence pairs, Pharaoh alignment parsing, and per-target sufficient source sets.

Positions are 1-based internally (matching the usual alignment-graph notation);
Pharaoh input is 0-based and converted on parse. All types are immutable and all
functions are pure, so sentence pairs can be processed in parallel freely.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Iterator


class AlignmentError(ValueError):
    """Malformed or out-of-bounds alignment input."""


@dataclass(frozen=True)
class SentencePair:
    """One bitext record: whitespace-tokenized source and target words."""

    source: tuple[str, ...]
    target: tuple[str, ...]
    id: int = 0

    def __post_init__(self) -> None:
        for side, words in (("source", self.source), ("target", self.target)):
            if not words:
                raise AlignmentError(f"record {self.id}: empty {side} sentence")
            for w in words:
                if not w or w.split() != [w]:
                    raise AlignmentError(
                        f"record {self.id}: bad {side} word {w!r} (empty or contains whitespace)"
                    )

    @classmethod
    def from_text(cls, source: str, target: str, id: int = 0) -> "SentencePair":
        return cls(tuple(source.split()), tuple(target.split()), id)

    @property
    def source_len(self) -> int:
        return len(self.source)

    @property
    def target_len(self) -> int:
        return len(self.target)


@dataclass(frozen=True)
class AlignmentSet:
    """Set of (source position, target position) links, 1-based, duplicates collapsed."""

    links: frozenset[tuple[int, int]]
    source_len: int
    target_len: int

    def __post_init__(self) -> None:
        for i, j in self.links:
            if not (1 <= i <= self.source_len and 1 <= j <= self.target_len):
                raise AlignmentError(
                    f"link ({i},{j}) out of bounds for lengths "
                    f"I={self.source_len}, J={self.target_len}"
                )

    def to_pharaoh(self) -> str:
        """Render back to 0-based `i-j` text, sorted for determinism."""
        return " ".join(f"{i - 1}-{j - 1}" for i, j in sorted(self.links))


@dataclass(frozen=True)
class SufficientSets:
    """For each target position j, the set of source positions that must be read first."""

    sets: tuple[frozenset[int], ...]

    def __len__(self) -> int:
        return len(self.sets)

    def __getitem__(self, j: int) -> frozenset[int]:
        """1-based access, mirroring the a_j notation."""
        return self.sets[j - 1]


def parse_pharaoh(line: str, source_len: int, target_len: int, record_id: int = 0) -> AlignmentSet:
    """Parse one Pharaoh line (`i-j` pairs, 0-based) into a 1-based AlignmentSet.

    A blank line is a valid empty alignment. Raises AlignmentError on a token
    that is not `int-int` or on an index outside the sentence lengths.
    """
    links: set[tuple[int, int]] = set()
    for token in line.split():
        left, sep, right = token.partition("-")
        if not sep:
            raise AlignmentError(f"record {record_id}: malformed alignment token {token!r}")
        try:
            i0, j0 = int(left), int(right)
        except ValueError:
            raise AlignmentError(
                f"record {record_id}: malformed alignment token {token!r}"
            ) from None
        if not (0 <= i0 < source_len and 0 <= j0 < target_len):
            raise AlignmentError(
                f"record {record_id}: link ({i0},{j0}) out of range for "
                f"I={source_len}, J={target_len}"
            )
        links.add((i0 + 1, j0 + 1))
    return AlignmentSet(frozenset(links), source_len, target_len)


def sufficient_sets(pair: SentencePair, alignment: AlignmentSet) -> SufficientSets:
    """Invert the alignment: sets[j] = {i : (i, j) in links}. Empty sets are allowed."""
    buckets: list[set[int]] = [set() for _ in range(pair.target_len)]
    for i, j in alignment.links:
        buckets[j - 1].add(i)
    return SufficientSets(tuple(frozenset(b) for b in buckets))


def is_monotonic(s: SufficientSets) -> bool:
    """True iff max(a_j) is nondecreasing over the non-empty sets.

    Empty sets impose no source demand of their own and are skipped.
    """
    prev = 0
    for a in s.sets:
        if not a:
            continue
        m = max(a)
        if m < prev:
            return False
        prev = m
    return True


def iter_bitext(src_path: str | os.PathLike, tgt_path: str | os.PathLike | None = None) -> Iterator[SentencePair]:
    """Yield sentence pairs from two parallel files, or from one TSV if tgt_path is None.

    Raises AlignmentError on a line-count mismatch or a TSV line without a tab.
    """
    if tgt_path is None:
        with open(src_path, encoding="utf-8") as f:
            for idx, line in enumerate(f):
                line = line.rstrip("\n")
                src, sep, tgt = line.partition("\t")
                if not sep:
                    raise AlignmentError(f"record {idx}: TSV line has no tab separator")
                yield SentencePair.from_text(src, tgt, idx)
        return
    with open(src_path, encoding="utf-8") as fs, open(tgt_path, encoding="utf-8") as ft:
        idx = 0
        while True:
            src = fs.readline()
            tgt = ft.readline()
            if not src and not tgt:
                return
            if not src or not tgt:
                raise AlignmentError(
                    f"line count mismatch between {src_path} and {tgt_path} at record {idx}"
                )
            yield SentencePair.from_text(src.rstrip("\n"), tgt.rstrip("\n"), idx)
            idx += 1
