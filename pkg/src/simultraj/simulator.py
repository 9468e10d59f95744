"""Discrete simulation of chunked incremental decoding with prefix selection.

Each round READs up to n source words, prompts a pluggable model for beam
candidates, prunes them to a stable prefix (LCP / RALCP voting / greedy), and
commits the prefix. Committed text is never modified. When the source is
exhausted the round flushes: the top candidate is accepted in full.

The simulation is word-level and model-agnostic. Every round records, for both
prompt modes, how many prompt words a cache-aware engine would have to ingest
anew: the word length of the round's prompt minus its longest common word
prefix with the previous round's prompt. Conversational prompts only ever grow
at the end, so their recompute telescopes to the final prompt length; offline
prompts insert source ahead of the translation history and re-pay it each round.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from typing import IO, Iterable, Protocol, Sequence

from simultraj.alignment import SentencePair
from simultraj.sftformat import dialogue_prompt, get_template, offline_prompt

DEFAULT_BEAM = 5
DEFAULT_GAMMA = 0.6

CONVERSATIONAL = "conversational"
OFFLINE = "offline"
PROMPT_MODES = (CONVERSATIONAL, OFFLINE)


class SimulationError(RuntimeError):
    pass


@dataclass(frozen=True)
class Candidate:
    words: tuple[str, ...]
    end: bool = False


class ModelPort(Protocol):
    def generate(self, context: str, beam: int) -> list[Candidate]:
        """Return up to `beam` candidate continuations for the rendered context."""


@dataclass
class ScriptedModel:
    """Deterministic test double: fixed beam candidates per round index.

    Holds a round cursor, so one instance serves exactly one run.
    """

    rounds: tuple[tuple[Candidate, ...], ...]
    _cursor: int = field(default=0, repr=False)

    @classmethod
    def from_obj(cls, obj: dict) -> "ScriptedModel":
        if not isinstance(obj, dict) or not isinstance(obj.get("rounds"), list):
            raise ValueError("scripted model needs a 'rounds' list of beam candidate lists")
        rounds = tuple(
            tuple(Candidate(tuple(words)) for words in beam) for beam in obj["rounds"]
        )
        return cls(rounds)

    @classmethod
    def from_file(cls, path: str) -> "ScriptedModel":
        with open(path, encoding="utf-8") as f:
            return cls.from_obj(json.load(f))

    def generate(self, context: str, beam: int) -> list[Candidate]:
        if self._cursor >= len(self.rounds):
            raise SimulationError(f"script exhausted at round {self._cursor}")
        out = list(self.rounds[self._cursor][:beam])
        self._cursor += 1
        return out


def scripted_echo(
    source: Sequence[str], chunk_size: int, beam: int = 1, transform=str.upper
) -> ScriptedModel:
    """Script a model that 'translates' each newly read chunk via `transform`."""
    rounds = []
    for start in range(0, len(source), chunk_size):
        words = tuple(transform(w) for w in source[start : start + chunk_size])
        rounds.append(tuple(Candidate(words) for _ in range(beam)))
    return ScriptedModel(tuple(rounds))


@dataclass(frozen=True)
class SelectStrategy:
    kind: str
    gamma: float = 1.0

    def __post_init__(self) -> None:
        if self.kind not in ("lcp", "ralcp", "greedy"):
            raise ValueError(f"unknown selection strategy {self.kind!r}")
        if not 0.0 < self.gamma <= 1.0:
            raise ValueError("gamma must be in (0, 1]")


LCP = SelectStrategy("lcp")
GREEDY = SelectStrategy("greedy")


def ralcp(gamma: float = DEFAULT_GAMMA) -> SelectStrategy:
    return SelectStrategy("ralcp", gamma)


def select_prefix(
    candidates: Sequence[Sequence[str]], strategy: SelectStrategy
) -> list[str]:
    """Stable prefix of the beam under the strategy; may be empty.

    RALCP walks positions while every candidate still has a word there, and
    accepts the plurality word when its vote share reaches gamma; a tie for the
    top vote stops acceptance. LCP is RALCP at gamma=1 (unanimity). GREEDY
    returns the first candidate whole.
    """
    if not candidates:
        raise ValueError("select_prefix needs at least one candidate")
    if strategy.kind == "greedy":
        return list(candidates[0])
    gamma = 1.0 if strategy.kind == "lcp" else strategy.gamma
    total = len(candidates)
    prefix: list[str] = []
    pos = 0
    while all(len(c) > pos for c in candidates):
        votes = Counter(c[pos] for c in candidates)
        best = max(votes.values())
        leaders = [w for w, v in votes.items() if v == best]
        if len(leaders) > 1 or best < gamma * total:
            break
        prefix.append(leaders[0])
        pos += 1
    return prefix


@dataclass(frozen=True)
class SimEvent:
    round: int
    read_words: tuple[str, ...]
    candidates: tuple[tuple[str, ...], ...]
    committed_words: tuple[str, ...]
    recompute_tokens_conversational: int
    recompute_tokens_offline: int
    cumulative_source_read: int
    # Rendered prompts, kept for auditing the append-only property; not serialized.
    prompt_conversational: str = ""
    prompt_offline: str = ""
    prompt_plus_commit: str = ""


@dataclass(frozen=True)
class SimRun:
    pair_id: int
    source: tuple[str, ...]
    events: tuple[SimEvent, ...]
    finished: bool
    prompt_mode: str
    chunk_size: int
    beam: int
    strategy: SelectStrategy

    @property
    def committed(self) -> tuple[str, ...]:
        return tuple(w for e in self.events for w in e.committed_words)

    @property
    def rounds(self) -> int:
        return len(self.events)


def _word_prefix_len(a: list[str], b: list[str]) -> int:
    n = 0
    for x, y in zip(a, b):
        if x != y:
            break
        n += 1
    return n


def _recompute(cur: str, prev: str) -> int:
    cur_words = cur.split()
    return len(cur_words) - _word_prefix_len(cur_words, prev.split())


def run(
    pair: SentencePair | Sequence[str],
    model: ModelPort,
    chunk_size: int,
    strategy: SelectStrategy,
    prompt_mode: str = CONVERSATIONAL,
    beam: int = DEFAULT_BEAM,
    template_id: str = "llama2",
    system_msg: str = "",
    pair_id: int | None = None,
) -> SimRun:
    """Simulate one decoding session over the pair's source words."""
    if chunk_size < 1:
        raise ValueError("chunk_size must be >= 1")
    if beam < 1:
        raise ValueError("beam must be >= 1")
    if prompt_mode not in PROMPT_MODES:
        raise ValueError(f"prompt_mode must be one of {PROMPT_MODES}")
    source = pair.source if isinstance(pair, SentencePair) else tuple(pair)
    if pair_id is None:
        pair_id = pair.id if isinstance(pair, SentencePair) else 0
    if not source:
        raise ValueError("empty source")
    tpl = get_template(template_id)

    closed_turns: list[tuple[tuple[str, ...], tuple[str, ...]]] = []
    open_source: list[str] = []
    committed_all: list[str] = []
    events: list[SimEvent] = []
    prev_conv = ""
    prev_off = ""
    read = 0
    rnd = 0
    while read < len(source):
        chunk = source[read : read + chunk_size]
        read += len(chunk)
        open_source.extend(chunk)

        prompt_conv = dialogue_prompt(closed_turns, open_source, tpl, system_msg)
        prompt_off = offline_prompt(source[:read], committed_all, tpl)
        rc_conv = _recompute(prompt_conv, prev_conv)
        rc_off = _recompute(prompt_off, prev_off)

        context = prompt_conv if prompt_mode == CONVERSATIONAL else prompt_off
        candidates = model.generate(context, beam)
        if not candidates:
            raise SimulationError(f"model returned no candidates at round {rnd}")
        beam_words = tuple(tuple(c.words) for c in candidates)

        if read < len(source):
            selected = tuple(select_prefix(beam_words, strategy))
        else:
            # Source exhausted: flush the best full hypothesis.
            selected = beam_words[0]

        plus_commit = prompt_conv + (tpl.turn_sep + " ".join(selected) if selected else "")
        events.append(
            SimEvent(
                round=rnd,
                read_words=tuple(chunk),
                candidates=beam_words,
                committed_words=selected,
                recompute_tokens_conversational=rc_conv,
                recompute_tokens_offline=rc_off,
                cumulative_source_read=read,
                prompt_conversational=prompt_conv,
                prompt_offline=prompt_off,
                prompt_plus_commit=plus_commit,
            )
        )
        if selected:
            closed_turns.append((tuple(open_source), selected))
            open_source = []
            committed_all.extend(selected)
        prev_conv = prompt_conv
        prev_off = prompt_off
        rnd += 1

    return SimRun(
        pair_id=pair_id,
        source=source,
        events=tuple(events),
        finished=True,
        prompt_mode=prompt_mode,
        chunk_size=chunk_size,
        beam=beam,
        strategy=strategy,
    )


def cache_savings(sim: SimRun) -> dict[str, int]:
    """Total prompt words a cache-aware engine must recompute, per prompt mode."""
    if not sim.finished:
        raise ValueError("cache_savings needs a finished run")
    return {
        "total_conversational": sum(e.recompute_tokens_conversational for e in sim.events),
        "total_offline": sum(e.recompute_tokens_offline for e in sim.events),
    }


def event_to_record(sim: SimRun, event: SimEvent) -> dict:
    return {
        "id": sim.pair_id,
        "round": event.round,
        "read_words": list(event.read_words),
        "candidates": [list(c) for c in event.candidates],
        "committed_words": list(event.committed_words),
        "recompute_tokens_conversational": event.recompute_tokens_conversational,
        "recompute_tokens_offline": event.recompute_tokens_offline,
        "cumulative_source_read": event.cumulative_source_read,
    }


def dump_events_jsonl(runs: Iterable[SimRun], out: str | IO[str]) -> int:
    own = isinstance(out, str)
    f = open(out, "w", encoding="utf-8") if own else out
    try:
        n = 0
        for sim in runs:
            for event in sim.events:
                f.write(json.dumps(event_to_record(sim, event), ensure_ascii=False) + "\n")
                n += 1
        return n
    finally:
        if own:
            f.close()


def load_events_jsonl(path: str) -> list[list[dict]]:
    """Group event records back into runs, preserving file order of run ids."""
    by_id: dict[int, list[dict]] = {}
    order: list[int] = []
    with open(path, encoding="utf-8") as f:
        for line in f:
            if not line.strip():
                continue
            record = json.loads(line)
            rid = record.get("id", 0)
            if rid not in by_id:
                by_id[rid] = []
                order.append(rid)
            by_id[rid].append(record)
    return [by_id[rid] for rid in order]
