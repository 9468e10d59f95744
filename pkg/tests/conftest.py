import random

from simultraj.alignment import AlignmentSet, SentencePair, sufficient_sets
from simultraj.monotonic import MonotonicPlan, monotonicize
from simultraj.trajectory import Trajectory, build_meta


def make_pair(source_len: int, target_len: int, pair_id: int = 0) -> SentencePair:
    return SentencePair(
        tuple(f"s{i}" for i in range(1, source_len + 1)),
        tuple(f"t{j}" for j in range(1, target_len + 1)),
        pair_id,
    )


def random_links(rng: random.Random, source_len: int, target_len: int) -> frozenset:
    density = rng.uniform(0.0, 0.5)
    return frozenset(
        (i, j)
        for i in range(1, source_len + 1)
        for j in range(1, target_len + 1)
        if rng.random() < density
    )


def random_case(
    rng: random.Random, max_len: int = 12, pair_id: int = 0
) -> tuple[SentencePair, AlignmentSet]:
    source_len = rng.randint(1, max_len)
    target_len = rng.randint(1, max_len)
    pair = make_pair(source_len, target_len, pair_id)
    links = random_links(rng, source_len, target_len)
    return pair, AlignmentSet(links, source_len, target_len)


def meta_of(pair: SentencePair, alignment: AlignmentSet) -> tuple[MonotonicPlan, Trajectory]:
    plan = monotonicize(sufficient_sets(pair, alignment), pair.source_len)
    return plan, build_meta(plan, pair)


def write_toy_corpus(tmp_path, n_pairs: int = 2, seed: int = 0):
    """Write src/tgt/align files for n random pairs; returns the three paths."""
    rng = random.Random(seed)
    src_lines, tgt_lines, align_lines = [], [], []
    for idx in range(n_pairs):
        pair, alignment = random_case(rng, max_len=10, pair_id=idx)
        src_lines.append(" ".join(pair.source))
        tgt_lines.append(" ".join(pair.target))
        align_lines.append(alignment.to_pharaoh())
    (tmp_path / "src.txt").write_text("\n".join(src_lines) + "\n", encoding="utf-8")
    (tmp_path / "tgt.txt").write_text("\n".join(tgt_lines) + "\n", encoding="utf-8")
    (tmp_path / "align.txt").write_text("\n".join(align_lines) + "\n", encoding="utf-8")
    return tmp_path / "src.txt", tmp_path / "tgt.txt", tmp_path / "align.txt"


def brute_min_read_counts(plan: MonotonicPlan) -> list[int]:
    """Per target position, the fewest source reads before that write over all
    schedules that keep source/target order and respect the plan's requirements.
    Pure enumeration; the oracle for the minimum-latency claim."""
    source_len, target_len = plan.source_len, plan.target_len
    best = [source_len] * target_len
    stack: list[tuple[int, int, tuple[int, ...]]] = [(0, 0, ())]
    while stack:
        reads, writes, g = stack.pop()
        if writes == target_len:
            for t, v in enumerate(g):
                if v < best[t]:
                    best[t] = v
            continue
        if reads < source_len:
            stack.append((reads + 1, writes, g))
        if plan.prefix_req[writes] <= reads:
            stack.append((reads, writes + 1, g + (reads,)))
    return best
