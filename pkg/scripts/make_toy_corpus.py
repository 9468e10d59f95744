#!/usr/bin/env python3
"""Generate a synthetic parallel corpus with alignments for pipeline demos.

Sentences are nonsense tokens; alignments are mostly diagonal with seeded
swaps and drops so monotonicization has real work to do. Output: src.txt,
tgt.txt, align.txt under --out-dir.

Usage:
  python scripts/make_toy_corpus.py --out-dir toy --pairs 100 --seed 42
"""

import argparse
import random
from pathlib import Path


def make_record(rng: random.Random, idx: int) -> tuple[str, str, str]:
    source_len = rng.randint(3, 14)
    target_len = max(2, source_len + rng.randint(-2, 3))
    src = " ".join(f"src{idx}w{i}" for i in range(source_len))
    tgt = " ".join(f"tgt{idx}w{j}" for j in range(target_len))

    links = []
    for j in range(target_len):
        i = min(int(j * source_len / target_len), source_len - 1)
        if rng.random() < 0.15:  # local reordering
            i = max(0, min(source_len - 1, i + rng.choice([-2, -1, 1, 2])))
        if rng.random() < 0.1:  # unaligned target word
            continue
        links.append(f"{i}-{j}")
        if rng.random() < 0.2:  # one-to-many fan-in
            extra = rng.randrange(source_len)
            links.append(f"{extra}-{j}")
    return src, tgt, " ".join(links)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out-dir", required=True)
    parser.add_argument("--pairs", type=int, default=100)
    parser.add_argument("--seed", type=int, default=42)
    args = parser.parse_args()

    rng = random.Random(args.seed)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    records = [make_record(rng, idx) for idx in range(args.pairs)]
    (out / "src.txt").write_text("\n".join(r[0] for r in records) + "\n", encoding="utf-8")
    (out / "tgt.txt").write_text("\n".join(r[1] for r in records) + "\n", encoding="utf-8")
    (out / "align.txt").write_text("\n".join(r[2] for r in records) + "\n", encoding="utf-8")
    print(f"wrote {args.pairs} pairs to {out}/(src|tgt|align).txt")


if __name__ == "__main__":
    main()
