#!/usr/bin/env python3
"""Reference implementation of the 32-bit respondent hash, generator and shuffle.

Writes golden/prng_vectors.json. Kept separate from the Rust sources so the
golden vectors are an independent check on the engine.

    python3 crates/core/tests/oracle/prng_reference.py > golden/prng_vectors.json
"""
import json

MASK = 0xFFFFFFFF


def fnv1a32(text):
    h = 2166136261
    for byte in text.encode("utf-8"):
        h ^= byte
        h = (h * 16777619) & MASK
    return h


class Mulberry32:
    def __init__(self, seed):
        self.state = seed & MASK

    def next_u32(self):
        self.state = (self.state + 0x6D2B79F5) & MASK
        z = self.state
        z = ((z ^ (z >> 15)) * (z | 1)) & MASK
        z ^= (z + ((z ^ (z >> 7)) * (z | 61) & MASK)) & MASK
        return (z ^ (z >> 14)) & MASK


def shuffle(items, rng):
    items = list(items)
    for i in range(len(items) - 1, 0, -1):
        j = rng.next_u32() % (i + 1)
        items[i], items[j] = items[j], items[i]
    return items


SEEDS = [0, 1, 2, 42, 1234567, 2166136261, 3826002220, 0x7FFFFFFF, 0xFFFFFFFF]
IDS = ["", "a", "b", "respondent-1", "sim-0-0", "sim-7-123", "A3KX9-ASSIGNMENT", "ünïcødé"]


def main():
    out = {
        "generator": "mulberry32",
        "hash": "fnv1a32",
        "draws_per_seed": 16,
        "streams": [
            {"seed": s, "draws": [r.next_u32() for _ in range(16)] if (r := Mulberry32(s)) else []}
            for s in SEEDS
        ],
        "hashes": [{"id": i, "seed": fnv1a32(i)} for i in IDS],
        "shuffles": [
            {"seed": s, "input": [1, 2, 3, 4], "output": shuffle([1, 2, 3, 4], Mulberry32(s))}
            for s in [0, 1, 42]
        ]
        + [
            {"seed": 7, "input": list(range(10)), "output": shuffle(list(range(10)), Mulberry32(7))}
        ],
    }
    print(json.dumps(out, indent=2, ensure_ascii=False))


if __name__ == "__main__":
    main()
