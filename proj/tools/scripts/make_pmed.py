#!/usr/bin/env python3
"""Writes small random connected graphs in the OR-Library p-median format.

Usage: make_pmed.py OUT M EDGES P SEED [MAX_COST]
"""
import random
import sys


def main():
    out, m, e, p, seed = sys.argv[1], *map(int, sys.argv[2:6])
    max_cost = int(sys.argv[6]) if len(sys.argv) > 6 else 2
    rng = random.Random(seed)
    edges = {}
    for v in range(2, m + 1):
        u = rng.randint(1, v - 1)
        edges[(u, v)] = rng.randint(1, max_cost)
    while len(edges) < e:
        u, v = sorted(rng.sample(range(1, m + 1), 2))
        edges.setdefault((u, v), rng.randint(1, max_cost))
    with open(out, "w") as f:
        f.write(f"{m} {len(edges)} {p}\n")
        for (u, v), c in sorted(edges.items()):
            f.write(f"{u} {v} {c}\n")


if __name__ == "__main__":
    main()
