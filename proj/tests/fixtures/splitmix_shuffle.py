#!/usr/bin/env python3
"""Reference splitmix64 / Fisher-Yates permutation, written from the published
splitmix64 constants. Used to freeze the shuffle fixture in the C++ tests."""
import sys

MASK = (1 << 64) - 1


def splitmix64(state):
    state = (state + 0x9E3779B97F4A7C15) & MASK
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
    return state, z ^ (z >> 31)


def shuffle(items, seed):
    items = list(items)
    state = seed & MASK
    for i in range(len(items) - 1, 0, -1):
        state, r = splitmix64(state)
        j = r % (i + 1)
        items[i], items[j] = items[j], items[i]
    return items


if __name__ == "__main__":
    n = int(sys.argv[1]) if len(sys.argv) > 1 else 10
    seed = int(sys.argv[2]) if len(sys.argv) > 2 else 42
    print(",".join(str(x) for x in shuffle(range(n), seed)))
    # first three raw outputs for seed, for the generator test
    s = seed
    outs = []
    for _ in range(3):
        s, r = splitmix64(s)
        outs.append(hex(r))
    print(" ".join(outs))
