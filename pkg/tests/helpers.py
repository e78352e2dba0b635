"""Shared generators and independent oracles for the test suite.

The oracles here deliberately avoid the library implementations: the
edit-distance oracle is a plain recursive memo, and the cost/edge oracle
is a pair of DP tables written from scratch.
"""

from __future__ import annotations

import random
from functools import lru_cache

from geckit import M2Record, Sentence, from_parallel


def random_sentence(rng: random.Random, vocab: list[str], min_len: int = 0,
                    max_len: int = 10) -> Sentence:
    length = rng.randint(min_len, max_len)
    return Sentence(tuple(rng.choice(vocab) for _ in range(length)))


def random_record(rng: random.Random, vocab: list[str],
                  annotators: int = 1) -> M2Record:
    """A record whose edit sets come from aligning random targets."""
    src = random_sentence(rng, vocab, min_len=0, max_len=8)
    edits = {}
    for annotator_id in range(annotators):
        tgt = random_sentence(rng, vocab, min_len=0, max_len=8)
        rec = from_parallel(src, tgt, annotator_id=annotator_id)
        edits[annotator_id] = rec.edits[annotator_id]
    return M2Record(src, edits)


def levenshtein_oracle(a: tuple, b: tuple) -> int:
    """Unit-cost edit distance by memoized recursion."""

    @lru_cache(maxsize=None)
    def go(i: int, j: int) -> int:
        if i == 0:
            return j
        if j == 0:
            return i
        best = go(i - 1, j - 1) + (a[i - 1] != b[j - 1])
        best = min(best, go(i - 1, j) + 1, go(i, j - 1) + 1)
        return best

    result = go(len(a), len(b))
    go.cache_clear()
    return result


def cost_and_edges_oracle(xs: tuple, ys: tuple) -> tuple[int, int]:
    """(min cost, edge count) of the canonical alignment.

    The canonical alignment minimizes cost; equal-cost choices are
    resolved per cell preferring match, then substitute, then delete,
    then insert.  Reimplemented here from that rule alone.
    """
    n, m = len(xs), len(ys)
    cost = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(n + 1):
        cost[i][0] = i
    for j in range(m + 1):
        cost[0][j] = j
    for i in range(1, n + 1):
        for j in range(1, m + 1):
            cost[i][j] = min(cost[i - 1][j - 1] + (xs[i - 1] != ys[j - 1]),
                             cost[i - 1][j] + 1,
                             cost[i][j - 1] + 1)
    edges = 0
    i, j = n, m
    while (i, j) != (0, 0):
        edges += 1
        if i and j and xs[i - 1] == ys[j - 1] \
                and cost[i][j] == cost[i - 1][j - 1]:
            i, j = i - 1, j - 1
        elif i and j and cost[i][j] == cost[i - 1][j - 1] + 1:
            i, j = i - 1, j - 1
        elif i and cost[i][j] == cost[i - 1][j] + 1:
            i -= 1
        else:
            j -= 1
    return cost[n][m], edges
