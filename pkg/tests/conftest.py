"""Shared test fixtures and independent oracles.

The oracles here deliberately avoid the library's own algorithms: set
membership by brute-force decomposition, norms by naive fixed-point
iteration over explicitly enumerated admissible partitions.
"""

import itertools
from fractions import Fraction

from hypothesis import settings

settings.register_profile("ci", deadline=None, derandomize=True,
                          max_examples=60)
settings.load_profile("ci")


def brute_s1(F):
    return len(F) == 0 or len(F) <= F[0]


def brute_s2(F):
    """S_2 membership by exhaustive decomposition into successive
    nonempty S_1 blocks, at most min F of them."""
    F = tuple(sorted(F))
    if not F:
        return True

    def split(rest, blocks_left):
        if not rest:
            return True
        if blocks_left == 0:
            return False
        for cut in range(1, len(rest) + 1):
            head, tail = rest[:cut], rest[cut:]
            if brute_s1(head) and split(tail, blocks_left - 1):
                return True
        return False

    return split(F, F[0])


def successive_partitions(elems):
    """All ways to drop some elements and split the kept ones (in order)
    into successive nonempty pieces: (pieces, minima) pairs."""
    elems = tuple(sorted(elems))
    n = len(elems)
    for keep in itertools.product((0, 1), repeat=n):
        kept = [e for e, k in zip(elems, keep) if k]
        if not kept:
            continue
        for cuts in itertools.product((0, 1), repeat=len(kept) - 1):
            pieces = [[kept[0]]]
            for e, c in zip(kept[1:], cuts):
                if c:
                    pieces.append([e])
                else:
                    pieces[-1].append(e)
            yield [tuple(p) for p in pieces]


def tsirelson_table_01(universe, theta=Fraction(1, 2)):
    """Least-fixed-point table S -> ||indicator(S)|| in T(S_1, theta)
    over all nonempty subsets of {1..universe}; independent of the DP."""
    subsets = [tuple(c) for r in range(1, universe + 1)
               for c in itertools.combinations(range(1, universe + 1), r)]
    val = {S: Fraction(1) for S in subsets}
    # precompute admissible partitions per subset
    parts = {}
    for S in subsets:
        ps = []
        for pieces in successive_partitions(S):
            if len(pieces) < 2:
                continue
            minima = tuple(p[0] for p in pieces)
            if brute_s1(minima):
                ps.append(pieces)
        parts[S] = ps
    for _ in range(64):
        changed = False
        for S in subsets:
            best = val[S]
            for pieces in parts[S]:
                v = theta * sum(val[tuple(p)] for p in pieces)
                if v > best:
                    best = v
            if best != val[S]:
                val[S] = best
                changed = True
        if not changed:
            return val
    raise AssertionError("fixed point iteration did not converge")
