"""Slow reference computations, written without the package's solvers."""
from fractions import Fraction
from itertools import combinations, product


def one_hole_projections(rows, n):
    """Set of one-hole tuples (hole marked None), enumerated naively."""
    out = set()
    for row in rows:
        for i in range(n):
            out.add(tuple(None if j == i else row[j] for j in range(n)))
    return out


def naive_xi(rows, n, loss, offsets=None):
    """min over every total assignment of max over rows; returns exact Fraction."""
    rows = list(dict.fromkeys(tuple(r) for r in rows))
    variables = sorted(one_hole_projections(rows, n), key=repr)
    index = {v: i for i, v in enumerate(variables)}
    k = len(loss)
    offsets = offsets or [Fraction(0)] * len(rows)
    best = None
    for choice in product(range(k), repeat=len(variables)):
        worst = None
        for row, off in zip(rows, offsets):
            total = Fraction(0)
            for i in range(n):
                key = tuple(None if j == i else row[j] for j in range(n))
                total += Fraction(loss[row[i]][choice[index[key]]])
            val = total / n - off
            worst = val if worst is None else max(worst, val)
        best = worst if best is None else min(best, worst)
    return best


def hall_deficiency(left_edges, right):
    """max over right subsets of |R'| - |N(R')|, by enumeration."""
    best, arg = 0, frozenset()
    for size in range(1, right + 1):
        for subset in combinations(range(right), size):
            nbrs = {l for l, adj in enumerate(left_edges) if set(adj) & set(subset)}
            if size - len(nbrs) > best:
                best, arg = size - len(nbrs), frozenset(subset)
    return best, arg


def blocking_nodes(left_edges, right):
    """Left nodes lying in the neighbourhood of some nonempty tight right set."""
    out = set()
    for size in range(1, right + 1):
        for subset in combinations(range(right), size):
            nbrs = {l for l, adj in enumerate(left_edges) if set(adj) & set(subset)}
            if len(nbrs) == size:
                out |= nbrs
    return out


def triangle_ok(loss):
    k = len(loss)
    return all(loss[i][m] <= loss[i][j] + loss[j][m]
               for i in range(k) for j in range(k) for m in range(k))
