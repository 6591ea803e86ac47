"""Slow, direct reference implementations used as independent test oracles.

Nothing here touches the package's distance caches, vectorized sums or
incremental updates: every quantity is a plain double loop over pairs.
"""
import math
from itertools import combinations


def dist(a, b):
    return math.sqrt(sum((float(u) - float(v)) ** 2 for u, v in zip(a, b)))


def naive_gmd(rows):
    pairs = list(combinations(range(len(rows)), 2))
    return sum(dist(rows[i], rows[j]) for i, j in pairs) / len(pairs)


def naive_rho(rows, labels):
    """Sample categorical Gini correlation straight from the pair sums."""
    n = len(rows)
    delta = naive_gmd(rows)
    gcov = delta
    for lab in dict.fromkeys(labels):
        members = [rows[i] for i in range(n) if labels[i] == lab]
        gcov -= len(members) / n * naive_gmd(members)
    return gcov / delta


def naive_dn(x, y, labels):
    r1, r2 = naive_rho(x, labels), naive_rho(y, labels)
    return r1, r2, r1 - r2


def naive_jackknife(x, y, labels):
    """Delete-one jackknife variance of D_n, recomputing everything n times."""
    n = len(labels)
    vals = []
    for i in range(n):
        keep = [j for j in range(n) if j != i]
        vals.append(naive_dn([x[j] for j in keep], [y[j] for j in keep],
                             [labels[j] for j in keep])[2])
    mean = sum(vals) / n
    return (n - 1) / n * sum((v - mean) ** 2 for v in vals)
