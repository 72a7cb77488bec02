"""Independent brute-force reference implementations used as test oracles.

Everything here is computed directly from definitions (per-point-pair
counting, Counter-based entropies, exhaustive enumeration of assignments
or contingency tables) and shares no code with the package
implementations it checks.
"""

from __future__ import annotations

import math
from collections import Counter
from fractions import Fraction
from functools import lru_cache
from itertools import product


def lcs_bruteforce(a, b, forbidden=frozenset()):
    """All-substring enumeration; ties by (-length, start_a, start_b)."""
    best = None
    for i in range(len(a)):
        for length in range(1, len(a) - i + 1):
            if a[i + length - 1] in forbidden:
                break
            run = tuple(a[i : i + length])
            for j in range(len(b) - length + 1):
                if tuple(b[j : j + length]) == run:
                    cand = (-length, i, j)
                    if best is None or cand < best:
                        best = cand
                    break  # first j is the smallest
    if best is None:
        return None
    length, i, j = -best[0], best[1], best[2]
    return (i, j, length)


def ari_bruteforce(a, b):
    """Adjusted Rand index by counting agreement over all point pairs."""
    n = len(a)
    same_both = same_a = same_b = 0
    pairs = 0
    for i in range(n):
        for j in range(i + 1, n):
            pairs += 1
            sa = a[i] == a[j]
            sb = b[i] == b[j]
            same_a += sa
            same_b += sb
            same_both += sa and sb
    expected = same_a * same_b / pairs
    max_index = (same_a + same_b) / 2
    denom = max_index - expected
    if denom == 0:
        return 1.0
    return (same_both - expected) / denom


def entropy_bruteforce(labels):
    n = len(labels)
    return -sum(c / n * math.log(c / n) for c in Counter(labels).values())


def hcv_bruteforce(a, b):
    n = len(a)
    h_a = entropy_bruteforce(a)
    h_b = entropy_bruteforce(b)
    joint = Counter(zip(a, b))
    ca = Counter(a)
    cb = Counter(b)
    h_a_given_b = -sum(c / n * math.log(c / cb[kb]) for (_, kb), c in joint.items())
    h_b_given_a = -sum(c / n * math.log(c / ca[ka]) for (ka, _), c in joint.items())
    h = 1.0 if h_a == 0 else 1 - h_a_given_b / h_a
    c = 1.0 if h_b == 0 else 1 - h_b_given_a / h_b
    v = 0.0 if h + c == 0 else 2 * h * c / (h + c)
    return h, c, v


def mi_bruteforce(a, b):
    n = len(a)
    joint = Counter(zip(a, b))
    ca = Counter(a)
    cb = Counter(b)
    return sum(
        c / n * math.log(n * c / (ca[ka] * cb[kb])) for (ka, kb), c in joint.items()
    )


def _enumerate_tables(row_sums, col_sums):
    r, c = len(row_sums), len(col_sums)
    table = [[0] * c for _ in range(r)]
    col_left = list(col_sums)
    out = []

    def fill_row(i):
        if i == r:
            if all(v == 0 for v in col_left):
                out.append([row[:] for row in table])
            return

        def cell(j, left):
            if j == c - 1:
                if left <= col_left[j]:
                    table[i][j] = left
                    col_left[j] -= left
                    fill_row(i + 1)
                    col_left[j] += left
                    table[i][j] = 0
                return
            for v in range(min(left, col_left[j]) + 1):
                table[i][j] = v
                col_left[j] -= v
                cell(j + 1, left - v)
                col_left[j] += v
                table[i][j] = 0

        cell(0, row_sums[i])

    fill_row(0)
    return out


@lru_cache(maxsize=None)
def emi_bruteforce(row_sums: tuple, col_sums: tuple) -> float:
    """Exact E[MI] by exhaustive enumeration of fixed-margin tables.

    Each table is weighted by its multivariate hypergeometric
    probability, computed in exact rational arithmetic.
    """
    n = sum(row_sums)
    assert n == sum(col_sums)
    fact = math.factorial
    prefactor = Fraction(1)
    for ai in row_sums:
        prefactor *= fact(ai)
    for bj in col_sums:
        prefactor *= fact(bj)
    total_p = Fraction(0)
    emi = 0.0
    for table in _enumerate_tables(row_sums, col_sums):
        denom = Fraction(fact(n))
        for row in table:
            for v in row:
                denom *= fact(v)
        p = prefactor / denom
        total_p += p
        mi = 0.0
        for i, ai in enumerate(row_sums):
            for j, bj in enumerate(col_sums):
                v = table[i][j]
                if v > 0:
                    mi += v / n * math.log(n * v / (ai * bj))
        emi += float(p) * mi
    assert abs(float(total_p) - 1.0) < 1e-12
    return emi


def ami_bruteforce(a, b, normalizer="arithmetic"):
    mi = mi_bruteforce(a, b)
    row_sums = tuple(sorted(Counter(a).values()))
    col_sums = tuple(sorted(Counter(b).values()))
    emi = emi_bruteforce(row_sums, col_sums)
    h_a = entropy_bruteforce(a)
    h_b = entropy_bruteforce(b)
    norm = (h_a + h_b) / 2 if normalizer == "arithmetic" else max(h_a, h_b)
    denom = norm - emi
    if abs(denom) < 1e-12:
        joint = Counter(zip(a, b))
        rows_hit = Counter(ka for ka, _ in joint)
        cols_hit = Counter(kb for _, kb in joint)
        identical = all(v == 1 for v in rows_hit.values()) and all(
            v == 1 for v in cols_hit.values()
        )
        return 1.0 if identical else 0.0
    return (mi - emi) / denom


def _dist(p, q):
    return math.sqrt(sum((x - y) ** 2 for x, y in zip(p, q)))


def db_bruteforce(points, labels):
    clusters = sorted(set(labels))
    members = {c: [p for p, l in zip(points, labels) if l == c] for c in clusters}
    cents = {
        c: [sum(col) / len(ms) for col in zip(*ms)] for c, ms in members.items()
    }
    spread = {
        c: sum(_dist(p, cents[c]) for p in ms) / len(ms) for c, ms in members.items()
    }
    worst = []
    for ci in clusters:
        ratios = [
            (spread[ci] + spread[cj]) / _dist(cents[ci], cents[cj])
            for cj in clusters
            if cj != ci
        ]
        worst.append(max(ratios))
    return sum(worst) / len(worst)


def silhouette_bruteforce(points, labels):
    n = len(points)
    clusters = sorted(set(labels))
    scores = []
    for i in range(n):
        own = labels[i]
        own_others = [j for j in range(n) if j != i and labels[j] == own]
        if not own_others:
            scores.append(0.0)
            continue
        a = sum(_dist(points[i], points[j]) for j in own_others) / len(own_others)
        b = min(
            sum(_dist(points[i], points[j]) for j in range(n) if labels[j] == c)
            / sum(1 for j in range(n) if labels[j] == c)
            for c in clusters
            if c != own
        )
        m = max(a, b)
        scores.append(0.0 if m == 0 else (b - a) / m)
    return sum(scores) / n


def kmeans_bruteforce(points, k):
    """Minimum inertia over every assignment into at most k clusters."""
    n = len(points)
    best = math.inf
    for assignment in product(range(k), repeat=n):
        inertia = 0.0
        for c in range(k):
            members = [points[i] for i in range(n) if assignment[i] == c]
            if members:
                mean = sum(members) / len(members)
                inertia += sum((p - mean) ** 2 for p in members)
        if inertia < best:
            best = inertia
    return best


def perplexity_bruteforce(p_row):
    h = -sum(p * math.log2(p) for p in p_row if p > 0)
    return 2.0**h
