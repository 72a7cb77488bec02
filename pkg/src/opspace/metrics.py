"""Cluster validity metrics.

External metrics compare a predicted clustering against ground-truth
classes (adjusted Rand index, homogeneity/completeness/V-measure,
adjusted mutual information); internal indices judge a clustering from
geometry alone (Davies-Bouldin, silhouette). All entropies use natural
logarithms; the expected mutual information is computed exactly from the
hypergeometric model with log-factorial tables, never sampled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels

# Tolerance for detecting a zero AMI denominator; entropy magnitudes are
# O(ln n) so this is far below any non-degenerate gap.
_DEGENERATE_EPS = 1e-12


@dataclass
class MetricReport:
    ari: float
    homogeneity: float
    completeness: float
    v_measure: float
    ami: float
    davies_bouldin: float | None = None
    silhouette: float | None = None

    def as_dict(self) -> dict:
        return {
            "ari": self.ari,
            "homogeneity": self.homogeneity,
            "completeness": self.completeness,
            "v_measure": self.v_measure,
            "ami": self.ami,
            "davies_bouldin": self.davies_bouldin,
            "silhouette": self.silhouette,
        }


def contingency_table(true_labels, pred_labels) -> np.ndarray:
    """Counts n_ij of points with true class i and predicted cluster j."""
    a = np.asarray(true_labels)
    b = np.asarray(pred_labels)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError("label sequences must be equal-length 1-d arrays")
    if a.shape[0] < 2:
        raise ValueError("need at least two labelled points")
    _, ai = np.unique(a, return_inverse=True)
    _, bi = np.unique(b, return_inverse=True)
    r = int(ai.max()) + 1
    c = int(bi.max()) + 1
    counts = np.zeros((r, c), dtype=np.int64)
    np.add.at(counts, (ai, bi), 1)
    return counts


def _comb2(x: np.ndarray) -> np.ndarray:
    x = x.astype(np.float64)
    return x * (x - 1.0) / 2.0


def adjusted_rand_index(true_labels, pred_labels) -> float:
    """Pair-counting agreement, adjusted for chance.

    1 for identical partitions up to relabeling; near 0 in expectation
    for independent labelings. When the adjustment denominator is zero
    (both partitions all singletons or all one cluster) returns 1.
    """
    counts = contingency_table(true_labels, pred_labels)
    n = counts.sum()
    index = _comb2(counts).sum()
    sum_a = _comb2(counts.sum(axis=1)).sum()
    sum_b = _comb2(counts.sum(axis=0)).sum()
    total = _comb2(np.asarray([n]))[0]
    expected = sum_a * sum_b / total
    max_index = (sum_a + sum_b) / 2.0
    denom = max_index - expected
    if denom == 0.0:
        return 1.0
    return float((index - expected) / denom)


def _entropy(counts: np.ndarray) -> float:
    """Entropy in nats of a count vector."""
    n = counts.sum()
    nz = counts[counts > 0].astype(np.float64)
    p = nz / n
    return float(-(p * np.log(p)).sum())


def _conditional_entropy(counts: np.ndarray) -> float:
    """H(rows | columns) in nats from a contingency table."""
    n = counts.sum()
    col = counts.sum(axis=0).astype(np.float64)
    total = 0.0
    for j in range(counts.shape[1]):
        if col[j] == 0:
            continue
        nz = counts[:, j][counts[:, j] > 0].astype(np.float64)
        total += float(-(nz / n * np.log(nz / col[j])).sum())
    return total


def homogeneity_completeness_v(true_labels, pred_labels) -> tuple[float, float, float]:
    """Homogeneity, completeness and their harmonic mean (V-measure).

    h = 1 - H(C|K)/H(C) with h = 1 when H(C) = 0; c symmetric; V is
    defined 0 when h + c = 0.
    """
    counts = contingency_table(true_labels, pred_labels)
    h_c = _entropy(counts.sum(axis=1))
    h_k = _entropy(counts.sum(axis=0))
    h = 1.0 if h_c == 0.0 else 1.0 - _conditional_entropy(counts) / h_c
    c = 1.0 if h_k == 0.0 else 1.0 - _conditional_entropy(counts.T) / h_k
    v = 0.0 if h + c == 0.0 else 2.0 * h * c / (h + c)
    return float(h), float(c), float(v)


def mutual_information(true_labels, pred_labels) -> float:
    """Raw mutual information in nats (debug output for the AMI)."""
    counts = contingency_table(true_labels, pred_labels)
    return _mi_from_contingency(counts)


def _mi_from_contingency(counts: np.ndarray) -> float:
    n = counts.sum()
    a = counts.sum(axis=1).astype(np.float64)
    b = counts.sum(axis=0).astype(np.float64)
    mi = 0.0
    for i in range(counts.shape[0]):
        for j in range(counts.shape[1]):
            nij = counts[i, j]
            if nij > 0:
                mi += nij / n * math.log(n * nij / (a[i] * b[j]))
    return float(mi)


def expected_mutual_information(row_sums, col_sums, n: int) -> float:
    """Exact E[MI] under the fixed-margin hypergeometric model.

    Closed-form sum over per-cell occupancy counts, evaluated with
    log-factorials (math.lgamma); no sampling.
    """
    a = np.asarray(row_sums, dtype=np.int64)
    b = np.asarray(col_sums, dtype=np.int64)
    lf = np.concatenate(([0.0], np.cumsum(np.log(np.arange(1, n + 1)))))
    log_n = math.log(n)
    emi = 0.0
    for ai in a:
        for bj in b:
            lo = max(1, ai + bj - n)
            hi = min(ai, bj)
            for nij in range(lo, hi + 1):
                log_w = (
                    lf[ai]
                    + lf[bj]
                    + lf[n - ai]
                    + lf[n - bj]
                    - lf[n]
                    - lf[nij]
                    - lf[ai - nij]
                    - lf[bj - nij]
                    - lf[n - ai - bj + nij]
                )
                term = nij / n * (log_n + math.log(nij) - math.log(ai) - math.log(bj))
                emi += term * math.exp(log_w)
    return float(emi)


def _partitions_identical(counts: np.ndarray) -> bool:
    """True when the two partitions are equal up to relabeling."""
    return bool(
        np.all((counts > 0).sum(axis=0) == 1) and np.all((counts > 0).sum(axis=1) == 1)
    )


def adjusted_mutual_information(
    true_labels, pred_labels, normalizer: str = "arithmetic"
) -> float:
    """Mutual information adjusted for chance.

    AMI = (MI - E[MI]) / (norm - E[MI]) with norm the arithmetic mean of
    the two label entropies ("max" picks the larger instead). When the
    denominator vanishes, returns 1 for identical partitions and 0
    otherwise (continuity convention).
    """
    counts = contingency_table(true_labels, pred_labels)
    n = int(counts.sum())
    mi = _mi_from_contingency(counts)
    emi = expected_mutual_information(counts.sum(axis=1), counts.sum(axis=0), n)
    h_true = _entropy(counts.sum(axis=1))
    h_pred = _entropy(counts.sum(axis=0))
    if normalizer == "arithmetic":
        norm = (h_true + h_pred) / 2.0
    elif normalizer == "max":
        norm = max(h_true, h_pred)
    else:
        raise ValueError(f"normalizer must be 'arithmetic' or 'max', got {normalizer!r}")
    denom = norm - emi
    if abs(denom) < _DEGENERATE_EPS:
        return 1.0 if _partitions_identical(counts) else 0.0
    return float((mi - emi) / denom)


def _cluster_index(labels) -> tuple[np.ndarray, int]:
    labels = np.asarray(labels)
    _, inverse = np.unique(labels, return_inverse=True)
    return inverse, int(inverse.max()) + 1


def davies_bouldin(points, labels) -> float:
    """Mean over clusters of the worst (S_i + S_j) / M_ij ratio.

    S_i is the mean Euclidean distance of cluster i's points to their
    centroid (mean of the cluster), M_ij the centroid distance. Requires
    k >= 2; coincident centroids are a contract violation, not a guard
    case.
    """
    x = np.asarray(points, dtype=np.float64)
    if x.ndim != 2:
        raise ValueError("points must be a 2-d array")
    inverse, k = _cluster_index(labels)
    if k < 2:
        raise ValueError(f"Davies-Bouldin needs at least 2 clusters, got {k}")
    centroids = np.zeros((k, x.shape[1]))
    np.add.at(centroids, inverse, x)
    sizes = np.bincount(inverse, minlength=k).astype(np.float64)
    centroids /= sizes[:, None]
    diff = x - centroids[inverse]
    dist = np.sqrt(np.einsum("ij,ij->i", diff, diff))
    s = np.zeros(k)
    np.add.at(s, inverse, dist)
    s /= sizes
    m = np.sqrt(kernels.pairwise_sq_dists(centroids))
    off_diag = ~np.eye(k, dtype=bool)
    if np.any(m[off_diag] == 0.0):
        raise ValueError("two clusters have coincident centroids")
    ratio = (s[:, None] + s[None, :]) / np.where(off_diag, m, np.inf)
    return float(np.max(ratio, axis=1).mean())


def silhouette(points, labels) -> float:
    """Mean silhouette coefficient over all points.

    s(i) = (b_i - a_i) / max(a_i, b_i), with a_i the mean intra-cluster
    distance excluding self and b_i the smallest mean distance to another
    cluster. Points in singleton clusters score 0. Requires
    2 <= k <= n - 1.
    """
    x = np.asarray(points, dtype=np.float64)
    inverse, k = _cluster_index(labels)
    n = x.shape[0]
    if not 2 <= k <= n - 1:
        raise ValueError(f"silhouette needs 2 <= k <= n-1, got k={k} n={n}")
    d = np.sqrt(kernels.pairwise_sq_dists(x))
    sizes = np.bincount(inverse, minlength=k).astype(np.float64)
    # Sum of distances from each point to every cluster.
    totals = np.zeros((n, k))
    for cid in range(k):
        totals[:, cid] = d[:, inverse == cid].sum(axis=1)
    own = inverse
    scores = np.zeros(n)
    for i in range(n):
        cid = own[i]
        if sizes[cid] == 1:
            scores[i] = 0.0
            continue
        a = totals[i, cid] / (sizes[cid] - 1)
        other = [totals[i, c] / sizes[c] for c in range(k) if c != cid]
        b = min(other)
        m = max(a, b)
        scores[i] = 0.0 if m == 0.0 else (b - a) / m
    return float(scores.mean())


def compute_report(
    true_labels,
    pred_labels,
    points=None,
    ami_normalizer: str = "arithmetic",
) -> MetricReport:
    """All external metrics, plus internal indices when they are defined."""
    h, c, v = homogeneity_completeness_v(true_labels, pred_labels)
    report = MetricReport(
        ari=adjusted_rand_index(true_labels, pred_labels),
        homogeneity=h,
        completeness=c,
        v_measure=v,
        ami=adjusted_mutual_information(true_labels, pred_labels, ami_normalizer),
    )
    if points is not None:
        x = np.asarray(points, dtype=np.float64)
        _, k = _cluster_index(pred_labels)
        n = x.shape[0]
        if k >= 2:
            try:
                report.davies_bouldin = davies_bouldin(x, pred_labels)
            except ValueError:
                report.davies_bouldin = None
        if 2 <= k <= n - 1:
            report.silhouette = silhouette(x, pred_labels)
    return report
