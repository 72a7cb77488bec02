"""NumPy implementations of the hot numerical kernels.

This is the fallback backend used when the compiled extension
(opspace._kernels_cy) is unavailable. Signatures and tie-breaking rules
match the compiled backend exactly; floating-point results may differ in
the last bits because the two backends sum in different orders. Integer
results (the token LCS) are bit-identical across backends.
"""

from __future__ import annotations

import numpy as np


def lcs_longest(a, b):
    """Longest common contiguous run of two int token-id sequences.

    Returns (start_a, start_b, length), with length 0 when the sequences
    share no token. Ties break toward the longest run, then the smallest
    start_a, then the smallest start_b. Callers exclude tokens from
    matching by encoding them as a different negative id per side.
    """
    a = np.ascontiguousarray(a, dtype=np.int32)
    b = np.ascontiguousarray(b, dtype=np.int32)
    la, lb = a.shape[0], b.shape[0]
    if la == 0 or lb == 0:
        return (0, 0, 0)
    best_len = 0
    best_end_a = 0
    best_start_b = 0
    prev = np.zeros(lb, dtype=np.int64)
    shifted = np.empty(lb, dtype=np.int64)
    for i in range(la):
        eq = b == a[i]
        shifted[0] = 0
        shifted[1:] = prev[:-1]
        cur = np.where(eq, shifted + 1, 0)
        m = int(cur.max())
        if m > best_len:
            j = int(np.argmax(cur))
            best_len = m
            best_end_a = i
            best_start_b = j - m + 1
        prev = cur
    if best_len == 0:
        return (0, 0, 0)
    return (best_end_a - best_len + 1, best_start_b, best_len)


def assign_points(x, centroids):
    """Nearest-centroid assignment under squared Euclidean distance.

    Returns (labels int64[n], sqdist float64[n]). Ties go to the smallest
    centroid index.
    """
    x = np.ascontiguousarray(x, dtype=np.float64)
    c = np.ascontiguousarray(centroids, dtype=np.float64)
    d = x @ c.T
    d *= -2.0
    d += np.einsum("ij,ij->i", x, x)[:, None]
    d += np.einsum("ij,ij->i", c, c)[None, :]
    np.maximum(d, 0.0, out=d)
    labels = np.argmin(d, axis=1)
    sq = d[np.arange(x.shape[0]), labels]
    return labels.astype(np.int64), sq


def pairwise_sq_dists(x):
    """Full n x n matrix of squared Euclidean distances, zero diagonal."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    sq = np.einsum("ij,ij->i", x, x)
    d = x @ x.T
    d *= -2.0
    d += sq[:, None]
    d += sq[None, :]
    np.maximum(d, 0.0, out=d)
    np.fill_diagonal(d, 0.0)
    return d


def _student_t_affinities(y):
    num = 1.0 / (1.0 + pairwise_sq_dists(y))
    np.fill_diagonal(num, 0.0)
    q = num / num.sum()
    np.maximum(q, 1e-12, out=q)
    return num, q


def tsne_grad_kl(y, p_opt, p_true):
    """One t-SNE evaluation: gradient of KL(p_opt||Q) at y and KL(p_true||Q).

    Q is the normalized Student-t affinity matrix of the 2-D layout y,
    with zeroed diagonal and a 1e-12 floor.
    """
    y = np.ascontiguousarray(y, dtype=np.float64)
    num, q = _student_t_affinities(y)
    pq = (p_opt - q) * num
    grad = 4.0 * (pq.sum(axis=1)[:, None] * y - pq @ y)
    mask = p_true > 0.0
    kl = float(np.sum(p_true[mask] * np.log(p_true[mask] / q[mask])))
    return grad, kl


def tsne_kl(y, p_true):
    """KL(p_true||Q) for the layout y (same Q convention as tsne_grad_kl)."""
    y = np.ascontiguousarray(y, dtype=np.float64)
    _, q = _student_t_affinities(y)
    mask = p_true > 0.0
    return float(np.sum(p_true[mask] * np.log(p_true[mask] / q[mask])))
