"""Restart-robust k-means, per-pattern inertia, and optimal-k search.

k-means runs Lloyd iterations from k-means++ seeds, keeps the best of R
restarts by total inertia, and is deterministic for a given seed. Points
are canonically ordered internally (lexicographic row sort) so results do
not depend on the input permutation. Restart r draws its random stream
from SeedSequence(seed, spawn_key=(r,)), so nested restart prefixes share
their streams and best-of-R inertia is non-increasing in R.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import kernels
from .metrics import davies_bouldin, silhouette
from .ops import OperationPoint
from .patterns import PatternGroup, sort_groups


@dataclass
class Clustering:
    k: int
    assignment: np.ndarray  # int64[n], cluster id per point
    centroids: np.ndarray  # float64[k, d]
    total_inertia: float
    inertia_history: list[float] = field(default_factory=list)
    n_iter: int = 0

    def recomputed_inertia(self, points: np.ndarray) -> float:
        x = np.asarray(points, dtype=np.float64)
        diff = x - self.centroids[self.assignment]
        return float(np.einsum("ij,ij->", diff, diff))


@dataclass
class PatternInertia:
    pattern_id: int
    value: float
    size: int


def _direct_sqdist(x: np.ndarray, centroids: np.ndarray, labels: np.ndarray) -> np.ndarray:
    diff = x - centroids[labels]
    return np.einsum("ij,ij->i", diff, diff)


def _kmeans_pp(x: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = x.shape[0]
    centers = np.empty((k, x.shape[1]), dtype=np.float64)
    idx = int(rng.integers(n))
    centers[0] = x[idx]
    diff = x - centers[0]
    d2 = np.einsum("ij,ij->i", diff, diff)
    for j in range(1, k):
        probs = d2 / d2.sum()
        idx = int(rng.choice(n, p=probs))
        centers[j] = x[idx]
        diff = x - centers[j]
        np.minimum(d2, np.einsum("ij,ij->i", diff, diff), out=d2)
    return centers


def _repair_empty(
    labels: np.ndarray, sqd: np.ndarray, k: int, centroids: np.ndarray | None, x: np.ndarray
) -> None:
    """Turn the farthest point into a singleton for each empty cluster.

    Points that are the last member of their cluster are not eligible,
    so a repair can never empty another cluster.
    """
    counts = np.bincount(labels, minlength=k)
    for cid in np.flatnonzero(counts == 0):
        candidates = np.where(counts[labels] >= 2, sqd, -1.0)
        far = int(np.argmax(candidates))
        counts[labels[far]] -= 1
        labels[far] = cid
        counts[cid] += 1
        sqd[far] = 0.0
        if centroids is not None:
            centroids[cid] = x[far]


def _lloyd(
    x: np.ndarray, k: int, rng: np.random.Generator, max_iter: int, tol: float
) -> tuple[np.ndarray, np.ndarray, float, list[float], int]:
    n, d = x.shape
    centroids = _kmeans_pp(x, k, rng)
    history: list[float] = []
    n_iter = 0
    for _ in range(max_iter):
        n_iter += 1
        labels, _ = kernels.assign_points(x, centroids)
        sqd = _direct_sqdist(x, centroids, labels)
        _repair_empty(labels, sqd, k, None, x)
        inertia = float(sqd.sum())
        if history and inertia > history[-1] * (1 + 1e-9) + 1e-12:
            raise AssertionError(
                f"inertia increased within a Lloyd run: {history[-1]} -> {inertia}"
            )
        history.append(inertia)
        new_centroids = np.zeros((k, d), dtype=np.float64)
        np.add.at(new_centroids, labels, x)
        counts = np.bincount(labels, minlength=k).astype(np.float64)
        new_centroids /= counts[:, None]
        moved = new_centroids - centroids
        shift = float(np.sqrt(np.einsum("ij,ij->i", moved, moved).max()))
        centroids = new_centroids
        if shift < tol:
            break
    # Final assignment against the converged centroids.
    labels, _ = kernels.assign_points(x, centroids)
    sqd = _direct_sqdist(x, centroids, labels)
    _repair_empty(labels, sqd, k, centroids, x)
    inertia = float(sqd.sum())
    history.append(inertia)
    return labels, centroids, inertia, history, n_iter


def kmeans(
    points,
    k: int,
    *,
    restarts: int = 100,
    max_iter: int = 300,
    tol: float = 1e-6,
    seed: int,
) -> Clustering:
    """Best-of-restarts Lloyd k-means with k-means++ seeding.

    Requires k between 1 and the number of distinct points. Empty
    clusters are repaired by promoting the point farthest from its
    centroid to a singleton.
    """
    x = np.ascontiguousarray(points, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] == 0:
        raise ValueError("points must be a non-empty 2-d array")
    if not np.all(np.isfinite(x)):
        raise ValueError("points contain non-finite values")
    if k <= 0:
        raise ValueError(f"k must be positive, got {k}")
    if restarts < 1:
        raise ValueError(f"restarts must be >= 1, got {restarts}")
    distinct = np.unique(x, axis=0).shape[0]
    if k > distinct:
        raise ValueError(f"k={k} exceeds the number of distinct points ({distinct})")

    order = np.lexsort(x.T[::-1])
    xs = x[order]
    best: tuple[float, int] | None = None
    best_result = None
    for r in range(restarts):
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(r,)))
        labels_s, centroids, inertia, history, n_iter = _lloyd(xs, k, rng, max_iter, tol)
        if best is None or inertia < best[0]:
            best = (inertia, r)
            best_result = (labels_s, centroids, inertia, history, n_iter)
    assert best_result is not None
    labels_s, centroids, inertia, history, n_iter = best_result
    labels = np.empty_like(labels_s)
    labels[order] = labels_s
    return Clustering(k, labels, centroids, inertia, history, n_iter)


def pattern_inertia(
    points: Sequence[OperationPoint], clustering: Clustering
) -> list[PatternInertia]:
    """Mean squared distance to the assigned centroid, per pattern.

    Sorted by descending value; the noisiest patterns come first.
    """
    x = np.stack([pt.vector for pt in points]).astype(np.float64)
    if x.shape[0] != clustering.assignment.shape[0]:
        raise ValueError("clustering does not cover the given points")
    sqd = _direct_sqdist(x, clustering.centroids, clustering.assignment)
    sums: dict[int, float] = {}
    sizes: dict[int, int] = {}
    for pt, dist in zip(points, sqd):
        sums[pt.pattern_id] = sums.get(pt.pattern_id, 0.0) + float(dist)
        sizes[pt.pattern_id] = sizes.get(pt.pattern_id, 0) + 1
    result = [
        PatternInertia(pid, sums[pid] / sizes[pid], sizes[pid]) for pid in sums
    ]
    result.sort(key=lambda r: (-r.value, r.pattern_id))
    return result


def remove_noisy_patterns(
    groups: Sequence[PatternGroup],
    inertias: Sequence[PatternInertia],
    top_n: int,
) -> list[PatternGroup]:
    """Drop the top_n highest-inertia patterns from the group list."""
    ordered = sort_groups(groups)
    if top_n < 0:
        raise ValueError(f"top_n must be >= 0, got {top_n}")
    if top_n >= len(ordered):
        raise ValueError(
            f"top_n={top_n} must be smaller than the number of groups ({len(ordered)})"
        )
    ranked = sorted(inertias, key=lambda r: (-r.value, r.pattern_id))
    removed = {r.pattern_id for r in ranked[:top_n]}
    return [g for pid, g in enumerate(ordered) if pid not in removed]


@dataclass
class KSelectionEntry:
    k: int
    davies_bouldin: float
    silhouette: float


@dataclass
class KSelectionReport:
    entries: list[KSelectionEntry]
    best_davies_bouldin_k: int  # argmin
    best_silhouette_k: int  # argmax
    agree: bool


def select_k(
    points,
    k_min: int = 2,
    k_max: int = 30,
    *,
    restarts: int = 100,
    seed: int,
    max_iter: int = 300,
    tol: float = 1e-6,
) -> KSelectionReport:
    """Scan k in [k_min, k_max], scoring both internal validity indices.

    Each k gets its own derived seed so the scan is deterministic and
    independent of the range bounds. Recommends argmin Davies-Bouldin and
    argmax Silhouette separately and flags whether they agree.
    """
    x = np.ascontiguousarray(points, dtype=np.float64)
    if k_min < 2:
        raise ValueError(f"k_min must be >= 2, got {k_min}")
    if k_max < k_min:
        raise ValueError(f"k_max={k_max} < k_min={k_min}")
    distinct = np.unique(x, axis=0).shape[0]
    if k_max > distinct:
        raise ValueError(f"k_max={k_max} exceeds the number of distinct points ({distinct})")
    entries: list[KSelectionEntry] = []
    for k in range(k_min, k_max + 1):
        k_seed = int(np.random.SeedSequence(seed, spawn_key=(k,)).generate_state(1)[0])
        clustering = kmeans(
            x, k, restarts=restarts, max_iter=max_iter, tol=tol, seed=k_seed
        )
        entries.append(
            KSelectionEntry(
                k,
                davies_bouldin(x, clustering.assignment),
                silhouette(x, clustering.assignment),
            )
        )
    best_db = min(entries, key=lambda e: (e.davies_bouldin, e.k)).k
    best_sil = max(entries, key=lambda e: (e.silhouette, -e.k)).k
    return KSelectionReport(entries, best_db, best_sil, best_db == best_sil)
