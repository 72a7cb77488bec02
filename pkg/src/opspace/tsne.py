"""Exact (quadratic) t-SNE projection of operation points to 2-D.

Gaussian input affinities are calibrated per point by binary search on
the precision, symmetrized and normalized; the 2-D layout minimizes
KL(P||Q) against Student-t affinities by gradient descent with momentum,
adaptive per-component gains and early exaggeration. After the
exaggeration phase the step is safeguarded: a proposed update that would
increase the KL is halved until it does not (standing still in the
worst case), which makes the recorded KL trajectory non-increasing from
that point on.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import artifacts, kernels

# Iterations of the early-exaggeration phase; the momentum switch from
# 0.5 to 0.8 happens at the same point.
EXAGGERATION_ITERS = 250
_INITIAL_MOMENTUM = 0.5
_FINAL_MOMENTUM = 0.8
_MIN_GAIN = 0.01
_INIT_STDDEV = 1e-4
_MAX_BACKTRACKS = 32


@dataclass
class TsneConfig:
    perplexity: float = 30.0
    iterations: int = 1000
    early_exaggeration: float = 12.0
    learning_rate: float = 200.0
    seed: int = 0

    def __post_init__(self):
        if self.perplexity <= 1.0:
            raise ValueError(f"perplexity must be > 1, got {self.perplexity}")
        if self.iterations <= 0 or self.early_exaggeration <= 0 or self.learning_rate <= 0:
            raise ValueError("iterations, early_exaggeration and learning_rate must be positive")


@dataclass
class Projection2D:
    coords: np.ndarray  # n x 2
    kl_history: list[float] = field(default_factory=list)


def perplexity_calibration(
    distances_row, perplexity: float
) -> tuple[float, np.ndarray]:
    """Calibrate one point's Gaussian bandwidth to a target perplexity.

    distances_row holds the squared distances to every other point.
    Binary-searches the precision until the perplexity of the induced
    distribution matches the target within 1e-5 on the log2 scale (or 64
    iterations). Returns (sigma, p_row) with p_row summing to 1.
    """
    row = np.asarray(distances_row, dtype=np.float64)
    if row.ndim != 1 or row.shape[0] == 0:
        raise ValueError("distances_row must be a non-empty 1-d array")
    if np.max(row) <= 0.0:
        raise ValueError("degenerate distance row: all distances are zero")
    target = np.log2(perplexity)
    shifted = row - row.min()  # scale-invariant, avoids exp underflow
    beta = 1.0
    lo: float | None = None
    hi: float | None = None
    p = np.full_like(row, 1.0 / row.shape[0])
    for _ in range(64):
        p = np.exp(-beta * shifted)
        p /= p.sum()
        nz = p[p > 0]
        h_bits = float(-(nz * np.log2(nz)).sum())
        diff = h_bits - target
        if abs(diff) < 1e-5:
            break
        if diff > 0:  # too spread out: tighten
            lo = beta
            beta = beta * 2.0 if hi is None else (beta + hi) / 2.0
        else:
            hi = beta
            beta = beta / 2.0 if lo is None else (beta + lo) / 2.0
    return float(np.sqrt(1.0 / (2.0 * beta))), p


def joint_affinities(points, perplexity: float) -> np.ndarray:
    """Symmetrized, normalized input affinity matrix P (sums to 1)."""
    x = np.ascontiguousarray(points, dtype=np.float64)
    n = x.shape[0]
    d2 = kernels.pairwise_sq_dists(x)
    p_cond = np.zeros((n, n))
    others = ~np.eye(n, dtype=bool)
    for i in range(n):
        row = d2[i][others[i]]
        try:
            _, p_row = perplexity_calibration(row, perplexity)
        except ValueError as exc:
            raise ValueError(f"point {i}: {exc}") from exc
        p_cond[i][others[i]] = p_row
    return (p_cond + p_cond.T) / (2.0 * n)


def tsne(points, config: TsneConfig) -> Projection2D:
    """Project points to 2-D, recording the KL divergence per iteration."""
    x = np.ascontiguousarray(points, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] < 4:
        raise ValueError("need at least 4 points")
    n = x.shape[0]
    if not config.perplexity < n / 3:
        raise ValueError(
            f"perplexity {config.perplexity} too large for {n} points (needs < n/3)"
        )
    p = joint_affinities(x, config.perplexity)
    p_ex = p * config.early_exaggeration
    exag_end = min(EXAGGERATION_ITERS, config.iterations)

    rng = np.random.default_rng(config.seed)
    y = rng.standard_normal((n, 2)) * _INIT_STDDEV
    vel = np.zeros((n, 2))
    gains = np.ones((n, 2))
    history: list[float] = []
    last_kl: float | None = None

    for it in range(config.iterations):
        p_opt = p_ex if it < exag_end else p
        grad, _ = kernels.tsne_grad_kl(y, p_opt, p)
        if not np.all(np.isfinite(grad)):
            raise RuntimeError(f"non-finite gradient at iteration {it}")
        momentum = _INITIAL_MOMENTUM if it < EXAGGERATION_ITERS else _FINAL_MOMENTUM
        agree = (grad > 0) == (vel > 0)
        gains = np.where(agree, gains * 0.8, gains + 0.2)
        np.maximum(gains, _MIN_GAIN, out=gains)
        vel = momentum * vel - config.learning_rate * (gains * grad)
        y_new = y + vel
        y_new -= y_new.mean(axis=0)
        kl_new = kernels.tsne_kl(y_new, p)
        if it >= exag_end and last_kl is not None and kl_new > last_kl:
            accepted = False
            for _ in range(_MAX_BACKTRACKS):
                vel *= 0.5
                y_try = y + vel
                y_try -= y_try.mean(axis=0)
                kl_try = kernels.tsne_kl(y_try, p)
                if kl_try <= last_kl:
                    y_new, kl_new = y_try, kl_try
                    accepted = True
                    break
            if not accepted:
                y_new = y
                kl_new = last_kl
                vel[:] = 0.0
        y = y_new
        history.append(kl_new)
        last_kl = kl_new

    return Projection2D(y, history)


def write_projection(
    path: str | Path,
    coords: np.ndarray,
    pattern_ids: Sequence[int],
    cluster_ids: Sequence[int],
    pair_ids: Sequence[int],
    meta: dict | None = None,
    timestamp: str | None = None,
) -> None:
    """TSV dump with columns x, y, pattern_id, cluster_id, pair_id."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as fh:
        for line in artifacts.csv_header_lines(meta, timestamp):
            fh.write(line + "\n")
        fh.write("x\ty\tpattern_id\tcluster_id\tpair_id\n")
        for (px, py), pat, clu, pid in zip(coords, pattern_ids, cluster_ids, pair_ids):
            fh.write(f"{px:.10g}\t{py:.10g}\t{pat}\t{clu}\t{pid}\n")


_PALETTE = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
    "#aec7e8", "#ffbb78", "#98df8a", "#ff9896", "#c5b0d5",
    "#c49c94", "#f7b6d2", "#c7c7c7", "#dbdb8d", "#9edae5",
]


def svg_scatter(
    path: str | Path,
    coords: np.ndarray,
    color_ids: Sequence[int],
    title: str = "",
    size: int = 640,
) -> None:
    """Minimal, byte-stable SVG scatter with one color per class id."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    coords = np.asarray(coords, dtype=np.float64)
    lo = coords.min(axis=0)
    hi = coords.max(axis=0)
    span = np.where(hi - lo > 0, hi - lo, 1.0)
    margin = 24
    inner = size - 2 * margin
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        f'<rect width="{size}" height="{size}" fill="white"/>',
    ]
    if title:
        parts.append(
            f'<text x="{size / 2:.1f}" y="16" text-anchor="middle" '
            f'font-family="sans-serif" font-size="12">{title}</text>'
        )
    for (px, py), cid in zip(coords, color_ids):
        sx = margin + (px - lo[0]) / span[0] * inner
        sy = size - margin - (py - lo[1]) / span[1] * inner
        color = _PALETTE[int(cid) % len(_PALETTE)]
        parts.append(f'<circle cx="{sx:.2f}" cy="{sy:.2f}" r="3" fill="{color}" fill-opacity="0.75"/>')
    parts.append("</svg>")
    path.write_text("\n".join(parts) + "\n", encoding="utf-8")
