"""Numerical kernel dispatch.

The hot loops (token LCS, k-means assignment, pairwise distances, t-SNE
gradient) exist twice: a Cython extension and a NumPy fallback with the
same call signatures. The compiled backend is preferred when it imports;
set OPSPACE_KERNELS=python to force the fallback or OPSPACE_KERNELS=cython
to fail loudly when the extension is missing.
"""

from __future__ import annotations

import os

from . import _kernels_py

_requested = os.environ.get("OPSPACE_KERNELS", "auto").lower()

if _requested == "python":
    _impl = _kernels_py
    BACKEND = "python"
elif _requested in ("auto", "cython"):
    try:
        from . import _kernels_cy as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        if _requested == "cython":
            raise
        _impl = _kernels_py
        BACKEND = "python"
else:
    raise ValueError(
        f"OPSPACE_KERNELS must be auto, cython or python, got {_requested!r}"
    )

lcs_longest = _impl.lcs_longest
assign_points = _impl.assign_points
pairwise_sq_dists = _impl.pairwise_sq_dists
tsne_grad_kl = _impl.tsne_grad_kl
tsne_kl = _impl.tsne_kl
