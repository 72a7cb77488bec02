# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled numerical kernels; mirrors opspace._kernels_py.

Integer results (lcs_longest) are bit-identical to the fallback; float
kernels use the same tie-breaking rules but may round differently in the
last bits because summation order differs.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport INFINITY, log

cnp.import_array()


def lcs_longest(a, b):
    a32 = np.ascontiguousarray(a, dtype=np.int32)
    b32 = np.ascontiguousarray(b, dtype=np.int32)
    cdef int[::1] av = a32
    cdef int[::1] bv = b32
    cdef Py_ssize_t la = av.shape[0]
    cdef Py_ssize_t lb = bv.shape[0]
    if la == 0 or lb == 0:
        return (0, 0, 0)
    prev_arr = np.zeros(lb + 1, dtype=np.int64)
    cur_arr = np.zeros(lb + 1, dtype=np.int64)
    cdef long long[::1] prev = prev_arr
    cdef long long[::1] cur = cur_arr
    cdef long long[::1] tmp
    cdef Py_ssize_t i, j
    cdef long long best = 0, v
    cdef Py_ssize_t best_end_a = 0, best_start_b = 0
    cdef int ai
    for i in range(la):
        ai = av[i]
        for j in range(lb):
            if bv[j] == ai:
                v = prev[j] + 1
                cur[j + 1] = v
                if v > best:
                    best = v
                    best_end_a = i
                    best_start_b = j - v + 1
            else:
                cur[j + 1] = 0
        tmp = prev
        prev = cur
        cur = tmp
    if best == 0:
        return (0, 0, 0)
    return (int(best_end_a - best + 1), int(best_start_b), int(best))


def assign_points(x, centroids):
    xa = np.ascontiguousarray(x, dtype=np.float64)
    ca = np.ascontiguousarray(centroids, dtype=np.float64)
    cdef double[:, ::1] xv = xa
    cdef double[:, ::1] cv = ca
    cdef Py_ssize_t n = xv.shape[0]
    cdef Py_ssize_t d = xv.shape[1]
    cdef Py_ssize_t k = cv.shape[0]
    labels_arr = np.empty(n, dtype=np.int64)
    sq_arr = np.empty(n, dtype=np.float64)
    cdef long long[::1] lv = labels_arr
    cdef double[::1] sv = sq_arr
    cdef Py_ssize_t i, j, t
    cdef double best, acc, diff
    cdef long long bj
    for i in range(n):
        best = INFINITY
        bj = 0
        for j in range(k):
            acc = 0.0
            for t in range(d):
                diff = xv[i, t] - cv[j, t]
                acc += diff * diff
                if acc >= best:
                    break
            if acc < best:
                best = acc
                bj = j
        lv[i] = bj
        sv[i] = best
    return labels_arr, sq_arr


def pairwise_sq_dists(x):
    xa = np.ascontiguousarray(x, dtype=np.float64)
    cdef double[:, ::1] xv = xa
    cdef Py_ssize_t n = xv.shape[0]
    cdef Py_ssize_t d = xv.shape[1]
    out_arr = np.zeros((n, n), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t i, j, t
    cdef double acc, diff
    for i in range(n):
        for j in range(i + 1, n):
            acc = 0.0
            for t in range(d):
                diff = xv[i, t] - xv[j, t]
                acc += diff * diff
            out[i, j] = acc
            out[j, i] = acc
    return out_arr


def tsne_grad_kl(y, p_opt, p_true):
    ya = np.ascontiguousarray(y, dtype=np.float64)
    pa = np.ascontiguousarray(p_opt, dtype=np.float64)
    ta = np.ascontiguousarray(p_true, dtype=np.float64)
    cdef double[:, ::1] yv = ya
    cdef double[:, ::1] pv = pa
    cdef double[:, ::1] tv = ta
    cdef Py_ssize_t n = yv.shape[0]
    if yv.shape[1] != 2:
        raise ValueError("layout must be n x 2")
    num_arr = np.empty((n, n), dtype=np.float64)
    cdef double[:, ::1] num = num_arr
    grad_arr = np.zeros((n, 2), dtype=np.float64)
    cdef double[:, ::1] grad = grad_arr
    cdef Py_ssize_t i, j
    cdef double dx, dy, v, ssum = 0.0
    cdef double q, w, kl = 0.0, pt
    for i in range(n):
        num[i, i] = 0.0
        for j in range(i + 1, n):
            dx = yv[i, 0] - yv[j, 0]
            dy = yv[i, 1] - yv[j, 1]
            v = 1.0 / (1.0 + dx * dx + dy * dy)
            num[i, j] = v
            num[j, i] = v
            ssum += 2.0 * v
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            q = num[i, j] / ssum
            if q < 1e-12:
                q = 1e-12
            w = (pv[i, j] - q) * num[i, j]
            grad[i, 0] += 4.0 * w * (yv[i, 0] - yv[j, 0])
            grad[i, 1] += 4.0 * w * (yv[i, 1] - yv[j, 1])
            pt = tv[i, j]
            if pt > 0.0:
                kl += pt * log(pt / q)
    return grad_arr, kl


def tsne_kl(y, p_true):
    ya = np.ascontiguousarray(y, dtype=np.float64)
    ta = np.ascontiguousarray(p_true, dtype=np.float64)
    cdef double[:, ::1] yv = ya
    cdef double[:, ::1] tv = ta
    cdef Py_ssize_t n = yv.shape[0]
    num_arr = np.empty((n, n), dtype=np.float64)
    cdef double[:, ::1] num = num_arr
    cdef Py_ssize_t i, j
    cdef double dx, dy, v, ssum = 0.0
    cdef double q, kl = 0.0, pt
    for i in range(n):
        num[i, i] = 0.0
        for j in range(i + 1, n):
            dx = yv[i, 0] - yv[j, 0]
            dy = yv[i, 1] - yv[j, 1]
            v = 1.0 / (1.0 + dx * dx + dy * dy)
            num[i, j] = v
            num[j, i] = v
            ssum += 2.0 * v
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            pt = tv[i, j]
            if pt > 0.0:
                q = num[i, j] / ssum
                if q < 1e-12:
                    q = 1e-12
                kl += pt * log(pt / q)
    return kl
