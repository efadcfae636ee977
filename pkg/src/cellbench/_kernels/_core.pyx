# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled hot kernels. Must agree with ``_fallback`` (the reference)."""

import numpy as np

cimport cython
from libc.math cimport floor


def label_overlap(a, b):
    """Co-occurrence histogram; see ``_fallback.label_overlap``."""
    a_arr = np.ascontiguousarray(a, dtype=np.int64).ravel()
    b_arr = np.ascontiguousarray(b, dtype=np.int64).ravel()
    cdef long long[::1] av = a_arr
    cdef long long[::1] bv = b_arr
    cdef Py_ssize_t n = av.shape[0]
    cdef long long na = 1, nb = 1
    cdef Py_ssize_t i
    for i in range(n):
        if av[i] >= na:
            na = av[i] + 1
        if bv[i] >= nb:
            nb = bv[i] + 1
    counts = np.zeros((na, nb), dtype=np.int64)
    cdef long long[:, ::1] cv = counts
    for i in range(n):
        cv[av[i], bv[i]] += 1
    return counts


cdef Py_ssize_t _find(Py_ssize_t[::1] parent, Py_ssize_t i) noexcept nogil:
    cdef Py_ssize_t root = i, nxt
    while parent[root] != root:
        root = parent[root]
    while parent[i] != root:
        nxt = parent[i]
        parent[i] = root
        i = nxt
    return root


def connected_components_4(labels):
    """4-connected per-label components; see ``_fallback``."""
    lab = np.ascontiguousarray(labels, dtype=np.int64)
    cdef long long[:, ::1] lv = lab
    cdef Py_ssize_t h = lv.shape[0], w = lv.shape[1]
    parent_arr = np.arange(h * w, dtype=np.intp)
    cdef Py_ssize_t[::1] parent = parent_arr
    cdef Py_ssize_t y, x, i, ra, rb
    with nogil:
        for y in range(h):
            for x in range(w):
                if lv[y, x] <= 0:
                    continue
                i = y * w + x
                if x > 0 and lv[y, x - 1] == lv[y, x]:
                    ra = _find(parent, i)
                    rb = _find(parent, i - 1)
                    if ra != rb:
                        if ra < rb:
                            parent[rb] = ra
                        else:
                            parent[ra] = rb
                if y > 0 and lv[y - 1, x] == lv[y, x]:
                    ra = _find(parent, i)
                    rb = _find(parent, i - w)
                    if ra != rb:
                        if ra < rb:
                            parent[rb] = ra
                        else:
                            parent[ra] = rb
    out = np.zeros((h, w), dtype=np.int32)
    cdef int[:, ::1] ov = out
    ids_arr = np.zeros(h * w, dtype=np.int32)
    cdef int[::1] ids = ids_arr
    cdef int count = 0
    cdef Py_ssize_t root
    with nogil:
        for y in range(h):
            for x in range(w):
                if lv[y, x] <= 0:
                    continue
                root = _find(parent, y * w + x)
                if ids[root] == 0:
                    count += 1
                    ids[root] = count
                ov[y, x] = ids[root]
    return out, count


def heat_diffusion(mask, Py_ssize_t seed_y, Py_ssize_t seed_x, Py_ssize_t n_iter):
    """Jacobi heat diffusion on a mask; see ``_fallback.heat_diffusion``."""
    mask_arr = np.ascontiguousarray(mask, dtype=bool)
    ys_arr, xs_arr = np.nonzero(mask_arr)
    ys_arr = np.ascontiguousarray(ys_arr, dtype=np.intp)
    xs_arr = np.ascontiguousarray(xs_arr, dtype=np.intp)
    cdef Py_ssize_t[::1] ys = ys_arr
    cdef Py_ssize_t[::1] xs = xs_arr
    T_arr = np.zeros(mask_arr.shape, dtype=np.float64)
    Tn_arr = np.zeros(mask_arr.shape, dtype=np.float64)
    cdef double[:, ::1] T = T_arr
    cdef double[:, ::1] Tn = Tn_arr
    cdef Py_ssize_t npix = ys.shape[0]
    cdef Py_ssize_t it, k, y, x
    cdef double s
    with nogil:
        for it in range(n_iter):
            T[seed_y, seed_x] += 1.0
            for k in range(npix):
                y = ys[k]
                x = xs[k]
                s = (
                    T[y - 1, x - 1]
                    + T[y - 1, x]
                    + T[y - 1, x + 1]
                    + T[y, x - 1]
                    + T[y, x]
                    + T[y, x + 1]
                    + T[y + 1, x - 1]
                    + T[y + 1, x]
                    + T[y + 1, x + 1]
                )
                Tn[y, x] = s / 9.0
            for k in range(npix):
                T[ys[k], xs[k]] = Tn[ys[k], xs[k]]
    return T_arr


def flow_advect(flow_y, flow_x, ys, xs, Py_ssize_t n_iter, double step=1.0):
    """Euler advection with nearest-pixel lookup; see ``_fallback``."""
    fy_arr = np.ascontiguousarray(flow_y, dtype=np.float64)
    fx_arr = np.ascontiguousarray(flow_x, dtype=np.float64)
    y_arr = np.array(ys, dtype=np.float64, copy=True).ravel()
    x_arr = np.array(xs, dtype=np.float64, copy=True).ravel()
    cdef double[:, ::1] fy = fy_arr
    cdef double[:, ::1] fx = fx_arr
    cdef double[::1] y = y_arr
    cdef double[::1] x = x_arr
    cdef Py_ssize_t h = fy.shape[0], w = fy.shape[1]
    cdef Py_ssize_t n = y.shape[0]
    cdef Py_ssize_t it, k, iy, ix
    cdef double v
    with nogil:
        for it in range(n_iter):
            for k in range(n):
                iy = <Py_ssize_t>floor(y[k] + 0.5)
                if iy < 0:
                    iy = 0
                elif iy > h - 1:
                    iy = h - 1
                ix = <Py_ssize_t>floor(x[k] + 0.5)
                if ix < 0:
                    ix = 0
                elif ix > w - 1:
                    ix = w - 1
                v = y[k] + step * fy[iy, ix]
                if v < 0.0:
                    v = 0.0
                elif v > h - 1.0:
                    v = h - 1.0
                y[k] = v
                v = x[k] + step * fx[iy, ix]
                if v < 0.0:
                    v = 0.0
                elif v > w - 1.0:
                    v = w - 1.0
                x[k] = v
    return y_arr, x_arr


cdef inline bint _heap_less(double ka, long long ca, double kb, long long cb) noexcept nogil:
    if ka != kb:
        return ka < kb
    return ca < cb


def priority_flood(elevation, markers, foreground):
    """Marker-based priority flood; see ``_fallback.priority_flood``."""
    elev_arr = np.ascontiguousarray(elevation, dtype=np.float64)
    mark_arr = np.ascontiguousarray(markers, dtype=np.int32)
    fg_arr = np.ascontiguousarray(foreground, dtype=np.uint8)
    cdef double[:, ::1] elev = elev_arr
    cdef int[:, ::1] mark = mark_arr
    cdef unsigned char[:, ::1] fg = fg_arr
    cdef Py_ssize_t h = elev.shape[0], w = elev.shape[1]
    out_arr = np.zeros((h, w), dtype=np.int32)
    cdef int[:, ::1] out = out_arr
    # binary min-heap over (elevation, insertion counter)
    cap = h * w
    keys_arr = np.empty(cap, dtype=np.float64)
    cnts_arr = np.empty(cap, dtype=np.int64)
    pos_arr = np.empty(cap, dtype=np.intp)
    cdef double[::1] keys = keys_arr
    cdef long long[::1] cnts = cnts_arr
    cdef Py_ssize_t[::1] pos = pos_arr
    cdef Py_ssize_t size = 0
    cdef long long counter = 0
    cdef Py_ssize_t y, x, i, child, parent_i, ny, nx
    cdef double k
    cdef long long c
    cdef Py_ssize_t p
    cdef int label
    cdef int dy[4]
    cdef int dx[4]
    dy[0] = -1; dy[1] = 1; dy[2] = 0; dy[3] = 0
    dx[0] = 0; dx[1] = 0; dx[2] = -1; dx[3] = 1
    cdef Py_ssize_t d
    with nogil:
        for y in range(h):
            for x in range(w):
                if mark[y, x] != 0:
                    out[y, x] = mark[y, x]
                    # push
                    i = size
                    size += 1
                    keys[i] = elev[y, x]
                    cnts[i] = counter
                    pos[i] = y * w + x
                    counter += 1
                    while i > 0:
                        parent_i = (i - 1) >> 1
                        if _heap_less(keys[i], cnts[i], keys[parent_i], cnts[parent_i]):
                            k = keys[i]; keys[i] = keys[parent_i]; keys[parent_i] = k
                            c = cnts[i]; cnts[i] = cnts[parent_i]; cnts[parent_i] = c
                            p = pos[i]; pos[i] = pos[parent_i]; pos[parent_i] = p
                            i = parent_i
                        else:
                            break
        while size > 0:
            y = pos[0] // w
            x = pos[0] - (pos[0] // w) * w
            # pop root
            size -= 1
            keys[0] = keys[size]
            cnts[0] = cnts[size]
            pos[0] = pos[size]
            i = 0
            while True:
                child = 2 * i + 1
                if child >= size:
                    break
                if child + 1 < size and _heap_less(keys[child + 1], cnts[child + 1], keys[child], cnts[child]):
                    child += 1
                if _heap_less(keys[child], cnts[child], keys[i], cnts[i]):
                    k = keys[i]; keys[i] = keys[child]; keys[child] = k
                    c = cnts[i]; cnts[i] = cnts[child]; cnts[child] = c
                    p = pos[i]; pos[i] = pos[child]; pos[child] = p
                    i = child
                else:
                    break
            label = out[y, x]
            for d in range(4):
                ny = y + dy[d]
                nx = x + dx[d]
                if 0 <= ny < h and 0 <= nx < w and fg[ny, nx] != 0 and out[ny, nx] == 0:
                    out[ny, nx] = label
                    i = size
                    size += 1
                    keys[i] = elev[ny, nx]
                    cnts[i] = counter
                    pos[i] = ny * w + nx
                    counter += 1
                    while i > 0:
                        parent_i = (i - 1) >> 1
                        if _heap_less(keys[i], cnts[i], keys[parent_i], cnts[parent_i]):
                            k = keys[i]; keys[i] = keys[parent_i]; keys[parent_i] = k
                            c = cnts[i]; cnts[i] = cnts[parent_i]; cnts[parent_i] = c
                            p = pos[i]; pos[i] = pos[parent_i]; pos[parent_i] = p
                            i = parent_i
                        else:
                            break
    return out_arr
