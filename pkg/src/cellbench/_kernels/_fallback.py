"""Pure-NumPy implementations of the hot kernels.

Semantics here are the reference contract: the compiled extension in
``_core.pyx`` must agree with these functions (exactly for the integer
kernels, to float64 round-off for the others; operation order is written to
match the compiled loops so results are normally bit-identical).
"""

import heapq

import numpy as np
from scipy import ndimage


def label_overlap(a, b):
    """Co-occurrence histogram of two label maps.

    Returns an int64 matrix of shape ``(a.max()+1, b.max()+1)`` whose entry
    ``(i, j)`` counts pixels where ``a == i`` and ``b == j``.
    """
    a = np.ascontiguousarray(a).ravel()
    b = np.ascontiguousarray(b).ravel()
    na = int(a.max()) + 1 if a.size else 1
    nb = int(b.max()) + 1 if b.size else 1
    counts = np.bincount(a.astype(np.int64) * nb + b.astype(np.int64), minlength=na * nb)
    return counts.reshape(na, nb)


def connected_components_4(labels):
    """Split every label value into its 4-connected components.

    Returns ``(out, n)`` where ``out`` is int32 with components renumbered
    1..n in order of first raster-scan occurrence and background preserved.
    """
    labels = np.ascontiguousarray(labels)
    out = np.zeros(labels.shape, np.int32)
    if labels.size == 0 or labels.max() <= 0:
        return out, 0
    # compact arbitrary ids so find_objects stays small
    values, compact = np.unique(labels, return_inverse=True)
    compact = compact.reshape(labels.shape)
    if values[0] == 0:
        pass
    else:  # no background present
        compact = compact + 1
    structure = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], bool)
    provisional = np.zeros(labels.shape, np.int32)
    offset = 0
    for idx, sl in enumerate(ndimage.find_objects(compact)):
        if sl is None:
            continue
        mask = compact[sl] == (idx + 1)
        comp, n = ndimage.label(mask, structure=structure)
        provisional[sl] = np.where(mask, comp + offset, provisional[sl])
        offset += n
    # renumber by first raster occurrence
    flat = provisional.ravel()
    ids, first = np.unique(flat, return_index=True)
    nz = ids > 0
    order = np.argsort(first[nz], kind="stable")
    mapping = np.zeros(offset + 1, np.int32)
    mapping[ids[nz][order]] = np.arange(1, order.size + 1, dtype=np.int32)
    out[:] = mapping[flat].reshape(labels.shape)
    return out, int(order.size)


def heat_diffusion(mask, seed_y, seed_x, n_iter):
    """Jacobi heat diffusion restricted to ``mask`` with a unit source.

    Each iteration injects +1 at ``(seed_y, seed_x)`` and then replaces every
    masked pixel by the mean of its 3x3 neighbourhood (simultaneous update);
    unmasked pixels stay 0. ``mask`` must not touch the array border.
    """
    mask = np.asarray(mask, bool)
    T = np.zeros(mask.shape, np.float64)
    inner = np.zeros(mask.shape, np.float64)
    for _ in range(n_iter):
        T[seed_y, seed_x] += 1.0
        s = (
            T[:-2, :-2]
            + T[:-2, 1:-1]
            + T[:-2, 2:]
            + T[1:-1, :-2]
            + T[1:-1, 1:-1]
            + T[1:-1, 2:]
            + T[2:, :-2]
            + T[2:, 1:-1]
            + T[2:, 2:]
        )
        inner[1:-1, 1:-1] = s / 9.0
        T = np.where(mask, inner, 0.0)
    return T


def flow_advect(flow_y, flow_x, ys, xs, n_iter, step=1.0):
    """Euler-advect points along a flow field with nearest-pixel lookup.

    Positions are clamped to the grid each step; the lookup index uses
    ``floor(p + 0.5)`` so both implementations round identically.
    """
    flow_y = np.asarray(flow_y, np.float64)
    flow_x = np.asarray(flow_x, np.float64)
    h, w = flow_y.shape
    y = np.asarray(ys, np.float64).copy()
    x = np.asarray(xs, np.float64).copy()
    for _ in range(n_iter):
        iy = np.clip(np.floor(y + 0.5).astype(np.intp), 0, h - 1)
        ix = np.clip(np.floor(x + 0.5).astype(np.intp), 0, w - 1)
        y = np.clip(y + step * flow_y[iy, ix], 0.0, float(h - 1))
        x = np.clip(x + step * flow_x[iy, ix], 0.0, float(w - 1))
    return y, x


_N4 = ((-1, 0), (1, 0), (0, -1), (0, 1))


def priority_flood(elevation, markers, foreground):
    """Marker-based priority flood: ascending elevation, FIFO on ties.

    Marker pixels keep their labels; every reachable foreground pixel gets
    the label of the first basin to claim it. Non-foreground stays 0, as do
    foreground components containing no marker.
    """
    elevation = np.asarray(elevation, np.float64)
    h, w = elevation.shape
    out = np.zeros((h, w), np.int32)
    heap = []
    counter = 0
    for y, x in zip(*np.nonzero(markers)):
        out[y, x] = markers[y, x]
        heapq.heappush(heap, (elevation[y, x], counter, int(y), int(x)))
        counter += 1
    while heap:
        _, _, y, x = heapq.heappop(heap)
        label = out[y, x]
        for dy, dx in _N4:
            ny, nx = y + dy, x + dx
            if 0 <= ny < h and 0 <= nx < w and foreground[ny, nx] and out[ny, nx] == 0:
                out[ny, nx] = label
                heapq.heappush(heap, (elevation[ny, nx], counter, ny, nx))
                counter += 1
    return out
