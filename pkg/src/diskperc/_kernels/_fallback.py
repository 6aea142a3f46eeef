"""Pure-NumPy reference implementations of the hot kernels.

Selected automatically when the compiled extension (``diskperc._kernels._core``)
is unavailable, or when ``DISKPERC_PURE=1`` is set.  Semantics are identical to
the extension; the sequential recurrences (incomplete-Cholesky sweeps, flood
fill) run as Python loops and are markedly slower at production sizes.
"""
import numpy as np

EXTENSION = False


def stamp_disk(mask, xc, yc, r):
    """Mark all cells whose center lies within ``r`` of (xc, yc), in cell units.

    Cell (i, j) has center (j + 0.5, i + 0.5).  Returns the number of
    newly covered cells; ``mask`` (uint8) is updated in place.
    """
    rows, cols = mask.shape
    j0 = max(int(np.floor(xc - r - 0.5)), 0)
    j1 = min(int(np.ceil(xc + r - 0.5)), cols - 1)
    i0 = max(int(np.floor(yc - r - 0.5)), 0)
    i1 = min(int(np.ceil(yc + r - 0.5)), rows - 1)
    if j1 < j0 or i1 < i0:
        return 0
    dy = (np.arange(i0, i1 + 1) + 0.5) - yc
    dx = (np.arange(j0, j1 + 1) + 0.5) - xc
    inside = dy[:, None] * dy[:, None] + dx[None, :] * dx[None, :] <= r * r
    sub = mask[i0:i1 + 1, j0:j1 + 1]
    new = inside & (sub == 0)
    count = int(np.count_nonzero(new))
    sub[new] = 1
    return count


def apply_stencil(x, gx, gy, diag, out):
    """out = A @ x for the 5-point interior operator.

    ``gx``: conductances of west-east faces within interior rows, (m, n-1).
    ``gy``: conductances of faces between adjacent interior rows, (m-1, n).
    ``diag`` already includes the faces toward the pinned electrode rows.
    """
    np.multiply(diag, x, out=out)
    out[:, 1:] -= gx * x[:, :-1]
    out[:, :-1] -= gx * x[:, 1:]
    if gy.shape[0]:
        out[1:, :] -= gy * x[:-1, :]
        out[:-1, :] -= gy * x[1:, :]


def ic0_pivots(gx, gy, diag):
    """Diagonal pivots of the zero-fill incomplete Cholesky factor of A.

    D-ILU form: M = (P + L) P^-1 (P + L^T) with L the strict lower
    triangle of A.  A is a Stieltjes matrix, so all pivots stay positive.
    """
    m, n = diag.shape
    piv = np.empty_like(diag)
    for i in range(m):
        for j in range(n):
            v = diag[i, j]
            if j > 0:
                v -= (gx[i, j - 1] * gx[i, j - 1]) / piv[i, j - 1]
            if i > 0:
                v -= (gy[i - 1, j] * gy[i - 1, j]) / piv[i - 1, j]
            piv[i, j] = v
    return piv


def ic0_solve(r, gx, gy, piv, out):
    """out = M^-1 r via forward and backward triangular sweeps."""
    m, n = r.shape
    u = out
    for i in range(m):
        for j in range(n):
            v = r[i, j]
            if j > 0:
                v += gx[i, j - 1] * u[i, j - 1]
            if i > 0:
                v += gy[i - 1, j] * u[i - 1, j]
            u[i, j] = v / piv[i, j]
    for i in range(m - 1, -1, -1):
        for j in range(n - 1, -1, -1):
            v = 0.0
            if j < n - 1:
                v += gx[i, j] * u[i, j + 1]
            if i < m - 1:
                v += gy[i, j] * u[i + 1, j]
            u[i, j] += v / piv[i, j]


def sor_sweep(phi, gx, gy, diag, b, omega, parity):
    """One red-black half sweep (cells with (i+j) % 2 == parity), in place."""
    m, n = phi.shape
    acc = b.copy()
    acc[:, 1:] += gx * phi[:, :-1]
    acc[:, :-1] += gx * phi[:, 1:]
    if gy.shape[0]:
        acc[1:, :] += gy * phi[:-1, :]
        acc[:-1, :] += gy * phi[1:, :]
    ii, jj = np.indices((m, n), sparse=True)
    sel = ((ii + jj) & 1) == parity
    phi[sel] += omega * (acc[sel] / diag[sel] - phi[sel])


def dot(a, b):
    """Deterministic inner product of two same-shape arrays."""
    return float(np.dot(a.ravel(), b.ravel()))


# Marching-squares case table: edge ids 0=bottom, 1=right, 2=top, 3=left.
# Corner bit k set means the corner potential exceeds the level:
# bit0 = (i, j), bit1 = (i, j+1), bit2 = (i+1, j+1), bit3 = (i+1, j).
_CASE_EDGES = {
    1: ((3, 0),),
    2: ((0, 1),),
    3: ((3, 1),),
    4: ((2, 1),),
    6: ((0, 2),),
    7: ((3, 2),),
    8: ((3, 2),),
    9: ((0, 2),),
    11: ((2, 1),),
    12: ((3, 1),),
    13: ((0, 1),),
    14: ((3, 0),),
}


def _edge_point(edge, i, j, level, v00, v10, v11, v01):
    if edge == 0:
        return (j + (level - v00) / (v10 - v00), float(i))
    if edge == 1:
        return (j + 1.0, i + (level - v10) / (v11 - v10))
    if edge == 2:
        return (j + (level - v01) / (v11 - v01), i + 1.0)
    return (float(j), i + (level - v00) / (v01 - v00))


def march(phi, level):
    """Marching-squares segments of the level set {phi == level}.

    Returns an (K, 4) float array of (x0, y0, x1, y1) in cell-index
    coordinates, emitted in row-major cell order.  Saddles are resolved by
    comparing the cell mean against the level.
    """
    v00 = phi[:-1, :-1]
    v10 = phi[:-1, 1:]
    v11 = phi[1:, 1:]
    v01 = phi[1:, :-1]
    code = (
        (v00 > level).astype(np.uint8)
        + 2 * (v10 > level).astype(np.uint8)
        + 4 * (v11 > level).astype(np.uint8)
        + 8 * (v01 > level).astype(np.uint8)
    )
    cells = np.nonzero((code > 0) & (code < 15))
    segs = []
    for i, j in zip(*cells):
        c = code[i, j]
        a = phi[i, j]
        b_ = phi[i, j + 1]
        cc = phi[i + 1, j + 1]
        d = phi[i + 1, j]
        if c == 5 or c == 10:
            center = (a + b_ + cc + d) / 4.0
            if (center > level) == (c == 5):
                pairs = ((3, 2), (0, 1))
            else:
                pairs = ((3, 0), (2, 1))
        else:
            pairs = _CASE_EDGES[c]
        for e0, e1 in pairs:
            x0, y0 = _edge_point(e0, i, j, level, a, b_, cc, d)
            x1, y1 = _edge_point(e1, i, j, level, a, b_, cc, d)
            segs.append((x0, y0, x1, y1))
    if not segs:
        return np.empty((0, 4), dtype=np.float64)
    return np.asarray(segs, dtype=np.float64)


def mark_segments(mask, segs):
    """Mark every cell a segment passes through (nearest-cell supercover).

    Samples each segment at ceil(4*len)+1 points and marks the nearest
    cell of each sample; identical sampling rule in both backends.
    """
    n_rows, n_cols = mask.shape
    for k in range(segs.shape[0]):
        x0, y0, x1, y1 = segs[k]
        dx = x1 - x0
        dy = y1 - y0
        length = np.hypot(dx, dy)
        s = max(2, int(np.ceil(4.0 * length)) + 1)
        t = np.arange(s) / (s - 1.0)
        xs = np.floor(x0 + dx * t + 0.5).astype(np.int64)
        ys = np.floor(y0 + dy * t + 0.5).astype(np.int64)
        ok = (xs >= 0) & (xs < n_cols) & (ys >= 0) & (ys < n_rows)
        mask[ys[ok], xs[ok]] = 1


def flood_quasi(phi, eps):
    """Greedy 4-connected segmentation into eps-flat regions.

    Row-major seeding, FIFO growth, neighbor order N, S, W, E (in array
    terms: (i-1, j), (i+1, j), (i, j-1), (i, j+1)).  A neighbor joins the
    region only if the region's running max-min stays within eps.
    """
    rows, cols = phi.shape
    labels = np.zeros((rows, cols), dtype=np.int32)
    qi = np.empty(rows * cols, dtype=np.int64)
    qj = np.empty(rows * cols, dtype=np.int64)
    label = 0
    for si in range(rows):
        for sj in range(cols):
            if labels[si, sj]:
                continue
            label += 1
            labels[si, sj] = label
            lo = hi = phi[si, sj]
            qi[0] = si
            qj[0] = sj
            head, tail = 0, 1
            while head < tail:
                i = qi[head]
                j = qj[head]
                head += 1
                for ni, nj in ((i - 1, j), (i + 1, j), (i, j - 1), (i, j + 1)):
                    if ni < 0 or ni >= rows or nj < 0 or nj >= cols:
                        continue
                    if labels[ni, nj]:
                        continue
                    v = phi[ni, nj]
                    nlo = v if v < lo else lo
                    nhi = v if v > hi else hi
                    if nhi - nlo <= eps:
                        labels[ni, nj] = label
                        lo, hi = nlo, nhi
                        qi[tail] = ni
                        qj[tail] = nj
                        tail += 1
    return labels
