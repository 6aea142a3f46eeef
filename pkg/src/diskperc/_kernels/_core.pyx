# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernel core. Mirrors diskperc._kernels._fallback semantics."""
import numpy as np

cimport numpy as cnp
from libc.math cimport ceil, floor, hypot

EXTENSION = True


def stamp_disk(cnp.uint8_t[:, ::1] mask, double xc, double yc, double r):
    cdef Py_ssize_t rows = mask.shape[0]
    cdef Py_ssize_t cols = mask.shape[1]
    cdef Py_ssize_t i0, i1, j0, j1, i, j
    cdef double dy, dx, rr = r * r
    cdef int count = 0
    j0 = <Py_ssize_t>floor(xc - r - 0.5)
    j1 = <Py_ssize_t>ceil(xc + r - 0.5)
    i0 = <Py_ssize_t>floor(yc - r - 0.5)
    i1 = <Py_ssize_t>ceil(yc + r - 0.5)
    if j0 < 0: j0 = 0
    if i0 < 0: i0 = 0
    if j1 > cols - 1: j1 = cols - 1
    if i1 > rows - 1: i1 = rows - 1
    for i in range(i0, i1 + 1):
        dy = (i + 0.5) - yc
        for j in range(j0, j1 + 1):
            dx = (j + 0.5) - xc
            if dy * dy + dx * dx <= rr and mask[i, j] == 0:
                mask[i, j] = 1
                count += 1
    return count


def apply_stencil(double[:, ::1] x, double[:, ::1] gx, double[:, ::1] gy,
                  double[:, ::1] diag, double[:, ::1] out):
    cdef Py_ssize_t m = x.shape[0]
    cdef Py_ssize_t n = x.shape[1]
    cdef Py_ssize_t i, j
    cdef double acc
    for i in range(m):
        for j in range(n):
            acc = diag[i, j] * x[i, j]
            if j > 0:
                acc -= gx[i, j - 1] * x[i, j - 1]
            if j < n - 1:
                acc -= gx[i, j] * x[i, j + 1]
            if i > 0:
                acc -= gy[i - 1, j] * x[i - 1, j]
            if i < m - 1:
                acc -= gy[i, j] * x[i + 1, j]
            out[i, j] = acc


def ic0_pivots(double[:, ::1] gx, double[:, ::1] gy, double[:, ::1] diag):
    cdef Py_ssize_t m = diag.shape[0]
    cdef Py_ssize_t n = diag.shape[1]
    cdef Py_ssize_t i, j
    cdef double v
    piv_arr = np.empty((m, n), dtype=np.float64)
    cdef double[:, ::1] piv = piv_arr
    for i in range(m):
        for j in range(n):
            v = diag[i, j]
            if j > 0:
                v -= (gx[i, j - 1] * gx[i, j - 1]) / piv[i, j - 1]
            if i > 0:
                v -= (gy[i - 1, j] * gy[i - 1, j]) / piv[i - 1, j]
            piv[i, j] = v
    return piv_arr


def ic0_solve(double[:, ::1] r, double[:, ::1] gx, double[:, ::1] gy,
              double[:, ::1] piv, double[:, ::1] out):
    cdef Py_ssize_t m = r.shape[0]
    cdef Py_ssize_t n = r.shape[1]
    cdef Py_ssize_t i, j
    cdef double v
    for i in range(m):
        for j in range(n):
            v = r[i, j]
            if j > 0:
                v += gx[i, j - 1] * out[i, j - 1]
            if i > 0:
                v += gy[i - 1, j] * out[i - 1, j]
            out[i, j] = v / piv[i, j]
    for i in range(m - 1, -1, -1):
        for j in range(n - 1, -1, -1):
            v = 0.0
            if j < n - 1:
                v += gx[i, j] * out[i, j + 1]
            if i < m - 1:
                v += gy[i, j] * out[i + 1, j]
            out[i, j] += v / piv[i, j]


def sor_sweep(double[:, ::1] phi, double[:, ::1] gx, double[:, ::1] gy,
              double[:, ::1] diag, double[:, ::1] b, double omega, int parity):
    cdef Py_ssize_t m = phi.shape[0]
    cdef Py_ssize_t n = phi.shape[1]
    cdef Py_ssize_t i, j
    cdef double acc
    for i in range(m):
        for j in range((i + parity) & 1, n, 2):
            acc = b[i, j]
            if j > 0:
                acc += gx[i, j - 1] * phi[i, j - 1]
            if j < n - 1:
                acc += gx[i, j] * phi[i, j + 1]
            if i > 0:
                acc += gy[i - 1, j] * phi[i - 1, j]
            if i < m - 1:
                acc += gy[i, j] * phi[i + 1, j]
            phi[i, j] += omega * (acc / diag[i, j] - phi[i, j])


def dot(double[:, ::1] a, double[:, ::1] b):
    cdef Py_ssize_t m = a.shape[0]
    cdef Py_ssize_t n = a.shape[1]
    cdef Py_ssize_t i, j
    cdef double acc = 0.0
    for i in range(m):
        for j in range(n):
            acc += a[i, j] * b[i, j]
    return acc


cdef inline void _edge_point(int edge, Py_ssize_t i, Py_ssize_t j, double level,
                             double v00, double v10, double v11, double v01,
                             double* x, double* y) noexcept:
    if edge == 0:
        x[0] = j + (level - v00) / (v10 - v00)
        y[0] = <double>i
    elif edge == 1:
        x[0] = j + 1.0
        y[0] = i + (level - v10) / (v11 - v10)
    elif edge == 2:
        x[0] = j + (level - v01) / (v11 - v01)
        y[0] = i + 1.0
    else:
        x[0] = <double>j
        y[0] = i + (level - v00) / (v01 - v00)


# Case table; -1 terminates. Edge ids 0=bottom, 1=right, 2=top, 3=left.
cdef int[16][4] _CASES
_CASES[0][:] = [-1, -1, -1, -1]
_CASES[1][:] = [3, 0, -1, -1]
_CASES[2][:] = [0, 1, -1, -1]
_CASES[3][:] = [3, 1, -1, -1]
_CASES[4][:] = [2, 1, -1, -1]
_CASES[5][:] = [-1, -1, -1, -1]   # saddle, handled separately
_CASES[6][:] = [0, 2, -1, -1]
_CASES[7][:] = [3, 2, -1, -1]
_CASES[8][:] = [3, 2, -1, -1]
_CASES[9][:] = [0, 2, -1, -1]
_CASES[10][:] = [-1, -1, -1, -1]  # saddle
_CASES[11][:] = [2, 1, -1, -1]
_CASES[12][:] = [3, 1, -1, -1]
_CASES[13][:] = [0, 1, -1, -1]
_CASES[14][:] = [3, 0, -1, -1]
_CASES[15][:] = [-1, -1, -1, -1]


cdef inline int _cell_case(double a, double b, double c, double d, double level) noexcept:
    cdef int code = 0
    if a > level: code += 1
    if b > level: code += 2
    if c > level: code += 4
    if d > level: code += 8
    return code


def march(double[:, ::1] phi, double level):
    cdef Py_ssize_t rows = phi.shape[0] - 1
    cdef Py_ssize_t cols = phi.shape[1] - 1
    cdef Py_ssize_t i, j, k = 0
    cdef int code, e0, e1, s
    cdef double a, b, c, d, center
    cdef Py_ssize_t total = 0
    # counting pass
    for i in range(rows):
        for j in range(cols):
            code = _cell_case(phi[i, j], phi[i, j + 1], phi[i + 1, j + 1],
                              phi[i + 1, j], level)
            if code == 0 or code == 15:
                continue
            total += 2 if (code == 5 or code == 10) else 1
    out_arr = np.empty((total, 4), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef int pairs[4]
    for i in range(rows):
        for j in range(cols):
            a = phi[i, j]
            b = phi[i, j + 1]
            c = phi[i + 1, j + 1]
            d = phi[i + 1, j]
            code = _cell_case(a, b, c, d, level)
            if code == 0 or code == 15:
                continue
            if code == 5 or code == 10:
                center = (a + b + c + d) / 4.0
                if (center > level) == (code == 5):
                    pairs[0] = 3; pairs[1] = 2; pairs[2] = 0; pairs[3] = 1
                else:
                    pairs[0] = 3; pairs[1] = 0; pairs[2] = 2; pairs[3] = 1
                s = 2
            else:
                pairs[0] = _CASES[code][0]
                pairs[1] = _CASES[code][1]
                s = 1
            e0 = pairs[0]; e1 = pairs[1]
            _edge_point(e0, i, j, level, a, b, c, d, &out[k, 0], &out[k, 1])
            _edge_point(e1, i, j, level, a, b, c, d, &out[k, 2], &out[k, 3])
            k += 1
            if s == 2:
                e0 = pairs[2]; e1 = pairs[3]
                _edge_point(e0, i, j, level, a, b, c, d, &out[k, 0], &out[k, 1])
                _edge_point(e1, i, j, level, a, b, c, d, &out[k, 2], &out[k, 3])
                k += 1
    return out_arr


def mark_segments(cnp.uint8_t[:, ::1] mask, double[:, ::1] segs):
    cdef Py_ssize_t n_rows = mask.shape[0]
    cdef Py_ssize_t n_cols = mask.shape[1]
    cdef Py_ssize_t k, q, s
    cdef double x0, y0, dx, dy, length, t, x, y
    cdef Py_ssize_t ix, iy
    for k in range(segs.shape[0]):
        x0 = segs[k, 0]
        y0 = segs[k, 1]
        dx = segs[k, 2] - x0
        dy = segs[k, 3] - y0
        length = hypot(dx, dy)
        s = <Py_ssize_t>ceil(4.0 * length) + 1
        if s < 2:
            s = 2
        for q in range(s):
            t = q / (s - 1.0)
            x = x0 + dx * t
            y = y0 + dy * t
            ix = <Py_ssize_t>floor(x + 0.5)
            iy = <Py_ssize_t>floor(y + 0.5)
            if 0 <= ix < n_cols and 0 <= iy < n_rows:
                mask[iy, ix] = 1


def flood_quasi(double[:, ::1] phi, double eps):
    cdef Py_ssize_t rows = phi.shape[0]
    cdef Py_ssize_t cols = phi.shape[1]
    cdef Py_ssize_t si, sj, i, j, ni, nj, head, tail
    cdef int label = 0
    cdef double lo, hi, v, nlo, nhi
    cdef int step
    labels_arr = np.zeros((rows, cols), dtype=np.int32)
    cdef cnp.int32_t[:, ::1] labels = labels_arr
    qi_arr = np.empty(rows * cols, dtype=np.int64)
    qj_arr = np.empty(rows * cols, dtype=np.int64)
    cdef cnp.int64_t[::1] qi = qi_arr
    cdef cnp.int64_t[::1] qj = qj_arr
    for si in range(rows):
        for sj in range(cols):
            if labels[si, sj]:
                continue
            label += 1
            labels[si, sj] = label
            lo = phi[si, sj]
            hi = lo
            qi[0] = si
            qj[0] = sj
            head = 0
            tail = 1
            while head < tail:
                i = qi[head]
                j = qj[head]
                head += 1
                for step in range(4):
                    if step == 0:
                        ni = i - 1; nj = j
                    elif step == 1:
                        ni = i + 1; nj = j
                    elif step == 2:
                        ni = i; nj = j - 1
                    else:
                        ni = i; nj = j + 1
                    if ni < 0 or ni >= rows or nj < 0 or nj >= cols:
                        continue
                    if labels[ni, nj]:
                        continue
                    v = phi[ni, nj]
                    nlo = v if v < lo else lo
                    nhi = v if v > hi else hi
                    if nhi - nlo <= eps:
                        labels[ni, nj] = label
                        lo = nlo
                        hi = nhi
                        qi[tail] = ni
                        qj[tail] = nj
                        tail += 1
    return labels_arr
