"""Compiled inner loops shared by the transforms.

Every routine here produces each output sample from a fixed-order sum, so
results do not depend on how the work is split across threads.
"""
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def _taps(pos, order, n, idx, wts):
    # Fill idx/wts with interpolation taps around fractional index `pos`.
    # Taps falling outside [0, n) get index -1 (treated as zero).
    i0 = int(np.floor(pos))
    t = pos - i0
    if order == 3:
        t2 = t * t
        t3 = t2 * t
        wts[0] = 0.5 * (-t3 + 2.0 * t2 - t)
        wts[1] = 0.5 * (3.0 * t3 - 5.0 * t2 + 2.0)
        wts[2] = 0.5 * (-3.0 * t3 + 4.0 * t2 + t)
        wts[3] = 0.5 * (t3 - t2)
        for q in range(4):
            j = i0 - 1 + q
            idx[q] = j if 0 <= j < n else -1
        return 4
    wts[0] = 1.0 - t
    wts[1] = t
    idx[0] = i0 if 0 <= i0 < n else -1
    idx[1] = i0 + 1 if 0 <= i0 + 1 < n else -1
    return 2


@njit(cache=True, nogil=True)
def _line_sum_block(vals, pc, w, q0, dq, A, b, order, step, periodic, k_lo, k_hi, out):
    P, nq = vals.shape
    d = pc.shape[1]
    nb = b.shape[0]
    idx = np.empty(4, np.int64)
    wts = np.empty(4)
    hi = nq - 1 + 1e-9
    for k in range(k_lo, k_hi):
        for p in range(P):
            wp = w[p]
            if wp == 0.0:
                continue
            s = 0.0
            for c in range(d):
                s += A[k, c] * pc[p, c]
            if step > 0:
                # offsets advance by whole cells: one stencil serves the row
                pos0 = (s + b[0] - q0) / dq
                fl = np.floor(pos0)
                nt = _taps(pos0 - fl, order, 4, idx, wts)
                i0 = int(fl) - (1 if order == 3 else 0)
                if periodic:
                    j_lo, j_hi = 0, nb - 1
                else:
                    j_lo = max(0, int(np.ceil((-pos0 - 1e-9) / step)))
                    j_hi = min(nb - 1, int(np.floor((hi - pos0) / step)))
                for j in range(j_lo, j_hi + 1):
                    acc = 0j
                    for q in range(nt):
                        i = i0 + q + j * step
                        if periodic:
                            acc += wts[q] * vals[p, i % nq]
                        elif 0 <= i < nq:
                            acc += wts[q] * vals[p, i]
                    out[k - k_lo, j] += wp * acc
                continue
            for j in range(nb):
                pos = (s + b[j] - q0) / dq
                if periodic:
                    pos = pos % nq
                elif pos < -1e-9 or pos > hi:
                    continue
                nt = _taps(pos, order, nq, idx, wts)
                if periodic:
                    fl = int(np.floor(pos)) - (1 if order == 3 else 0)
                    for q in range(nt):
                        idx[q] = (fl + q) % nq
                acc = 0j
                for q in range(nt):
                    if idx[q] >= 0:
                        acc += wts[q] * vals[p, idx[q]]
                out[k - k_lo, j] += wp * acc


@njit(cache=True, nogil=True)
def _sample_block(vals, shape, origin, spacing, pts, order, k_lo, k_hi, out, outside):
    d = shape.shape[0]
    ntap = 4 if order == 3 else 2
    idx = np.empty((d, 4), np.int64)
    wts = np.empty((d, 4))
    strides = np.empty(d, np.int64)
    s = 1
    for c in range(d - 1, -1, -1):
        strides[c] = s
        s *= shape[c]
    ctr = np.empty(d, np.int64)
    for k in range(k_lo, k_hi):
        bad = False
        for c in range(d):
            pos = (pts[k, c] - origin[c]) / spacing[c]
            if pos < -1e-9 or pos > shape[c] - 1 + 1e-9:
                bad = True
                break
            _taps(pos, order, shape[c], idx[c], wts[c])
        if bad:
            outside[k] = True
            out[k] = 0j
            continue
        for c in range(d):
            ctr[c] = 0
        acc = 0j
        total = ntap ** d
        for _ in range(total):
            wt = 1.0
            flat = 0
            skip = False
            for c in range(d):
                j = idx[c, ctr[c]]
                if j < 0:
                    skip = True
                    break
                wt *= wts[c, ctr[c]]
                flat += j * strides[c]
            if not skip and wt != 0.0:
                acc += wt * vals[flat]
            c = d - 1
            while c >= 0:
                ctr[c] += 1
                if ctr[c] < ntap:
                    break
                ctr[c] = 0
                c -= 1
        out[k] = acc


def _chunks(n, threads):
    threads = max(1, min(int(threads), n)) if n else 1
    edges = np.linspace(0, n, threads + 1).astype(int)
    return [(int(edges[i]), int(edges[i + 1])) for i in range(threads)]


def line_sum(vals, pc, w, q0, dq, A, b, order=3, threads=1, periodic=False):
    """Weighted sums of row samples along affine lines.

    out[k, j] = sum_p w[p] * interp(vals[p], A[k] . pc[p] + b[j]), where each
    row of `vals` is sampled on the axis q0 + dq * arange(nq). Samples that
    fall outside a row contribute zero, unless `periodic`, in which case rows
    repeat with period nq * dq.
    """
    vals = np.ascontiguousarray(vals, dtype=np.complex128)
    pc = np.ascontiguousarray(pc, dtype=np.float64)
    w = np.ascontiguousarray(w, dtype=np.float64)
    A = np.ascontiguousarray(A, dtype=np.float64)
    b = np.ascontiguousarray(b, dtype=np.float64)
    K = A.shape[0]
    out = np.zeros((K, b.shape[0]), np.complex128)
    step = 0
    if b.shape[0] == 1:
        step = 1
    else:
        db = np.diff(b)
        r = int(round(db[0] / dq))
        if r >= 1 and np.allclose(db, r * dq, rtol=1e-12, atol=0.0):
            step = r

    def run(lohi):
        lo, hi = lohi
        blk = np.zeros((hi - lo, b.shape[0]), np.complex128)
        _line_sum_block(vals, pc, w, float(q0), float(dq), A, b, int(order), step,
                        bool(periodic), lo, hi, blk)
        return lo, hi, blk

    parts = _chunks(K, threads)
    if len(parts) == 1:
        results = [run(parts[0])]
    else:
        with ThreadPoolExecutor(len(parts)) as ex:
            results = list(ex.map(run, parts))
    for lo, hi, blk in results:
        out[lo:hi] = blk
    return out


def sample_nd(vals, origin, spacing, pts, order=3, threads=1):
    """Separable interpolation of a uniform n-d array at scattered points.

    Returns (values, outside) where `outside` marks points beyond the grid
    extent; their values are zero.
    """
    vals = np.asarray(vals, dtype=np.complex128)
    shape = np.asarray(vals.shape, dtype=np.int64)
    flat = np.ascontiguousarray(vals.ravel())
    pts = np.ascontiguousarray(np.atleast_2d(pts), dtype=np.float64)
    K = pts.shape[0]
    out = np.zeros(K, np.complex128)
    outside = np.zeros(K, np.bool_)
    origin = np.asarray(origin, dtype=np.float64)
    spacing = np.asarray(spacing, dtype=np.float64)

    def run(lohi):
        lo, hi = lohi
        _sample_block(flat, shape, origin, spacing, pts, int(order), lo, hi, out, outside)

    parts = _chunks(K, threads)
    if len(parts) == 1:
        run(parts[0])
    else:
        with ThreadPoolExecutor(len(parts)) as ex:
            list(ex.map(run, parts))
    return out, outside
