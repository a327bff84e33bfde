# cython: language_level=3
"""Compiled hot kernels: pair-histogram sweep and dead-time pruning.

These mirror the pure-numpy implementations in ``_sweep_py`` exactly
(same integer arithmetic, same half-open bin convention), so either
backend produces bit-identical histograms.
"""

import numpy as np

cimport numpy as cnp


def pair_histogram(
    const long long[::1] ta,
    const long long[::1] tb,
    long long tau_min,
    long long tau_max,
    long long bin_width,
    bint exclude_same_index=False,
    Py_ssize_t a_index_offset=0,
    counts=None,
):
    """Histogram lags (tb[j] - ta[i]) in [tau_min, tau_max) into bins of bin_width.

    Both inputs must be sorted ascending. When ``exclude_same_index`` is set,
    the pair with j == i + a_index_offset is skipped (self-pair of a stream
    correlated against itself; ``a_index_offset`` is the global index of
    ta[0] within tb). Accumulates into ``counts`` (int64, one per bin) and
    returns it.
    """
    cdef Py_ssize_t n_bins = <Py_ssize_t>((tau_max - tau_min) // bin_width)
    if counts is None:
        counts = np.zeros(n_bins, dtype=np.int64)
    cdef long long[::1] cv = counts
    if cv.shape[0] != n_bins:
        raise ValueError("counts buffer has wrong length")
    cdef Py_ssize_t na = ta.shape[0]
    cdef Py_ssize_t nb = tb.shape[0]
    cdef Py_ssize_t i, j, lo = 0, hi = 0
    cdef long long lo_t, hi_t
    if na == 0 or nb == 0:
        return counts
    with nogil:
        for i in range(na):
            lo_t = ta[i] + tau_min
            hi_t = ta[i] + tau_max
            while lo < nb and tb[lo] < lo_t:
                lo += 1
            if hi < lo:
                hi = lo
            while hi < nb and tb[hi] < hi_t:
                hi += 1
            for j in range(lo, hi):
                if exclude_same_index and j == i + a_index_offset:
                    continue
                cv[(tb[j] - lo_t) // bin_width] += 1
    return counts


def dead_time_prune(const long long[::1] t, long long dead):
    """Non-paralyzable dead time: keep a tag iff it is >= ``dead`` after the
    previously kept tag. Returns a boolean keep-mask."""
    cdef Py_ssize_t n = t.shape[0]
    keep = np.zeros(n, dtype=np.uint8)
    cdef unsigned char[::1] kv = keep
    cdef Py_ssize_t i
    cdef long long last
    if n == 0:
        return keep.view(np.bool_)
    with nogil:
        kv[0] = 1
        last = t[0]
        for i in range(1, n):
            if t[i] - last >= dead:
                kv[i] = 1
                last = t[i]
    return keep.view(np.bool_)
