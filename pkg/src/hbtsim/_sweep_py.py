"""Pure-numpy fallbacks for the compiled kernels in ``_sweep.pyx``.

Selected automatically at import time when the extension is missing (see
``_kernels``). All integer arithmetic matches the compiled version, so
histograms are bit-identical between backends; only speed differs.
"""

from __future__ import annotations

import numpy as np

# Cap on materialized (pair) index arrays per inner batch.
_MAX_PAIR_BATCH = 1 << 23


def pair_histogram(
    ta: np.ndarray,
    tb: np.ndarray,
    tau_min: int,
    tau_max: int,
    bin_width: int,
    exclude_same_index: bool = False,
    a_index_offset: int = 0,
    counts: np.ndarray | None = None,
) -> np.ndarray:
    """Vectorized window sweep: searchsorted windows, expanded pair lags, bincount."""
    n_bins = (tau_max - tau_min) // bin_width
    if counts is None:
        counts = np.zeros(n_bins, dtype=np.int64)
    if counts.shape[0] != n_bins:
        raise ValueError("counts buffer has wrong length")
    if ta.size == 0 or tb.size == 0:
        return counts
    lo = np.searchsorted(tb, ta + tau_min, side="left")
    hi = np.searchsorted(tb, ta + tau_max, side="left")
    widths = hi - lo
    # batch rows so the expanded pair arrays stay bounded
    row_end = np.cumsum(widths)
    start_row = 0
    while start_row < ta.size:
        base = row_end[start_row - 1] if start_row else 0
        stop_row = int(np.searchsorted(row_end, base + _MAX_PAIR_BATCH, side="left")) + 1
        stop_row = min(stop_row, ta.size)
        w = widths[start_row:stop_row]
        total = int(w.sum())
        if total:
            starts = lo[start_row:stop_row]
            offsets = np.repeat(row_end[start_row:stop_row] - w, w)
            j = np.arange(base, base + total, dtype=np.int64) - offsets + np.repeat(starts, w)
            lags = tb[j] - np.repeat(ta[start_row:stop_row], w)
            if exclude_same_index:
                i_global = np.repeat(
                    np.arange(start_row, stop_row, dtype=np.int64) + a_index_offset, w
                )
                lags = lags[j != i_global]
            k = (lags - tau_min) // bin_width
            counts += np.bincount(k, minlength=n_bins).astype(np.int64)
        start_row = stop_row
    return counts


def dead_time_prune(t: np.ndarray, dead: int) -> np.ndarray:
    """Sequential greedy pruning; plain loop (the compiled kernel is the fast path)."""
    n = t.size
    keep = np.zeros(n, dtype=bool)
    if n == 0:
        return keep
    keep[0] = True
    last = int(t[0])
    for i, ti in enumerate(t.tolist()):
        if i and ti - last >= dead:
            keep[i] = True
            last = ti
    return keep
