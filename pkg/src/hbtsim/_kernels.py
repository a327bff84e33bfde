"""Backend selection: compiled extension if importable, numpy fallback otherwise.

Set ``HBT_NO_EXT=1`` to force the pure-Python backend (useful for the
benchmark and for exercising both paths in tests). Both backends are
bit-equivalent; see ``benchmarks/bench_correlator.py`` for the speed gap.
"""

from __future__ import annotations

import os

from . import _sweep_py

_force_py = os.environ.get("HBT_NO_EXT", "").strip() not in ("", "0")

if not _force_py:
    try:
        from . import _sweep as _impl

        BACKEND = "ext"
    except ImportError:  # extension not built; fall back silently
        _impl = _sweep_py
        BACKEND = "python"
else:
    _impl = _sweep_py
    BACKEND = "python"

pair_histogram = _impl.pair_histogram
dead_time_prune = _impl.dead_time_prune


def backends() -> dict:
    """All importable backends, keyed by name (for benchmarks/tests)."""
    out = {"python": _sweep_py}
    try:
        from . import _sweep

        out["ext"] = _sweep
    except ImportError:
        pass
    return out
