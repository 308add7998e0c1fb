"""Runtime configuration helpers."""

from __future__ import annotations

import os

__all__ = ["worker_count"]


def worker_count(requested: int | None = None) -> int:
    """Number of worker threads for fan-out jobs.

    The ``KVNLAB_THREADS`` environment variable caps the value; an explicit
    ``requested`` count is honored up to that cap.  Defaults to 1 (serial)
    when neither is set, keeping results and timings reproducible.
    """
    cap = os.environ.get("KVNLAB_THREADS")
    cap_n = max(1, int(cap)) if cap else None
    if requested is None:
        return cap_n or 1
    requested = max(1, int(requested))
    return min(requested, cap_n) if cap_n else requested
