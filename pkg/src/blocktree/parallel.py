"""Fork-join helper for the bulk algorithms.

Bulk operations call ``fork2(ctx, work_size, fa, fb)`` for their two
recursive branches.  With one thread configured (the default) both run
inline.  With more, the coordinating (non-worker) thread offloads the second
branch to a shared pool whenever ``work_size`` exceeds the context's grain;
pool workers themselves never fork, which keeps the scheme deadlock-free
with a bounded pool.  Results are combined only after both branches finish,
so output trees are identical regardless of scheduling.

CPython's GIL serializes the actual compute; the pool exists to honor the
concurrency contract (deterministic parallel execution, thread-safe owner
counts), not to speed up pure-Python work.
"""

import threading
from concurrent.futures import ThreadPoolExecutor

from . import nodes

_pool = None
_threads = 1
_worker = threading.local()


def set_threads(n):
    """Configure the worker count for subsequent bulk operations."""
    global _pool, _threads
    n = max(1, int(n))
    if _pool is not None:
        _pool.shutdown(wait=True)
        _pool = None
    _threads = n
    if n > 1:
        _pool = ThreadPoolExecutor(max_workers=n - 1,
                                   thread_name_prefix="blocktree")
    nodes.set_locked_refcounts(n > 1)


def get_threads():
    return _threads


def _run_marked(fn):
    _worker.active = True
    try:
        return fn()
    finally:
        _worker.active = False


def fork2(ctx, work_size, fa, fb):
    """Evaluate two thunks, possibly in parallel; returns their results."""
    if (_pool is None or work_size <= ctx.config.grain
            or getattr(_worker, "active", False)):
        return fa(), fb()
    future = _pool.submit(_run_marked, fb)
    ra = fa()
    return ra, future.result()
