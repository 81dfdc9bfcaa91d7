"""Backend selection for the hot simulation kernels.

Every batch kernel exists twice: a numba ``@njit`` loop over replications
and a pure-numpy path vectorized across replications.  Both consume the
same counter-based random words, so they produce the same trajectories.

Set ``LAZYLEADER_DISABLE_JIT=1`` to force the numpy path (numba is also
skipped automatically when it cannot be imported).
"""

from __future__ import annotations

import os

_TRUTHY = {"1", "true", "yes", "on"}

try:
    import numba

    HAVE_NUMBA = True
    # the bundled TBB is too old for numba; skip straight to OpenMP
    if "NUMBA_THREADING_LAYER" not in os.environ:
        numba.config.THREADING_LAYER = "omp"
except ImportError:  # pragma: no cover - numba ships with the dev image
    numba = None
    HAVE_NUMBA = False


def jit_disabled() -> bool:
    return os.environ.get("LAZYLEADER_DISABLE_JIT", "").strip().lower() in _TRUTHY


def default_backend() -> str:
    if HAVE_NUMBA and not jit_disabled():
        return "numba"
    return "numpy"


def resolve_backend(backend: str | None) -> str:
    """Map ``None`` to the environment default and validate explicit choices."""
    if backend is None:
        return default_backend()
    if backend not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {backend!r}; expected 'numba' or 'numpy'")
    if backend == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba backend requested but numba is not importable")
    return backend


def njit(*args, **kwargs):
    """``numba.njit`` with on-disk caching, or an identity decorator without numba."""
    if not HAVE_NUMBA:
        if args and callable(args[0]):
            return args[0]
        return lambda f: f
    kwargs.setdefault("cache", True)
    return numba.njit(*args, **kwargs)


if HAVE_NUMBA:
    prange = numba.prange
else:  # pragma: no cover
    prange = range


def set_threads(threads: int | None) -> int:
    """Set the numba worker count; ``None`` falls back to ``LAZYLEADER_THREADS``.

    Returns the thread count in effect (1 for the numpy backend).
    """
    if threads is None:
        env = os.environ.get("LAZYLEADER_THREADS")
        threads = int(env) if env else None
    if not HAVE_NUMBA:
        return 1
    if threads is not None:
        if threads < 1:
            raise ValueError("thread count must be >= 1")
        threads = min(threads, numba.config.NUMBA_NUM_THREADS)
        numba.set_num_threads(threads)
    return numba.get_num_threads()
