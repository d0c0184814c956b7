"""Kernel backend selection.

The compiled extension is used when it imports; otherwise the numpy
fallback.  Set ``QWQRAM_BACKEND=python`` to force the fallback.
"""

from __future__ import annotations

import contextlib
import os
from concurrent.futures import ThreadPoolExecutor

from . import _pykernels

_BACKENDS = {"python": _pykernels}
try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None
else:
    _BACKENDS["compiled"] = _ckernels

_PARALLEL_MIN_CHUNK = 4096


def available_backends() -> list[str]:
    return sorted(_BACKENDS)


def get_backend(name: str | None = None):
    if name is None or name == "auto":
        return _active
    try:
        return _BACKENDS[name]
    except KeyError:
        raise ValueError(f"backend {name!r} unavailable; have {available_backends()}") from None


def _default():
    wanted = os.environ.get("QWQRAM_BACKEND", "auto")
    if wanted == "auto":
        return _BACKENDS.get("compiled", _pykernels)
    if wanted not in _BACKENDS:
        raise ImportError(f"QWQRAM_BACKEND={wanted!r} unavailable; have {available_backends()}")
    return _BACKENDS[wanted]


_active = _default()
_workers = 1


def backend_name() -> str:
    return _active.NAME


@contextlib.contextmanager
def use_backend(name: str):
    global _active
    previous, _active = _active, get_backend(name)
    try:
        yield _active
    finally:
        _active = previous


@contextlib.contextmanager
def use_threads(workers: int):
    """Apply kernels over entry chunks on *workers* threads."""
    global _workers
    if workers < 1:
        raise ValueError("workers must be positive")
    previous, _workers = _workers, workers
    try:
        yield
    finally:
        _workers = previous


def run(kernel: str, arrays, *scalars) -> None:
    """Call *kernel* on *arrays* (updated in place) and trailing scalars."""
    fn = getattr(_active, kernel)
    size = len(arrays[0])
    if _workers == 1 or size < 2 * _PARALLEL_MIN_CHUNK:
        fn(*arrays, *scalars)
        return
    # kernels are elementwise, so disjoint slices are independent
    chunks = min(_workers, size // _PARALLEL_MIN_CHUNK)
    bounds = [size * i // chunks for i in range(chunks + 1)]
    with ThreadPoolExecutor(max_workers=chunks) as pool:
        futures = [
            pool.submit(fn, *(x[lo:hi] for x in arrays), *scalars)
            for lo, hi in zip(bounds[:-1], bounds[1:])
        ]
        for f in futures:
            f.result()
