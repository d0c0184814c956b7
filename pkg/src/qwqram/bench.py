"""Timing of the qRAM pipeline across tree depths and kernel backends."""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from . import kernels
from .pipeline import run_pipeline
from .state import AddressSuperposition, MemoryTable, TreeShape, make_initial_state


@dataclass
class BenchRow:
    backend: str
    n: int
    m: int
    addresses: int
    seconds_per_call: float
    steps: int
    support_sizes: list[int]

    @property
    def support_constant(self) -> bool:
        return all(s == self.addresses for s in self.support_sizes)


def make_instance(shape: TreeShape, count: int, rng: np.random.Generator):
    """Uniform superposition over *count* distinct random addresses."""
    count = min(count, shape.num_leaves)
    addrs = rng.choice(shape.num_leaves, size=count, replace=False)
    # the pipeline only reads the queried cells
    values = rng.integers(0, 1 << shape.m, size=count)
    mem = MemoryTable(shape, dict(zip(addrs.tolist(), values.tolist())))
    return AddressSuperposition.uniform(addrs.tolist()), mem


def count_steps(shape: TreeShape, addrs, mem) -> tuple[int, list[int]]:
    """Primitive pipeline steps after the initial state, and support sizes seen."""
    sizes: list[int] = []
    run_pipeline(make_initial_state(shape, addrs), mem, lambda label, state: sizes.append(len(state)))
    return len(sizes) - 1, sizes


def time_pipeline(shape: TreeShape, addrs, mem, reps: int, rounds: int = 5) -> float:
    """Best-of-*rounds* mean seconds per call."""
    state = make_initial_state(shape, addrs)
    best = float("inf")
    for _ in range(rounds):
        start = time.perf_counter()
        for _ in range(reps):
            run_pipeline(state, mem)
        best = min(best, (time.perf_counter() - start) / reps)
    return best


def sweep(ns, m: int, count: int, reps: int, seed: int = 0, backends=None) -> list[BenchRow]:
    backends = backends or kernels.available_backends()
    rows = []
    for n in ns:
        shape = TreeShape(n, m)
        addrs, mem = make_instance(shape, count, np.random.default_rng(seed + n))
        steps, sizes = count_steps(shape, addrs, mem)
        for name in backends:
            with kernels.use_backend(name):
                seconds = time_pipeline(shape, addrs, mem, reps)
            rows.append(BenchRow(name, n, m, len(addrs), seconds, steps, sizes))
    return rows


def linear_fit(ns, times, factor: float = 2.0):
    """Least-squares ``t = a + b n`` and whether every point is within *factor* of it."""
    ns = np.asarray(ns, dtype=float)
    times = np.asarray(times, dtype=float)
    slope, intercept = np.polyfit(ns, times, 1)
    fitted = intercept + slope * ns
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = times / fitted
    ok = bool(np.all(fitted > 0) and np.all(ratios <= factor) and np.all(ratios >= 1 / factor))
    return ok, float(slope), float(intercept), ratios.tolist()
