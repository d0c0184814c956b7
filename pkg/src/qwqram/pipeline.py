"""Routing, querying and output stages composed into the qRAM map."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

from . import kernels
from .errors import ShapeError
from .state import MemoryTable, SparseState, TreeShape, make_initial_state
from .walk import level_step_down, level_step_up

Observer = Callable[[str, SparseState], None]


@dataclass
class TraceRecord:
    """Labelled intermediate states of one pipeline run."""

    shape: TreeShape
    steps: list[tuple[str, SparseState]] = field(default_factory=list)

    def record(self, label: str, state: SparseState) -> None:
        # states are immutable values, so holding the reference cannot alias
        self.steps.append((label, state))

    @property
    def labels(self) -> list[str]:
        return [label for label, _ in self.steps]

    def __getitem__(self, label: str) -> SparseState:
        for name, state in self.steps:
            if name == label:
                return state
        raise KeyError(label)

    def __len__(self):
        return len(self.steps)

    @property
    def final(self) -> SparseState:
        return self.steps[-1][1]


def trace_labels(n: int) -> list[str]:
    return (
        [f"psi0_{l}" for l in range(n + 1)]
        + ["query"]
        + [f"psix_{l}" for l in range(n - 1, -1, -1)]
    )


def route(state: SparseState, observer: Optional[Observer] = None) -> SparseState:
    """Apply ``F = F(n|n-1) ... F(1|0)``, one level step per level."""
    for l in range(state.shape.n):
        state = level_step_down(state, l)
        if observer is not None:
            observer(f"psi0_{l + 1}", state)
    return state


def query(state: SparseState, mem: MemoryTable) -> SparseState:
    """XOR ``x(w)`` into the data word of every entry sitting on leaf ``w``.

    Entries away from the leaf level are left alone.
    """
    if mem.shape != state.shape:
        raise ShapeError(f"memory shape {mem.shape} does not match state shape {state.shape}")
    data = state.data.copy()
    kernels.run("xor_leaves", (state.level, data, mem.lookup(state.pos)), state.shape.n)
    return SparseState._derive(state, data=data)


def unroute(state: SparseState, observer: Optional[Observer] = None) -> SparseState:
    """Apply ``F^dagger``: level steps up from ``n-1`` back to ``0``."""
    for l in range(state.shape.n - 1, -1, -1):
        state = level_step_up(state, l)
        if observer is not None:
            observer(f"psix_{l}", state)
    return state


def run_pipeline(state: SparseState, mem: MemoryTable, observer: Optional[Observer] = None) -> SparseState:
    """``F^dagger Q F`` applied to an arbitrary state."""
    if mem.shape != state.shape:
        raise ShapeError(f"memory shape {mem.shape} does not match state shape {state.shape}")
    if observer is not None:
        observer("psi0_0", state)
    state = route(state, observer)
    state = query(state, mem)
    if observer is not None:
        observer("query", state)
    return unroute(state, observer)


def qram(shape: TreeShape, addrs, mem: MemoryTable) -> SparseState:
    return run_pipeline(make_initial_state(shape, addrs), mem)


def qram_traced(shape: TreeShape, addrs, mem: MemoryTable) -> tuple[SparseState, TraceRecord]:
    trace = TraceRecord(shape)
    final = run_pipeline(make_initial_state(shape, addrs), mem, trace.record)
    return final, trace
