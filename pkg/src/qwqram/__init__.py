"""Sparse simulator for a bucket-brigade qRAM driven by a coined quantum walk."""

from .errors import DomainError, FormatError, QRAMError, ResourceError, ShapeError
from .kernels import backend_name
from .pipeline import TraceRecord, qram, qram_traced, query, route, run_pipeline, unroute
from .state import (
    AddressSuperposition,
    BasisState,
    MemoryTable,
    NodeIndex,
    SparseState,
    TreeShape,
    canonical_entries,
    make_initial_state,
    max_amplitude_difference,
    norm_squared,
    states_close,
)
from .walk import apply_coin, apply_shift_level, level_step_down, level_step_up

__all__ = [
    "AddressSuperposition",
    "BasisState",
    "DomainError",
    "FormatError",
    "MemoryTable",
    "NodeIndex",
    "QRAMError",
    "ResourceError",
    "ShapeError",
    "SparseState",
    "TraceRecord",
    "TreeShape",
    "apply_coin",
    "apply_shift_level",
    "backend_name",
    "canonical_entries",
    "level_step_down",
    "level_step_up",
    "make_initial_state",
    "max_amplitude_difference",
    "norm_squared",
    "qram",
    "qram_traced",
    "query",
    "route",
    "run_pipeline",
    "states_close",
    "unroute",
]
