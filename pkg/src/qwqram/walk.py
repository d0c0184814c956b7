"""Shift, coin and level-step transformers on sparse states.

Each shift ``S_(w,l)`` acts on the parent ``(w, l)`` and its two children;
the level operator is the direct sum over ``w`` extended by the identity on
every other level.  The coin ``C_k`` flips chirality when address bit
``a_k`` is set (``k = n`` is the identity).  All operators permute basis
labels and carry amplitudes unchanged.
"""

from __future__ import annotations

from . import kernels
from .errors import DomainError
from .state import SparseState


def _check_level(state: SparseState, l: int) -> int:
    if isinstance(l, bool) or int(l) != l or not 0 <= l <= state.shape.n - 1:
        raise DomainError(f"level {l!r} out of range [0, {state.shape.n - 1}]")
    return int(l)


def _check_coin(state: SparseState, k: int) -> int:
    if isinstance(k, bool) or int(k) != k or not 0 <= k <= state.shape.n:
        raise DomainError(f"coin target {k!r} out of range [0, {state.shape.n}]")
    return int(k)


def apply_shift_level(state: SparseState, l: int) -> SparseState:
    l = _check_level(state, l)
    level, pos = state.level.copy(), state.pos.copy()
    kernels.run("shift_level", (level, pos, state.chir), l)
    return SparseState._derive(state, level=level, pos=pos)


def apply_coin(state: SparseState, k: int) -> SparseState:
    k = _check_coin(state, k)
    if k == state.shape.n:
        return state
    chir = state.chir.copy()
    kernels.run("coin", (chir, state.addr), k)
    return SparseState._derive(state, chir=chir)


def level_step_down(state: SparseState, l: int) -> SparseState:
    """``S_l C_{n-l-1} C_{n-l}``: move every bucket on level *l* one level down."""
    l = _check_level(state, l)
    level, pos, chir = state.level.copy(), state.pos.copy(), state.chir.copy()
    kernels.run("step_down", (level, pos, chir, state.addr), l, state.shape.n)
    return SparseState._derive(state, level=level, pos=pos, chir=chir)


def level_step_up(state: SparseState, l: int) -> SparseState:
    """Adjoint of :func:`level_step_down`; shift and coins are involutions."""
    l = _check_level(state, l)
    level, pos, chir = state.level.copy(), state.pos.copy(), state.chir.copy()
    kernels.run("step_up", (level, pos, chir, state.addr), l, state.shape.n)
    return SparseState._derive(state, level=level, pos=pos, chir=chir)
