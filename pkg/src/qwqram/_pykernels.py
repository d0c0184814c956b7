"""Numpy implementations of the per-entry walk kernels.

Used when the compiled extension is unavailable.  Every kernel updates its
array arguments in place; all arrays are int64 and of equal length.
"""

import numpy as np

NAME = "python"


def shift_level(level, pos, chir, l):
    at_parent = level == l
    at_child = level == l + 1
    back = at_child & ((pos & 1) == chir)
    pos[at_parent] = 2 * pos[at_parent] + chir[at_parent]
    level[at_parent] = l + 1
    pos[back] >>= 1
    level[back] = l


def coin(chir, addr, k):
    chir ^= (addr >> k) & 1


def step_down(level, pos, chir, addr, l, n):
    if n - l < n:
        coin(chir, addr, n - l)
    coin(chir, addr, n - l - 1)
    shift_level(level, pos, chir, l)


def step_up(level, pos, chir, addr, l, n):
    shift_level(level, pos, chir, l)
    coin(chir, addr, n - l - 1)
    if n - l < n:
        coin(chir, addr, n - l)


def xor_leaves(level, data, values, n):
    leaf = level == n
    data[leaf] ^= values[leaf]
