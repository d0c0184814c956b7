import numpy as np
import pytest

from qwqram import _pykernels, kernels
from qwqram.pipeline import qram
from qwqram.state import AddressSuperposition, MemoryTable, TreeShape

from conftest import random_state

compiled = pytest.importorskip("qwqram._ckernels")


def random_columns(rng, n, size):
    level = rng.integers(0, n + 1, size=size)
    pos = rng.integers(0, 1 << 62, size=size) % (np.int64(1) << level)
    chir = rng.integers(0, 2, size=size)
    addr = rng.integers(0, 1 << n, size=size)
    data = rng.integers(0, 16, size=size)
    return [x.astype(np.int64) for x in (level, pos, chir, addr, data)]


@pytest.mark.parametrize("n", [1, 3, 10, 40])
def test_backends_agree(rng, n):
    for _ in range(5):
        cols = random_columns(rng, n, 500)
        l = int(rng.integers(0, n))
        k = int(rng.integers(0, n + 1))
        values = rng.integers(0, 16, size=500).astype(np.int64)
        calls = [
            ("shift_level", (0, 1, 2), (l,)),
            ("coin", (2, 3), (k,)),
            ("step_down", (0, 1, 2, 3), (l, n)),
            ("step_up", (0, 1, 2, 3), (l, n)),
        ]
        for name, idx, scalars in calls:
            a = [cols[i].copy() for i in idx]
            b = [cols[i].copy() for i in idx]
            getattr(_pykernels, name)(*a, *scalars)
            getattr(compiled, name)(*b, *scalars)
            for x, y in zip(a, b):
                assert np.array_equal(x, y), name
        a = [cols[0].copy(), cols[4].copy(), values]
        b = [cols[0].copy(), cols[4].copy(), values]
        _pykernels.xor_leaves(*a, n)
        compiled.xor_leaves(*b, n)
        assert np.array_equal(a[1], b[1])


def test_selection_default_is_compiled():
    assert kernels.available_backends() == ["compiled", "python"]
    assert kernels.backend_name() in ("compiled", "python")


def test_unknown_backend():
    with pytest.raises(ValueError):
        kernels.get_backend("fortran")


def test_threads_are_byte_identical(rng):
    shape = TreeShape(16, 4)
    picks = rng.choice(1 << 16, size=20000, replace=False).tolist()
    addrs = AddressSuperposition.uniform(picks)
    mem = MemoryTable(shape, {a: a % 16 for a in picks})
    serial = qram(shape, addrs, mem)
    with kernels.use_threads(4):
        threaded = qram(shape, addrs, mem)
    assert threaded == serial


def test_threads_validation():
    with pytest.raises(ValueError):
        with kernels.use_threads(0):
            pass


def test_threaded_kernel_matches_serial(rng):
    state = random_state(TreeShape(5, 2), rng, size=11)
    cols = [np.tile(x, 2000) for x in (state.level, state.pos, state.chir, state.addr)]
    serial = [x.copy() for x in cols]
    kernels.run("step_down", serial, 2, 5)
    threaded = [x.copy() for x in cols]
    with kernels.use_threads(3):
        kernels.run("step_down", threaded, 2, 5)
    assert all(np.array_equal(x, y) for x, y in zip(serial, threaded))
