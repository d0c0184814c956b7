"""Dense-matrix reference operators for brute-force checks at small sizes.

Matrices are assembled from ket-bra sums and Kronecker products on
``V_B (x) V_C (x) V_A (x) V_D`` and never call the sparse kernels.  Basis
index of ``(node, c, a, d)`` is ``((flat * 2 + c) * 2**n + a) * 2**m + d``,
which is the canonical entry order.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cached_property, reduce
from typing import Optional

import numpy as np

from . import pipeline, walk
from .errors import DomainError, ResourceError
from .state import MemoryTable, NodeIndex, SparseState, TreeShape

DEFAULT_CAP = 4096
CACHE_MAX_DIM = 1024
UNITARY_TOL = 1e-10

_I2 = np.eye(2, dtype=np.complex128)
_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
_P = [np.diag([1, 0]).astype(np.complex128), np.diag([0, 1]).astype(np.complex128)]


class OpKind(enum.Enum):
    SHIFT_LEVEL = "shift_level"
    COIN = "coin"
    LEVEL_STEP_DOWN = "level_step_down"
    LEVEL_STEP_UP = "level_step_up"
    ROUTE = "route"
    QUERY = "query"
    UNROUTE = "unroute"
    QRAM = "qram"


_LEVEL_KINDS = {OpKind.SHIFT_LEVEL, OpKind.LEVEL_STEP_DOWN, OpKind.LEVEL_STEP_UP}
_MEMORY_KINDS = {OpKind.QUERY, OpKind.QRAM}


@dataclass(frozen=True, eq=False)
class OperatorSpec:
    kind: OpKind
    shape: TreeShape
    param: Optional[int] = None
    memory: Optional[MemoryTable] = None

    def __post_init__(self):
        n = self.shape.n
        if self.kind in _LEVEL_KINDS:
            if self.param is None or not 0 <= self.param <= n - 1:
                raise DomainError(f"{self.kind.value} needs a level in [0, {n - 1}], got {self.param}")
        elif self.kind is OpKind.COIN:
            if self.param is None or not 0 <= self.param <= n:
                raise DomainError(f"coin needs a target in [0, {n}], got {self.param}")
        elif self.param is not None:
            raise DomainError(f"{self.kind.value} takes no parameter")
        if self.kind in _MEMORY_KINDS:
            if self.memory is None or self.memory.shape != self.shape:
                raise DomainError(f"{self.kind.value} needs a memory table of shape {self.shape}")

    def __str__(self):
        return self.kind.value if self.param is None else f"{self.kind.value}({self.param})"

    @classmethod
    def all_for(cls, shape: TreeShape, mem: MemoryTable) -> list[OperatorSpec]:
        """Every operator of the pipeline for *shape*."""
        n = shape.n
        specs = [cls(OpKind.SHIFT_LEVEL, shape, l) for l in range(n)]
        specs += [cls(OpKind.COIN, shape, k) for k in range(n + 1)]
        specs += [cls(OpKind.LEVEL_STEP_DOWN, shape, l) for l in range(n)]
        specs += [cls(OpKind.LEVEL_STEP_UP, shape, l) for l in range(n)]
        specs += [cls(OpKind.ROUTE, shape), cls(OpKind.QUERY, shape, memory=mem)]
        specs += [cls(OpKind.UNROUTE, shape), cls(OpKind.QRAM, shape, memory=mem)]
        return specs


def _kron(*factors):
    return reduce(np.kron, factors)


def _ket_bra(dim, i, j):
    out = np.zeros((dim, dim), dtype=np.complex128)
    out[i, j] = 1.0
    return out


class DenseBuilder:
    """Caches dense factors for one shape."""

    def __init__(self, shape: TreeShape, cap: int = DEFAULT_CAP):
        if shape.dim > cap:
            raise ResourceError(
                f"dense dimension {shape.dim} for n={shape.n}, m={shape.m} exceeds cap {cap}"
            )
        self.shape = shape
        self.nb = shape.num_nodes
        self.na = 1 << shape.n
        self.nd = 1 << shape.m
        self._cache: dict = {}
        # a 4096-dim complex matrix is 256 MiB; keep only small factors around
        self._caching = shape.dim <= CACHE_MAX_DIM

    @property
    def dim(self):
        return self.shape.dim

    def _node(self, l, w):
        return NodeIndex(l, w).flat

    def _bus_proj(self, flat):
        return _ket_bra(self.nb, flat, flat)

    @cached_property
    def identity(self):
        return np.eye(self.dim, dtype=np.complex128)

    def _cached(self, key, factory):
        mat = self._cache.get(key)
        if mat is None:
            mat = factory()
            if self._caching:
                self._cache[key] = mat
        return mat

    def shift_level(self, l):
        return self._cached(("S", l), lambda: self._build_shift(l))

    def _build_shift(self, l):
        nb = self.nb
        bc = np.zeros((2 * nb, 2 * nb), dtype=np.complex128)
        for w in range(1 << l):
            parent = self._node(l, w)
            for i in (0, 1):
                child = self._node(l + 1, 2 * w + i)
                bc += np.kron(_ket_bra(nb, child, parent) + _ket_bra(nb, parent, child), _P[i])
                # the child that does not match chirality i stays put
                other = self._node(l + 1, 2 * w + (1 + (-1) ** i) // 2)
                bc += np.kron(_ket_bra(nb, other, other), _P[i])
        for lev in range(self.shape.n + 1):
            if lev in (l, l + 1):
                continue
            for w in range(1 << lev):
                bc += np.kron(self._bus_proj(self._node(lev, w)), _I2)
        return _kron(bc, np.eye(self.na), np.eye(self.nd))

    def coin(self, k):
        return self._cached(("C", k), lambda: self._build_coin(k))

    def _build_coin(self, k):
        n = self.shape.n
        if k == n:
            return self.identity
        # projector onto a_k = b inside (C^2)^{(x) n}, a_{n-1} the leading factor
        proj = [_kron(np.eye(1 << (n - 1 - k)), _P[b], np.eye(1 << k)) for b in (0, 1)]
        ca = np.kron(_I2, proj[0]) + np.kron(_X, proj[1])
        return _kron(np.eye(self.nb), ca, np.eye(self.nd))

    def level_step_down(self, l):
        n = self.shape.n
        return self._cached(
            ("Fd", l), lambda: self.shift_level(l) @ self.coin(n - (l + 1)) @ self.coin(n - l)
        )

    def level_step_up(self, l):
        n = self.shape.n
        return self._cached(
            ("Fu", l), lambda: self.coin(n - l) @ self.coin(n - (l + 1)) @ self.shift_level(l)
        )

    def route(self):
        def product():
            mat = self.identity
            for l in range(self.shape.n):
                mat = self.level_step_down(l) @ mat
            return mat

        return self._cached("F", product)

    def unroute(self):
        def product():
            mat = self.identity
            for l in range(self.shape.n - 1, -1, -1):
                mat = self.level_step_up(l) @ mat
            return mat

        return self._cached("Fdag", product)

    def _x_word(self, x):
        # (X_{D_{m-1}})^{x_{m-1}} (x) ... (x) (X_{D_0})^{x_0}
        m = self.shape.m
        return _kron(*[_X if (x >> i) & 1 else _I2 for i in range(m - 1, -1, -1)])

    def query(self, mem: MemoryTable):
        n = self.shape.n
        bd = np.zeros((self.nb * self.nd, self.nb * self.nd), dtype=np.complex128)
        for a in range(1 << n):
            bd += np.kron(self._bus_proj(self._node(n, a)), self._x_word(mem[a]))
        for lev in range(n):
            for w in range(1 << lev):
                bd += np.kron(self._bus_proj(self._node(lev, w)), np.eye(self.nd))
        # reorder B (x) D into B (x) C (x) A (x) D
        full = np.einsum("bdBD,cC,aA->bcadBCAD",
                         bd.reshape(self.nb, self.nd, self.nb, self.nd), _I2, np.eye(self.na))
        return full.reshape(self.dim, self.dim)

    def qram(self, mem: MemoryTable):
        return self.unroute() @ self.query(mem) @ self.route()

    def build(self, spec: OperatorSpec) -> np.ndarray:
        if spec.shape != self.shape:
            raise DomainError("operator shape does not match builder shape")
        k = spec.kind
        if k is OpKind.SHIFT_LEVEL:
            return self.shift_level(spec.param)
        if k is OpKind.COIN:
            return self.coin(spec.param)
        if k is OpKind.LEVEL_STEP_DOWN:
            return self.level_step_down(spec.param)
        if k is OpKind.LEVEL_STEP_UP:
            return self.level_step_up(spec.param)
        if k is OpKind.ROUTE:
            return self.route()
        if k is OpKind.UNROUTE:
            return self.unroute()
        if k is OpKind.QUERY:
            return self.query(spec.memory)
        return self.qram(spec.memory)


def build_dense(spec: OperatorSpec, cap: int = DEFAULT_CAP) -> np.ndarray:
    return DenseBuilder(spec.shape, cap).build(spec).copy()


def check_unitary(mat: np.ndarray) -> float:
    """Max entry of ``|U^dagger U - I|``."""
    mat = np.asarray(mat)
    gram = mat.conj().T @ mat
    return float(np.max(np.abs(gram - np.eye(mat.shape[0]))))


def is_permutation_matrix(mat: np.ndarray) -> bool:
    """Every column holds exactly one nonzero entry and it equals 1."""
    mat = np.asarray(mat)
    nonzero = mat != 0
    if not np.all(nonzero.sum(axis=0) == 1) or not np.all(nonzero.sum(axis=1) == 1):
        return False
    return bool(np.all(mat[nonzero] == 1))


def apply_sparse(spec: OperatorSpec, state: SparseState) -> SparseState:
    """The sparse transformer corresponding to *spec*."""
    k = spec.kind
    if k is OpKind.SHIFT_LEVEL:
        return walk.apply_shift_level(state, spec.param)
    if k is OpKind.COIN:
        return walk.apply_coin(state, spec.param)
    if k is OpKind.LEVEL_STEP_DOWN:
        return walk.level_step_down(state, spec.param)
    if k is OpKind.LEVEL_STEP_UP:
        return walk.level_step_up(state, spec.param)
    if k is OpKind.ROUTE:
        return pipeline.route(state)
    if k is OpKind.UNROUTE:
        return pipeline.unroute(state)
    if k is OpKind.QUERY:
        return pipeline.query(state, spec.memory)
    return pipeline.run_pipeline(state, spec.memory)


def state_indices(state: SparseState) -> np.ndarray:
    n, m = state.shape.n, state.shape.m
    return (((state.flat_ids() * 2 + state.chir) << n | state.addr) << m) | state.data


def state_to_vector(state: SparseState) -> np.ndarray:
    vec = np.zeros(state.shape.dim, dtype=np.complex128)
    np.add.at(vec, state_indices(state), state.amp)
    return vec


def vector_to_state(shape: TreeShape, vec: np.ndarray) -> SparseState:
    idx = np.flatnonzero(vec)
    n, m = shape.n, shape.m
    data = idx & ((1 << m) - 1)
    addr = (idx >> m) & ((1 << n) - 1)
    chir = (idx >> (n + m)) & 1
    flat = idx >> (n + m + 1)
    level = np.array([NodeIndex.from_flat(int(f)).l for f in flat], dtype=np.int64)
    pos = flat + 1 - (np.int64(1) << level)
    return SparseState(shape, level, pos, chir, addr, data, vec[idx])


def random_sparse_state(shape: TreeShape, rng: np.random.Generator, max_support: int = 8) -> SparseState:
    """Random normalised state on uniformly chosen basis labels."""
    dim = shape.dim
    size = int(rng.integers(1, min(dim, max_support) + 1))
    idx = rng.choice(dim, size=size, replace=False)
    amp = rng.normal(size=size) + 1j * rng.normal(size=size)
    vec = np.zeros(dim, dtype=np.complex128)
    vec[idx] = amp / np.linalg.norm(amp)
    return vector_to_state(shape, vec)


def check_equivalence(spec: OperatorSpec, trials: int = 100, seed: int = 0,
                      cap: int = DEFAULT_CAP, builder: Optional[DenseBuilder] = None) -> float:
    """Max deviation between dense ``U @ v`` and the sparse transformer."""
    builder = builder or DenseBuilder(spec.shape, cap)
    mat = builder.build(spec)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        state = random_sparse_state(spec.shape, rng)
        expected = mat @ state_to_vector(state)
        got = state_to_vector(apply_sparse(spec, state))
        worst = max(worst, float(np.max(np.abs(expected - got))))
    return worst


def check_exhaustive(spec: OperatorSpec, cap: int = DEFAULT_CAP,
                     builder: Optional[DenseBuilder] = None) -> float:
    """Compare dense columns with the sparse image of every basis vector."""
    builder = builder or DenseBuilder(spec.shape, cap)
    mat = builder.build(spec)
    worst = 0.0
    for j in range(spec.shape.dim):
        vec = np.zeros(spec.shape.dim, dtype=np.complex128)
        vec[j] = 1.0
        got = state_to_vector(apply_sparse(spec, vector_to_state(spec.shape, vec)))
        worst = max(worst, float(np.max(np.abs(mat[:, j] - got))))
    return worst


def check_adjoint(l: int, shape: TreeShape, cap: int = DEFAULT_CAP,
                  builder: Optional[DenseBuilder] = None) -> float:
    """Max deviation between ``LevelStepUp(l)`` and ``LevelStepDown(l)^dagger``."""
    builder = builder or DenseBuilder(shape, cap)
    down = builder.build(OperatorSpec(OpKind.LEVEL_STEP_DOWN, shape, l))
    up = builder.build(OperatorSpec(OpKind.LEVEL_STEP_UP, shape, l))
    return float(np.max(np.abs(up - down.conj().T)))


def dump_matrix(mat: np.ndarray, shape: TreeShape) -> str:
    """Debug listing of the nonzero entries, one ``row col RE IM`` per line."""
    rows, cols = np.nonzero(mat)
    lines = [f"qwqram-matrix v1 n={shape.n} m={shape.m} dim={shape.dim}"]
    lines += [
        f"{r} {c} {mat[r, c].real:.16e} {mat[r, c].imag:.16e}" for r, c in zip(rows.tolist(), cols.tolist())
    ]
    return "\n".join(lines) + "\n"
