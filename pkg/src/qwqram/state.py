"""Basis labelling, sparse states and classical inputs.

A basis vector of ``V = V_B (x) V_C (x) V_A (x) V_D`` is labelled by a tree
node ``(l, w)``, a chirality bit ``c``, an ``n``-bit address ``a`` and an
``m``-bit data word ``d``.  :class:`SparseState` keeps the nonzero
amplitudes as parallel numpy arrays so the walk kernels can work on whole
columns at once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, NamedTuple

import numpy as np

from .errors import DomainError, ShapeError

PRUNE_THRESHOLD = 1e-12
STATE_ATOL = 1e-9

# int64 storage: flat node ids reach 2**(n+1) - 2, data words 2**m - 1
MAX_ADDRESS_BITS = 61
MAX_DATA_BITS = 62


@dataclass(frozen=True)
class TreeShape:
    """Address width ``n`` (tree depth) and data width ``m``."""

    n: int
    m: int

    def __post_init__(self):
        for name, value, top in (("n", self.n, MAX_ADDRESS_BITS), ("m", self.m, MAX_DATA_BITS)):
            if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
                raise DomainError(f"{name} must be an integer, got {value!r}")
            if not 1 <= value <= top:
                raise DomainError(f"{name} must lie in [1, {top}], got {value}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "m", int(self.m))

    @property
    def num_nodes(self) -> int:
        return (1 << (self.n + 1)) - 1

    @property
    def num_leaves(self) -> int:
        return 1 << self.n

    @property
    def dim(self) -> int:
        """Dimension of the full space ``V``."""
        return self.num_nodes * 2 * (1 << self.n) * (1 << self.m)

    def check_address(self, a: int) -> int:
        if not 0 <= a < (1 << self.n):
            raise ShapeError(f"address {a} out of range for n={self.n}")
        return int(a)

    def check_data(self, d: int) -> int:
        if not 0 <= d < (1 << self.m):
            raise ShapeError(f"data word {d} out of range for m={self.m}")
        return int(d)


class NodeIndex(NamedTuple):
    """Node ``w`` (counted from the left) on level ``l``.

    Tuple order on ``(l, w)`` coincides with heap order of :attr:`flat`.
    """

    l: int
    w: int

    @property
    def flat(self) -> int:
        return (1 << self.l) - 1 + self.w

    @classmethod
    def from_flat(cls, flat: int) -> NodeIndex:
        if flat < 0:
            raise DomainError(f"flat node id must be nonnegative, got {flat}")
        l = (flat + 1).bit_length() - 1
        return cls(l, flat + 1 - (1 << l))

    def validate(self, shape: TreeShape) -> NodeIndex:
        if not 0 <= self.l <= shape.n:
            raise ShapeError(f"level {self.l} out of range for n={shape.n}")
        if not 0 <= self.w < (1 << self.l):
            raise ShapeError(f"position {self.w} out of range on level {self.l}")
        return self


class BasisState(NamedTuple):
    node: NodeIndex
    c: int
    a: int
    d: int


def _as_amplitude(value) -> complex:
    amp = complex(value)
    if not (math.isfinite(amp.real) and math.isfinite(amp.imag)):
        raise DomainError(f"amplitude must be finite, got {value!r}")
    return amp


class SparseState:
    """Finite map from basis labels to complex amplitudes.

    Instances are immutable values.  Entries are stored in whatever order
    the last operator left them; :meth:`canonical` and
    :func:`canonical_entries` give the sorted view
    ``(flat node id, c, a, d)``.
    """

    __slots__ = ("shape", "level", "pos", "chir", "addr", "data", "amp")

    def __init__(self, shape: TreeShape, level, pos, chir, addr, data, amp, *, prune=True):
        self.shape = shape
        arrays = [np.array(x, dtype=np.int64, copy=True).reshape(-1) for x in (level, pos, chir, addr, data)]
        amp = np.array(amp, dtype=np.complex128, copy=True).reshape(-1)
        if any(len(x) != len(amp) for x in arrays):
            raise DomainError("state columns must have equal length")
        if not np.all(np.isfinite(amp)):
            raise DomainError("amplitudes must be finite")
        if prune and len(amp):
            keep = np.abs(amp) > PRUNE_THRESHOLD
            if not keep.all():
                arrays = [x[keep] for x in arrays]
                amp = amp[keep]
        for x in arrays:
            x.flags.writeable = False
        amp.flags.writeable = False
        self.level, self.pos, self.chir, self.addr, self.data = arrays
        self.amp = amp

    @classmethod
    def _derive(cls, parent: SparseState, **columns) -> SparseState:
        """New state sharing *parent*'s read-only columns except those given.

        Operators only permute labels, so amplitudes are carried over as
        they are and never need re-pruning.
        """
        self = object.__new__(cls)
        self.shape = parent.shape
        for name in ("level", "pos", "chir", "addr", "data", "amp"):
            value = columns.get(name)
            if value is None:
                value = getattr(parent, name)
            else:
                value.flags.writeable = False
            setattr(self, name, value)
        return self

    @classmethod
    def empty(cls, shape: TreeShape) -> SparseState:
        z = np.zeros(0, dtype=np.int64)
        return cls(shape, z, z, z, z, z, np.zeros(0, dtype=np.complex128))

    @classmethod
    def from_entries(cls, shape: TreeShape, entries) -> SparseState:
        """Build from ``{BasisState: amp}`` or an iterable of pairs.

        Repeated labels are summed.  Labels are validated against *shape*.
        """
        items = entries.items() if isinstance(entries, Mapping) else entries
        merged: dict[BasisState, complex] = {}
        for key, amp in items:
            node = NodeIndex(*key[0]).validate(shape)
            c = int(key[1])
            if c not in (0, 1):
                raise DomainError(f"chirality must be 0 or 1, got {key[1]!r}")
            basis = BasisState(node, c, shape.check_address(key[2]), shape.check_data(key[3]))
            merged[basis] = merged.get(basis, 0j) + _as_amplitude(amp)
        keys = list(merged)
        return cls(
            shape,
            [k.node.l for k in keys],
            [k.node.w for k in keys],
            [k.c for k in keys],
            [k.a for k in keys],
            [k.d for k in keys],
            [merged[k] for k in keys],
        )

    def __len__(self) -> int:
        return len(self.amp)

    def __iter__(self) -> Iterator[tuple[BasisState, complex]]:
        return iter(canonical_entries(self))

    def flat_ids(self) -> np.ndarray:
        return (np.int64(1) << self.level) - 1 + self.pos

    def canonical_order(self) -> np.ndarray:
        return np.lexsort((self.data, self.addr, self.chir, self.flat_ids()))

    def canonical(self) -> SparseState:
        order = self.canonical_order()
        return SparseState(self.shape, *(x[order] for x in self.columns()), prune=False)

    def columns(self):
        return self.level, self.pos, self.chir, self.addr, self.data, self.amp

    def to_dict(self) -> dict[BasisState, complex]:
        return dict(canonical_entries(self))

    def has_collisions(self) -> bool:
        if len(self) < 2:
            return False
        keys = np.stack([self.flat_ids(), self.chir, self.addr, self.data], axis=1)
        return len(np.unique(keys, axis=0)) != len(self)

    def __eq__(self, other):
        # exact equality of canonical forms; see states_close for tolerances
        if not isinstance(other, SparseState):
            return NotImplemented
        if self.shape != other.shape or len(self) != len(other):
            return False
        a, b = self.canonical(), other.canonical()
        return all(np.array_equal(x, y) for x, y in zip(a.columns(), b.columns()))

    __hash__ = None

    def __repr__(self):
        return f"SparseState(n={self.shape.n}, m={self.shape.m}, entries={len(self)})"


def norm_squared(state: SparseState) -> float:
    return float(np.sum(state.amp.real**2 + state.amp.imag**2))


def canonical_entries(state: SparseState) -> list[tuple[BasisState, complex]]:
    s = state.canonical()
    return [
        (BasisState(NodeIndex(l, w), c, a, d), complex(amp))
        for l, w, c, a, d, amp in zip(
            s.level.tolist(), s.pos.tolist(), s.chir.tolist(), s.addr.tolist(), s.data.tolist(), s.amp.tolist()
        )
    ]


def max_amplitude_difference(x: SparseState, y: SparseState) -> float:
    """Max ``|amp_x - amp_y|`` over the union of both supports."""
    dx, dy = x.to_dict(), y.to_dict()
    worst = 0.0
    for key in dx.keys() | dy.keys():
        worst = max(worst, abs(dx.get(key, 0j) - dy.get(key, 0j)))
    return worst


def states_close(x: SparseState, y: SparseState, atol: float = STATE_ATOL) -> bool:
    return x.shape == y.shape and max_amplitude_difference(x, y) <= atol


class MemoryTable:
    """Classical cell contents ``a -> x(a)``; unlisted addresses hold 0."""

    __slots__ = ("shape", "_cells", "_keys", "_values")

    def __init__(self, shape: TreeShape, cells: Mapping[int, int] | Iterable[int] | None = None):
        self.shape = shape
        if cells is None:
            cells = {}
        elif not isinstance(cells, Mapping):
            cells = list(cells)
            if len(cells) > shape.num_leaves:
                raise ShapeError(f"{len(cells)} cells given for {shape.num_leaves} addresses")
            cells = dict(enumerate(cells))
        table = {}
        for a, x in cells.items():
            a, x = shape.check_address(int(a)), shape.check_data(int(x))
            if x:
                table[a] = x
        self._cells = dict(sorted(table.items()))
        self._keys = np.fromiter(self._cells.keys(), dtype=np.int64, count=len(self._cells))
        self._values = np.fromiter(self._cells.values(), dtype=np.int64, count=len(self._cells))

    @classmethod
    def random(cls, shape: TreeShape, rng: np.random.Generator) -> MemoryTable:
        if shape.n > 20:
            raise ShapeError("random memory tables are limited to n <= 20")
        values = rng.integers(0, 1 << shape.m, size=shape.num_leaves, dtype=np.int64)
        return cls(shape, values.tolist())

    def __getitem__(self, a: int) -> int:
        return self._cells.get(self.shape.check_address(a), 0)

    def nonzero_cells(self) -> dict[int, int]:
        return dict(self._cells)

    def lookup(self, addresses: np.ndarray) -> np.ndarray:
        """Vectorised ``x(a)``; addresses outside the table map to 0."""
        addresses = np.asarray(addresses, dtype=np.int64)
        if not len(self._keys):
            return np.zeros(len(addresses), dtype=np.int64)
        idx = np.searchsorted(self._keys, addresses)
        idx = np.minimum(idx, len(self._keys) - 1)
        hit = self._keys[idx] == addresses
        return np.where(hit, self._values[idx], 0)

    def __eq__(self, other):
        if not isinstance(other, MemoryTable):
            return NotImplemented
        return self.shape == other.shape and self._cells == other._cells

    __hash__ = None

    def __repr__(self):
        return f"MemoryTable(n={self.shape.n}, m={self.shape.m}, nonzero={len(self._cells)})"


class AddressSuperposition:
    """Canonical list of ``(address, amplitude)`` terms.

    Duplicate addresses are summed, terms that cancel are dropped, and the
    result is scaled to unit norm unless ``normalize=False``.
    """

    __slots__ = ("terms",)

    def __init__(self, terms, *, normalize: bool = True):
        if isinstance(terms, Mapping):
            terms = terms.items()
        merged: dict[int, complex] = {}
        for a, amp in terms:
            if isinstance(a, bool) or int(a) != a or a < 0:
                raise DomainError(f"address must be a nonnegative integer, got {a!r}")
            merged[int(a)] = merged.get(int(a), 0j) + _as_amplitude(amp)
        if not merged:
            raise DomainError("address superposition is empty")
        kept = [(a, amp) for a, amp in sorted(merged.items()) if abs(amp) > PRUNE_THRESHOLD]
        if not kept:
            raise DomainError("address superposition has zero norm")
        if normalize:
            norm = math.sqrt(math.fsum(abs(amp) ** 2 for _, amp in kept))
            kept = [(a, amp / norm) for a, amp in kept]
        self.terms: tuple[tuple[int, complex], ...] = tuple(kept)

    @classmethod
    def uniform(cls, addresses: Iterable[int]) -> AddressSuperposition:
        return cls([(a, 1.0) for a in addresses])

    def validate(self, shape: TreeShape) -> AddressSuperposition:
        for a, _ in self.terms:
            shape.check_address(a)
        return self

    def __len__(self):
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)

    def __eq__(self, other):
        if not isinstance(other, AddressSuperposition):
            return NotImplemented
        return self.terms == other.terms

    __hash__ = None

    def __repr__(self):
        return f"AddressSuperposition({list(self.terms)!r})"


def make_initial_state(shape: TreeShape, addrs) -> SparseState:
    """Empty bucket at the root with chirality 0 and a zeroed data register.

    *addrs* may be an :class:`AddressSuperposition` or anything its
    constructor accepts (then normalised).
    """
    if not isinstance(addrs, AddressSuperposition):
        addrs = AddressSuperposition(addrs)
    addrs.validate(shape)
    k = len(addrs)
    zeros = np.zeros(k, dtype=np.int64)
    return SparseState(
        shape,
        zeros,
        zeros,
        zeros,
        np.fromiter((a for a, _ in addrs.terms), dtype=np.int64, count=k),
        zeros,
        np.fromiter((amp for _, amp in addrs.terms), dtype=np.complex128, count=k),
    )
