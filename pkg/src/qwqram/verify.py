"""Dense-oracle verification suite run by ``qwqram verify``."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .oracle import (
    DEFAULT_CAP,
    UNITARY_TOL,
    DenseBuilder,
    OperatorSpec,
    check_adjoint,
    check_equivalence,
    check_exhaustive,
    check_unitary,
    is_permutation_matrix,
)
from .state import MemoryTable, TreeShape

EXHAUSTIVE_MAX_DIM = 256


@dataclass(frozen=True)
class CheckResult:
    name: str
    deviation: float
    tolerance: float = UNITARY_TOL

    @property
    def passed(self) -> bool:
        return self.deviation <= self.tolerance

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.name:<32} max_dev={self.deviation:.3e} tol={self.tolerance:.0e}"


def run_checks(shape: TreeShape, trials: int = 100, seed: int = 0, cap: int = DEFAULT_CAP):
    """Yield one :class:`CheckResult` per check.

    Raises :class:`~qwqram.errors.ResourceError` before any work when the
    dense dimension exceeds *cap*.
    """
    builder = DenseBuilder(shape, cap)
    mem = MemoryTable.random(shape, np.random.default_rng(seed))
    for index, spec in enumerate(OperatorSpec.all_for(shape, mem)):
        mat = builder.build(spec)
        yield CheckResult(f"unitary:{spec}", check_unitary(mat))
        yield CheckResult(f"permutation:{spec}", 0.0 if is_permutation_matrix(mat) else 1.0)
        yield CheckResult(
            f"equivalence:{spec}",
            check_equivalence(spec, trials=trials, seed=seed + index, builder=builder),
        )
        if shape.dim <= EXHAUSTIVE_MAX_DIM:
            yield CheckResult(f"exhaustive:{spec}", check_exhaustive(spec, builder=builder))
        if spec.kind.value == "qram":
            sq = mat @ mat
            yield CheckResult("qram_squared_identity", float(np.max(np.abs(sq - np.eye(shape.dim)))))
        del mat
    for l in range(shape.n):
        yield CheckResult(f"adjoint:level_step({l})", check_adjoint(l, shape, builder=builder))
