"""tenSVD: reshape, full orthonormal factors, sparse core.

The tensor is reinterpreted as a balanced higher-order tensor ``Z``; full
square factors come from the Gram matrices of its unfoldings, so the core
``G`` carries all of ``Z``'s energy (``||Z||^2 == ||G||^2``). Keeping the
``k`` largest-magnitude core entries then gives a relative reconstruction
error of exactly ``sqrt(1 - kept_energy / total_energy)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import floor, sqrt
from typing import Optional

import numpy as np

from .reshape import ReshapePlan, inverse_remap, plan_shape, remap
from .svd import leading_left_singular_vectors
from .tensor import DenseTensor, multi_mode_product, unfold

__all__ = [
    "CompressionTarget",
    "SparseCore",
    "CompressedTensor",
    "InfeasibleBudgetError",
    "compress",
    "decompress",
    "select_core_entries",
    "tensvd_storage_cost",
    "full_factors",
]


class InfeasibleBudgetError(ValueError):
    """A stored-fraction budget cannot hold even the factor matrices."""

    def __init__(self, com: float, minimum_fraction: float):
        self.com = com
        self.minimum_fraction = minimum_fraction
        super().__init__(
            f"stored fraction {com:g} is infeasible: the factor matrices alone "
            f"need {minimum_fraction:.6g} of the original size"
        )


@dataclass(frozen=True)
class CompressionTarget:
    """Exactly one of a relative-error budget or a stored-fraction budget."""

    epsilon: Optional[float] = None
    com: Optional[float] = None

    def __post_init__(self):
        if (self.epsilon is None) == (self.com is None):
            raise ValueError("set exactly one of epsilon or com")
        value = self.epsilon if self.epsilon is not None else self.com
        if not 0.0 < value < 1.0:
            raise ValueError(f"target must lie strictly between 0 and 1, got {value}")

    @classmethod
    def accuracy(cls, epsilon: float) -> "CompressionTarget":
        return cls(epsilon=float(epsilon))

    @classmethod
    def fraction(cls, com: float) -> "CompressionTarget":
        return cls(com=float(com))


@dataclass(frozen=True)
class SparseCore:
    """Kept core entries, largest magnitude first, with column-major positions."""

    positions: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        positions = np.asarray(self.positions, dtype=np.int64).reshape(-1)
        values = np.asarray(self.values, dtype=np.float64).reshape(-1)
        if positions.size != values.size:
            raise ValueError("positions and values differ in length")
        object.__setattr__(self, "positions", positions)
        object.__setattr__(self, "values", values)

    def __len__(self):
        return self.values.size

    @property
    def energy(self) -> float:
        return float(np.dot(self.values, self.values))

    def validate(self, core_size: int) -> None:
        if self.positions.size and (
            self.positions.min() < 0 or self.positions.max() >= core_size
        ):
            raise ValueError(f"core position out of range 0..{core_size - 1}")
        if np.unique(self.positions).size != self.positions.size:
            raise ValueError("duplicate core positions")

    def to_dense(self, dims) -> DenseTensor:
        size = int(np.prod(dims))
        self.validate(size)
        buf = np.zeros(size)
        buf[self.positions] = self.values
        return DenseTensor(buf, dims)


@dataclass(frozen=True)
class CompressedTensor:
    """Everything needed to rebuild the original tensor."""

    plan: ReshapePlan
    factors: tuple
    sparse_core: SparseCore
    total_energy: float

    def __post_init__(self):
        factors = tuple(np.asarray(u, dtype=np.float64) for u in self.factors)
        object.__setattr__(self, "factors", factors)
        if len(factors) != self.plan.order:
            raise ValueError(f"{len(factors)} factors for a plan of order {self.plan.order}")
        for m, (u, j) in enumerate(zip(factors, self.plan.reshaped_dims)):
            if u.shape != (j, j):
                raise ValueError(f"factor {m} has shape {u.shape}, expected {(j, j)}")

    @property
    def original_dims(self) -> tuple[int, ...]:
        return self.plan.original_dims

    @property
    def stored_count(self) -> int:
        return tensvd_storage_cost(self.plan, len(self.sparse_core))

    @property
    def stored_fraction(self) -> float:
        return self.stored_count / self.plan.size

    @property
    def predicted_error(self) -> float:
        """Relative error implied by the energy of the discarded entries."""
        if self.total_energy <= 0.0:
            return 0.0
        return sqrt(max(0.0, 1.0 - self.sparse_core.energy / self.total_energy))


def tensvd_storage_cost(plan: ReshapePlan, k: int) -> int:
    """Full square factors plus a (value, position) pair per kept entry."""
    if k < 0:
        raise ValueError("k must be non-negative")
    return sum(j * j for j in plan.reshaped_dims) + 2 * int(k)


def _ranked_indices(mag: np.ndarray) -> np.ndarray:
    # descending magnitude, ties by ascending linear index
    return np.argsort(-mag, kind="stable")


def _top_k_indices(mag: np.ndarray, k: int) -> np.ndarray:
    """Same result as ``_ranked_indices(mag)[:k]`` without a full sort."""
    n = mag.size
    if k <= 0:
        return np.empty(0, dtype=np.int64)
    if k >= n:
        return _ranked_indices(mag)
    threshold = mag[np.argpartition(mag, n - k)[n - k]]
    above = np.flatnonzero(mag > threshold)
    ties = np.flatnonzero(mag == threshold)[: k - above.size]
    idx = np.concatenate([above, ties])
    return idx[np.lexsort((idx, -mag[idx]))]


def select_core_entries(
    core: DenseTensor, target: CompressionTarget, factor_cost: int
) -> SparseCore:
    """Greedy prefix of core entries by decreasing magnitude.

    With an accuracy target the prefix stops at the first length whose
    discarded energy is at most ``epsilon**2`` of the core energy. With a
    stored-fraction target it takes as many entries as fit in
    ``floor(com * core.size) - factor_cost`` reals at two reals per entry.
    """
    g = core.data
    mag = np.abs(g)
    if target.epsilon is not None:
        order = _ranked_indices(mag)
        energy = g[order] ** 2
        # tail[k] = energy left after keeping the first k entries
        tail = np.append(np.cumsum(energy[::-1])[::-1], 0.0)
        total = tail[0]
        if total <= 0.0:
            raise ValueError("cannot meet a relative-error target on an all-zero core")
        k = int(np.argmax(tail <= target.epsilon**2 * total))
        idx = order[:k]
    else:
        budget = floor(target.com * core.size)
        if budget < factor_cost:
            raise InfeasibleBudgetError(target.com, factor_cost / core.size)
        k = min(core.size, (budget - factor_cost) // 2)
        idx = _top_k_indices(mag, k)
    return SparseCore(idx, g[idx])


def full_factors(z: DenseTensor) -> tuple:
    """Square orthonormal factor for every mode, from the Gram matrices."""
    return tuple(
        leading_left_singular_vectors(unfold(z, m), j).vectors
        for m, j in enumerate(z.dims)
    )


def compress(
    t: DenseTensor,
    target: CompressionTarget,
    order_hint: Optional[int] = None,
    plan: Optional[ReshapePlan] = None,
) -> CompressedTensor:
    """Compress `t` to meet `target`.

    Parameters
    ----------
    t : DenseTensor
        Nonzero input tensor.
    target : CompressionTarget
    order_hint : int, optional
        Order of the reshaped tensor. Chosen automatically when omitted.
    plan : ReshapePlan, optional
        Explicit reshape plan; overrides `order_hint`.

    Raises
    ------
    InfeasibleBudgetError
        If ``target.com`` cannot hold the factor matrices.
    """
    if plan is None:
        plan = plan_shape(t.dims, order_hint)
    z = remap(t, plan)
    total_energy = float(np.dot(z.data, z.data))
    if target.epsilon is not None and total_energy == 0.0:
        raise ValueError("cannot compress an all-zero tensor to a relative-error target")
    factor_cost = tensvd_storage_cost(plan, 0)
    if target.com is not None and floor(target.com * plan.size) < factor_cost:
        raise InfeasibleBudgetError(target.com, factor_cost / plan.size)

    factors = full_factors(z)
    core = multi_mode_product(z, factors, transpose=True)
    sparse = select_core_entries(core, target, factor_cost)
    return CompressedTensor(plan, factors, sparse, total_energy)


def decompress(c: CompressedTensor) -> DenseTensor:
    core = c.sparse_core.to_dense(c.plan.reshaped_dims)
    z = multi_mode_product(core, c.factors)
    return inverse_remap(z, c.plan)
