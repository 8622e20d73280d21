"""Truncated HOSVD (t-HOSVD) and Tucker reconstruction."""

from __future__ import annotations

from dataclasses import dataclass
from math import ceil, prod
from typing import Sequence

import numpy as np

from .svd import direct_left_singular_vectors, leading_left_singular_vectors
from .tensor import DenseTensor, multi_mode_product, unfold

__all__ = [
    "TuckerFactors",
    "t_hosvd",
    "reconstruct",
    "hosvd_storage_cost",
    "ranks_for_budget",
]


@dataclass(frozen=True)
class TuckerFactors:
    """Factor matrices ``U_n`` (``I_n x r_n``) and the core of dims ``(r_1..r_N)``."""

    factors: tuple
    core: DenseTensor

    def __post_init__(self):
        factors = tuple(np.asarray(u, dtype=np.float64) for u in self.factors)
        object.__setattr__(self, "factors", factors)
        if len(factors) != self.core.order:
            raise ValueError(
                f"{len(factors)} factors for a core of order {self.core.order}"
            )
        for n, (u, r) in enumerate(zip(factors, self.core.dims)):
            if u.ndim != 2 or u.shape[1] != r:
                raise ValueError(f"factor {n} has shape {u.shape}, core dim is {r}")

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(u.shape[0] for u in self.factors)

    @property
    def ranks(self) -> tuple[int, ...]:
        return self.core.dims

    @property
    def stored_count(self) -> int:
        return hosvd_storage_cost(self.dims, self.ranks)


def t_hosvd(t: DenseTensor, ranks: Sequence[int], method: str = "gram") -> TuckerFactors:
    """Truncated HOSVD of `t` with multilinear ranks `ranks`.

    Parameters
    ----------
    t : DenseTensor
    ranks : sequence of int
        One rank per mode, ``1 <= ranks[n] <= t.dims[n]``.
    method : {"gram", "svd"}
        ``"gram"`` eigendecomposes ``X_(n) X_(n)^T``; ``"svd"`` takes a thin
        SVD of the unfolding directly.
    """
    ranks = tuple(int(r) for r in ranks)
    if len(ranks) != t.order:
        raise ValueError(f"need {t.order} ranks, got {len(ranks)}")
    for n, (r, d) in enumerate(zip(ranks, t.dims)):
        if not 1 <= r <= d:
            raise ValueError(f"rank {r} for mode {n} is outside 1..{d}")
    if method == "gram":
        solver = leading_left_singular_vectors
    elif method == "svd":
        solver = direct_left_singular_vectors
    else:
        raise ValueError(f"unknown method {method!r}")

    factors = tuple(solver(unfold(t, n), r).vectors for n, r in enumerate(ranks))
    core = multi_mode_product(t, factors, transpose=True)
    return TuckerFactors(factors, core)


def reconstruct(f: TuckerFactors) -> DenseTensor:
    return multi_mode_product(f.core, f.factors)


def hosvd_storage_cost(dims: Sequence[int], ranks: Sequence[int]) -> int:
    """Stored reals for a Tucker model: ``sum(I_n * r_n) + prod(r_n)``."""
    if len(dims) != len(ranks):
        raise ValueError("dims and ranks differ in length")
    if any(r > d for r, d in zip(ranks, dims)):
        raise ValueError(f"ranks {tuple(ranks)} exceed dims {tuple(dims)}")
    return sum(int(d) * int(r) for d, r in zip(dims, ranks)) + prod(int(r) for r in ranks)


def ranks_for_budget(
    dims: Sequence[int], stored_fraction: float, full_rank_below: int = 3
) -> tuple[int, ...]:
    """Largest proportional ranks whose storage fits a stored-fraction budget.

    Ranks follow ``r_n = ceil(alpha * I_n)`` with ``alpha`` found by bisection.
    Modes of size ``<= full_rank_below`` (colour channels) stay at full rank.

    Raises
    ------
    ValueError
        If even rank 1 on every large mode exceeds the budget.
    """
    dims = tuple(int(d) for d in dims)
    budget = stored_fraction * prod(dims)

    def ranks_at(alpha):
        return tuple(
            d if d <= full_rank_below else min(d, max(1, ceil(alpha * d))) for d in dims
        )

    if hosvd_storage_cost(dims, ranks_at(0.0)) > budget:
        raise ValueError(f"stored fraction {stored_fraction} too small for dims {dims}")
    lo, hi = 0.0, 1.0
    if hosvd_storage_cost(dims, ranks_at(hi)) <= budget:
        return ranks_at(hi)
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if hosvd_storage_cost(dims, ranks_at(mid)) <= budget:
            lo = mid
        else:
            hi = mid
    return ranks_at(lo)
