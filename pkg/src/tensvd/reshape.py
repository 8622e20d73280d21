"""Reshaping a tensor into a balanced higher-order tensor.

The element count is split into prime factors which are dealt out greedily,
largest first, to whichever bin currently has the smallest product. The
remap itself is a pure reinterpretation of the column-major buffer.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from math import prod
from typing import Optional, Sequence

from .tensor import DenseTensor

__all__ = [
    "ReshapePlan",
    "DegenerateReshapeWarning",
    "prime_factorize",
    "greedy_bins",
    "plan_shape",
    "remap",
    "inverse_remap",
    "AUTO_ORDERS",
]

AUTO_ORDERS = range(3, 9)


class DegenerateReshapeWarning(UserWarning):
    """The element count is prime (or 1) and cannot be split."""


@dataclass(frozen=True)
class ReshapePlan:
    original_dims: tuple[int, ...]
    reshaped_dims: tuple[int, ...]
    degenerate: bool = field(default=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "original_dims", tuple(int(d) for d in self.original_dims))
        object.__setattr__(self, "reshaped_dims", tuple(int(d) for d in self.reshaped_dims))
        if not self.reshaped_dims or not self.original_dims:
            raise ValueError("plan dims must be non-empty")
        if prod(self.original_dims) != prod(self.reshaped_dims):
            raise ValueError(
                f"element count not conserved: {self.original_dims} -> {self.reshaped_dims}"
            )

    @property
    def order(self) -> int:
        return len(self.reshaped_dims)

    @property
    def size(self) -> int:
        return prod(self.original_dims)

    @property
    def imbalance(self) -> float:
        return max(self.reshaped_dims) / min(self.reshaped_dims)


def prime_factorize(n: int) -> list[int]:
    """Prime factors of `n` in non-decreasing order (empty for 1)."""
    n = int(n)
    if n < 1:
        raise ValueError(f"cannot factorize {n}")
    factors = []
    while n % 2 == 0:
        factors.append(2)
        n //= 2
    p = 3
    while p * p <= n:
        while n % p == 0:
            factors.append(p)
            n //= p
        p += 2
    if n > 1:
        factors.append(n)
    return factors


def greedy_bins(primes: Sequence[int], order: int) -> tuple[int, ...]:
    """Assign primes (largest first) to the bin with the smallest product.

    Among equally small bins the lowest index wins.
    """
    bins = [1] * order
    for p in sorted(primes, reverse=True):
        bins[bins.index(min(bins))] *= p
    return tuple(bins)


def plan_shape(dims: Sequence[int], order_hint: Optional[int] = None) -> ReshapePlan:
    """Choose a near-hypercube shape with the same element count as `dims`.

    Without `order_hint`, every order in 3..8 that the prime factorization
    supports is tried and the least imbalanced (``max(J) / min(J)``) wins,
    ties going to the smaller order. A prime element count falls back to an
    order-1 plan with a :class:`DegenerateReshapeWarning`.
    """
    dims = tuple(int(d) for d in dims)
    total = prod(dims)
    if total < 1:
        raise ValueError(f"invalid dims {dims}")
    primes = prime_factorize(total)

    if len(primes) <= 1:
        warnings.warn(
            f"element count {total} cannot be split; using an order-1 plan",
            DegenerateReshapeWarning,
            stacklevel=2,
        )
        return ReshapePlan(dims, (total,), degenerate=True)

    if order_hint is not None:
        order_hint = int(order_hint)
        if order_hint < 1:
            raise ValueError(f"order_hint must be >= 1, got {order_hint}")
        if order_hint > len(primes):
            raise ValueError(
                f"order {order_hint} is infeasible: {total} has only "
                f"{len(primes)} prime factors"
            )
        return ReshapePlan(dims, greedy_bins(primes, order_hint))

    candidates = [m for m in AUTO_ORDERS if m <= len(primes)]
    if not candidates:
        return ReshapePlan(dims, greedy_bins(primes, len(primes)))
    best = None
    for m in candidates:
        shape = greedy_bins(primes, m)
        score = max(shape) / min(shape)
        if best is None or score < best[0]:
            best = (score, shape)
    return ReshapePlan(dims, best[1])


def remap(t: DenseTensor, plan: ReshapePlan) -> DenseTensor:
    if t.dims != plan.original_dims:
        raise ValueError(f"tensor dims {t.dims} do not match plan {plan.original_dims}")
    return DenseTensor(t.data, plan.reshaped_dims)


def inverse_remap(t: DenseTensor, plan: ReshapePlan) -> DenseTensor:
    if t.dims != plan.reshaped_dims:
        raise ValueError(f"tensor dims {t.dims} do not match plan {plan.reshaped_dims}")
    return DenseTensor(t.data, plan.original_dims)
