"""Dense tensors and the multilinear algebra primitives built on them.

Elements are stored as a flat float64 buffer in column-major order (first
index fastest). Unfoldings follow the Kolda-Bader column ordering, so the
mode-n unfolding of an array ``X`` is
``np.moveaxis(X, n, 0).reshape(I_n, -1, order="F")``.

Modes are 0-based, like numpy axes.
"""

from __future__ import annotations

from math import prod
from typing import Sequence

import numpy as np

__all__ = [
    "DenseTensor",
    "unfold",
    "fold",
    "mode_n_product",
    "multi_mode_product",
    "frobenius_norm",
    "inner_product",
    "multilinear_rank",
]


class DenseTensor:
    """Immutable N-order real tensor.

    Parameters
    ----------
    data : array_like
        Flat buffer of ``prod(dims)`` values in column-major order.
    dims : sequence of int
        Mode sizes ``(I_1, ..., I_N)``.

    Use :meth:`from_array` to build one from an ndarray of any memory layout.
    """

    __slots__ = ("dims", "data")

    def __init__(self, data, dims: Sequence[int]):
        dims = tuple(int(d) for d in dims)
        if len(dims) < 1:
            raise ValueError("tensor order must be at least 1")
        if any(d < 1 for d in dims):
            raise ValueError(f"every dimension must be >= 1, got {dims}")
        if (
            isinstance(data, np.ndarray)
            and data.dtype == np.float64
            and not data.flags.writeable
        ):
            # already frozen: share instead of copying
            buf = data.reshape(-1)
        else:
            buf = np.array(data, dtype=np.float64).reshape(-1)
        if buf.size != prod(dims):
            raise ValueError(
                f"data has {buf.size} elements but dims {dims} need {prod(dims)}"
            )
        buf.flags.writeable = False
        self.dims = dims
        self.data = buf

    @classmethod
    def from_array(cls, array) -> "DenseTensor":
        array = np.asarray(array, dtype=np.float64)
        if array.ndim == 0:
            array = array.reshape(1)
        return cls(array.ravel(order="F"), array.shape)

    @classmethod
    def zeros(cls, dims: Sequence[int]) -> "DenseTensor":
        return cls(np.zeros(prod(dims)), dims)

    @property
    def order(self) -> int:
        return len(self.dims)

    @property
    def size(self) -> int:
        return self.data.size

    def to_array(self) -> np.ndarray:
        """Read-only N-d view with the tensor's dims (Fortran-contiguous)."""
        return self.data.reshape(self.dims, order="F")

    def __eq__(self, other):
        if not isinstance(other, DenseTensor):
            return NotImplemented
        return self.dims == other.dims and np.array_equal(self.data, other.data)

    __hash__ = None

    def __repr__(self):
        return f"DenseTensor(dims={self.dims})"


def _check_mode(mode: int, order: int) -> int:
    if not isinstance(mode, (int, np.integer)) or not 0 <= mode < order:
        raise ValueError(f"mode {mode} is invalid for a tensor of order {order}")
    return int(mode)


def unfold(t: DenseTensor, mode: int) -> np.ndarray:
    """Mode-`mode` unfolding: an ``I_mode x prod(other dims)`` matrix.

    Column ``j`` is the mode-`mode` fiber whose remaining indices, taken in
    increasing mode order with the earliest fastest, have linear index ``j``.
    """
    mode = _check_mode(mode, t.order)
    return np.moveaxis(t.to_array(), mode, 0).reshape(t.dims[mode], -1, order="F")


def fold(m, mode: int, dims: Sequence[int]) -> DenseTensor:
    """Inverse of :func:`unfold`."""
    dims = tuple(int(d) for d in dims)
    mode = _check_mode(mode, len(dims))
    m = np.asarray(m, dtype=np.float64)
    rest = prod(dims) // dims[mode]
    if m.ndim != 2 or m.shape != (dims[mode], rest):
        raise ValueError(
            f"matrix of shape {m.shape} cannot fold into mode {mode} of {dims}; "
            f"expected {(dims[mode], rest)}"
        )
    moved = (dims[mode],) + dims[:mode] + dims[mode + 1 :]
    array = np.moveaxis(m.reshape(moved, order="F"), 0, mode)
    return DenseTensor.from_array(array)


def _mode_product_array(x: np.ndarray, u: np.ndarray, mode: int) -> np.ndarray:
    return np.moveaxis(np.tensordot(u, x, axes=(1, mode)), 0, mode)


def mode_n_product(t: DenseTensor, u, mode: int) -> DenseTensor:
    """Multiply every mode-`mode` fiber of `t` by the matrix `u`.

    ``u`` has shape ``(H, I_mode)``; the result has ``I_mode`` replaced by ``H``.
    """
    mode = _check_mode(mode, t.order)
    u = np.asarray(u, dtype=np.float64)
    if u.ndim != 2 or u.shape[1] != t.dims[mode]:
        raise ValueError(
            f"matrix of shape {u.shape} does not match mode {mode} of size {t.dims[mode]}"
        )
    return DenseTensor.from_array(_mode_product_array(t.to_array(), u, mode))


def multi_mode_product(
    t: DenseTensor, matrices: Sequence, transpose: bool = False
) -> DenseTensor:
    """Apply ``t x_1 A_1 x_2 A_2 ... x_N A_N`` in mode order.

    With ``transpose=True`` each ``A_n`` is used transposed, which is how core
    tensors are obtained from orthonormal factors.
    """
    if len(matrices) != t.order:
        raise ValueError(f"need {t.order} matrices, got {len(matrices)}")
    x = t.to_array()
    for mode, a in enumerate(matrices):
        a = np.asarray(a, dtype=np.float64)
        if transpose:
            a = a.T
        if a.ndim != 2 or a.shape[1] != x.shape[mode]:
            raise ValueError(
                f"matrix of shape {a.shape} does not match mode {mode} of size {x.shape[mode]}"
            )
        x = _mode_product_array(x, a, mode)
    return DenseTensor.from_array(x)


def frobenius_norm(t: DenseTensor) -> float:
    return float(np.linalg.norm(t.data))


def inner_product(a: DenseTensor, b: DenseTensor) -> float:
    if a.dims != b.dims:
        raise ValueError(f"shape mismatch: {a.dims} vs {b.dims}")
    return float(np.dot(a.data, b.data))


def multilinear_rank(t: DenseTensor) -> tuple[int, ...]:
    """Numerical rank of every unfolding.

    A singular value counts when it exceeds ``max(shape) * eps * sigma_max``
    of that unfolding.
    """
    ranks = []
    for mode in range(t.order):
        m = unfold(t, mode)
        s = np.linalg.svd(m, compute_uv=False)
        if s.size == 0 or s[0] == 0.0:
            ranks.append(0)
            continue
        tol = max(m.shape) * np.finfo(np.float64).eps * s[0]
        ranks.append(int(np.count_nonzero(s > tol)))
    return tuple(ranks)
