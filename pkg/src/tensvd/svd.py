"""Left singular vectors through the Gram matrix.

For a short-and-wide unfolding ``M`` (``rows << cols``) the eigenvectors of
``M M^T`` are the left singular vectors of ``M`` and the eigenvalues are the
squared singular values. Forming the Gram matrix costs ``rows^2 * cols`` and
the eigensolve only ``rows^3``. The price is a squared condition number,
which is harmless for compression but worth knowing.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

__all__ = [
    "SpectralResult",
    "gram_matrix",
    "leading_left_singular_vectors",
    "direct_left_singular_vectors",
]


@dataclass(frozen=True)
class SpectralResult:
    """Orthonormal columns and the matching squared singular values (descending)."""

    vectors: np.ndarray
    values: np.ndarray

    @property
    def singular_values(self) -> np.ndarray:
        return np.sqrt(self.values)


def gram_matrix(m) -> np.ndarray:
    """``m @ m.T``, symmetrized to remove round-off asymmetry."""
    m = np.asarray(m, dtype=np.float64)
    g = m @ m.T
    return 0.5 * (g + g.T)


def _fix_signs(vectors: np.ndarray) -> np.ndarray:
    # largest-magnitude entry of every column made positive
    if vectors.size == 0:
        return vectors
    idx = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[idx, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def _check_k(k: int, rows: int) -> int:
    k = int(k)
    if not 1 <= k <= rows:
        raise ValueError(f"k={k} out of range 1..{rows}")
    return k


def leading_left_singular_vectors(m, k: int) -> SpectralResult:
    """The `k` leading left singular vectors of `m` via ``eigh(m m^T)``."""
    m = np.asarray(m, dtype=np.float64)
    k = _check_k(k, m.shape[0])
    g = gram_matrix(m)
    n = g.shape[0]
    values, vectors = scipy.linalg.eigh(g, subset_by_index=(n - k, n - 1))
    values = np.clip(values[::-1], 0.0, None)
    vectors = _fix_signs(np.ascontiguousarray(vectors[:, ::-1]))
    return SpectralResult(vectors, values)


def direct_left_singular_vectors(m, k: int) -> SpectralResult:
    """Same contract as :func:`leading_left_singular_vectors`, from a thin SVD of `m`.

    Used as the baseline route and as an oracle in tests.
    """
    m = np.asarray(m, dtype=np.float64)
    k = _check_k(k, m.shape[0])
    u, s, _ = np.linalg.svd(m, full_matrices=False)
    values = np.zeros(k)
    ncols = min(k, s.size)
    values[:ncols] = s[:ncols] ** 2
    if u.shape[1] < k:
        # wide matrices never hit this; tall ones need a completed basis
        q, _ = np.linalg.qr(np.hstack([u, np.eye(m.shape[0])]))
        u = q
    return SpectralResult(_fix_signs(np.ascontiguousarray(u[:, :k])), values)
