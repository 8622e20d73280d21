"""
Unfoldings, mode products and the Tucker model
==============================================

A tour of the tensor primitives everything else is built on.
"""

import numpy as np

from tensvd import DenseTensor, fold, mode_n_product, multilinear_rank, unfold

# %%
# Tensors keep their elements in column-major order: the first index moves
# fastest. The 2x2x2 tensor holding 1..8 therefore has ``x[1, 0, 0] == 2``.
x = DenseTensor(np.arange(1, 9, dtype=float), (2, 2, 2))
print(x.to_array()[1, 0, 0])

# %%
# Each unfolding lays the fibers of one mode out as columns.
print(unfold(x, 0))
print(unfold(x, 2))

# %%
# ``fold`` puts them back.
assert fold(unfold(x, 1), 1, x.dims) == x

# %%
# A mode product multiplies every fiber of a mode by a matrix. Scaling
# mode 0 by two doubles the tensor.
print(mode_n_product(x, 2 * np.eye(2), 0).to_array()[..., 0])

# %%
# The multilinear rank is the rank of every unfolding. An outer product of
# three vectors has rank (1, 1, 1); random data is full rank.
rng = np.random.default_rng(0)
outer = np.einsum("i,j,k->ijk", rng.random(4), rng.random(5), rng.random(6))
print(multilinear_rank(DenseTensor.from_array(outer)))
print(multilinear_rank(DenseTensor.from_array(rng.random((3, 4, 5)))))
