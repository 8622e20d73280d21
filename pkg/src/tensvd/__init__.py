"""Lossy tensor compression with tenSVD and truncated HOSVD."""

from .compression import (
    CompressedTensor,
    CompressionTarget,
    InfeasibleBudgetError,
    SparseCore,
    compress,
    decompress,
    select_core_entries,
    tensvd_storage_cost,
)
from .hosvd import TuckerFactors, hosvd_storage_cost, ranks_for_budget, reconstruct, t_hosvd
from .metrics import QualityReport, compression_ratio, mse, psnr, quality_report, relative_error
from .reshape import ReshapePlan, inverse_remap, plan_shape, prime_factorize, remap
from .svd import SpectralResult, gram_matrix, leading_left_singular_vectors
from .tensor import (
    DenseTensor,
    fold,
    frobenius_norm,
    inner_product,
    mode_n_product,
    multilinear_rank,
    unfold,
)

__version__ = "0.1.0"
