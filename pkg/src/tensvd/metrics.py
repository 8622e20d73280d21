"""Quality and storage metrics for compressed tensors."""

from __future__ import annotations

import json
import math
import time
from dataclasses import asdict, dataclass
from typing import Callable, TypeVar

import numpy as np

from .tensor import DenseTensor

__all__ = [
    "QualityReport",
    "mse",
    "relative_error",
    "psnr",
    "psnr_from_mse",
    "compression_ratio",
    "timed",
    "quality_report",
]

T = TypeVar("T")


def _check_same(x: DenseTensor, xhat: DenseTensor) -> None:
    if x.dims != xhat.dims:
        raise ValueError(f"shape mismatch: {x.dims} vs {xhat.dims}")


def mse(x: DenseTensor, xhat: DenseTensor) -> float:
    _check_same(x, xhat)
    d = x.data - xhat.data
    return float(np.dot(d, d)) / x.size


def relative_error(x: DenseTensor, xhat: DenseTensor) -> float:
    _check_same(x, xhat)
    ref = float(np.linalg.norm(x.data))
    if ref == 0.0:
        raise ValueError("relative error is undefined for an all-zero reference")
    return float(np.linalg.norm(x.data - xhat.data)) / ref


def psnr_from_mse(mse_value: float, peak: float, as_printed: bool = False) -> float:
    """``10 log10(peak^2 / mse)`` in dB; ``inf`` when `mse_value` is zero.

    ``as_printed=True`` divides by ``sqrt(mse)`` instead. That variant does not
    reproduce published PSNR figures and exists only for auditing.
    """
    if mse_value <= 0.0:
        return math.inf
    denom = math.sqrt(mse_value) if as_printed else mse_value
    return 10.0 * math.log10(peak * peak / denom)


def psnr(x: DenseTensor, xhat: DenseTensor, as_printed: bool = False) -> float:
    peak = max(float(x.data.max()), float(xhat.data.max()))
    return psnr_from_mse(mse(x, xhat), peak, as_printed=as_printed)


def compression_ratio(stored_count: int, original_count: int) -> tuple[float, float]:
    """``(stored_fraction, space_savings)``; the two always sum to one."""
    if stored_count <= 0 or original_count <= 0:
        raise ValueError("counts must be positive")
    stored = stored_count / original_count
    return stored, 1.0 - stored


def timed(action: Callable[[], T]) -> tuple[T, float]:
    """Run `action` and return its result with elapsed monotonic seconds."""
    start = time.perf_counter()
    result = action()
    return result, time.perf_counter() - start


@dataclass
class QualityReport:
    mse: float
    err: float
    psnr: float
    cr_stored_fraction: float
    cr_space_savings: float
    elapsed_seconds: float

    def to_dict(self) -> dict:
        return asdict(self)

    def to_text(self) -> str:
        return "\n".join(f"{k}={v!r}" for k, v in self.to_dict().items())

    def to_json(self) -> str:
        # inf PSNR is written as the string "inf" to stay valid JSON
        d = {k: ("inf" if isinstance(v, float) and math.isinf(v) else v)
             for k, v in self.to_dict().items()}
        return json.dumps(d)


def quality_report(
    x: DenseTensor,
    xhat: DenseTensor,
    stored_count: int,
    elapsed_seconds: float = 0.0,
    psnr_as_printed: bool = False,
) -> QualityReport:
    stored, savings = compression_ratio(stored_count, x.size)
    return QualityReport(
        mse=mse(x, xhat),
        err=relative_error(x, xhat),
        psnr=psnr(x, xhat, as_printed=psnr_as_printed),
        cr_stored_fraction=stored,
        cr_space_savings=savings,
        elapsed_seconds=elapsed_seconds,
    )
