"""Timing comparison of tenSVD against t-HOSVD on uniform random images.

For every repetition a fresh uniform [0, 1) tensor is drawn, t-HOSVD runs
with proportional ranks fitted to a stored-fraction budget, and tenSVD runs
at the stored fraction t-HOSVD actually achieved. Only the decomposition is
timed.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from math import prod
from typing import Optional

import numpy as np

from .compression import CompressionTarget, compress
from .hosvd import hosvd_storage_cost, ranks_for_budget, t_hosvd
from .metrics import timed
from .reshape import plan_shape
from .tensor import DenseTensor

__all__ = [
    "SCENARIOS",
    "DESK_SCENARIOS",
    "parse_scenario",
    "summarize",
    "BenchResult",
    "run_benchmark",
    "format_table",
]

# name -> (label, dims)
SCENARIOS = {
    "hd": ("HD", (1280, 720, 3)),
    "fullhd": ("FullHD", (1920, 1080, 3)),
    "twok": ("TwoK", (2048, 1080, 3)),
    "qhd": ("QHD", (2560, 1440, 3)),
    "qkuhd": ("QKUHD", (3840, 2160, 3)),
    "fk": ("FK", (5120, 2880, 3)),
    "sk": ("SK", (6144, 3456, 3)),
    "ek": ("EK", (7680, 4320, 3)),
}
DESK_SCENARIOS = ("hd", "fullhd")

STAT_NAMES = ("min", "lq", "mean", "median", "uq", "max")


def parse_scenario(name: str) -> tuple[str, tuple[int, ...]]:
    """Resolve a scenario name or a custom ``HxWxC`` (optionally ``custom:HxWxC``)."""
    key = name.lower()
    if key in SCENARIOS:
        return SCENARIOS[key]
    m = re.fullmatch(r"(?:custom:)?(\d+(?:x\d+)+)", key)
    if m:
        dims = tuple(int(d) for d in m.group(1).split("x"))
        if all(d >= 1 for d in dims):
            return "x".join(map(str, dims)), dims
    raise ValueError(f"unknown scenario {name!r}")


def summarize(samples) -> dict:
    """min / lower quartile / mean / median / upper quartile / max."""
    a = np.asarray(samples, dtype=np.float64)
    lq, median, uq = np.percentile(a, [25, 50, 75])
    return {
        "min": float(a.min()),
        "lq": float(lq),
        "mean": float(a.mean()),
        "median": float(median),
        "uq": float(uq),
        "max": float(a.max()),
    }


@dataclass
class BenchResult:
    label: str
    dims: tuple
    ranks: tuple
    reshaped_dims: tuple
    tensvd_times: list = field(default_factory=list)
    hosvd_times: list = field(default_factory=list)
    tensvd_stored: list = field(default_factory=list)
    hosvd_stored: list = field(default_factory=list)

    @property
    def ratio(self) -> float:
        """Median t-HOSVD time over median tenSVD time."""
        return float(np.median(self.hosvd_times) / np.median(self.tensvd_times))

    @property
    def max_budget_gap(self) -> float:
        """Largest stored-count difference between the two, as a fraction of the original size."""
        gaps = [abs(a - b) for a, b in zip(self.tensvd_stored, self.hosvd_stored)]
        return max(gaps) / prod(self.dims)

    def rows(self) -> list[tuple[str, dict]]:
        return [
            (f"{self.label} (t)", summarize(self.tensvd_times)),
            (f"{self.label} (h)", summarize(self.hosvd_times)),
        ]

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "dims": list(self.dims),
            "ranks": list(self.ranks),
            "reshaped_dims": list(self.reshaped_dims),
            "tensvd": summarize(self.tensvd_times),
            "hosvd": summarize(self.hosvd_times),
            "ratio": self.ratio,
            "max_budget_gap": self.max_budget_gap,
        }


def run_benchmark(
    scenario: str,
    reps: int = 5,
    seed: int = 0,
    stored_fraction: float = 0.166,
    method: str = "gram",
    order_hint: Optional[int] = None,
) -> BenchResult:
    """Time both algorithms on `reps` random tensors of the scenario's shape."""
    if reps < 1:
        raise ValueError("reps must be >= 1")
    label, dims = parse_scenario(scenario)
    ranks = ranks_for_budget(dims, stored_fraction)
    hosvd_count = hosvd_storage_cost(dims, ranks)
    target = CompressionTarget.fraction(hosvd_count / prod(dims))
    plan = plan_shape(dims, order_hint)
    result = BenchResult(label, dims, ranks, plan.reshaped_dims)

    rng = np.random.default_rng(seed)
    for _ in range(reps):
        x = DenseTensor.from_array(rng.random(dims))
        c, t_time = timed(lambda: compress(x, target, plan=plan))
        _, h_time = timed(lambda: t_hosvd(x, ranks, method=method))
        result.tensvd_times.append(t_time)
        result.hosvd_times.append(h_time)
        result.tensvd_stored.append(c.stored_count)
        result.hosvd_stored.append(hosvd_count)
    return result


def format_table(results) -> str:
    header = f"{'':<16}" + "".join(f"{s:>10}" for s in STAT_NAMES) + f"{'ratio':>10}"
    lines = [header]
    for r in results:
        for i, (name, stats) in enumerate(r.rows()):
            ratio = f"{r.ratio:>10.2f}" if i == 0 else ""
            lines.append(
                f"{name:<16}" + "".join(f"{stats[s]:>10.3f}" for s in STAT_NAMES) + ratio
            )
    return "\n".join(lines)
