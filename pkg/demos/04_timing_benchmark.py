"""
Timing study on random images
=============================

Repeat the uniform-random timing comparison at desk scale. Each row holds
min, lower quartile, mean, median, upper quartile and max in seconds; the
ratio is the median t-HOSVD time over the median tenSVD time.

The same study runs from the shell with ``tensvd bench --scenario hd``.
"""

from threadpoolctl import threadpool_limits

from tensvd.bench import format_table, run_benchmark

# %%
# One thread keeps the timings comparable between runs.
with threadpool_limits(limits=1):
    results = [run_benchmark(s, reps=3, seed=42) for s in ("hd", "fullhd")]
print(format_table(results))

# %%
# Both algorithms stored the same number of elements (within a couple).
for r in results:
    print(r.label, r.ranks, r.reshaped_dims, f"gap {r.max_budget_gap:.1e}")
