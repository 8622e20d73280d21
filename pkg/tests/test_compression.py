import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tensvd import (
    CompressedTensor,
    CompressionTarget,
    DenseTensor,
    InfeasibleBudgetError,
    ReshapePlan,
    SparseCore,
    compress,
    decompress,
    plan_shape,
    remap,
    select_core_entries,
    tensvd_storage_cost,
)
from tensvd.compression import _ranked_indices, _top_k_indices, full_factors
from tensvd.tensor import multi_mode_product

from conftest import random_tensor


def rel_err(a, b):
    return np.linalg.norm(a.data - b.data) / np.linalg.norm(a.data)


def test_target_validation():
    with pytest.raises(ValueError):
        CompressionTarget()
    with pytest.raises(ValueError):
        CompressionTarget(epsilon=0.1, com=0.1)
    for bad in (0.0, 1.0, -0.1, 1.5):
        with pytest.raises(ValueError):
            CompressionTarget.accuracy(bad)
        with pytest.raises(ValueError):
            CompressionTarget.fraction(bad)


def test_rank_one_needs_one_entry(rng):
    vecs = [rng.standard_normal(8) for _ in range(3)]
    t = DenseTensor.from_array(np.einsum("i,j,k->ijk", *vecs))
    c = compress(t, CompressionTarget.accuracy(0.01))
    assert c.plan.reshaped_dims == (8, 8, 8)
    assert len(c.sparse_core) == 1
    assert rel_err(t, decompress(c)) < 1e-8


def test_error_law_on_small_tensor(rng):
    t = random_tensor(rng, (6, 10, 3))
    c = compress(t, CompressionTarget.accuracy(0.2))
    err = rel_err(t, decompress(c))
    assert err <= 0.2
    assert abs(err**2 - (1 - c.sparse_core.energy / c.total_energy)) < 1e-10


def test_tiny_epsilon_is_lossless(rng):
    t = random_tensor(rng, (6, 10, 3))
    c = compress(t, CompressionTarget.accuracy(1e-12))
    assert len(c.sparse_core) == t.size
    assert rel_err(t, decompress(c)) < 1e-8


def test_empty_core_gives_zero_tensor(rng):
    t = random_tensor(rng, (4, 6, 2))
    c = compress(t, CompressionTarget.accuracy(0.3))
    empty = CompressedTensor(c.plan, c.factors, SparseCore([], []), c.total_energy)
    out = decompress(empty)
    assert out.dims == t.dims
    assert not out.data.any()


def test_decompress_matches_dense_truncation_oracle(rng):
    t = random_tensor(rng, (4, 6, 2))
    c = compress(t, CompressionTarget.accuracy(0.3))
    z = remap(t, c.plan).to_array()
    u = c.factors
    letters = "abcdefgh"[: z.ndim]
    # full core by explicit contraction, then zero everything not kept
    spec = letters + "," + ",".join(f"{l}{l.upper()}" for l in letters)
    core = np.einsum(spec + "->" + letters.upper(), z, *u)
    mask = np.zeros(core.size, dtype=bool)
    mask[c.sparse_core.positions] = True
    kept = np.where(mask, core.ravel(order="F"), 0.0).reshape(core.shape, order="F")
    spec = letters.upper() + "," + ",".join(f"{l}{l.upper()}" for l in letters)
    zhat = np.einsum(spec + "->" + letters, kept, *u)
    oracle = np.linalg.norm(z - zhat) / np.linalg.norm(z)
    err = rel_err(t, decompress(c))
    assert err == pytest.approx(oracle, abs=1e-12)
    residual = np.sum(core[~mask.reshape(core.shape, order="F")] ** 2)
    assert abs(err - math.sqrt(residual / c.total_energy)) < 1e-9


def test_decompress_rejects_bad_positions(rng):
    t = random_tensor(rng, (4, 6, 2))
    c = compress(t, CompressionTarget.accuracy(0.3))
    bad = CompressedTensor(c.plan, c.factors, SparseCore([t.size], [1.0]), c.total_energy)
    with pytest.raises(ValueError):
        decompress(bad)


def test_select_hand_enumeration():
    core = DenseTensor.zeros((2, 2, 2)).data.copy()
    core[0], core[3], core[7] = 1.0, 3.0, -2.0
    sc = select_core_entries(DenseTensor(core, (2, 2, 2)), CompressionTarget.accuracy(0.5), 0)
    assert list(sc.values) == [3.0, -2.0]
    assert list(sc.positions) == [3, 7]
    # keeping only 3 would leave sqrt(5/14) = 0.598 > 0.5
    assert math.sqrt(5 / 14) > 0.5 >= math.sqrt(1 / 14)


def test_select_budget_for_two_entries(rng):
    core = random_tensor(rng, (10, 10, 10))
    sc = select_core_entries(core, CompressionTarget.fraction(0.105), factor_cost=100)
    assert len(sc) == 2
    top = np.argsort(-np.abs(core.data))[:2]
    assert list(sc.positions) == list(top)


@pytest.mark.parametrize(
    "target", [CompressionTarget.accuracy(0.5), CompressionTarget.fraction(0.5)]
)
def test_select_ties_by_linear_index(target):
    core = DenseTensor(np.array([1.0, -1.0, 1.0, -1.0, 1.0, -1.0, 1.0, -1.0]), (2, 2, 2))
    sc = select_core_entries(core, target, 0)
    assert list(sc.positions) == list(range(len(sc)))


@settings(max_examples=200, deadline=None)
@given(
    values=st.lists(st.integers(-4, 4), min_size=1, max_size=40),
    k=st.integers(0, 45),
)
def test_partial_selection_equals_full_sort(values, k):
    mag = np.abs(np.array(values, dtype=float))
    np.testing.assert_array_equal(_top_k_indices(mag, k), _ranked_indices(mag)[:k])


def test_storage_cost():
    plan = ReshapePlan((880, 1240, 3), (31, 44, 40, 60))
    assert tensvd_storage_cost(plan, 0) == 8097
    assert tensvd_storage_cost(plan, 100) == 8297
    assert tensvd_storage_cost(ReshapePlan((31,), (31,)), 5) == 31 * 31 + 10
    with pytest.raises(ValueError):
        tensvd_storage_cost(plan, -1)


def test_infeasible_budget_names_minimum(rng):
    t = random_tensor(rng, (6, 10, 3))
    plan = plan_shape(t.dims)
    minimum = tensvd_storage_cost(plan, 0) / t.size
    with pytest.raises(InfeasibleBudgetError) as info:
        compress(t, CompressionTarget.fraction(minimum / 2))
    assert info.value.minimum_fraction == pytest.approx(minimum)
    assert f"{minimum:.6g}" in str(info.value)


def test_com_target_respects_budget(rng):
    t = random_tensor(rng, (12, 10, 9))
    for com in (0.4, 0.6, 0.9):
        c = compress(t, CompressionTarget.fraction(com))
        assert c.stored_fraction <= com
        # one more entry would break the budget (unless the core is exhausted)
        if len(c.sparse_core) < t.size:
            assert tensvd_storage_cost(c.plan, len(c.sparse_core) + 1) > com * t.size


def test_compressed_invariants(rng):
    t = random_tensor(rng, (6, 10, 3))
    c = compress(t, CompressionTarget.accuracy(0.25), order_hint=3)
    assert c.stored_count == sum(j * j for j in c.plan.reshaped_dims) + 2 * len(c.sparse_core)
    for u, j in zip(c.factors, c.plan.reshaped_dims):
        assert u.shape == (j, j)
        np.testing.assert_allclose(u.T @ u, np.eye(j), atol=1e-8)
    mags = np.abs(c.sparse_core.values)
    assert (mags[:-1] >= mags[1:]).all()
    assert np.unique(c.sparse_core.positions).size == len(c.sparse_core)
    with pytest.raises(ValueError):
        CompressedTensor(c.plan, c.factors[:-1], c.sparse_core, c.total_energy)


def test_energy_identity_and_norm_preservation(rng):
    t = random_tensor(rng, (6, 10, 3))
    plan = plan_shape(t.dims)
    z = remap(t, plan)
    assert np.linalg.norm(z.data) == np.linalg.norm(t.data)
    core = multi_mode_product(z, full_factors(z), transpose=True)
    assert np.dot(core.data, core.data) == pytest.approx(np.dot(z.data, z.data), rel=1e-10)


def test_greedy_is_optimal_on_small_cores(rng):
    core = random_tensor(rng, (2, 2, 2))
    g2 = core.data**2
    for k in range(1, 9):
        budget = (k * 2 + 0.5) / 8
        if budget >= 1:
            break
        sc = select_core_entries(core, CompressionTarget.fraction(budget), 0)
        assert len(sc) == k
        best = max(sum(g2[list(s)]) for s in itertools.combinations(range(8), k))
        assert math.fsum(sc.values**2) == pytest.approx(best, rel=1e-15)


def test_monotone_in_kept_entries(rng):
    t = random_tensor(rng, (5, 6, 4))
    c = compress(t, CompressionTarget.accuracy(1e-12))
    prev_err, prev_cost = math.inf, -1
    for k in range(0, len(c.sparse_core) + 1, 7):
        sub = SparseCore(c.sparse_core.positions[:k], c.sparse_core.values[:k])
        ck = CompressedTensor(c.plan, c.factors, sub, c.total_energy)
        err = rel_err(t, decompress(ck))
        assert err <= prev_err + 1e-12
        assert ck.stored_count > prev_cost
        prev_err, prev_cost = err, ck.stored_count
