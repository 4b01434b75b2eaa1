import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from decouplab.model import (
    CallbackKernel,
    ConstantKernel,
    DistanceKernel,
    FiniteDistribution,
    ModelError,
    NormSpec,
    PolynomialKernel,
    ProductKernel,
    SampleBlock,
    TableKernel,
    check_kernel_symmetry,
)
from decouplab.ustat import (
    KernelEvaluationError,
    coupled_sum,
    decoupled_sum,
    enumerate_tuples,
    falling_factorial,
    polarized_sum_Tn,
    statistic_maps,
    statistic_values,
    symmetrize_kernel,
)


def brute(f, rows, slots, n, k):
    """Sum of f over distinct ordered tuples, argument s read from rows[slots[s]]."""
    total = 0
    for idx in itertools.product(range(n), repeat=k):
        if len(set(idx)) == k:
            total += f(idx, [rows[slots[s]][idx[s]] for s in range(k)])
    return total


class TestTuples:
    def test_three_two_one_based(self):
        assert list(enumerate_tuples(3, 2, start=1)) == [(1, 2), (1, 3), (2, 1), (2, 3), (3, 1), (3, 2)]

    def test_four_four(self):
        assert sum(1 for _ in enumerate_tuples(4, 4)) == 24

    def test_empty_when_n_lt_k(self):
        assert list(enumerate_tuples(2, 3)) == []

    @pytest.mark.parametrize("n,k", [(n, k) for n in range(1, 9) for k in range(1, 5)])
    def test_count_is_falling_factorial(self, n, k):
        tuples = list(enumerate_tuples(n, k))
        assert len(tuples) == falling_factorial(n, k)
        assert all(len(set(t)) == k for t in tuples)
        assert tuples == sorted(tuples)


class TestSums:
    def test_constant_counts_tuples(self):
        value, nrm = coupled_sum(ConstantKernel(n=3, value=1), SampleBlock.stack([0, 0, 0]))
        assert value.tolist() == [6] and nrm == 6

    def test_xy(self):
        value, _ = coupled_sum(ProductKernel(n=3), SampleBlock.stack([1, 2, 3]))
        assert value.tolist() == [22]

    def test_zero(self):
        assert coupled_sum(ConstantKernel(n=3, value=0), SampleBlock.stack([1, 2, 3]))[1] == 0

    def test_decoupled_examples(self):
        assert decoupled_sum(ConstantKernel(n=3), SampleBlock.stack([0, 0, 0], [0, 0, 0]))[0].tolist() == [6]
        assert decoupled_sum(ProductKernel(n=3), SampleBlock.stack([1, 2, 3], [1, 2, 3]))[0].tolist() == [22]

    def test_decoupled_copy_count(self):
        with pytest.raises(ModelError):
            decoupled_sum(ProductKernel(n=3), SampleBlock.stack([1, 2, 3]))

    def test_polarized(self):
        assert polarized_sum_Tn(ConstantKernel(n=3), [0, 0, 0], [0, 0, 0])[0].tolist() == [24]
        assert polarized_sum_Tn(ProductKernel(n=2), [1, 2], [3, 4])[0].tolist() == [48]

    def test_polarized_rejects_k3(self):
        with pytest.raises(ModelError):
            polarized_sum_Tn(ProductKernel(n=3, order=3), [1, 2, 3], [1, 2, 3])

    def test_kernel_error_carries_tuple(self):
        def bad(idx, pts):
            if idx == (1, 0):
                raise ZeroDivisionError
            return 1
        with pytest.raises(KernelEvaluationError) as info:
            coupled_sum(CallbackKernel(n=2, func=bad), SampleBlock.stack([1, 2]))
        assert info.value.idx == (1, 0)

    def test_vector_valued_euclidean(self):
        k = ProductKernel(n=2, dim=2)
        value, nrm = coupled_sum(k, SampleBlock(np.array([[[1, 2], [3, 4]]])), NormSpec("euclidean"))
        assert value.tolist() == [6, 16] and nrm == pytest.approx(math.hypot(6, 16))

    def test_order_three(self):
        rows = [[1, 2, 3, 4]]
        value, _ = coupled_sum(ProductKernel(n=4, order=3), SampleBlock.stack(*rows))
        assert value[0] == brute(lambda idx, p: p[0] * p[1] * p[2], rows, (0, 0, 0), 4, 3)


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 5), st.data())
def test_integer_table_identities(n, data):
    """Coupled/decoupled/T_n sums against a direct loop, exact on integer tables."""
    m = 3
    table = np.array(data.draw(st.lists(st.integers(-9, 9), min_size=n * n * m * m, max_size=n * n * m * m)))
    kernel = TableKernel(n=n, table=table.reshape(n, n, m, m, 1))
    X = data.draw(st.lists(st.integers(0, m - 1), min_size=n, max_size=n))
    Xt = data.draw(st.lists(st.integers(0, m - 1), min_size=n, max_size=n))
    f = lambda idx, p: int(kernel.table[idx[0], idx[1], p[0], p[1], 0])  # noqa: E731
    c = coupled_sum(kernel, SampleBlock.stack(X))[0][0]
    assert c == brute(f, [X], (0, 0), n, 2)
    assert decoupled_sum(kernel, SampleBlock.stack(X, X))[0][0] == c
    d = decoupled_sum(kernel, SampleBlock.stack(X, Xt))[0][0]
    assert d == brute(f, [X, Xt], (0, 1), n, 2)
    t = polarized_sum_Tn(kernel, X, Xt)[0][0]
    parts = sum(brute(f, [X, Xt], slots, n, 2) for slots in ((0, 0), (0, 1), (1, 0), (1, 1)))
    assert t == parts
    assert polarized_sum_Tn(kernel, X, X)[0][0] == 4 * c


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 6), st.data())
def test_symmetric_ordered_equals_twice_unordered(n, data):
    X = data.draw(st.lists(st.integers(-5, 5), min_size=n, max_size=n))
    w = np.array(data.draw(st.lists(st.integers(-3, 3), min_size=n * n, max_size=n * n))).reshape(n, n)
    k = ProductKernel(n=n, weights=w + w.T)
    total = coupled_sum(k, SampleBlock.stack(X))[0][0]
    half = sum(k.evaluate((i, j), (X[i], X[j]))[0] for i in range(n) for j in range(i + 1, n))
    assert total == pytest.approx(2 * half, rel=1e-12)


class TestSymmetrize:
    def test_antisymmetric_to_zero(self):
        s = symmetrize_kernel(PolynomialKernel(n=2, coef=np.array([[0, -1], [1, 0]])))
        for x, y in ((1, 2), (3, -4), (0.5, 7)):
            assert s.evaluate((0, 1), (x, y))[0] == 0
        assert check_kernel_symmetry(s, trials=200)

    def test_symmetric_fixed_point(self):
        k = ProductKernel(n=3)
        s = symmetrize_kernel(k)
        rng = np.random.default_rng(0)
        for _ in range(50):
            x, y = rng.integers(-5, 6, size=2)
            assert s.evaluate((0, 2), (x, y))[0] == k.evaluate((0, 2), (x, y))[0]

    def test_first_argument_becomes_mean(self):
        s = symmetrize_kernel(PolynomialKernel(n=2, coef=np.array([[0], [1]])))
        assert s.evaluate((0, 1), (2, 5))[0] == 3.5

    def test_table_and_callback_pass_check(self):
        rng = np.random.default_rng(3)
        t = TableKernel(n=3, table=rng.integers(-5, 6, size=(3, 3, 2, 2, 1)))
        assert check_kernel_symmetry(symmetrize_kernel(t))
        cb = CallbackKernel(n=3, func=lambda idx, p: idx[0] * np.ravel(p[0]) - np.ravel(p[1]) ** 2)
        assert not check_kernel_symmetry(cb, trials=50)
        assert check_kernel_symmetry(symmetrize_kernel(cb), trials=200)


def test_batch_engine_matches_python_loop():
    rng = np.random.default_rng(5)
    dist = FiniteDistribution.uniform([-2, 1, 3])
    kernel = TableKernel(n=4, table=rng.integers(-5, 6, size=(4, 4, 3, 3, 2)))
    labels = rng.integers(0, 3, size=(50, 2, 4))
    for name in ("coupled", "decoupled", "T_n", "mixed", "mixed_forward", "coupled_pair"):
        _, maps = statistic_maps(name, 2)
        fast = statistic_values(kernel, labels[:, : maps.max() + 1], maps, dist=dist)
        for b in range(labels.shape[0]):
            rows = labels[b]
            ref = np.array([sum(brute(lambda idx, p, c=c: int(kernel.table[idx[0], idx[1], p[0], p[1], c]),
                                      rows, tuple(sm), 4, 2) for sm in maps) for c in range(2)])
            assert fast[b].tolist() == ref.tolist()


def test_point_engine_matches_evaluate():
    rng = np.random.default_rng(2)
    pts = rng.normal(size=(20, 2, 5, 3))
    k = DistanceKernel(n=5, dim=3)
    _, maps = statistic_maps("decoupled", 2)
    fast = statistic_values(k, pts, maps)
    for b in range(20):
        ref = sum(k.evaluate((i, j), (pts[b, 0, i], pts[b, 1, j]))[0] for i, j in enumerate_tuples(5, 2))
        assert fast[b, 0] == pytest.approx(ref, rel=1e-12)
