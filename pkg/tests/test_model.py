import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from decouplab.model import (
    CallbackKernel,
    ConstantKernel,
    DistanceKernel,
    FiniteDistribution,
    GeneratorDistribution,
    ModelError,
    NormSpec,
    PolynomialKernel,
    ProductKernel,
    SampleBlock,
    TableKernel,
    all_sign_patterns,
    check_kernel_symmetry,
    distribution_from_dict,
    kernel_from_dict,
    norm_of,
    sign_vector,
)


def antisymmetric(n=2):
    return PolynomialKernel(n=n, coef=np.array([[0, -1], [1, 0]]))


class TestNorms:
    def test_euclidean_345(self):
        assert norm_of([3, -4], NormSpec("euclidean")) == 5

    @pytest.mark.parametrize("kind", ["euclidean", "supremum", "p"])
    def test_zero_vector(self, kind):
        spec = NormSpec(kind, 3) if kind == "p" else NormSpec(kind)
        assert norm_of([0, 0, 0], spec) == 0

    def test_supremum(self):
        assert norm_of([1, -7, 2], NormSpec("supremum")) == 7

    def test_absolute_needs_scalar(self):
        with pytest.raises(ModelError):
            norm_of([1, 2], NormSpec("absolute"))

    def test_bad_kinds(self):
        with pytest.raises(ModelError):
            NormSpec("p", 0.5)
        with pytest.raises(ModelError):
            NormSpec("frobenius")

    def test_nan_rejected(self):
        with pytest.raises(ModelError):
            norm_of([float("nan")], NormSpec())

    @pytest.mark.parametrize("text,kind,p", [("abs", "absolute", None), ("l2", "euclidean", None),
                                             ("sup", "supremum", None), ("p=3", "p", 3), ("p=2", "euclidean", None)])
    def test_parse(self, text, kind, p):
        spec = NormSpec.parse(text)
        assert spec.kind == kind and spec.p == p

    def test_keys_are_exact_powers(self):
        vals = np.array([[3, 4], [1, -1]])
        assert NormSpec("euclidean").keys(vals).tolist() == [25, 2]
        assert NormSpec("p", 3).keys(vals).tolist() == [91, 2]

    def test_roundtrip(self):
        for spec in (NormSpec(), NormSpec("euclidean"), NormSpec("p", 3)):
            assert NormSpec.from_dict(spec.to_dict()) == spec

    def test_homogeneity_and_triangle_bulk(self):
        rng = np.random.default_rng(0)
        x = rng.normal(size=(10**4, 4))
        y = rng.normal(size=(10**4, 4))
        lam = rng.normal(size=(10**4, 1))
        for spec in (NormSpec("euclidean"), NormSpec("supremum"), NormSpec("p", 3), NormSpec("p", 1.5)):
            nx, ny, nxy = spec.batch(x), spec.batch(y), spec.batch(x + y)
            assert np.all(nxy <= (nx + ny) * (1 + 1e-9))
            assert np.allclose(spec.batch(lam * x), np.abs(lam[:, 0]) * nx, rtol=1e-9)
        a = rng.normal(size=(10**4, 1))
        b = rng.normal(size=(10**4, 1))
        spec = NormSpec("absolute")
        assert np.all(spec.batch(a + b) <= (spec.batch(a) + spec.batch(b)) * (1 + 1e-9))


@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(-50, 50), min_size=3, max_size=3), st.lists(st.integers(-50, 50), min_size=3, max_size=3))
def test_norm_triangle_property(u, v):
    for spec in (NormSpec("euclidean"), NormSpec("supremum"), NormSpec("p", 4)):
        lhs = norm_of(np.add(u, v), spec)
        assert lhs <= norm_of(u, spec) + norm_of(v, spec) + 1e-9
        assert (norm_of(u, spec) == 0) == (not any(u))


class TestSymmetryCheck:
    def test_product_symmetric(self):
        assert check_kernel_symmetry(ProductKernel(n=3), trials=200)

    def test_antisymmetric_counterexample(self):
        v = check_kernel_symmetry(antisymmetric(), dist=FiniteDistribution.uniform([1, 2]))
        assert not v
        # permutations are 0-based, so the swap of two arguments is (1, 0)
        assert v.perm == (1, 0)

    def test_distance_symmetric(self):
        assert check_kernel_symmetry(DistanceKernel(n=4, dim=2), trials=200)

    def test_index_dependent_weights(self):
        w = np.array([[0.0, 1.0], [2.0, 0.0]])
        assert not check_kernel_symmetry(ProductKernel(n=2, weights=w), trials=50)
        assert check_kernel_symmetry(ProductKernel(n=2, weights=w + w.T), trials=50)

    def test_table_exhaustive(self):
        t = np.zeros((2, 2, 2, 2, 1), dtype=int)
        t[0, 1, 0, 1] = 1
        assert not check_kernel_symmetry(TableKernel(n=2, table=t))
        t[1, 0, 1, 0] = 1
        assert check_kernel_symmetry(TableKernel(n=2, table=t))

    def test_declared_symmetric_kernels_pass_1000(self):
        for k in (ProductKernel(n=4), DistanceKernel(n=4), ConstantKernel(n=4, value=3)):
            assert k.symmetric
            assert check_kernel_symmetry(k, trials=1000)


class TestKernels:
    def test_table_shape_checked(self):
        with pytest.raises(ModelError):
            TableKernel(n=2, table=np.zeros((2, 3, 2, 2, 1)))

    def test_table_read_only(self):
        k = TableKernel(n=2, table=np.ones((2, 2, 2, 2, 1), dtype=int))
        with pytest.raises(ValueError):
            k.table[0, 0, 0, 0, 0] = 5

    def test_tabulate_zeroes_diagonal(self):
        d = FiniteDistribution.uniform([1, 2])
        tab = ProductKernel(n=2).tabulate(d).reshape(2, 2, 2, 2, 1)
        assert tab[0, 0].sum() == 0 and tab[0, 1, 1, 1, 0] == 4

    def test_json_roundtrip(self):
        for k in (ProductKernel(n=3), DistanceKernel(n=3, dim=2), antisymmetric(3), ConstantKernel(n=3, value=2),
                  TableKernel(n=2, table=np.arange(16).reshape(2, 2, 2, 2, 1))):
            k2 = kernel_from_dict(k.to_dict())
            pts = (np.ones(k.point_dim) * 2, np.ones(k.point_dim) * 5) if not isinstance(k, TableKernel) else (1, 0)
            assert np.allclose(k.evaluate((0, 1), pts), k2.evaluate((0, 1), pts))

    def test_callback(self):
        k = CallbackKernel(n=2, func=lambda idx, pts: pts[0] * 10 + pts[1])
        assert k.evaluate((0, 1), (2, 3))[0] == 23


class TestDistributions:
    def test_probabilities_exact(self):
        d = FiniteDistribution((0.25, 0.75), [0, 1])
        assert d.probs == (Fraction(1, 4), Fraction(3, 4))

    def test_bad_probs(self):
        with pytest.raises(ModelError):
            FiniteDistribution((0.5, 0.6), [0, 1])
        with pytest.raises(ModelError):
            FiniteDistribution((0.0, 1.0), [0, 1])

    def test_integer_weights(self):
        d = FiniteDistribution((Fraction(1, 3), Fraction(2, 3)), [0, 1])
        assert d.integer_weights() == ([1, 2], 3)

    def test_transform_hits_atoms(self):
        d = FiniteDistribution((Fraction(1, 4), Fraction(3, 4)), [0, 1])
        u = np.array([[0.1], [0.3], [0.99]])
        assert d.transform(u).ravel().tolist() == [0, 1, 1]

    def test_generators(self):
        u = np.random.default_rng(0).random((1000, 6))
        g = GeneratorDistribution("gaussian", 3)
        assert g.draws_per_point() == 6 and g.transform(u).shape == (1000, 3)
        c = GeneratorDistribution("uniform_cube", 3, {"low": -1, "high": 1})
        x = c.transform(u[:, :3])
        assert x.min() >= -1 and x.max() < 1

    def test_from_dict(self):
        d = distribution_from_dict({"kind": "finite", "probs": [0.5, 0.5], "points": [[0], [3]]})
        assert d.size == 2 and d.dim == 1
        assert distribution_from_dict({"kind": "rademacher"}).size == 2


class TestSigns:
    def test_sign_vector(self):
        assert sign_vector([1, -1]).tolist() == [1, -1]
        with pytest.raises(ModelError):
            sign_vector([1, 0])

    def test_all_patterns(self):
        p = all_sign_patterns(3)
        assert p.shape == (8, 3) and len({tuple(r) for r in p.tolist()}) == 8


def test_sample_block_stack():
    b = SampleBlock.stack([1, 2, 3], [4, 5, 6])
    assert b.copies == 2 and b.n == 3
    with pytest.raises(ModelError):
        SampleBlock.stack([1, 2], [1, 2, 3])


def test_sqrt_exactness_of_norm_of():
    assert norm_of([1, 1], NormSpec("euclidean")) == pytest.approx(math.sqrt(2), rel=1e-15)
