import itertools
import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from decouplab.coupling import (
    build_coupled_pairs,
    chaos_form_from_coupling,
    check_identity_8,
    check_identity_9,
    coupling_law_check,
    decomposition_4_check,
    inequality5_check,
    inequality6_check,
    lemma1_tail_check,
    random_table_kernel,
    symmetric_reverse_decomposition_check,
    symmetrization_check,
    universal_symmetrization_falsifier,
)
from decouplab.chaos import chaos_eval
from decouplab.model import (
    ConstantKernel,
    FiniteDistribution,
    ModelError,
    NormSpec,
    PolynomialKernel,
    ProductKernel,
    TableKernel,
)
from decouplab.problab import HypothesisError, ResourceCapError

XY = ProductKernel(n=2)
ZERO = ConstantKernel(n=2, value=0)
ONE = ConstantKernel(n=2, value=1)
ANTI = PolynomialKernel(n=2, coef=np.array([[0, -1], [1, 0]]))
SIGNS = FiniteDistribution.rademacher(1)
ABS = NormSpec("absolute")


class TestCoupledPairs:
    def test_no_swaps(self):
        c = build_coupled_pairs([1, 2, 3], [4, 5, 6], [1, 1, 1])
        assert c.Z.tolist() == [1, 2, 3] and c.Zt.tolist() == [4, 5, 6]

    def test_full_swap(self):
        c = build_coupled_pairs([1, 2, 3], [4, 5, 6], [-1, -1, -1])
        assert c.Z.tolist() == [4, 5, 6] and c.Zt.tolist() == [1, 2, 3]

    def test_mixed(self):
        c = build_coupled_pairs([2, 5], [3, 7], [1, -1])
        assert c.Z.tolist() == [2, 7] and c.Zt.tolist() == [3, 5]

    def test_vector_points(self):
        c = build_coupled_pairs([[0, 1], [2, 3]], [[4, 5], [6, 7]], [-1, 1])
        assert c.Z.tolist() == [[4, 5], [2, 3]]

    def test_length_mismatch(self):
        with pytest.raises(ModelError):
            build_coupled_pairs([1, 2], [3, 4], [1])


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(-50, 50), min_size=1, max_size=8).flatmap(
    lambda x: st.tuples(st.just(x), st.lists(st.integers(-50, 50), min_size=len(x), max_size=len(x)),
                        st.lists(st.sampled_from([1, -1]), min_size=len(x), max_size=len(x)))))
def test_coupling_is_an_involution_preserving_the_pair_multiset(args):
    X, Xt, eps = args
    c = build_coupled_pairs(X, Xt, eps)
    back = build_coupled_pairs(c.Z, c.Zt, eps)
    assert back.Z.tolist() == X and back.Zt.tolist() == Xt
    for z, zt, x, xt in zip(c.Z, c.Zt, X, Xt):
        assert sorted((int(z), int(zt))) == sorted((x, xt))


class TestIdentities:
    def test_identity_8_examples(self):
        v = check_identity_8(XY, 2, 3, 5, 7, 1, -1)
        assert v.holds and v.lhs.tolist() == [84] == v.rhs.tolist()
        v = check_identity_8(XY, 2, 3, 5, 7, 1, 1)
        assert v.holds and v.lhs.tolist() == [60]

    def test_identity_8_zero_kernel(self):
        for ei, ej in itertools.product((1, -1), repeat=2):
            v = check_identity_8(ZERO, 2, 3, 5, 7, ei, ej)
            assert v.holds and v.lhs.tolist() == [0]

    def test_identity_9_examples(self):
        v = check_identity_9(XY, 2, 3, 5, 7)
        assert v.holds and v.lhs.tolist() == [60] == v.rhs.tolist()
        assert check_identity_9(ONE, 0, 0, 0, 0).lhs.tolist() == [4]
        v = check_identity_9(XY, 2, 2, 5, 5)
        assert v.lhs.tolist() == [40]

    def test_identity_9_average_of_four(self):
        vals = [check_identity_8(XY, 2, 3, 5, 7, a, b).lhs[0] for a, b in itertools.product((1, -1), repeat=2)]
        assert sorted(vals) == [40, 56, 60, 84] and sum(vals) // 4 == 60

    def test_bad_sign(self):
        with pytest.raises(ModelError):
            check_identity_8(XY, 2, 3, 5, 7, 0, 1)


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 4), st.integers(0, 10**6))
def test_identities_on_random_tables(n, seed):
    rng = np.random.default_rng(seed)
    k = random_table_kernel(rng, n, m=4, dim=2)
    i, j = rng.choice(n, size=2, replace=False)
    pts = rng.integers(0, 4, size=4)
    for ei, ej in itertools.product((1, -1), repeat=2):
        assert check_identity_8(k, *pts, ei, ej, i=i, j=j)
    assert check_identity_9(k, *pts, i=i, j=j)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 5), st.integers(0, 10**6))
def test_chaos_form_reproduces_coupled_mixed_sum(n, seed):
    """Brute-force oracle: 4 sum_{i!=j} f(Zt_i, Z_j) for every sign vector."""
    rng = np.random.default_rng(seed)
    k = random_table_kernel(rng, n, m=3)
    X, Xt = rng.integers(0, 3, size=n), rng.integers(0, 3, size=n)
    form = chaos_form_from_coupling(k, X, Xt)
    for eps in itertools.product((1, -1), repeat=n):
        c = build_coupled_pairs(X, Xt, eps)
        ref = sum(4 * int(k.table[i, j, c.Zt[i], c.Z[j], 0]) for i in range(n) for j in range(n) if i != j)
        assert chaos_eval(form, eps).tolist() == [ref]


class TestCouplingLaw:
    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_equal(self, n):
        r = coupling_law_check(FiniteDistribution(points=[0, 1, 2], probs=[Fraction(1, 2), Fraction(1, 3), Fraction(1, 6)]), n)
        assert r.equal and r.atoms == 3 ** (2 * n)

    def test_cap(self):
        with pytest.raises(ResourceCapError):
            coupling_law_check(FiniteDistribution.uniform([0, 1, 2]), 4, cap=100)


class TestThreeCopyBound:
    def test_signs(self):
        (row,) = lemma1_tail_check(FiniteDistribution.uniform([-1, 1]), ABS, [1])
        assert row.lhs == 1 and row.rhs == Fraction(3, 2) and row.holds

    def test_zero(self):
        rows = lemma1_tail_check(FiniteDistribution.uniform([0]), ABS, [0.5, 1, 3])
        assert all(r.lhs == 0 and r.holds for r in rows)

    def test_zero_three(self):
        (row,) = lemma1_tail_check(FiniteDistribution.uniform([0, 3]), ABS, [3])
        assert row.lhs == Fraction(1, 2) and row.rhs == Fraction(9, 4)

    def test_default_grid_and_json(self):
        rows = lemma1_tail_check(FiniteDistribution.uniform([-2, 0, 1, 1]), ABS)
        assert len(rows) == 64 and all(r.holds for r in rows)
        d = json.loads(rows[0].to_json())
        assert set(d) >= {"check", "params_digest", "t", "lhs", "rhs", "holds", "margin", "lhs_exact"}

    def test_plane_euclidean(self):
        d = FiniteDistribution.uniform([(3, 4), (0, 0), (-1, 2)])
        assert all(r.holds for r in lemma1_tail_check(d, NormSpec("euclidean")))


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(-20, 20), min_size=1, max_size=4), st.lists(st.integers(1, 5), min_size=4, max_size=4),
       st.floats(0.01, 40))
def test_lemma1_random_laws(points, w, t):
    probs = [Fraction(x, sum(w[: len(points)])) for x in w[: len(points)]]
    (row,) = lemma1_tail_check(FiniteDistribution(points=points, probs=probs), ABS, [t])
    assert row.holds


class TestFalsifier:
    def test_every_c_violated(self):
        rep = universal_symmetrization_falsifier()
        assert rep["all_violated"] and [w["c"] for w in rep["witnesses"]] == list(range(1, 11))
        assert all(Fraction(w["lhs"]) == 1 and Fraction(w["rhs"]) == 0 for w in rep["witnesses"])
        assert all(p["violated"] for p in rep["point_mass"])

    def test_point_mass(self):
        row = symmetrization_check(FiniteDistribution.uniform([1]), 7, 1)
        assert row.lhs == 1 and row.rhs == 0 and not row.holds

    def test_symmetric_signs_fine(self):
        assert symmetrization_check(FiniteDistribution.uniform([-1, 1]), 3, 1).holds

    def test_near_point_mass(self):
        # |X - Y| is 0 or 0.2 here, so c * 0.2 >= 1 first happens at c = 5
        d = FiniteDistribution.uniform([Fraction(9, 10), Fraction(11, 10)])
        assert all(not symmetrization_check(d, c, 1).holds for c in range(1, 5))
        assert symmetrization_check(d, 5, 1).holds


class TestDecompositions:
    GRID = [0.5 * k for k in range(1, 33)]

    def test_decomposition4_xy(self):
        r = decomposition_4_check(XY, SIGNS, 2, ABS, self.GRID)
        assert r.holds and all(r.certificates.values()) and len(r.rows) == 32

    def test_decomposition4_zero(self):
        r = decomposition_4_check(ZERO, SIGNS, 2, ABS, [0.5, 1])
        assert r.holds and all(row.lhs == 0 and row.rhs == 0 for row in r.rows)

    def test_decomposition4_random_vector_tables(self):
        rng = np.random.default_rng(7)
        for _ in range(5):
            k = random_table_kernel(rng, 3, m=2, dim=2)
            r = decomposition_4_check(k, SIGNS, 3, NormSpec("euclidean"))
            assert r.holds

    def test_symmetric_reverse_xy(self):
        r = symmetric_reverse_decomposition_check(XY, SIGNS, 2, ABS, self.GRID)
        assert r.holds and all(r.certificates.values())

    def test_symmetric_reverse_zero(self):
        assert symmetric_reverse_decomposition_check(ZERO, SIGNS, 2, ABS, [1]).holds

    def test_antisymmetric_rejected(self):
        with pytest.raises(HypothesisError):
            symmetric_reverse_decomposition_check(ANTI, SIGNS, 2, ABS, [1])

    def test_order_three_rejected(self):
        with pytest.raises(ModelError):
            decomposition_4_check(ProductKernel(n=3, order=3), SIGNS, 3, ABS, [1])

    def test_inequality5(self):
        assert inequality5_check(ProductKernel(n=3), SIGNS, 3, ABS).holds
        rng = np.random.default_rng(2)
        assert inequality5_check(random_table_kernel(rng, 3), SIGNS, 3, ABS).holds

    def test_inequality6(self):
        r = inequality6_check(ProductKernel(n=3), SIGNS, 3, ABS, [0.5, 1, 2, 4, 8])
        assert r.holds and r.certificates["chaos_expansion"] and r.certificates["coupling_preserves_law"]
        assert r.certificates["measured_c"] >= 1

    def test_inequality6_random_table(self):
        k = random_table_kernel(np.random.default_rng(11), 3, m=2)
        r = inequality6_check(k, SIGNS, 3, ABS)
        assert r.holds and Fraction(r.certificates["min_conditional_p"]) > 0

    def test_inequality6_size_mismatch(self):
        with pytest.raises(ModelError):
            inequality6_check(ProductKernel(n=3), SIGNS, 2, ABS, [1])

    def test_report_serialises(self):
        r = decomposition_4_check(XY, SIGNS, 2, ABS, [1, 2])
        d = json.loads(json.dumps(r.to_dict()))
        assert d["holds"] and len(d["rows"]) == 2


def test_table_kernel_from_uniform_labels():
    k = TableKernel(n=2, table=np.arange(16).reshape(2, 2, 2, 2, 1))
    dist = FiniteDistribution.uniform(size=2)
    assert decomposition_4_check(k, dist, 2, ABS, [1, 5, 20]).holds
