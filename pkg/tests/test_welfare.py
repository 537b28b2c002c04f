import numpy as np
import pytest

from lorenz_rank import (
    Dominance,
    GgfWeights,
    bonferroni_weights,
    ggf_supergradient,
    ggf_value,
    gini_index,
    gini_weights,
    lorenz_curve,
    lorenz_dominance,
    lorenz_to_owa,
    parse_weight_scheme,
    quantile_owa_weights,
    two_sided_objective,
    uniform_weights,
)
from oracles import gini_pairwise, owa_min_over_permutations, random_ggf_weights


class TestGgfValue:
    def test_sorted_dot_example(self):
        w = GgfWeights(np.array([1.0, 0.5]))
        assert ggf_value(w, np.array([3.0, 1.0])) == pytest.approx(2.5)

    def test_utilitarian(self):
        w = uniform_weights(4)
        x = np.array([0.3, 1.2, -0.5, 2.0])
        assert ggf_value(w, x) == pytest.approx(x.sum())

    def test_hand_example(self):
        w = GgfWeights(np.array([1.0, 2.0 / 3.0, 1.0 / 3.0]))
        assert ggf_value(w, np.array([0.0, 1.0, 2.0])) == pytest.approx(4.0 / 3.0)

    def test_permutation_oracle(self):
        rng = np.random.default_rng(0)
        for _ in range(200):
            n = int(rng.integers(1, 6))
            w = random_ggf_weights(rng, n)
            x = rng.normal(size=n)
            assert ggf_value(GgfWeights(w), x) == owa_min_over_permutations(w, x)

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            ggf_value(uniform_weights(3), np.array([1.0, 2.0]))

    def test_concavity(self):
        rng = np.random.default_rng(1)
        for _ in range(300):
            n = int(rng.integers(2, 12))
            w = GgfWeights(random_ggf_weights(rng, n))
            x = rng.normal(size=n)
            y = rng.normal(size=n)
            alpha = rng.uniform()
            mixed = ggf_value(w, alpha * x + (1 - alpha) * y)
            assert mixed >= alpha * ggf_value(w, x) + (1 - alpha) * ggf_value(w, y) - 1e-9

    def test_strict_monotonicity(self):
        rng = np.random.default_rng(2)
        for _ in range(100):
            n = int(rng.integers(2, 10))
            w = gini_weights(n)  # strictly positive weights
            x = rng.normal(size=n)
            i = int(rng.integers(n))
            bumped = x.copy()
            bumped[i] += 0.25
            assert ggf_value(w, bumped) > ggf_value(w, x)


class TestWeightSchemes:
    def test_gini_n4(self):
        np.testing.assert_allclose(gini_weights(4).w, [1.0, 0.75, 0.5, 0.25])

    def test_gini_small(self):
        np.testing.assert_allclose(gini_weights(1).w, [1.0])
        np.testing.assert_allclose(gini_weights(2).w, [1.0, 0.5])

    def test_bonferroni_n2(self):
        np.testing.assert_allclose(bonferroni_weights(2).w, [1.0, 1.0 / 3.0])

    def test_bonferroni_n1(self):
        np.testing.assert_allclose(bonferroni_weights(1).w, [1.0])

    def test_bonferroni_strictly_decreasing(self):
        for n in (2, 3, 7, 25):
            w = bonferroni_weights(n).w
            assert np.all(np.diff(w) < 0)

    def test_bonferroni_raw_partial_sums(self):
        # raw weights before rescaling: (1/n) * sum_{l=i..n} 1/l
        n = 5
        raw = np.array([sum(1.0 / l for l in range(i, n + 1)) / n
                        for i in range(1, n + 1)])
        np.testing.assert_allclose(bonferroni_weights(n).w, raw / raw[0], atol=1e-12)

    def test_quantile_example(self):
        np.testing.assert_allclose(quantile_owa_weights(4, 0.5, 0.25).w,
                                   [1.0, 1.0, 0.75, 0.75])

    def test_quantile_pure_worst_off(self):
        np.testing.assert_allclose(quantile_owa_weights(4, 0.25, 1.0).w,
                                   [1.0, 0.0, 0.0, 0.0])

    def test_quantile_omega_zero(self):
        np.testing.assert_allclose(quantile_owa_weights(6, 0.5, 0.0).w, np.ones(6))

    def test_quantile_merges_at_n(self):
        np.testing.assert_allclose(quantile_owa_weights(4, 1.0, 0.3).w, np.ones(4))

    def test_quantile_index_too_small(self):
        with pytest.raises(ValueError):
            quantile_owa_weights(4, 0.1, 0.5)

    def test_invalid_n(self):
        for builder in (gini_weights, bonferroni_weights, uniform_weights):
            with pytest.raises(ValueError):
                builder(0)


class TestLorenzToOwa:
    def test_total_utility_point(self):
        lorenz = np.zeros(4)
        lorenz[-1] = 1.0
        np.testing.assert_allclose(lorenz_to_owa(lorenz).w, np.ones(4))

    def test_worst_off_point(self):
        lorenz = np.zeros(4)
        lorenz[0] = 1.0
        np.testing.assert_allclose(lorenz_to_owa(lorenz).w, [1, 0, 0, 0])

    def test_uniform_gives_gini(self):
        for n in (1, 2, 5, 12):
            np.testing.assert_allclose(lorenz_to_owa(np.full(n, 1.0 / n)).w,
                                       gini_weights(n).w, atol=1e-12)

    def test_roundtrip_with_lorenz_weights(self):
        rng = np.random.default_rng(4)
        for _ in range(50):
            n = int(rng.integers(1, 10))
            w = GgfWeights(random_ggf_weights(rng, n))
            np.testing.assert_allclose(lorenz_to_owa(w.lorenz_weights).w, w.w,
                                       atol=1e-12)

    def test_validation(self):
        with pytest.raises(ValueError):
            lorenz_to_owa(np.array([0.5, 0.6]))
        with pytest.raises(ValueError):
            lorenz_to_owa(np.array([-0.1, 1.1]))


class TestLorenzCurve:
    def test_sort_then_cumsum(self):
        np.testing.assert_array_equal(lorenz_curve(np.array([2.0, 1.0, 3.0])),
                                      [1.0, 3.0, 6.0])

    def test_constant(self):
        np.testing.assert_allclose(lorenz_curve(np.full(3, 2.0)), [2.0, 4.0, 6.0])

    def test_with_zero(self):
        np.testing.assert_array_equal(lorenz_curve(np.array([0.0, 4.0])), [0.0, 4.0])

    def test_increments_nondecreasing(self):
        rng = np.random.default_rng(6)
        for _ in range(50):
            curve = lorenz_curve(rng.normal(size=8))
            increments = np.diff(np.concatenate([[0.0], curve]))
            assert np.all(np.diff(increments) >= -1e-12)


class TestLorenzDominance:
    def test_strict(self):
        assert lorenz_dominance(np.array([1.0, 2.0]), np.array([0.0, 3.0])) \
            is Dominance.STRICT_DOMINATES

    def test_equal(self):
        x = np.array([1.0, 2.0, 0.5])
        assert lorenz_dominance(x, x[::-1].copy()) is Dominance.EQUAL

    def test_incomparable(self):
        assert lorenz_dominance(np.array([0.0, 4.0]), np.array([1.0, 2.0])) \
            is Dominance.INCOMPARABLE

    def test_dominated(self):
        assert lorenz_dominance(np.array([0.0, 3.0]), np.array([1.0, 2.0])) \
            is Dominance.STRICTLY_DOMINATED

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            lorenz_dominance(np.ones(2), np.ones(3))

    def test_partial_order_on_integers(self):
        # antisymmetry and transitivity under exact arithmetic
        rng = np.random.default_rng(7)
        for _ in range(200):
            vecs = rng.integers(0, 6, size=(3, 4)).astype(np.float64)
            curves = [lorenz_curve(v) for v in vecs]

            def weak(a, b):
                return bool(np.all(curves[a] >= curves[b]))

            for a in range(3):
                for b in range(3):
                    if a == b:
                        continue
                    if weak(a, b) and weak(b, a):
                        np.testing.assert_array_equal(curves[a], curves[b])
                    for c in range(3):
                        if weak(a, b) and weak(b, c):
                            assert weak(a, c)


class TestSupergradient:
    def test_rank_assignment(self):
        w = GgfWeights(np.array([1.0, 0.5]))
        np.testing.assert_allclose(ggf_supergradient(w, np.array([3.0, 1.0])),
                                   [0.5, 1.0])

    def test_uniform_weights(self):
        w = uniform_weights(5)
        np.testing.assert_allclose(ggf_supergradient(w, np.arange(5.0)), np.ones(5))

    def test_tie_break_by_index(self):
        w = GgfWeights(np.array([1.0, 0.5]))
        np.testing.assert_allclose(ggf_supergradient(w, np.array([2.0, 2.0])),
                                   [1.0, 0.5])

    def test_supergradient_inequality(self):
        rng = np.random.default_rng(8)
        for _ in range(1000):
            n = int(rng.integers(2, 15))
            w = GgfWeights(random_ggf_weights(rng, n))
            x = rng.normal(size=n)
            other = rng.normal(size=n)
            s = ggf_supergradient(w, x)
            assert ggf_value(w, other) <= ggf_value(w, x) + s @ (other - x) + 1e-9


class TestGiniIndex:
    def test_two_point(self):
        assert gini_index(np.array([0.0, 1.0])) == pytest.approx(0.5)

    def test_constant_vector(self):
        assert gini_index(np.full(5, 3.0)) == pytest.approx(0.0, abs=1e-12)

    def test_concentrated(self):
        assert gini_index(np.array([0.0, 0.0, 3.0])) == pytest.approx(2.0 / 3.0)

    def test_pairwise_oracle(self):
        rng = np.random.default_rng(9)
        for _ in range(300):
            n = int(rng.integers(2, 30))
            x = rng.uniform(0.01, 1.0, size=n)
            assert gini_index(x) == pytest.approx(gini_pairwise(x), abs=1e-9)

    def test_range(self):
        rng = np.random.default_rng(10)
        for _ in range(100):
            n = int(rng.integers(2, 20))
            x = rng.uniform(0.0, 1.0, size=n) + 1e-6
            g = gini_index(x)
            assert 0.0 - 1e-12 <= g <= 1.0 - 1.0 / n + 1e-12

    def test_nonpositive_total(self):
        with pytest.raises(ValueError):
            gini_index(np.zeros(3))

    def test_affine_identity_with_welfare(self):
        rng = np.random.default_rng(11)
        for _ in range(300):
            n = int(rng.integers(2, 40))
            x = rng.uniform(0.0, 1.0, size=n) + 1e-9
            lhs = ggf_value(gini_weights(n), x)
            rhs = (x.sum() / 2.0) * (1.0 + 1.0 / n - gini_index(x))
            assert lhs == pytest.approx(rhs, abs=1e-9)


class TestLorenzReconstruction:
    def test_welfare_from_curve(self):
        rng = np.random.default_rng(12)
        for _ in range(200):
            n = int(rng.integers(1, 15))
            w = GgfWeights(random_ggf_weights(rng, n))
            x = rng.normal(size=n)
            reconstructed = float(w.lorenz_weights @ lorenz_curve(x))
            assert ggf_value(w, x) == pytest.approx(reconstructed, abs=1e-9)


class TestTwoSidedObjective:
    def test_endpoints(self):
        w1, w2 = uniform_weights(2), gini_weights(3)
        u = np.array([1.0, 2.0])
        v = np.array([0.5, 0.5, 2.0])
        assert two_sided_objective(0.0, w1, w2, u, v) == pytest.approx(ggf_value(w1, u))
        assert two_sided_objective(1.0, w1, w2, u, v) == pytest.approx(ggf_value(w2, v))

    def test_midpoint_arithmetic(self):
        w1 = uniform_weights(1)
        w2 = uniform_weights(1)
        assert two_sided_objective(0.5, w1, w2, np.array([2.0]), np.array([4.0])) \
            == pytest.approx(3.0)

    def test_lambda_range(self):
        with pytest.raises(ValueError):
            two_sided_objective(1.5, uniform_weights(1), uniform_weights(1),
                                np.array([1.0]), np.array([1.0]))


class TestParseWeightScheme:
    def test_named_schemes(self):
        np.testing.assert_allclose(parse_weight_scheme("gini", 4).w,
                                   gini_weights(4).w)
        np.testing.assert_allclose(parse_weight_scheme("bonferroni", 3).w,
                                   bonferroni_weights(3).w)
        np.testing.assert_allclose(parse_weight_scheme("uniform", 2).w, np.ones(2))

    def test_quantile_scheme(self):
        np.testing.assert_allclose(
            parse_weight_scheme("quantile:q=0.5,omega=0.25", 4).w,
            [1.0, 1.0, 0.75, 0.75])

    def test_explicit_scheme(self):
        np.testing.assert_allclose(parse_weight_scheme("explicit:1,0.5,0.25", 3).w,
                                   [1.0, 0.5, 0.25])

    def test_bad_schemes(self):
        with pytest.raises(ValueError):
            parse_weight_scheme("nope", 3)
        with pytest.raises(ValueError):
            parse_weight_scheme("quantile:q=0.5", 4)
        with pytest.raises(ValueError):
            parse_weight_scheme("explicit:1,0.5", 3)


class TestGgfWeightsValidation:
    def test_must_start_at_one(self):
        with pytest.raises(ValueError):
            GgfWeights(np.array([0.9, 0.5]))

    def test_must_be_nonincreasing(self):
        with pytest.raises(ValueError):
            GgfWeights(np.array([1.0, 0.5, 0.7]))

    def test_lorenz_weights_sum_to_one(self):
        rng = np.random.default_rng(13)
        for _ in range(50):
            n = int(rng.integers(1, 12))
            w = GgfWeights(random_ggf_weights(rng, n))
            lw = w.lorenz_weights
            assert np.all(lw >= -1e-12)
            assert lw.sum() == pytest.approx(1.0, abs=1e-12)
