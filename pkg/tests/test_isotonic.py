import numpy as np
import pytest

from lorenz_rank import (
    COMPILED_PAV,
    GgfWeights,
    MoreauParams,
    ggf_value,
    moreau_envelope_value,
    moreau_grad_dual,
    pav_nondecreasing,
    permutahedron_project,
    uniform_weights,
)
from lorenz_rank import _pav_py
from lorenz_rank.isotonic import pav_with_blocks, reversed_negated
from oracles import grid_isotonic, random_ggf_weights, variational_slack

W_HALF = GgfWeights(np.array([1.0, 0.5]))


class TestPav:
    def test_pool_all(self):
        np.testing.assert_allclose(pav_nondecreasing(np.array([3.0, 1.0, 2.0])),
                                   [2.0, 2.0, 2.0])

    def test_already_isotonic(self):
        np.testing.assert_allclose(pav_nondecreasing(np.array([1.0, 2.0, 3.0])),
                                   [1.0, 2.0, 3.0])

    def test_pooled_mean(self):
        np.testing.assert_allclose(pav_nondecreasing(np.array([2.0, 0.0])),
                                   [1.0, 1.0])

    def test_grid_oracle(self):
        rng = np.random.default_rng(0)
        for _ in range(60):
            n = int(rng.integers(1, 4))
            s = rng.uniform(0.0, 1.0, size=n)
            fitted = pav_nondecreasing(s)
            reference = grid_isotonic(s, 1e-3)
            assert np.max(np.abs(fitted - reference)) <= 2e-3

    def test_invariants(self):
        rng = np.random.default_rng(1)
        for _ in range(300):
            n = int(rng.integers(1, 60))
            s = rng.normal(size=n)
            sol, starts = pav_with_blocks(s)
            assert np.all(np.diff(sol) >= 0.0)
            bounds = np.append(starts, n)
            for b in range(starts.shape[0]):
                block = slice(bounds[b], bounds[b + 1])
                assert sol[block.start] == pytest.approx(np.mean(s[block]), abs=1e-12)
            residual_cumsum = np.cumsum(s - sol)
            assert np.all(residual_cumsum >= -1e-12)
            assert np.all(np.abs(residual_cumsum[bounds[1:] - 1]) <= 1e-12)

    def test_backends_agree(self):
        if not COMPILED_PAV:
            pytest.skip("compiled kernel not built")
        from lorenz_rank import _pavc
        rng = np.random.default_rng(2)
        for _ in range(200):
            s = rng.normal(size=int(rng.integers(1, 80)))
            sol_c, starts_c = _pavc.pav_blocks(s)
            sol_py, starts_py = _pav_py.pav_blocks(s)
            np.testing.assert_array_equal(sol_c, sol_py)
            np.testing.assert_array_equal(starts_c, starts_py)

    def test_rejects_bad_input(self):
        with pytest.raises(ValueError):
            pav_nondecreasing(np.array([1.0, np.nan]))
        with pytest.raises(ValueError):
            pav_nondecreasing(np.ones((2, 2)))


class TestPermutahedronProject:
    def test_origin_segment_midpoint(self):
        result = permutahedron_project(W_HALF, np.array([0.0, 0.0]))
        np.testing.assert_allclose(result.y, [-0.75, -0.75], atol=1e-12)

    def test_clamps_to_vertices(self):
        np.testing.assert_allclose(
            permutahedron_project(W_HALF, np.array([10.0, 0.0])).y,
            [-0.5, -1.0], atol=1e-12)
        np.testing.assert_allclose(
            permutahedron_project(W_HALF, np.array([0.0, 10.0])).y,
            [-1.0, -0.5], atol=1e-12)

    def test_variational_inequality(self):
        rng = np.random.default_rng(3)
        for _ in range(120):
            n = int(rng.integers(2, 7))
            w = GgfWeights(random_ggf_weights(rng, n))
            z = rng.normal(scale=2.0, size=n)
            y = permutahedron_project(w, z).y
            assert variational_slack(reversed_negated(w), z, y) <= 1e-9

    def test_idempotent(self):
        rng = np.random.default_rng(4)
        for _ in range(60):
            n = int(rng.integers(2, 7))
            w = GgfWeights(random_ggf_weights(rng, n))
            y = permutahedron_project(w, rng.normal(size=n)).y
            again = permutahedron_project(w, y).y
            np.testing.assert_allclose(again, y, atol=1e-9)

    def test_membership_majorization(self):
        rng = np.random.default_rng(5)
        for _ in range(120):
            n = int(rng.integers(2, 9))
            w = GgfWeights(random_ggf_weights(rng, n))
            y = permutahedron_project(w, rng.normal(scale=3.0, size=n)).y
            target = reversed_negated(w)
            y_desc = np.sort(y)[::-1]
            t_desc = np.sort(target)[::-1]
            assert abs(y_desc.sum() - t_desc.sum()) <= 1e-9
            assert np.all(np.cumsum(y_desc) <= np.cumsum(t_desc) + 1e-9)

    def test_blocks_partition_indices(self):
        rng = np.random.default_rng(6)
        for _ in range(30):
            n = int(rng.integers(2, 9))
            w = GgfWeights(random_ggf_weights(rng, n))
            result = permutahedron_project(w, rng.normal(size=n))
            merged = np.concatenate(result.blocks)
            assert sorted(merged.tolist()) == list(range(n))

    def test_singleton_weights(self):
        w = uniform_weights(1)
        np.testing.assert_allclose(permutahedron_project(w, np.array([7.0])).y, [-1.0])


class TestMoreau:
    def test_scalar_closed_form(self):
        w = uniform_weights(1)
        rng = np.random.default_rng(7)
        for _ in range(40):
            z = float(rng.normal(scale=5.0))
            beta = float(rng.uniform(0.05, 10.0))
            value = moreau_envelope_value(w, np.array([z]), beta)
            assert value == pytest.approx(-z - beta / 2.0, abs=1e-12)
            np.testing.assert_allclose(moreau_grad_dual(w, np.array([z]), beta),
                                       [-1.0])

    def test_gradient_scale_invariance_at_origin(self):
        for beta in (0.1, 1.0, 42.0):
            np.testing.assert_allclose(
                moreau_grad_dual(W_HALF, np.array([0.0, 0.0]), beta),
                [-0.75, -0.75], atol=1e-12)

    def test_finite_difference_match(self):
        rng = np.random.default_rng(8)
        for _ in range(40):
            n = int(rng.integers(2, 7))
            w = GgfWeights(random_ggf_weights(rng, n))
            z = rng.normal(scale=2.0, size=n) + np.arange(n) * 1e-7
            beta = float(rng.uniform(0.1, 10.0))
            grad = moreau_grad_dual(w, z, beta)
            step = 1e-6 * max(1.0, float(np.max(np.abs(z))))
            fd = np.empty(n)
            for i in range(n):
                zp, zm = z.copy(), z.copy()
                zp[i] += step
                zm[i] -= step
                fd[i] = (moreau_envelope_value(w, zp, beta)
                         - moreau_envelope_value(w, zm, beta)) / (2 * step)
            rel = np.linalg.norm(fd - grad) / max(1.0, np.linalg.norm(grad))
            assert rel <= 1e-5

    def test_sandwich_bound(self):
        rng = np.random.default_rng(9)
        for _ in range(300):
            n = int(rng.integers(1, 9))
            w = GgfWeights(random_ggf_weights(rng, n))
            z = rng.normal(scale=3.0, size=n)
            beta = float(rng.uniform(0.01, 10.0))
            envelope = moreau_envelope_value(w, z, beta)
            h = -ggf_value(w, z)
            bound = envelope + 0.5 * beta * float(w.w @ w.w)
            assert envelope <= h + 1e-9
            assert h <= bound + 1e-9

    def test_gradient_lipschitz(self):
        rng = np.random.default_rng(10)
        for _ in range(150):
            n = int(rng.integers(2, 8))
            w = GgfWeights(random_ggf_weights(rng, n))
            beta = float(rng.uniform(0.1, 5.0))
            z1 = rng.normal(size=n)
            z2 = rng.normal(size=n)
            y1 = moreau_grad_dual(w, z1, beta)
            y2 = moreau_grad_dual(w, z2, beta)
            assert np.linalg.norm(y1 - y2) <= \
                np.linalg.norm(z1 - z2) / beta + 1e-9

    def test_beta_validation(self):
        w = uniform_weights(2)
        for bad in (0.0, -1.0):
            with pytest.raises(ValueError):
                moreau_grad_dual(w, np.zeros(2), bad)
            with pytest.raises(ValueError):
                moreau_envelope_value(w, np.zeros(2), bad)
        with pytest.raises(ValueError):
            MoreauParams(beta=0.0)
        assert MoreauParams(beta=0.5).beta == 0.5

    def test_beta_floored_against_overflow(self):
        # positive-but-tiny beta is clamped so z / beta stays finite
        w = GgfWeights(np.array([1.0, 0.5]))
        y = moreau_grad_dual(w, np.array([3.0, 1.0]), 1e-300)
        assert np.all(np.isfinite(y))
        np.testing.assert_allclose(y, moreau_grad_dual(w, np.array([3.0, 1.0]), 1e-12))
