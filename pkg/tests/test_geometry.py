"""Geometry of symmetric/SPD matrices, cross-checked against scipy.linalg."""

import numpy as np
import pytest
import scipy.linalg

from msapprox.errors import BadWeightsError, NotSpdError
from msapprox.geometry import (
    ScalarLine,
    karcher_mean,
    karcher_mean_batch,
    mat_exp_sym,
    mat_log_spd,
    scalar_line,
    spd_dist,
    spd_exp,
    spd_log,
    spd_manifold,
    sym_eig,
    symmetrize,
)

from conftest import rand_spd, rand_sym


class TestSymEig:
    def test_identity(self):
        w, v = sym_eig(np.eye(3))
        np.testing.assert_allclose(w, [1, 1, 1])
        np.testing.assert_allclose(np.abs(v @ v.T), np.eye(3), atol=1e-12)

    def test_already_diagonal(self):
        w, v = sym_eig(np.diag([3.0, 2.0, 1.0]))
        np.testing.assert_allclose(w, [3, 2, 1])
        np.testing.assert_allclose(np.abs(v), np.eye(3), atol=1e-12)

    def test_offdiagonal_block(self):
        # 2x2 exchange block has eigenvalues +-1; hand-computed spectrum.
        m = np.array([[0.0, 1, 0], [1, 0, 0], [0, 0, 2]])
        w, _ = sym_eig(m)
        np.testing.assert_allclose(w, [2, 1, -1], atol=1e-12)

    def test_reconstruction_and_orthonormality(self, rng):
        for _ in range(20):
            m = rand_sym(rng, scale=3.0)
            w, v = sym_eig(m)
            assert np.all(np.diff(w) <= 0)
            assert np.linalg.norm(v.T @ v - np.eye(3)) <= 1e-10
            err = np.linalg.norm(v @ np.diag(w) @ v.T - m)
            assert err <= 1e-10 * (1 + np.linalg.norm(m))

    def test_rejects_asymmetric(self):
        with pytest.raises(ValueError):
            sym_eig(np.array([[0.0, 1], [0, 0]]))


class TestMatExpLog:
    def test_exp_zero_is_identity(self):
        np.testing.assert_array_equal(mat_exp_sym(np.zeros((3, 3))), np.eye(3))

    def test_exp_diagonal(self):
        np.testing.assert_allclose(
            mat_exp_sym(np.diag([1.0, 0, 0])), np.diag([np.e, 1, 1]), atol=1e-14
        )
        np.testing.assert_allclose(
            mat_exp_sym(np.diag([np.log(2), np.log(3), 0.0])),
            np.diag([2.0, 3.0, 1.0]),
            atol=1e-14,
        )

    def test_log_identity_is_zero(self):
        np.testing.assert_allclose(mat_log_spd(np.eye(3)), 0, atol=1e-15)

    def test_log_diagonal(self):
        np.testing.assert_allclose(
            mat_log_spd(np.diag([np.e] * 3)), np.eye(3), atol=1e-14
        )

    def test_round_trip_random(self, rng):
        for _ in range(20):
            s = rand_sym(rng, scale=1.5)
            p = mat_exp_sym(s)
            np.testing.assert_allclose(mat_log_spd(p), s, atol=1e-9)
            err = np.linalg.norm(mat_exp_sym(mat_log_spd(p)) - p)
            assert err <= 1e-9 * (1 + np.linalg.norm(p))

    def test_scipy_oracle(self, rng):
        for _ in range(10):
            s = rand_sym(rng)
            np.testing.assert_allclose(mat_exp_sym(s), scipy.linalg.expm(s), atol=1e-10)
            p = rand_spd(rng)
            np.testing.assert_allclose(mat_log_spd(p), scipy.linalg.logm(p), atol=1e-9)

    def test_log_rejects_semidefinite(self):
        with pytest.raises(NotSpdError):
            mat_log_spd(np.diag([1.0, 1.0, 1e-13]))
        with pytest.raises(NotSpdError):
            mat_log_spd(np.diag([1.0, 1.0, -0.5]))

    def test_exp_output_exactly_symmetric(self, rng):
        p = mat_exp_sym(rand_sym(rng, scale=2.0))
        np.testing.assert_array_equal(p, p.T)


class TestSpdExpLog:
    def test_exp_at_identity_reduces_to_matrix_exp(self, rng):
        v = rand_sym(rng)
        np.testing.assert_allclose(spd_exp(np.eye(3), v), mat_exp_sym(v), atol=1e-13)

    def test_exp_zero_tangent(self, rng):
        p = rand_spd(rng)
        np.testing.assert_allclose(spd_exp(p, np.zeros((3, 3))), p, atol=1e-12)

    def test_log_at_self_is_zero(self, rng):
        p = rand_spd(rng)
        np.testing.assert_allclose(spd_log(p, p), 0, atol=1e-12)

    def test_log_diagonal_closed_form(self):
        np.testing.assert_allclose(
            spd_log(np.eye(3), np.diag([np.e, 1, 1])), np.diag([1.0, 0, 0]), atol=1e-13
        )

    def test_exp_log_round_trips(self, rng):
        # Bases kept moderately conditioned; whitening a norm-2 tangent by an
        # extreme base exceeds float64 round-trip accuracy at this tolerance.
        for _ in range(20):
            p, q = rand_spd(rng, scale=0.6), rand_spd(rng, scale=0.6)
            np.testing.assert_allclose(spd_exp(p, spd_log(p, q)), q, atol=1e-8)
            v = rand_sym(rng)
            v *= min(1.0, 2.0 / np.linalg.norm(v))
            np.testing.assert_allclose(spd_log(p, spd_exp(p, v)), v, atol=1e-8)

    def test_scipy_oracle(self, rng):
        # Independent route: fractional powers and logm from scipy.
        for _ in range(10):
            p, q = rand_spd(rng), rand_spd(rng)
            r = scipy.linalg.fractional_matrix_power(p, 0.5).real
            r_inv = scipy.linalg.fractional_matrix_power(p, -0.5).real
            expected = r @ scipy.linalg.logm(r_inv @ q @ r_inv) @ r
            np.testing.assert_allclose(spd_log(p, q), expected, atol=1e-8)

    def test_metric_compatibility(self, rng):
        # Geodesic distance equals the tangent norm of the log at the base.
        for _ in range(10):
            p, q = rand_spd(rng), rand_spd(rng)
            tangent = spd_log(p, q)
            r_inv = scipy.linalg.fractional_matrix_power(p, -0.5).real
            white = r_inv @ tangent @ r_inv
            np.testing.assert_allclose(
                spd_dist(p, q), np.sqrt(np.trace(white @ white)), atol=1e-8
            )

    def test_rejects_negative_spectrum(self):
        bad = np.diag([1.0, -0.5, 2.0])
        with pytest.raises(NotSpdError):
            spd_exp(bad, np.eye(3))
        with pytest.raises(NotSpdError):
            spd_log(np.eye(3), bad)


class TestSpdDist:
    def test_zero_on_equal(self, rng):
        p = rand_spd(rng)
        assert spd_dist(p, p) <= 1e-10

    def test_diagonal_value(self):
        assert abs(spd_dist(np.eye(3), np.diag([np.e**2, 1, 1])) - 2.0) <= 1e-12

    def test_symmetry(self, rng):
        a, b = rand_spd(rng), rand_spd(rng)
        assert abs(spd_dist(a, b) - spd_dist(b, a)) <= 1e-10

    def test_affine_invariance(self, rng):
        for _ in range(25):
            a, b = rand_spd(rng), rand_spd(rng)
            g = rng.standard_normal((3, 3))
            while abs(np.linalg.det(g)) < 1e-3:
                g = rng.standard_normal((3, 3))
            d1 = spd_dist(g @ a @ g.T, g @ b @ g.T)
            assert abs(d1 - spd_dist(a, b)) <= 1e-8

    def test_triangle_inequality(self, rng):
        for _ in range(25):
            a, b, c = rand_spd(rng), rand_spd(rng), rand_spd(rng)
            assert spd_dist(a, c) <= spd_dist(a, b) + spd_dist(b, c) + 1e-9


class TestKarcherMean:
    def test_single_point(self, rng):
        p = rand_spd(rng)
        np.testing.assert_allclose(karcher_mean(p[None], [1.0]), p, atol=1e-10)

    def test_two_commuting_points(self):
        mean = karcher_mean(
            np.stack([np.diag([4.0, 1, 9]), np.diag([1.0, 4, 1])]), [0.5, 0.5]
        )
        np.testing.assert_allclose(mean, np.diag([2.0, 2.0, 3.0]), atol=1e-8)

    def test_permutation_invariance(self, rng):
        points = np.stack([rand_spd(rng) for _ in range(5)])
        weights = np.array([0.1, 0.3, 0.2, 0.25, 0.15])
        perm = np.array([3, 0, 4, 1, 2])
        m1 = karcher_mean(points, weights)
        m2 = karcher_mean(points[perm], weights[perm])
        np.testing.assert_allclose(m1, m2, atol=1e-9)

    def test_fixed_point_property(self, rng):
        points = np.stack([rand_spd(rng, scale=1.5) for _ in range(6)])
        weights = np.full(6, 1 / 6)
        mu = karcher_mean(points, weights)
        tangent = np.einsum("k,kij->ij", weights, spd_log(mu, points))
        assert np.linalg.norm(tangent) <= 1e-9

    def test_variance_optimality(self, rng):
        # The mean minimizes the weighted sum of squared geodesic distances.
        points = np.stack([rand_spd(rng) for _ in range(3)])
        weights = np.full(3, 1 / 3)
        mu = karcher_mean(points, weights)
        best = (weights * spd_dist(mu, points) ** 2).sum()
        for _ in range(100):
            s = rand_sym(rng)
            s /= max(1.0, np.linalg.norm(s))
            q = spd_exp(mu, 0.05 * s)
            assert best <= (weights * spd_dist(q, points) ** 2).sum() + 1e-8

    def test_weight_validation(self, rng):
        points = np.stack([rand_spd(rng) for _ in range(2)])
        with pytest.raises(BadWeightsError):
            karcher_mean(points, [-0.1, 1.1])
        with pytest.raises(BadWeightsError):
            karcher_mean(points, [0.0, 0.0])
        with pytest.raises(BadWeightsError):
            karcher_mean(points, [0.7, 0.7])

    def test_rejects_indefinite_point(self, rng):
        points = np.stack([np.diag([1.0, -1.0, 1.0]), rand_spd(rng)])
        with pytest.raises(NotSpdError):
            karcher_mean(points, [0.5, 0.5])

    def test_wide_spread_still_converges(self, rng):
        points = np.stack([rand_spd(rng, scale=4.0) for _ in range(8)])
        weights = np.full(8, 1 / 8)
        mu = karcher_mean(points, weights)
        tangent = np.einsum("k,kij->ij", weights, spd_log(mu, points))
        assert np.linalg.norm(tangent) <= 1e-9


class TestKarcherBatch:
    def test_matches_reference_shared_points(self, rng):
        points = np.stack([rand_spd(rng, scale=2.0) for _ in range(7)])
        weights = rng.random((6, 7))
        weights /= weights.sum(axis=1, keepdims=True)
        batch = karcher_mean_batch(points, weights)
        for i in range(6):
            np.testing.assert_allclose(
                batch[i], karcher_mean(points, weights[i]), atol=1e-8
            )

    def test_matches_reference_per_row_points(self, rng):
        points = np.stack(
            [np.stack([rand_spd(rng) for _ in range(4)]) for _ in range(3)]
        )
        weights = rng.random((3, 4))
        weights /= weights.sum(axis=1, keepdims=True)
        batch = karcher_mean_batch(points, weights)
        for i in range(3):
            np.testing.assert_allclose(
                batch[i], karcher_mean(points[i], weights[i]), atol=1e-8
            )

    def test_zero_weights_are_ignored(self, rng):
        points = np.stack([rand_spd(rng) for _ in range(5)])
        weights = np.array([[0.0, 0.5, 0.0, 0.5, 0.0]])
        batch = karcher_mean_batch(points, weights)
        ref = karcher_mean(points[[1, 3]], [0.5, 0.5])
        np.testing.assert_allclose(batch[0], ref, atol=1e-9)

    def test_row_sum_validation(self, rng):
        points = np.stack([rand_spd(rng) for _ in range(2)])
        with pytest.raises(BadWeightsError):
            karcher_mean_batch(points, np.array([[0.9, 0.3]]))


class TestValueSpaces:
    def test_scalar_line_arithmetic(self):
        line = ScalarLine()
        assert line.dist(3.0, 5.0) == 2.0
        assert line.log_at(3.0, 5.0) == 2.0
        assert line.exp_at(3.0, 2.0) == 5.0
        assert line.weighted_mean(np.array([2.0, 4.0]), [0.5, 0.5]) == 3.0

    def test_spd_manifold_delegates(self, rng):
        p, q = rand_spd(rng), rand_spd(rng)
        assert spd_manifold.dist(p, q) == spd_dist(p, q)
        np.testing.assert_array_equal(spd_manifold.log_at(p, q), spd_log(p, q))
        mean = spd_manifold.weighted_mean(np.stack([p, q]), [0.5, 0.5])
        np.testing.assert_allclose(mean, karcher_mean(np.stack([p, q])), atol=1e-12)

    def test_singletons_exist(self):
        assert isinstance(scalar_line, ScalarLine)


class TestSymmetrize:
    def test_idempotent_and_fixes_symmetric(self, rng):
        m = rng.standard_normal((3, 3))
        s = symmetrize(m)
        np.testing.assert_array_equal(symmetrize(s), s)
        sym = rand_sym(rng)
        np.testing.assert_array_equal(symmetrize(sym), sym)
