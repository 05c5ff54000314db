"""Single-scale operators: Shepard (scalar and manifold) and linear MLS."""

import numpy as np
import pytest

from msapprox.errors import EmptyDatasetError
from msapprox.geometry import scalar_line, spd_manifold
from msapprox.kernels import KernelSpec, kernel_eval
from msapprox.operators import (
    Approximant,
    ScatteredDataset,
    mls_eval,
    shepard_eval,
    shepard_eval_entrywise,
    shepard_eval_manifold,
)

from conftest import rand_spd


def scalar_data(sites, values):
    return ScatteredDataset(np.asarray(sites), np.asarray(values, dtype=float))


class TestScatteredDataset:
    def test_requires_matching_lengths(self, rng):
        with pytest.raises(ValueError):
            ScatteredDataset(rng.random((4, 2)), np.zeros(3))

    def test_requires_at_least_one_site(self):
        with pytest.raises(EmptyDatasetError):
            ScatteredDataset(np.empty((0, 2)), np.empty(0))

    def test_validates_spd_values(self, rng):
        sites = rng.random((2, 2))
        bad = np.stack([np.eye(3), np.diag([1.0, -1.0, 1.0])])
        with pytest.raises(Exception):
            ScatteredDataset(sites, bad, spd_manifold)

    def test_subset_preserves_space(self, rng):
        values = np.stack([rand_spd(rng) for _ in range(4)])
        data = ScatteredDataset(rng.random((4, 2)), values, spd_manifold)
        sub = data.subset(np.array([1, 3]))
        assert sub.n_sites == 2 and sub.space is data.space


class TestShepardScalar:
    def test_constant_reproduction(self, rng):
        sites = rng.random((30, 2))
        data = scalar_data(sites, np.full(30, 7.5))
        for spec in (KernelSpec("wendland", 0.4), KernelSpec("gaussian", 0.4)):
            out = shepard_eval(data, spec, rng.random((20, 2)))
            np.testing.assert_allclose(out, 7.5, atol=1e-12)

    def test_single_site_returns_its_value(self, rng):
        data = scalar_data([[0.5, 0.5]], [7.0])
        for q in ([0.1, 0.9], [0.5, 0.5], [0.99, 0.01]):
            assert shepard_eval(data, KernelSpec("wendland", 0.3), q) == 7.0

    def test_two_equidistant_sites(self):
        data = scalar_data([[0.4, 0.5], [0.6, 0.5]], [0.0, 2.0])
        value = shepard_eval(data, KernelSpec("wendland", 0.5), [0.5, 0.5])
        assert value == pytest.approx(1.0, abs=1e-12)

    def test_empty_support_falls_back_to_nearest(self):
        # Sites cluster near the origin; the query sits beyond the support.
        data = scalar_data([[0.05, 0.05], [0.1, 0.05]], [3.0, 9.0])
        value = shepard_eval(data, KernelSpec("wendland", 0.1), [0.9, 0.9])
        assert value == 9.0

    def test_output_within_value_range(self, rng):
        sites = rng.random((40, 2))
        values = rng.standard_normal(40)
        data = scalar_data(sites, values)
        out = shepard_eval(data, KernelSpec("wendland", 0.5), rng.random((50, 2)))
        assert np.all(out >= values.min() - 1e-12)
        assert np.all(out <= values.max() + 1e-12)

    def test_partition_of_unity(self, rng):
        # Weights sum to one wherever support exists: interpolating the
        # all-ones function returns exactly one.
        sites = rng.random((25, 2))
        data = scalar_data(sites, np.ones(25))
        out = shepard_eval(data, KernelSpec("wendland", 0.6), rng.random((40, 2)))
        np.testing.assert_allclose(out, 1.0, atol=1e-12)

    def test_brute_force_oracle(self, rng):
        sites = rng.random((15, 2))
        values = rng.standard_normal(15)
        data = scalar_data(sites, values)
        spec = KernelSpec("wendland", 0.45)
        for q in rng.random((10, 2)):
            num = den = 0.0
            for (x, y), f in zip(sites, values):
                w = kernel_eval(spec, np.hypot(x - q[0], y - q[1]) / spec.delta)
                num += float(w) * f
                den += float(w)
            expected = num / den if den > 0 else values[0]
            assert shepard_eval(data, spec, q) == pytest.approx(expected, abs=1e-12)

    def test_translation_consistency(self, rng):
        sites = rng.random((20, 2))
        values = rng.standard_normal(20)
        shift = np.array([1.7, -0.4])
        spec = KernelSpec("wendland", 0.5)
        q = rng.random(2)
        a = shepard_eval(scalar_data(sites, values), spec, q)
        b = shepard_eval(scalar_data(sites + shift, values), spec, q + shift)
        assert a == pytest.approx(b, abs=1e-10)


class TestShepardManifold:
    def test_all_equal_values(self, rng):
        p = rand_spd(rng)
        data = ScatteredDataset(
            rng.random((10, 2)), np.tile(p, (10, 1, 1)), spd_manifold
        )
        out = shepard_eval_manifold(data, KernelSpec("wendland", 0.6), rng.random(2))
        assert spd_manifold.dist(out, p) <= 1e-8

    def test_two_equidistant_commuting_values(self):
        values = np.stack([np.diag([4.0, 1, 9]), np.diag([1.0, 4, 1])])
        data = ScatteredDataset([[0.4, 0.5], [0.6, 0.5]], values, spd_manifold)
        out = shepard_eval_manifold(data, KernelSpec("wendland", 0.5), [0.5, 0.5])
        np.testing.assert_allclose(out, np.diag([2.0, 2.0, 3.0]), atol=1e-8)

    def test_diagonal_embedding_matches_scalar_shepard(self, rng):
        # diag(c, 1, 1) values commute, so the Karcher-Shepard value equals
        # the scalar Shepard of log(c) pushed through exp.
        sites = rng.random((12, 2))
        logc = rng.standard_normal(12) * 0.7
        values = np.zeros((12, 3, 3))
        values[:, 0, 0] = np.exp(logc)
        values[:, 1, 1] = values[:, 2, 2] = 1.0
        spec = KernelSpec("wendland", 0.5)
        mdata = ScatteredDataset(sites, values, spd_manifold)
        sdata = scalar_data(sites, logc)
        for q in rng.random((8, 2)):
            out = shepard_eval_manifold(mdata, spec, q)
            expected = np.exp(shepard_eval(sdata, spec, q))
            assert out[0, 0] == pytest.approx(expected, abs=1e-8)
            assert out[1, 1] == pytest.approx(1.0, abs=1e-10)

    def test_empty_support_falls_back_to_nearest(self, rng):
        values = np.stack([rand_spd(rng), rand_spd(rng)])
        data = ScatteredDataset([[0.05, 0.05], [0.1, 0.05]], values, spd_manifold)
        out = shepard_eval_manifold(data, KernelSpec("wendland", 0.1), [0.9, 0.9])
        np.testing.assert_array_equal(out, values[1])


class TestEntrywiseShepard:
    def test_matches_scalar_shepard_per_entry(self, rng):
        sites = rng.random((10, 2))
        mats = rng.standard_normal((10, 3, 3))
        spec = KernelSpec("wendland", 0.5)
        queries = rng.random((6, 2))
        out = shepard_eval_entrywise(sites, mats, spec, queries)
        for i in range(3):
            for j in range(3):
                per_entry = shepard_eval(scalar_data(sites, mats[:, i, j]), spec, queries)
                np.testing.assert_allclose(out[:, i, j], per_entry, atol=1e-13)


class TestMls:
    def test_reproduces_fixed_affine_function(self, rng):
        sites = rng.random((25, 2))
        values = 2 * sites[:, 0] + 3 * sites[:, 1] + 1
        data = scalar_data(sites, values)
        for q in rng.random((10, 2)):
            expected = 2 * q[0] + 3 * q[1] + 1  # direct substitution
            got = mls_eval(data, KernelSpec("gaussian", 0.4), q)
            assert got == pytest.approx(expected, abs=1e-8)

    def test_reproduces_random_affine_functions(self, rng):
        for _ in range(100):
            n = int(rng.integers(5, 30))
            sites = rng.random((n, 2))
            a, b, c = rng.standard_normal(3)
            data = scalar_data(sites, a * sites[:, 0] + b * sites[:, 1] + c)
            q = rng.random(2)
            expected = a * q[0] + b * q[1] + c
            got = mls_eval(data, KernelSpec("gaussian", 0.5), q)
            assert got == pytest.approx(expected, abs=1e-8)

    def test_constant_reproduction(self, rng):
        sites = rng.random((20, 2))
        data = scalar_data(sites, np.full(20, 4.25))
        out = mls_eval(data, KernelSpec("gaussian", 0.35), rng.random((15, 2)))
        np.testing.assert_allclose(out, 4.25, atol=1e-10)

    def test_collinear_sites_fall_back_to_weighted_mean(self, rng):
        t = np.linspace(0.1, 0.9, 7)
        sites = np.stack([t, 0.5 + 0.3 * t], axis=1)
        values = rng.standard_normal(7)
        data = scalar_data(sites, values)
        spec = KernelSpec("gaussian", 0.4)
        q = np.array([0.35, 0.8])
        dist = np.linalg.norm(sites - q, axis=1)
        w = kernel_eval(spec, dist / spec.delta)
        expected = (w @ values) / w.sum()
        assert mls_eval(data, spec, q) == pytest.approx(expected, abs=1e-10)

    def test_two_sites_fall_back(self, rng):
        sites = np.array([[0.2, 0.3], [0.7, 0.6]])
        values = np.array([1.0, 5.0])
        data = scalar_data(sites, values)
        spec = KernelSpec("gaussian", 0.5)
        q = np.array([0.4, 0.4])
        dist = np.linalg.norm(sites - q, axis=1)
        w = kernel_eval(spec, dist / spec.delta)
        expected = (w @ values) / w.sum()
        assert mls_eval(data, spec, q) == pytest.approx(expected, abs=1e-10)

    def test_empty_support_falls_back_to_nearest(self):
        data = scalar_data([[0.05, 0.05], [0.1, 0.05]], [3.0, 9.0])
        assert mls_eval(data, KernelSpec("wendland", 0.1), [0.9, 0.9]) == 9.0

    def test_translation_consistency(self, rng):
        sites = rng.random((20, 2))
        values = rng.standard_normal(20)
        shift = np.array([-2.3, 0.9])
        spec = KernelSpec("gaussian", 0.4)
        q = rng.random(2)
        a = mls_eval(scalar_data(sites, values), spec, q)
        b = mls_eval(scalar_data(sites + shift, values), spec, q + shift)
        assert a == pytest.approx(b, abs=1e-10)


class TestApproximant:
    def test_dispatch_matches_functions(self, rng):
        sites = rng.random((15, 2))
        values = rng.standard_normal(15)
        data = scalar_data(sites, values)
        spec = KernelSpec("gaussian", 0.4)
        queries = rng.random((5, 2))
        np.testing.assert_array_equal(
            Approximant(data, spec, "shepard").evaluate(queries),
            shepard_eval(data, spec, queries),
        )
        np.testing.assert_array_equal(
            Approximant(data, spec, "mls").evaluate(queries),
            mls_eval(data, spec, queries),
        )

    def test_rejects_mls_on_manifold_data(self, rng):
        values = np.stack([rand_spd(rng) for _ in range(3)])
        data = ScatteredDataset(rng.random((3, 2)), values, spd_manifold)
        with pytest.raises(ValueError):
            Approximant(data, KernelSpec("gaussian", 0.3), "mls")

    def test_rejects_unknown_method(self, rng):
        data = scalar_data(rng.random((3, 2)), np.zeros(3))
        with pytest.raises(ValueError):
            Approximant(data, KernelSpec("gaussian", 0.3), "rbf")
