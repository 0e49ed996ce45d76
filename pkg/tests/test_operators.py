"""Jacobian assembly, spectra, fractional powers, and the p-Laplacian."""

import numpy as np
import pytest

from calabi_graph.curvature import curvature
from calabi_graph.generators import (
    cycle_graph,
    path_graph,
    random_admissible_graph,
    random_log_weights,
    star_graph,
)
from calabi_graph.graph import GraphError, parse_edge_list
from calabi_graph.operators import (
    JacobianMatrix,
    SpectralTolerance,
    fractional_laplacian_apply,
    jacobian,
    jacobian_fd_check,
    laplacian_apply,
    p_laplacian_apply,
    spectral_decompose,
)

from conftest import jacobian_by_fd


def random_instances(seed, count, max_edges=30, spread=1.0):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        g = random_admissible_graph(rng, max_edges=max_edges)
        r = random_log_weights(g.num_edges, rng, -spread, spread)
        yield g, r


class TestJacobianEntries:
    def test_single_edge_is_zero(self):
        g = parse_edge_list("0 1 3.0")
        J = jacobian(g, np.log(g.weights)).entries
        np.testing.assert_array_equal(J, [[0.0]])

    def test_p3_uniform_golden(self, p3):
        J = jacobian(p3, np.zeros(2)).entries
        np.testing.assert_allclose(J, [[0.5, -0.5], [-0.5, 0.5]], atol=1e-15)

    def test_k13_uniform_golden(self, k13):
        J = jacobian(k13, np.zeros(3)).entries
        expected = np.full((3, 3), -2.0 / 9.0)
        np.fill_diagonal(expected, 4.0 / 9.0)
        np.testing.assert_allclose(J, expected, atol=1e-15)

    def test_symmetry_exact(self):
        for g, r in random_instances(61, 15):
            J = jacobian(g, r).entries
            assert np.array_equal(J, J.T)

    def test_row_sums_vanish(self):
        for g, r in random_instances(67, 15):
            J = jacobian(g, r).entries
            rowmax = np.abs(J).max(axis=1)
            assert np.all(np.abs(J.sum(axis=1)) <= 1e-10 * np.maximum(rowmax, 1e-300))

    def test_sign_pattern(self):
        for g, r in random_instances(71, 15):
            J = jacobian(g, r).entries
            off = J - np.diag(np.diag(J))
            assert np.all(off <= 0.0)
            if g.num_edges > 1:
                assert np.all(np.diag(J) > 0.0)

    def test_inadmissible_rejected(self):
        with pytest.raises(GraphError):
            jacobian(cycle_graph(4), np.zeros(4))

    def test_matches_independent_finite_difference(self):
        for g, r in random_instances(73, 10, max_edges=15):
            J = jacobian(g, r).entries
            np.testing.assert_allclose(J, jacobian_by_fd(g, r), atol=5e-8)


class TestFdCheck:
    def test_p3_uniform(self, p3):
        assert jacobian_fd_check(p3, np.zeros(2), 1e-5) < 1e-8

    def test_k13_random(self, k13):
        rng = np.random.default_rng(79)
        r = rng.uniform(-1, 1, 3)
        assert jacobian_fd_check(k13, r, 1e-5) < 1e-7

    def test_c6_random(self, c6):
        rng = np.random.default_rng(83)
        r = rng.uniform(-1, 1, 6)
        assert jacobian_fd_check(c6, r, 1e-5) < 1e-7

    def test_rejects_bad_step(self, p3):
        with pytest.raises(ValueError):
            jacobian_fd_check(p3, np.zeros(2), 0.0)


class TestSpectralDecompose:
    def test_p3_spectrum(self, p3):
        lam, _ = jacobian(p3, np.zeros(2)).spectrum
        np.testing.assert_allclose(lam, [0.0, 1.0], atol=1e-12)

    def test_k13_spectrum(self, k13):
        lam, _ = jacobian(k13, np.zeros(3)).spectrum
        np.testing.assert_allclose(lam, [0.0, 2.0 / 3.0, 2.0 / 3.0], atol=1e-12)

    def test_reconstruction_and_orthonormality(self):
        for g, r in random_instances(89, 10):
            J = jacobian(g, r)
            lam, Q = J.spectrum
            scale = max(np.abs(J.entries).max(), 1e-300)
            assert np.abs(Q.T @ np.diag(lam) @ Q - J.entries).max() <= 1e-9 * scale
            assert np.abs(Q @ Q.T - np.eye(len(lam))).max() <= 1e-10
            assert np.all(np.diff(lam) >= 0.0)

    def test_psd_with_one_dimensional_kernel(self):
        tol = SpectralTolerance()
        for g, r in random_instances(97, 15):
            lam, Q = jacobian(g, r).spectrum
            assert lam[0] >= 0.0  # clamped rounding noise
            if g.num_edges > 1:
                assert lam[1] > tol.rank_eps * lam[-1]
            # kernel is the constant vector
            kernel = Q[0]
            np.testing.assert_allclose(
                np.abs(kernel), 1.0 / np.sqrt(g.num_edges), atol=1e-8
            )

    def test_handmade_matrix_orthonormal(self):
        rng = np.random.default_rng(101)
        A = rng.normal(size=(8, 8))
        A = A + A.T
        A -= np.diag(A.sum(axis=1))
        A = -A if np.diag(A).min() < 0 else A
        lam, Q = spectral_decompose(JacobianMatrix(A))
        assert np.abs(Q @ Q.T - np.eye(8)).max() <= 1e-10

    def test_bad_rank_eps_rejected(self):
        with pytest.raises(ValueError):
            SpectralTolerance(rank_eps=0.0)


class TestFractionalLaplacian:
    def test_s_one_recovers_laplacian(self):
        for g, r in random_instances(103, 10):
            J = jacobian(g, r)
            rng = np.random.default_rng(g.num_edges)
            v = rng.normal(size=g.num_edges)
            np.testing.assert_allclose(
                fractional_laplacian_apply(J, 1.0, v),
                laplacian_apply(J, v),
                atol=1e-9,
            )

    @pytest.mark.parametrize("s", [-1.0, -0.5, 0.0, 0.5, 1.0, 2.0])
    def test_constant_vector_in_kernel(self, s, k13):
        J = jacobian(k13, np.array([0.4, -0.3, 0.1]))
        out = fractional_laplacian_apply(J, s, np.ones(3))
        np.testing.assert_allclose(out, 0.0, atol=1e-12)

    @pytest.mark.parametrize("s", [-2.0, -0.5, 0.0, 0.7, 1.0, 3.0])
    def test_p3_single_mode(self, s, p3):
        # the only nonzero eigenvalue is 1, so every power acts as -identity
        # on the (1, -1) direction
        J = jacobian(p3, np.zeros(2))
        v = np.array([1.0, -1.0])
        np.testing.assert_allclose(
            fractional_laplacian_apply(J, s, v), -v, atol=1e-12
        )

    def test_s_zero_is_negated_projection(self):
        for g, r in random_instances(107, 10):
            J = jacobian(g, r)
            rng = np.random.default_rng(g.num_edges + 1)
            v = rng.normal(size=g.num_edges)
            expected = -(v - v.mean())
            np.testing.assert_allclose(
                fractional_laplacian_apply(J, 0.0, v), expected, atol=1e-9
            )

    def test_semigroup_on_mean_free_vectors(self):
        powers = (-1.0, -0.5, 0.5, 1.0, 2.0)
        for g, r in random_instances(109, 5, max_edges=20):
            J = jacobian(g, r)
            rng = np.random.default_rng(g.num_edges + 2)
            v = rng.normal(size=g.num_edges)
            v -= v.mean()
            for s in powers:
                for t in powers:
                    via_two = -fractional_laplacian_apply(
                        J, t, fractional_laplacian_apply(J, s, v)
                    )
                    direct = fractional_laplacian_apply(J, s + t, v)
                    np.testing.assert_allclose(via_two, direct, atol=1e-8)

    def test_zero_matrix_all_powers_zero(self):
        g = parse_edge_list("0 1")
        J = jacobian(g, np.zeros(1))
        for s in (-1.0, 0.0, 0.5, 2.0):
            np.testing.assert_allclose(
                fractional_laplacian_apply(J, s, np.array([3.0])), 0.0
            )


class TestPLaplacian:
    def test_p2_recovers_laplacian(self):
        for g, r in random_instances(113, 10):
            J = jacobian(g, r)
            rng = np.random.default_rng(g.num_edges + 3)
            f = rng.normal(size=g.num_edges)
            np.testing.assert_allclose(
                p_laplacian_apply(g, r, 2.0, f),
                laplacian_apply(J, f),
                atol=1e-10,
            )

    @pytest.mark.parametrize("p", [1.2, 2.0, 3.0, 4.5])
    def test_constant_vector_maps_to_zero(self, p, c6):
        r = np.linspace(-0.5, 0.5, 6)
        out = p_laplacian_apply(c6, r, p, np.full(6, 2.7))
        np.testing.assert_array_equal(out, 0.0)

    def test_p3_hand_value(self, p3):
        out = p_laplacian_apply(p3, np.zeros(2), 3.0, np.array([0.0, 2.0]))
        np.testing.assert_allclose(out, [2.0, -2.0])

    def test_rejects_p_at_most_one(self, p3):
        for p in (1.0, 0.5, -2.0):
            with pytest.raises(ValueError):
                p_laplacian_apply(p3, np.zeros(2), p, np.zeros(2))

    @pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
    def test_total_sum_vanishes(self, p):
        for g, r in random_instances(127, 8):
            rng = np.random.default_rng(g.num_edges + 4)
            f = rng.normal(size=g.num_edges)
            out = p_laplacian_apply(g, r, p, f)
            assert abs(out.sum()) <= 1e-10 * max(1.0, np.abs(out).max())

    @pytest.mark.parametrize("p", [1.5, 2.0, 3.0, 4.0])
    def test_dirichlet_pairing_identity_and_sign(self, p):
        # f . Delta_p f must equal -(1/2) sum c_ij |f_j - f_i|^p, hence <= 0
        for g, r in random_instances(131, 8):
            rng = np.random.default_rng(g.num_edges + 5)
            f = rng.normal(size=g.num_edges)
            lhs = float(f @ p_laplacian_apply(g, r, p, f))
            J = jacobian(g, r).entries
            rhs = 0.0
            for i in range(g.num_edges):
                for j in range(g.num_edges):
                    if i != j and J[i, j] != 0.0:
                        rhs += (-J[i, j]) * abs(f[j] - f[i]) ** p
            rhs *= -0.5
            assert lhs == pytest.approx(rhs, abs=1e-9, rel=1e-9)
            assert lhs <= 1e-12

    def test_nonsmooth_point_convention(self, p3):
        # equal entries on adjacent edges contribute exactly zero, p < 2 included
        out = p_laplacian_apply(p3, np.zeros(2), 1.5, np.array([1.0, 1.0]))
        np.testing.assert_array_equal(out, 0.0)
