import math

import numpy as np
import pytest
from hypothesis import given

from spinhalf import linalg, singlet, spin
from spinhalf.singlet import EIGENVALUES, OUTCOME_ORDER, BipartiteState
from spinhalf.spin import Direction, X, Y, Z

from conftest import directions

S2 = 1 / math.sqrt(2)


def eigh_weights(a: Direction, b: Direction) -> list[float]:
    """Joint weights from an eigh-built product basis and the z-built singlet."""
    psi = np.array([0, S2, -S2, 0])

    def vec(d, sign):
        vals, vecs = np.linalg.eigh(spin.sigma_dot(d))
        return vecs[:, 1] if sign == 1 else vecs[:, 0]

    return [abs(np.vdot(np.kron(vec(a, al), vec(b, be)), psi)) ** 2 for al, be in OUTCOME_ORDER]


def kron_correlation(a: Direction, b: Direction) -> float:
    psi = np.array([0, S2, -S2, 0])
    return float(np.vdot(psi, np.kron(spin.sigma_dot(a), spin.sigma_dot(b)) @ psi).real)


class TestState:
    def test_z_singlet(self):
        assert np.allclose(singlet.singlet_state(Z).amplitudes, [0, S2, -S2, 0], atol=1e-16)

    def test_spherical_symmetry(self):
        assert abs(singlet.singlet_state(Z).overlap(singlet.singlet_state(X))) == pytest.approx(1.0, abs=1e-12)

    @given(directions)
    def test_r_independent_ray(self, r):
        psi = singlet.singlet_state(r)
        assert linalg.norm(psi.amplitudes) == pytest.approx(1.0, abs=1e-12)
        assert abs(psi.overlap(singlet.singlet_state(Z))) == pytest.approx(1.0, abs=1e-12)

    def test_rejects_unnormalized(self):
        with pytest.raises(ValueError):
            BipartiteState(np.array([1, 1, 0, 0]))


class TestLocalExpectation:
    @given(directions)
    def test_singlet_vanishes(self, a):
        psi = singlet.singlet_state()
        assert abs(singlet.single_side_expectation(psi, a, 1)) <= 1e-12
        assert abs(singlet.single_side_expectation(psi, a, 2)) <= 1e-12

    def test_product_state(self):
        up = spin.spinor_plus(0, 0)
        assert singlet.single_side_expectation(BipartiteState.product(up, up), Z, 1) == pytest.approx(1.0)

    def test_bad_side(self):
        with pytest.raises(ValueError):
            singlet.single_side_expectation(singlet.singlet_state(), Z, 3)


class TestCorrelation:
    def test_equal(self):
        assert singlet.correlation(Z, Z) == pytest.approx(-1.0, abs=1e-12)

    def test_perpendicular(self):
        assert singlet.correlation(Z, X) == pytest.approx(0.0, abs=1e-12)

    def test_sixty_degrees(self):
        b = Direction(math.pi / 3, 0.0)
        assert singlet.correlation(Z, b) == pytest.approx(-0.5, abs=1e-12)
        assert kron_correlation(Z, b) == pytest.approx(-0.5, abs=1e-12)

    def test_random_against_oracles(self, random_triples):
        for r, a, b in random_triples:
            c = singlet.correlation(a, b)
            assert abs(c + a.dot(b)) <= 1e-12
            assert abs(c - kron_correlation(a, b)) <= 1e-12

    def test_batched_matches_scalar(self, random_triples):
        a = [t[1] for t in random_triples[:100]]
        b = [t[2] for t in random_triples[:100]]
        many = singlet.correlation_many([x.cartesian for x in a], [y.cartesian for y in b])
        assert np.allclose(many, [singlet.correlation(x, y) for x, y in zip(a, b)], atol=1e-12, rtol=0)

    def test_basis_resolution(self, random_triples):
        for r, a, b in random_triples[:300]:
            c = singlet.correlation(a, b)
            assert abs(singlet.correlation_resolved(a, b, singlet.r_basis(r)) - c) <= 1e-12
            assert abs(singlet.correlation_resolved(a, b, singlet.product_basis(a, b).states) - c) <= 1e-12

    def test_r_independence(self, random_triples):
        for r, a, b in random_triples[:300]:
            assert abs(singlet.correlation(a, b, r) - singlet.correlation(a, b)) <= 1e-12


class TestFkDecomposition:
    def test_parallel_intermediates_only(self):
        f = singlet.fk_decomposition(Z, X, X)
        assert np.allclose(f.terms, [0, 0, -0.5, -0.5], atol=1e-15)
        assert f.total == pytest.approx(-1.0, abs=1e-15)

    def test_antiparallel_intermediates_only(self):
        f = singlet.fk_decomposition(Z, Z, Z)
        assert np.allclose(f.terms, [-0.5, -0.5, 0, 0], atol=1e-15)
        assert f.total == pytest.approx(-1.0, abs=1e-15)

    def test_imaginary_parts_cancel(self):
        f = singlet.fk_decomposition(Z, X, Y)
        # r.(a x b) = 1 gives F3 = -1/2 [0 - i]
        assert f.f3 == pytest.approx(0.5j, abs=1e-15)
        assert f.f4 == pytest.approx(-0.5j, abs=1e-15)
        assert f.total == pytest.approx(0.0, abs=1e-15)

    def test_random_structure(self, random_triples):
        for r, a, b in random_triples:
            f = singlet.fk_decomposition(r, a, b)
            g = singlet.fk_closed_form(r, a, b)
            rv, av, bv = r.cartesian, a.cartesian, b.cartesian
            assert abs(f.f1 - f.f2) <= 1e-12
            assert abs(f.f4 - f.f3.conjugate()) <= 1e-12
            assert abs(sum(f.terms).imag) <= 1e-12
            assert abs(f.antiparallel + np.dot(rv, av) * np.dot(rv, bv)) <= 1e-12
            assert abs(f.parallel + np.dot(np.cross(rv, av), np.cross(rv, bv))) <= 1e-12
            assert max(abs(x - y) for x, y in zip(f.terms, g.terms)) <= 1e-12
            assert abs(f.total + a.dot(b)) <= 1e-12


class TestProductBasis:
    def test_z_basis(self):
        pb = singlet.product_basis(Z, Z)
        assert [(e.alpha, e.beta) for e in pb.entries] == [(1, -1), (-1, 1), (1, 1), (-1, -1)]
        expected = [[0, 1, 0, 0], [0, 0, 1, 0], [1, 0, 0, 0], [0, 0, 0, 1]]
        for e, v in zip(pb.entries, expected):
            assert np.allclose(e.state.amplitudes, v, atol=1e-16)

    @given(directions, directions)
    def test_orthonormal_eigenbasis(self, a, b):
        pb = singlet.product_basis(a, b)
        assert linalg.max_abs_diff(pb.gram(), linalg.I4) <= 1e-12
        op = linalg.tensor_mat(spin.sigma_dot(a), spin.sigma_dot(b))
        for e, A in zip(pb.entries, EIGENVALUES):
            v = e.state.amplitudes
            assert linalg.max_abs_diff(op @ v, A * v) <= 1e-12
            assert A == e.alpha * e.beta
        assert EIGENVALUES == (-1, -1, 1, 1)


class TestJointDistribution:
    def test_aligned(self):
        d = singlet.joint_distribution(Z, Z)
        assert np.allclose(d.weights, [0.5, 0.5, 0, 0], atol=1e-15)

    def test_perpendicular(self):
        d = singlet.joint_distribution(Z, X)
        assert np.allclose(d.weights, [0.25] * 4, atol=1e-15)
        assert np.allclose(eigh_weights(Z, X), [0.25] * 4, atol=1e-15)

    def test_random_against_oracles(self, random_triples):
        for r, a, b in random_triples:
            d = singlet.joint_distribution(a, b)
            assert abs(sum(d.weights) - 1) <= 1e-12
            assert min(d.weights) >= 0.0
            assert abs(d.expectation() + a.dot(b)) <= 1e-12
            assert max(abs(x - y) for x, y in zip(d.weights, singlet.joint_weights_closed_form(a, b))) <= 1e-12
            assert max(abs(x - y) for x, y in zip(d.weights, eigh_weights(a, b))) <= 1e-12

    def test_r_independence(self, random_triples):
        for r, a, b in random_triples[:300]:
            w_r = singlet.joint_distribution(a, b, r).weights
            assert max(abs(x - y) for x, y in zip(w_r, singlet.joint_distribution(a, b).weights)) <= 1e-12

    def test_prob_lookup(self):
        d = singlet.joint_distribution(Z, Z)
        assert d.prob(1, -1) == d.weights[0] and d.prob(-1, -1) == d.weights[3]
        with pytest.raises(ValueError):
            d.prob(0, 1)

    def test_setting_dependence(self):
        w1 = singlet.joint_distribution(Z, Z).weights
        w2 = singlet.joint_distribution(Z, X).weights
        assert max(abs(x - y) for x, y in zip(w1, w2)) >= 0.1

    def test_batched_prob_matches(self, rng):
        a = Direction(1.0, 2.0)
        theta, phi = spin.random_angles(rng, 40)
        for al, be in OUTCOME_ORDER:
            many = singlet.joint_prob_many(a, theta, phi, al, be)
            scalar = [singlet.joint_distribution(a, Direction(t, p)).prob(al, be) for t, p in zip(theta, phi)]
            assert np.allclose(many, scalar, atol=1e-12, rtol=0)


class TestMarginalsAndConditionals:
    @given(directions, directions)
    def test_marginals_half(self, a, b):
        for side in (1, 2):
            for o in (1, -1):
                assert singlet.marginal(a, b, side, o) == pytest.approx(0.5, abs=1e-12)
            assert singlet.marginal(a, b, side, 1) + singlet.marginal(a, b, side, -1) == pytest.approx(1.0, abs=1e-12)

    @given(directions)
    def test_reduced_density_matrix(self, r):
        psi = singlet.singlet_state(r)
        for keep in (1, 2):
            assert linalg.max_abs_diff(singlet.reduced_density_matrix(psi, keep), linalg.I2 / 2) <= 1e-12
        for side in (1, 2):
            assert singlet.marginal_from_reduced(r, side, 1) == pytest.approx(0.5, abs=1e-12)

    def test_reduced_density_matrix_product_state(self):
        up, dn = spin.spinor_plus(0, 0), spin.spinor_minus(0, 0)
        psi = BipartiteState.product(up, dn)
        assert np.allclose(singlet.reduced_density_matrix(psi, 1), [[1, 0], [0, 0]])
        assert np.allclose(singlet.reduced_density_matrix(psi, 2), [[0, 0], [0, 1]])

    def test_conditional_aligned(self):
        assert singlet.conditional(Z, Z, 1, -1) == pytest.approx(1.0, abs=1e-12)

    def test_conditional_perpendicular(self):
        assert singlet.conditional(Z, X, 1, -1) == pytest.approx(0.5, abs=1e-12)

    @given(directions, directions)
    def test_factorization(self, a, b):
        d = singlet.joint_distribution(a, b)
        for al in (1, -1):
            for be in (1, -1):
                lhs = d.prob(al, be)
                rhs = singlet.conditional(a, b, al, be) * singlet.marginal(a, b, 2, be)
                assert abs(lhs - rhs) <= 1e-12


class TestSphereAverage:
    @pytest.mark.parametrize("alpha, beta", [(1, 1), (1, -1), (-1, 1), (-1, -1)])
    def test_quadrature(self, alpha, beta):
        res = singlet.average_joint_over_b(Z, alpha, beta)
        assert res.value == pytest.approx(0.25, abs=1e-10)
        assert res.n == 64 * 128

    def test_quadrature_tilted_setting(self):
        assert singlet.average_joint_over_b(Direction(1.3, 5.0), 1, 1).value == pytest.approx(0.25, abs=1e-10)

    def test_montecarlo(self):
        res = singlet.average_joint_over_b(Z, 1, 1, "montecarlo", samples=1_000_000, seed=7)
        assert abs(res.value - 0.25) <= 3 * res.std_err
        assert 0 < res.std_err < 1e-3

    def test_montecarlo_reproducible(self):
        a = singlet.average_joint_over_b(X, 1, -1, "montecarlo", samples=1000, seed=3)
        b = singlet.average_joint_over_b(X, 1, -1, "montecarlo", samples=1000, seed=3)
        assert a == b

    def test_unknown_method(self):
        with pytest.raises(ValueError):
            singlet.average_joint_over_b(Z, 1, 1, "simpson")
