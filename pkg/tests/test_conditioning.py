import math

import numpy as np
import pytest

from spherecond import (
    PolySystem,
    RngStream,
    SpherePoint,
    WeylPolynomial,
    cntr_witness_check,
    discriminant_distance_2x2,
    eigenvalue_condition,
    frobenius_condition,
    moore_penrose_condition,
    mu_norm,
    mu_norm_real_lower,
    multiple_zero_witness,
    real_eigen_condition_lower,
    sample_rotation,
    system_projective_distance,
    weyl_inner,
    weyl_norm,
)
from spherecond.cli import random_system_with_zero
from spherecond.conditioning import rotate_system


class TestMatrixCondition:
    def test_identity(self):
        assert frobenius_condition(np.eye(3)) == pytest.approx(math.sqrt(3))

    def test_diag(self):
        a = np.diag([3.0, 4.0])
        assert frobenius_condition(a) == pytest.approx(5.0 / 3.0)

    def test_singular(self):
        assert frobenius_condition(np.array([[1.0, 0.0], [0.0, 0.0]])) == math.inf

    def test_scale_invariant(self):
        gen = np.random.default_rng(0)
        a = gen.standard_normal((4, 4))
        assert frobenius_condition(7.3 * a) == pytest.approx(frobenius_condition(a), rel=1e-12)

    def test_moore_penrose_tall(self):
        a = np.array([[1.0, 0.0], [0.0, 2.0], [0.0, 0.0]])
        assert moore_penrose_condition(a) == pytest.approx(math.sqrt(5.0))

    def test_moore_penrose_rejects_wide(self):
        with pytest.raises(ValueError):
            moore_penrose_condition(np.ones((2, 3)))


class TestEigenvalueCondition:
    def test_symmetric_is_perfect(self):
        a = np.array([[2.0, 1.0], [1.0, 3.0]])
        for lam in np.linalg.eigvalsh(a):
            assert eigenvalue_condition(a, float(lam)) == pytest.approx(1.0, abs=1e-10)

    def test_nonnormal(self):
        # [[0, K], [0, 1]] has kappa(., 0) = sqrt(1 + K^2)
        k = 50.0
        a = np.array([[0.0, k], [0.0, 1.0]])
        assert eigenvalue_condition(a, 0.0) == pytest.approx(math.sqrt(1 + k * k), rel=1e-10)

    def test_rejects_non_eigenvalue(self):
        with pytest.raises(ValueError):
            eigenvalue_condition(np.eye(2), 0.5)


class TestDiscriminantDistance:
    def test_already_defective(self):
        a = np.array([[1.0, 1.0], [0.0, 1.0]])
        assert discriminant_distance_2x2(a) == pytest.approx(0.0, abs=1e-10)

    def test_antisymmetric(self):
        # [[0,1],[-1,0]]: nearest repeated-eigenvalue matrix is 0 + the
        # symmetric part is zero; closed form gives sqrt(2 - 0 - 1) = 1
        a = np.array([[0.0, 1.0], [-1.0, 0.0]])
        assert discriminant_distance_2x2(a) == pytest.approx(1.0, rel=1e-10)

    def test_symmetric_closed_form(self):
        # for symmetric A the nearest defective matrix shears off-diagonally
        # as well, giving distance |lam1 - lam2| / 2
        gen = np.random.default_rng(3)
        for _ in range(20):
            b = gen.standard_normal((2, 2))
            a = (b + b.T) / 2
            lam = np.linalg.eigvalsh(a)
            expected = abs(lam[1] - lam[0]) / 2.0
            assert discriminant_distance_2x2(a) == pytest.approx(expected, rel=1e-8, abs=1e-10)

    def test_random_matrices_closed_form(self):
        # general closed form: dist^2 = ||A||^2 - tr(A)^2/2 - max_theta <A, uv^T>^2
        # cross-check against a very fine independent grid
        gen = np.random.default_rng(4)
        for _ in range(10):
            a = gen.standard_normal((2, 2))
            thetas = np.linspace(0, np.pi, 200_001)
            c, s = np.cos(thetas), np.sin(thetas)
            val = a[0, 1] * c * c - a[1, 0] * s * s + (a[1, 1] - a[0, 0]) * s * c
            ref = math.sqrt(max(np.linalg.norm(a) ** 2 - np.trace(a) ** 2 / 2
                                - np.max(val**2), 0.0))
            got = discriminant_distance_2x2(a)
            # the polished maximizer beats the reference grid, so got <= ref
            assert got <= ref + 1e-12
            assert got == pytest.approx(ref, rel=1e-6, abs=1e-10)

    def test_wilkinson_inequality(self):
        # kappa(A, lam) <= sqrt(2) ||A||_F / dist for every real simple eigenvalue
        gen = np.random.default_rng(5)
        checked = 0
        while checked < 200:
            a = gen.standard_normal((2, 2))
            eig = np.linalg.eigvals(a)
            if np.max(np.abs(eig.imag)) > 1e-12:
                continue
            if abs(eig[0] - eig[1]) < 1e-6 * np.linalg.norm(a):
                continue
            bound = math.sqrt(2) * np.linalg.norm(a) / discriminant_distance_2x2(a)
            for lam in eig.real:
                assert eigenvalue_condition(a, float(lam)) <= bound + 1e-6
            checked += 1


class TestRealEigenLower:
    def test_never_exceeds_truth_2x2(self):
        gen = np.random.default_rng(6)
        for _ in range(10):
            a = gen.standard_normal((2, 2))
            truth = math.sqrt(2) * np.linalg.norm(a) / discriminant_distance_2x2(a)
            est = real_eigen_condition_lower(a, restarts=4)
            assert est <= truth * (1 + 1e-6)
            assert est >= 0.5 * truth  # local search should land close for 2x2

    def test_defective_matrix_is_huge(self):
        a = np.array([[1.0, 1.0], [0.0, 1.0]])
        assert real_eigen_condition_lower(a) >= 1e10


def linear_system(n):
    polys = []
    for i in range(n):
        alpha = [0] * (n + 1)
        alpha[i + 1] = 1
        polys.append(WeylPolynomial(n=n, degree=1, coefficients={tuple(alpha): 1.0}))
    return PolySystem(tuple(polys))


def e0(n):
    v = np.zeros(n + 1)
    v[0] = 1.0
    return SpherePoint(v)


class TestWeylInner:
    def test_monomial_weights(self):
        # <x0 x1, x0 x1> = 1/2 under the invariant product
        f = WeylPolynomial(n=1, degree=2, coefficients={(1, 1): 1.0})
        assert weyl_inner(f, f) == pytest.approx(0.5)

    def test_pure_power(self):
        f = WeylPolynomial(n=1, degree=3, coefficients={(3, 0): 2.0})
        assert weyl_norm(f) == pytest.approx(2.0)

    def test_orthogonal_invariance(self):
        f = WeylPolynomial(n=2, degree=3, coefficients={
            (3, 0, 0): 1.0, (1, 1, 1): -0.7, (0, 2, 1): 2.2, (0, 0, 3): 0.4})
        for k in range(10):
            rot = sample_rotation(3, RngStream(100, k)).matrix
            g = rotate_system(PolySystem((f, f)), rot)
            assert weyl_norm(g.polys[0]) == pytest.approx(weyl_norm(f), rel=1e-10)

    def test_mismatch_rejected(self):
        f = WeylPolynomial(n=1, degree=2, coefficients={(2, 0): 1.0})
        g = WeylPolynomial(n=1, degree=3, coefficients={(3, 0): 1.0})
        with pytest.raises(ValueError):
            weyl_inner(f, g)


class TestMuNorm:
    def test_linear_system_is_sqrt_n(self):
        for n in (1, 2, 3):
            assert mu_norm(linear_system(n), e0(n)) == pytest.approx(math.sqrt(n), rel=1e-12)

    def test_x0x1_is_one(self):
        f = WeylPolynomial(n=1, degree=2, coefficients={(1, 1): 1.0})
        assert mu_norm(PolySystem((f,)), e0(1)) == pytest.approx(1.0, rel=1e-12)

    def test_orthogonal_invariance(self):
        f, zeta = random_system_with_zero(2, 2, np.random.default_rng(8))
        base = mu_norm(f, zeta)
        for k in range(10):
            rot = sample_rotation(3, RngStream(200, k)).matrix
            g = rotate_system(f, rot)
            rzeta = SpherePoint.from_vector(rot @ zeta.coords)
            assert mu_norm(g, rzeta) == pytest.approx(base, rel=1e-8)

    def test_rejects_non_zero(self):
        with pytest.raises(ValueError):
            mu_norm(linear_system(2), SpherePoint.from_vector(np.array([0.0, 1.0, 0.0])))

    def test_multiple_zero_is_inf(self):
        # f = x1^2 has a double zero at e0
        f = WeylPolynomial(n=1, degree=2, coefficients={(0, 2): 1.0})
        assert mu_norm(PolySystem((f,)), e0(1)) == math.inf

    def test_real_lower_is_max(self):
        f, zeta = random_system_with_zero(1, 3, np.random.default_rng(9))
        assert mu_norm_real_lower(f, [zeta]) == pytest.approx(mu_norm(f, zeta))


class TestWitness:
    @pytest.mark.parametrize("d", [2, 3, 4])
    def test_witness_product_is_one(self, d):
        gen = np.random.default_rng(10 + d)
        for _ in range(25):
            f, zeta = random_system_with_zero(1, d, gen)
            g = multiple_zero_witness(f, zeta)
            mu = mu_norm(f, zeta)
            dist = system_projective_distance(f, g)
            if math.isinf(mu):
                continue
            # the surgery constructs the nearest rank-drop system, so the
            # lower bound mu * dist >= 1 is attained with equality
            assert mu * dist == pytest.approx(1.0, abs=1e-6)
            assert cntr_witness_check(f, zeta, g)

    def test_witness_zero_and_rank_drop(self):
        f, zeta = random_system_with_zero(1, 3, np.random.default_rng(20))
        g = multiple_zero_witness(f, zeta)
        assert abs(weyl_norm(g) - 1.0) <= 1e-10
        assert np.linalg.norm(g(zeta.coords)) <= 1e-10
        from spherecond.conditioning import restricted_jacobian
        sg = np.linalg.svd(restricted_jacobian(g, zeta), compute_uv=False)
        assert sg[-1] <= 1e-10 * max(sg[0], 1.0)
