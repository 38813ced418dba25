import math

import numpy as np
import pytest
from scipy import stats

from spherecond import Cap, RngStream, SpherePoint, sample_rotation, sample_uniform_cap, sample_uniform_sphere
from spherecond.geometry import j_integral
from spherecond.sampling import _cap_radii


def north(p):
    v = np.zeros(p + 1)
    v[0] = 1.0
    return SpherePoint(v)


class TestRngStream:
    def test_reproducible(self):
        a = RngStream(42, 3).generator.random(16)
        b = RngStream(42, 3).generator.random(16)
        assert np.array_equal(a, b)

    def test_streams_differ(self):
        a = RngStream(42, 0).generator.random(16)
        b = RngStream(42, 1).generator.random(16)
        assert not np.array_equal(a, b)

    def test_seeds_differ(self):
        a = RngStream(1, 0).generator.random(16)
        b = RngStream(2, 0).generator.random(16)
        assert not np.array_equal(a, b)

    def test_child_is_deterministic(self):
        a = RngStream(9, 4).child(7)
        b = RngStream(9, 4).child(7)
        assert np.array_equal(a.generator.random(8), b.generator.random(8))
        assert a.master_seed == 9

    def test_children_distinct(self):
        base = RngStream(9, 0)
        vals = [RngStream(9, 0).child(k).generator.random(4).tolist() for k in range(5)]
        assert len({tuple(v) for v in vals}) == 5
        assert base.generator is not None

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            RngStream(-1)


class TestUniformSphere:
    def test_single_point_unit_norm(self):
        x = sample_uniform_sphere(4, RngStream(0))
        assert isinstance(x, SpherePoint)
        assert np.linalg.norm(x.coords) == pytest.approx(1.0, abs=1e-12)

    def test_batch_shape_and_norms(self):
        pts = sample_uniform_sphere(3, RngStream(0), size=500)
        assert pts.shape == (500, 4)
        assert np.allclose(np.linalg.norm(pts, axis=1), 1.0, atol=1e-12)

    def test_mean_near_zero(self):
        pts = sample_uniform_sphere(2, RngStream(5), size=200_000)
        # per-coordinate std is 1/sqrt(3); 5-sigma window on the mean
        assert np.all(np.abs(pts.mean(axis=0)) < 5 / math.sqrt(3 * 200_000))

    def test_coordinate_distribution(self):
        # on S^2 each coordinate is uniform on [-1, 1]
        pts = sample_uniform_sphere(2, RngStream(11), size=100_000)
        for j in range(3):
            assert stats.kstest(pts[:, j], stats.uniform(-1, 2).cdf).pvalue > 1e-4


class TestCapSampling:
    def test_support(self):
        sigma = 0.3
        cap = Cap(north(3), sigma)
        pts = sample_uniform_cap(cap, RngStream(2), size=20_000)
        cos_alpha = math.sqrt(1 - sigma**2)
        assert np.all(pts[:, 0] >= cos_alpha - 1e-12)
        assert np.allclose(np.linalg.norm(pts, axis=1), 1.0, atol=1e-12)

    def test_single_point(self):
        x = sample_uniform_cap(Cap(north(2), 0.5), RngStream(0))
        assert isinstance(x, SpherePoint)

    def test_radial_law(self):
        # fraction of samples within angular radius rho is J(rho)/J(alpha)
        p, sigma = 3, 0.8
        cap = Cap(north(p), sigma)
        pts = sample_uniform_cap(cap, RngStream(3), size=100_000)
        rho = np.arccos(np.clip(pts[:, 0], -1, 1))
        alpha = cap.alpha
        for frac in (0.25, 0.5, 0.75):
            r = frac * alpha
            expected = j_integral(p, p, r) / j_integral(p, p, alpha)
            observed = float((rho <= r).mean())
            assert observed == pytest.approx(expected, abs=0.006)

    def test_full_cap_matches_conditioned_uniform(self):
        # sigma = 1 cap sampling vs uniform sampling conditioned on the hemisphere
        p = 3
        cap = Cap(north(p), 1.0)
        cap_pts = sample_uniform_cap(cap, RngStream(4), size=100_000)
        uni = sample_uniform_sphere(p, RngStream(5), size=220_000)
        uni = uni[uni[:, 0] >= 0][:100_000]
        ks = stats.ks_2samp(cap_pts[:, 0], uni[:, 0])
        assert ks.pvalue > 0.01
        ks_side = stats.ks_2samp(cap_pts[:, 1], uni[:, 1])
        assert ks_side.pvalue > 0.01

    def test_inverse_cdf_residual(self):
        p, alpha = 5, 1.1
        u = np.linspace(1e-6, 1 - 1e-6, 500)
        rho = _cap_radii(p, alpha, u)
        total = j_integral(p, p, alpha)
        resid = np.abs(j_integral(p, p, rho) - u * total)
        assert np.max(resid) <= 1e-12 * total

    def test_rotation_invariance_of_center(self):
        # sampling around a rotated center equals rotating samples statistically
        sigma = 0.6
        c = SpherePoint.from_vector(np.array([1.0, 2.0, -0.5, 0.3]))
        pts = sample_uniform_cap(Cap(c, sigma), RngStream(6), size=50_000)
        dots = pts @ c.coords
        assert np.all(dots >= math.sqrt(1 - sigma**2) - 1e-12)
        ref = sample_uniform_cap(Cap(north(3), sigma), RngStream(7), size=50_000)
        ks = stats.ks_2samp(dots, ref[:, 0])
        assert ks.pvalue > 0.01


class TestRotations:
    def test_orthogonal(self):
        r = sample_rotation(5, RngStream(1))
        m = r.matrix
        assert np.allclose(m.T @ m, np.eye(5), atol=1e-12)

    def test_apply_preserves_norm(self):
        r = sample_rotation(4, RngStream(2))
        x = sample_uniform_sphere(3, RngStream(3))
        y = r.apply(x)
        assert isinstance(y, SpherePoint)

    def test_haar_first_column(self):
        # first column of a Haar orthogonal matrix is uniform on the sphere
        cols = np.array([sample_rotation(3, RngStream(10, k)).matrix[:, 0]
                         for k in range(20_000)])
        for j in range(3):
            assert stats.kstest(cols[:, j], stats.uniform(-1, 2).cdf).pvalue > 1e-4

    def test_determinant_signs_mix(self):
        dets = [np.linalg.det(sample_rotation(3, RngStream(20, k)).matrix)
                for k in range(400)]
        frac = np.mean(np.array(dets) > 0)
        assert 0.35 < frac < 0.65

    def test_rejects_non_orthogonal(self):
        from spherecond import Rotation
        with pytest.raises(ValueError):
            Rotation(np.array([[1.0, 0.5], [0.0, 1.0]]))
