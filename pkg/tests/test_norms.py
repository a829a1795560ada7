import numpy as np
import pytest

import anisolab as al
from anisolab.errors import (
    DomainError,
    InvalidMatrixError,
    SingularPointError,
    SmoothnessError,
)


def test_euclidean_values():
    E = al.euclidean_norm(2)
    assert E.evaluate([1, 0]) == 1.0
    assert E.evaluate([3, 4]) == 5.0
    assert E.evaluate([0, 0]) == 0.0


def test_ellipsoid_value_and_zero():
    M = al.EllipsoidNorm(np.diag([4.0, 1.0]))
    assert M.evaluate([1, 0]) == 2.0  # sqrt(<M e1, e1>) = sqrt(4)
    assert M.evaluate([0, 0]) == 0.0
    assert M.evaluate([0, 1e-300]) > 0.0


def test_glued_pq_values():
    G = al.GluedPQNorm(3)
    # q = 3/2 branch: (1 + 1)^(2/3), worked by hand
    assert G.evaluate([1, -1]) == pytest.approx(2.0 ** (2.0 / 3.0), abs=1e-15)
    assert G.evaluate([1, 1]) == pytest.approx(2.0 ** (1.0 / 3.0), abs=1e-15)
    # both branches reduce to |xi_i| on the axes
    for pt in ([2.0, 0.0], [0.0, -3.0]):
        assert G.evaluate(pt) == pytest.approx(np.abs(pt).max(), abs=1e-15)


def test_glued_requires_p_above_two():
    with pytest.raises(ValueError):
        al.GluedPQNorm(2.0)
    with pytest.raises(ValueError):
        al.GluedPQNorm(1.5)


def test_non_finite_rejected():
    E = al.euclidean_norm(2)
    with pytest.raises(DomainError):
        E.evaluate([np.nan, 1.0])
    with pytest.raises(DomainError):
        E.evaluate([np.inf, 0.0])
    with pytest.raises(DomainError):
        E.evaluate_many(np.array([[1.0, 2.0], [np.nan, 0.0]]))


def test_invalid_matrices_rejected():
    with pytest.raises(InvalidMatrixError):
        al.EllipsoidNorm([[1.0, 2.0], [0.0, 1.0]])  # not symmetric
    with pytest.raises(InvalidMatrixError):
        al.EllipsoidNorm([[1.0, 0.0], [0.0, -1.0]])  # not positive definite


def test_gradient_euclidean_and_euler(rng):
    E = al.euclidean_norm(2)
    assert E.gradient([3, 4]) == pytest.approx([0.6, 0.8])
    # Euler identity <grad H, xi> = H on random points
    pts = rng.standard_normal((100, 2)) * 3.0
    for xi in pts:
        if not xi.any():
            continue
        assert float(E.gradient(xi) @ xi) == pytest.approx(E.evaluate(xi), abs=1e-12)


def test_gradient_ellipsoid_closed_form(rng):
    M = np.array([[2.0, 0.5], [0.5, 1.0]])
    H = al.EllipsoidNorm(M)
    for _ in range(20):
        xi = rng.standard_normal(2)
        expected = M @ xi / H.evaluate(xi)
        assert H.gradient(xi) == pytest.approx(expected, rel=1e-12)


def test_gradient_at_origin_raises():
    for H in (al.euclidean_norm(2), al.GluedPQNorm(3)):
        with pytest.raises(SingularPointError):
            H.gradient([0.0, 0.0])
        with pytest.raises(SingularPointError):
            H.hessian([0.0, 0.0])


def test_finite_difference_gradient_matches_analytic(rng):
    # the generic fallback against the ellipsoid closed form, at unit scale
    M = np.array([[3.0, -0.4], [-0.4, 1.2]])
    H = al.EllipsoidNorm(M)
    fd_norm = al.CustomNorm(2, value=H.evaluate, smoothness="C3", name="fd-copy")
    for _ in range(25):
        xi = rng.standard_normal(2)
        xi /= np.linalg.norm(xi)
        assert fd_norm.gradient(xi) == pytest.approx(H.gradient(xi), rel=1e-6)


def test_hessian_euclidean_projection():
    E = al.euclidean_norm(2)
    assert E.hessian([1.0, 0.0]) == pytest.approx(np.array([[0.0, 0.0], [0.0, 1.0]]))


def test_hessian_annihilates_radial_direction(rng):
    norms = [
        al.euclidean_norm(2),
        al.EllipsoidNorm(np.diag([4.0, 1.0])),
        al.GluedPQNorm(3),
    ]
    for H in norms:
        for _ in range(40):
            xi = rng.standard_normal(2) * rng.uniform(0.5, 2.0)
            if abs(xi[0] * xi[1]) < 1e-6:
                continue
            hess = H.hessian(xi)
            assert np.abs(hess @ xi).max() < 1e-8
            assert hess == pytest.approx(hess.T)


def test_hessian_of_squared_half_is_matrix(rng):
    # d^2(H^2/2) = M for ellipsoidal norms: combine H Hess H + grad grad^T
    M = np.array([[2.0, 0.7], [0.7, 3.0]])
    H = al.EllipsoidNorm(M)
    for _ in range(5):
        xi = rng.standard_normal(2)
        g = H.gradient(xi)
        combo = H.evaluate(xi) * H.hessian(xi) + np.outer(g, g)
        assert combo == pytest.approx(M, rel=1e-10)


def test_hessian_inverse_homogeneity(rng):
    H = al.EllipsoidNorm(np.diag([4.0, 1.0]))
    xi = np.array([0.6, -1.1])
    for t in (0.5, 2.0, 7.0):
        assert H.hessian(t * xi) == pytest.approx(H.hessian(xi) / t, rel=1e-12)


def test_glued_hessian_refuses_axes():
    G = al.GluedPQNorm(3)
    with pytest.raises(SmoothnessError):
        G.hessian([1.0, 0.0])


def test_c1_without_analytic_hessian_refuses():
    H = al.CustomNorm(2, value=lambda xi: float(np.abs(xi).max()), smoothness="C1")
    with pytest.raises(SmoothnessError):
        H.hessian([1.0, 2.0])


def test_homogeneity_invariant(rng):
    # |H(t xi) - t H(xi)| <= 1e-10 (1 + t H(xi)) for t in [1e-2, 1e2]
    registry = [
        al.euclidean_norm(2),
        al.EllipsoidNorm(np.diag([4.0, 1.0])),
        al.EllipsoidNorm([[2.0, 1.0], [1.0, 2.0]]),
        al.GluedPQNorm(3),
    ]
    dirs = rng.standard_normal((1000, 2))
    ts = np.exp(rng.uniform(np.log(1e-2), np.log(1e2), size=1000))
    for H in registry:
        base = H.evaluate_many(dirs)
        scaled = H.evaluate_many(dirs * ts[:, None])
        viol = np.abs(scaled - ts * base) / (1.0 + ts * base)
        assert viol.max() < 1e-10


def test_self_check_passes_for_smooth_norms():
    for H in (al.euclidean_norm(2), al.EllipsoidNorm(np.diag([4.0, 1.0]))):
        report = al.check_homogeneity_and_euler(H, sample_count=1000, rng=3)
        assert report.passed, report.summary()
        assert report.homogeneity < 1e-8
        assert report.euler_third is not None  # C3 norms get the third identity


def test_self_check_fails_for_broken_homogeneity():
    # 1/2-homogeneous positive function: the scaling identity is off by O(1)
    bad = al.CustomNorm(2, value=lambda xi: float(np.linalg.norm(xi)) ** 0.5,
                        smoothness="C1", name="sqrt-norm")
    report = al.check_homogeneity_and_euler(bad, sample_count=200, rng=4)
    assert not report.passed
    assert report.homogeneity > 0.1


def test_glued_self_check_skips_axis_hessians():
    G = al.GluedPQNorm(3)
    report = al.check_homogeneity_and_euler(G, sample_count=500, rng=5)
    assert report.passed, report.summary()


def test_polar_norm_matches_glued(rng):
    # polar-profile norm built from the glued norm's own radial function
    G = al.GluedPQNorm(3)
    P = al.PolarNorm(
        radial=G.radial_value,
        radial_d1=lambda t: (G.radial_value(t + 1e-7) - G.radial_value(t - 1e-7)) / 2e-7,
        smoothness="C1",
    )
    pts = rng.standard_normal((200, 2)) * 2.0
    assert P.evaluate_many(pts) == pytest.approx(G.evaluate_many(pts), rel=1e-12)
