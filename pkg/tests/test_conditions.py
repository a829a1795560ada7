import numpy as np
import pytest

import anisolab as al
from anisolab.conditions import (
    NONDEGENERATE,
    growth_constants_from_envelope,
    hessian_of_composition,
)
from anisolab.errors import InconsistencyError

from conftest import ellipsoid_registry, non_ellipsoid_registry


# ---------------------------------------------------------------------------
# nonlinearity families
# ---------------------------------------------------------------------------


def test_power_b_envelopes_hold():
    t = np.linspace(1e-4, 10.0, 10000)
    for p in (1.5, 2.0, 3.0):
        rep = al.check_power_growth(al.power_b(p), t)
        assert rep.passed, rep.summary()


def test_power_b_first_derivative_exact():
    # B'(t) = t^(p-1) equals the envelope (0 + t)^(p-2) t exactly
    B = al.power_b(3)
    t = np.linspace(0.1, 5, 100)
    assert B.d1(t) == pytest.approx(t**2, rel=1e-14)


def test_quadratic_b_equalities():
    B = al.quadratic_b()
    t = np.linspace(1e-3, 10, 1000)
    rep = al.check_power_growth(B, t)
    assert rep.passed
    assert B.gamma_lo == B.gamma_hi == 1.0


def test_regularized_power_envelopes():
    t = np.linspace(1e-4, 10.0, 10000)
    for p in (1.5, 3.0):
        rep = al.check_power_growth(al.regularized_power_b(p, 0.1), t)
        assert rep.passed, rep.summary()


def test_power_growth_detects_wrong_constants():
    from dataclasses import replace

    B = replace(al.power_b(3.0), gamma_hi=1.0)  # B'' = 2t exceeds 1 * t
    rep = al.check_power_growth(B, np.linspace(0.1, 5, 100))
    assert not rep.passed
    assert rep.witness is not None


def test_nondegenerate_family():
    rep = al.check_nondegenerate(al.quadratic_b(family=NONDEGENERATE))
    assert rep.passed
    rep = al.check_nondegenerate(al.even_poly_b(1.0, 0.25))
    assert rep.passed, rep.summary()


def test_nondegenerate_rejects_cubic_term():
    # B = t^2/2 + t^3 has B'''(0) = 6 != 0
    B = al.BFunction(
        value=lambda t: np.asarray(t, float) ** 2 / 2 + np.asarray(t, float) ** 3,
        d1=lambda t: np.asarray(t, float) + 3 * np.asarray(t, float) ** 2,
        d2=lambda t: 1.0 + 6.0 * np.asarray(t, float),
        d3=None,  # exercise the one-sided Richardson estimate
        family=NONDEGENERATE,
        name="t^2/2+t^3",
    )
    rep = al.check_nondegenerate(B)
    assert not rep.passed
    assert rep.details["B'''(0)"] == pytest.approx(6.0, rel=1e-3)


# ---------------------------------------------------------------------------
# pairing conditions
# ---------------------------------------------------------------------------


def test_exact_pairing_euclidean_machine_exact():
    rep = al.check_exact_pairing(al.euclidean_norm(2), sample_count=300, rng=0)
    assert rep.passed and rep.max_violation < 1e-12


def test_exact_pairing_all_ellipsoids_pass(rng):
    for H in ellipsoid_registry():
        rep = al.check_exact_pairing(H, sample_count=1000, rng=rng)
        assert rep.passed, f"{H.name}: {rep.summary()}"


def test_exact_pairing_glued_fails_with_witness():
    rep = al.check_exact_pairing(al.GluedPQNorm(3), sample_count=2000, rng=11)
    assert not rep.passed
    assert rep.max_violation >= 1e-2
    assert rep.witness is not None
    # the witness is a genuine violating pair, re-checkable directly
    xi, x = np.array(rep.witness[0]), np.array(rep.witness[1])
    H = al.GluedPQNorm(3)
    lhs = float(al.duality_map(H, xi) @ al.duality_map_inverse(H, x))
    gap = abs(lhs - float(xi @ x)) / (np.linalg.norm(xi) * np.linalg.norm(x))
    assert gap >= 1e-2


def test_exact_implies_sign_on_same_samples():
    # norms passing the exact pairing also pass the sign pairing on the
    # identical sample stream
    for H in ellipsoid_registry():
        exact = al.check_exact_pairing(H, sample_count=500, rng=7, refine=False)
        sign = al.check_sign_pairing(H, sample_count=500, rng=7)
        assert exact.passed and sign.passed


def test_sign_pairing_constructor_norms_pass(trig_norm, bump_norm):
    for H in (trig_norm, bump_norm):
        rep = al.check_sign_pairing(H, sample_count=2000, rng=8)
        assert rep.passed, rep.summary()
        assert rep.details["disagreements"] == 0


def test_sign_pairing_mirror_extension_fails():
    # extending by the naive mirror instead of the reflection rule produces the
    # full 3-norm ball, which violates the sign pairing
    H = al.mirrored_profile_norm(al.pnorm_profile(3.0))
    rep = al.check_sign_pairing(H, sample_count=4000, rng=9)
    assert not rep.passed
    assert rep.witness is not None
    assert rep.details["disagreements"] > 0


def test_sign_pairing_indeterminate_when_all_skipped():
    rep = al.check_sign_pairing(al.euclidean_norm(2), sample_count=100, rng=10,
                                band_scale=1e9)
    assert rep.verdict == "indeterminate"
    assert rep.samples_skipped == 100


def test_orthogonality_symmetry_euclidean_and_glued():
    rep = al.check_orthogonality_symmetry(al.euclidean_norm(2), 300, rng=1, tol=1e-10)
    assert rep.passed
    rep = al.check_orthogonality_symmetry(al.GluedPQNorm(3), 1000, rng=2, tol=1e-6)
    assert rep.passed, rep.summary()


def test_orthogonality_symmetry_constructor_norms(trig_norm, bump_norm):
    for H in (trig_norm, bump_norm):
        rep = al.check_orthogonality_symmetry(H, 500, rng=3, tol=1e-6)
        assert rep.passed, f"{H.name}: {rep.summary()}"


def test_orthogonality_symmetry_mirror_fails():
    H = al.mirrored_profile_norm(al.pnorm_profile(3.0))
    rep = al.check_orthogonality_symmetry(H, 1000, rng=4, tol=1e-6)
    assert not rep.passed


def test_ellipsoid_dichotomy_over_registry():
    # exact pairing passes precisely on the ellipsoidal members
    for H in ellipsoid_registry():
        assert al.check_exact_pairing(H, 400, rng=5).passed
    for H in non_ellipsoid_registry():
        rep = al.check_exact_pairing(H, 1500, rng=6)
        assert not rep.passed, H.name
        assert rep.max_violation >= 1e-2


# ---------------------------------------------------------------------------
# ellipticity
# ---------------------------------------------------------------------------


def test_ellipticity_euclidean_is_one():
    lam = al.ellipticity_constant(al.euclidean_norm(2), angular_samples=512)
    assert lam == pytest.approx(1.0, rel=1e-10)


def test_ellipticity_ellipsoid_against_dense_oracle():
    M = np.diag([4.0, 1.0])
    H = al.EllipsoidNorm(M)
    lam = al.ellipticity_constant(H, angular_samples=2048)
    # oracle: dense scan of the tangential Rayleigh quotient via closed forms
    theta = np.linspace(0, 2 * np.pi, 20001)
    dirs = np.stack([np.cos(theta), np.sin(theta)], axis=1)
    pts = dirs / H.evaluate_many(dirs)[:, None]
    qs = []
    for xi in pts[:: 10]:
        g = H.gradient(xi)
        z = np.array([-g[1], g[0]])
        z /= np.linalg.norm(z)
        qs.append(z @ H.hessian(xi) @ z)
    oracle = min(qs)
    assert lam > 0
    assert lam == pytest.approx(oracle, rel=1e-3)


def test_ellipticity_glued_degenerates_near_axes():
    lam_coarse = al.ellipticity_constant(al.GluedPQNorm(3), angular_samples=256)
    lam_fine = al.ellipticity_constant(al.GluedPQNorm(3), angular_samples=4096)
    assert 0 < lam_fine < lam_coarse  # infimum approaches 0 at the axes
    assert lam_fine < 0.1


def test_growth_constant_formula_values():
    # p=2, gamma=Gamma=C=1: c=1 and the formula reduces to 1/4
    assert al.ellipticity_from_growth(2, 1.0, 1.0, 1.0) == pytest.approx(0.25)
    # ratio cancellation: scale of gamma = Gamma drops out
    assert al.ellipticity_from_growth(2, 7.0, 7.0, 1.0) == pytest.approx(0.25)
    # arithmetic oracle for p=3, gamma=1, Gamma=2, C=2: c* = 2
    expected = (3 - 1) * 2.0 ** (2 * (2 - 3)) * 1.0 / (2 * 2.0**2 * (2.0 + 1) * 2.0)
    assert al.ellipticity_from_growth(3, 1.0, 2.0, 2.0) == pytest.approx(expected)
    with pytest.raises(ValueError):
        al.ellipticity_from_growth(1.0, 1.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        al.ellipticity_from_growth(2.0, 1.0, 1.0, 0.5)


def test_envelope_implies_hessian_growth_sampled(rng):
    # for B = t^p/p and ellipsoidal H, the derived constants bound the sampled
    # Hessian of B o H on both sides (slack factor 1.05)
    H = al.EllipsoidNorm(np.diag([2.0, 0.8]))
    C = al.comparability_constant(H)
    lam = al.ellipticity_constant(H)
    for p in (1.5, 2.0, 3.0):
        B = al.power_b(p)
        gamma_a, Gamma_a, _ = growth_constants_from_envelope(
            p, 0.0, B.gamma_lo, B.gamma_hi, C, lam
        )
        for _ in range(1000 // 3):
            xi = rng.standard_normal(2) * rng.uniform(0.2, 3.0)
            zeta = rng.standard_normal(2)
            hess = hessian_of_composition(B, H, xi)
            lower = gamma_a * np.linalg.norm(xi) ** (p - 2) * zeta @ zeta
            assert zeta @ hess @ zeta >= lower / 1.05
            assert np.abs(hess).sum() <= 1.05 * Gamma_a * np.linalg.norm(xi) ** (p - 2)


def test_certified_lambda_below_sampled_lambda():
    for H in ellipsoid_registry():
        C = al.comparability_constant(H)
        lam = al.ellipticity_constant(H)
        for p in (1.5, 2.0, 3.0):
            B = al.power_b(p)
            gamma_a, Gamma_a, _ = growth_constants_from_envelope(
                p, 0.0, B.gamma_lo, B.gamma_hi, C, lam
            )
            certified = al.ellipticity_from_growth(p, gamma_a, Gamma_a, C)
            assert 0 < certified <= lam * 1.0001


# ---------------------------------------------------------------------------
# coercivity margin
# ---------------------------------------------------------------------------


def test_coercivity_margin_powers():
    # B = t^p/p: B' t - B = (p-1) B exactly; the envelope margin is
    # gamma_lo/gamma_hi <= p-1, so the inequality is verified on the grid
    for p, expected in ((1.5, 0.5), (2.0, 1.0), (3.0, 0.5)):
        delta = al.coercivity_margin(al.power_b(p), K=10.0)
        assert delta == pytest.approx(expected)
        t = np.linspace(1e-3, 10, 1000)
        B = al.power_b(p)
        assert (B.beta(t) - B.value(t) - delta * B.value(t) >= -1e-12).all()


def test_coercivity_margin_quadratic_equality():
    # B = t^2/2: B' t - B = B, delta = 1 with equality
    B = al.quadratic_b()
    assert al.coercivity_margin(B, K=5.0) == pytest.approx(1.0)
    t = np.linspace(0.01, 5, 100)
    assert B.beta(t) - B.value(t) == pytest.approx(B.value(t), rel=1e-14)


def test_coercivity_margin_regularized_on_grid():
    Be = al.regularize(al.power_b(3), 0.1)
    delta = al.coercivity_margin(Be, K=10.0)
    assert delta == pytest.approx(Be.gamma_lo / Be.gamma_hi)
    t = np.linspace(1e-3, 10, 2000)
    assert (Be.beta(t) - Be.value(t) - delta * Be.value(t) >= -1e-12).all()


def test_coercivity_margin_nondegenerate_family():
    B = al.even_poly_b(1.0, 0.25)
    delta = al.coercivity_margin(B, K=2.0)
    d2 = B.d2(np.linspace(0, 2, 1000))
    assert delta == pytest.approx(float(d2.min() / d2.max()))


def test_coercivity_margin_inconsistent_constants():
    from dataclasses import replace

    bad = replace(al.power_b(3.0), gamma_lo=3.0, gamma_hi=1.0)  # margin 3 > p-1 = 2
    with pytest.raises(InconsistencyError):
        al.coercivity_margin(bad, K=10.0)
