import numpy as np
import pytest

import anisolab as al
from anisolab.errors import AnisolabError
from anisolab.regularization import coercivity_offset, envelope_scalings, lipschitz_uniformity


def test_quadratic_is_fixed_point():
    # B = t^2/2: B(sqrt(e^2+t^2)) - B(e) = t^2/2 exactly, for every eps
    B = al.quadratic_b()
    for eps in (0.5, 0.1, 0.01):
        Be = al.regularize(B, eps)
        t = np.linspace(0.0, 7.0, 1000)
        assert Be.value(t) == pytest.approx(B.value(t), rel=1e-14, abs=1e-14)
        assert Be.d1(t) == pytest.approx(B.d1(t), rel=1e-13, abs=1e-13)


def test_cubic_regularization_value():
    # direct arithmetic: B = t^3/3, eps = 0.1, t = 1 -> ((0.01+1)^(3/2) - 0.001)/3
    Be = al.regularize(al.power_b(3), 0.1)
    expected = ((0.01 + 1.0) ** 1.5 - 0.001) / 3.0
    assert float(Be.value(1.0)) == pytest.approx(expected, rel=1e-15)


def test_regularized_vanishes_at_zero():
    for B in (al.power_b(3), al.power_b(1.5), al.regularized_power_b(1.5, 0.1)):
        for eps in (0.1, 0.01):
            Be = al.regularize(B, eps)
            assert float(Be.value(0.0)) == 0.0
            assert float(Be.d1(0.0)) == 0.0
            t = np.linspace(1e-6, 5, 500)
            assert (Be.value(t) > 0).all() and (Be.d1(t) > 0).all() and (Be.d2(t) > 0).all()


def test_eps_range_rejected():
    for eps in (0.0, 1.0, -0.1, 2.0):
        with pytest.raises(ValueError):
            al.regularize(al.power_b(3), eps)


def test_envelope_scalings():
    c2, C2 = envelope_scalings(2.0)
    assert c2 == C2 == 1.0
    c3, C3 = envelope_scalings(3.0)
    assert c3 == pytest.approx(2.0 ** (-0.5)) and C3 == 1.0
    c15, C15 = envelope_scalings(1.5)
    assert c15 == 1.0 and C15 == pytest.approx(2.0**0.25)


def test_regularized_envelope_reports():
    t = np.linspace(1e-3, 10.0, 10000)
    for B in (al.power_b(3), al.regularized_power_b(1.5, 0.1)):
        for eps in (0.1, 0.01, 0.001):
            rep = al.check_regularized_envelope(B, eps, t, rng=1)
            assert rep.passed, f"{B.name} eps={eps}: {rep.summary()}"


def test_regularized_validates_as_power_family():
    # B_eps carries the shifted kappa and scaled constants and passes the
    # power-growth validator with them
    t = np.linspace(1e-3, 10.0, 5000)
    for B in (al.power_b(3), al.regularized_power_b(1.5, 0.1)):
        for eps in (0.1, 0.01, 0.001):
            Be = al.regularize(B, eps)
            assert Be.kappa == pytest.approx(B.kappa + eps)
            rep = al.check_power_growth(Be, t)
            assert rep.passed, f"{B.name} eps={eps}: {rep.summary()}"


def test_coercivity_offset_zero_for_p_ge_2():
    assert coercivity_offset(2.0, 1.0, 0.0) == 0.0
    assert coercivity_offset(3.0, 5.0, 0.3) == 0.0
    assert coercivity_offset(1.5, 1.0, 0.1) > 0.0


def test_coercivity_offset_eps_independent():
    # the same offset certifies (B_eps o H)(xi) >= gamma/(2(p-1)p) |xi|^p - c
    # for every eps on the ladder
    B = al.regularized_power_b(1.5, 0.1)
    t = np.linspace(1e-3, 10.0, 2000)
    offsets = []
    for eps in (0.1, 0.01, 0.001, 0.0001):
        rep = al.check_regularized_envelope(B, eps, t, rng=2)
        assert rep.passed
        offsets.append(rep.details["coercivity_offset"])
    assert np.ptp(offsets) == 0.0


def test_convergence_gap_bounds():
    B = al.power_b(3)
    for eps in (1e-1, 1e-2):
        gap_b, gap_beta = al.convergence_gap(B, eps, M=1.0)
        bound_b, bound_beta = al.convergence_gap_bounds(B, eps, M=1.0)
        assert gap_b <= bound_b
        assert gap_beta <= bound_beta
    # hand bound at eps = 1e-2: 2 ||B'||_C0([0,2]) eps = 2 * 4 * 1e-2
    bound_b, _ = al.convergence_gap_bounds(B, 1e-2, M=1.0)
    assert bound_b == pytest.approx(0.08, rel=1e-6)


def test_convergence_gap_quadratic_is_zero():
    gap_b, gap_beta = al.convergence_gap(al.quadratic_b(), 0.05, M=2.0)
    assert gap_b == pytest.approx(0.0, abs=1e-14)
    _, bound_beta = al.convergence_gap_bounds(al.quadratic_b(), 0.05, M=2.0)
    assert gap_beta <= bound_beta


def test_convergence_gap_at_least_linear_rate():
    # the guaranteed bound is linear in eps; the measured decay must be at
    # least that fast (it is in fact quadratic for smooth powers, since
    # B(sqrt(eps^2+t^2)) - B(t) = O(eps^2) away from 0 -- the linear bound is
    # not sharp), and the gap/bound ratio must never grow along the ladder
    B = al.power_b(3)
    ladder = [2.0**-k for k in range(3, 10)]
    gaps = np.array([al.convergence_gap(B, e, M=1.0)[0] for e in ladder])
    bounds = np.array([al.convergence_gap_bounds(B, e, M=1.0)[0] for e in ladder])
    assert (gaps <= bounds).all()
    slope = np.polyfit(np.log(ladder), np.log(gaps), 1)[0]
    assert slope >= 0.9  # decays no slower than the linear guarantee
    # dyadic halving shrinks the measured gap by at least the linear factor
    rates = gaps[:-1] / gaps[1:]
    assert (rates >= 2.0 * 0.9).all(), rates


def test_eps_uniform_lipschitz():
    B = al.power_b(3)
    for eps in (0.1, 0.01, 0.001):
        bounds = lipschitz_uniformity(B, eps, M=2.0)
        assert bounds["lip_B_eps"] <= bounds["lip_B_bound"] * (1 + 1e-12)
        assert bounds["lip_beta_eps"] <= bounds["lip_beta_bound"] * (1 + 1e-12)


def test_composition_gradient_bounded_near_origin():
    # B_eps o H is C^(1,1) near 0: |grad (B_eps o H)(xi)| / |xi| stays bounded;
    # the envelope gives the explicit bound C_p gamma_hi (kappa + eps)^(p-2)
    H = al.euclidean_norm(2)
    eps = 0.01
    B = al.power_b(1.5)
    Be = al.regularize(B, eps)
    bound = envelope_scalings(1.5)[1] * B.gamma_hi * eps ** (1.5 - 2.0)
    rng = np.random.default_rng(3)
    ratios = []
    for mag in np.geomspace(1e-8, 1.0, 40):
        v = rng.standard_normal(2)
        xi = mag * v / np.linalg.norm(v)
        grad = float(Be.d1(H.evaluate(xi))) * H.gradient(xi)
        ratios.append(float(np.linalg.norm(grad)) / mag)
    assert np.isfinite(ratios).all()
    assert max(ratios) <= bound * (1 + 1e-9)


def test_quadratic_cap_matches_to_second_order():
    B = al.regularized_power_b(1.5, 0.1)
    M = 2.0
    Bc = al.quadratic_cap(B, M)
    below = np.linspace(1e-3, M - 1e-9, 500)
    assert Bc.value(below) == pytest.approx(B.value(below), rel=1e-14)
    for fn in ("value", "d1", "d2"):
        left = float(getattr(Bc, fn)(M - 1e-12))
        right = float(getattr(Bc, fn)(M + 1e-12))
        assert left == pytest.approx(right, rel=1e-6, abs=1e-9), fn
    # beyond M the second derivative is frozen at B''(M)
    assert float(Bc.d2(M + 3.0)) == pytest.approx(float(B.d2(M)), rel=1e-14)


def test_quadratic_cap_constants():
    # gamma_hat = gamma_lo * min(kappa^(p-2), (kappa+M)^(p-2)): evaluate both
    # branches of the min by hand for p = 1.5, kappa = 0.1, M = 2
    B = al.regularized_power_b(1.5, 0.1)
    Bc = al.quadratic_cap(B, 2.0)
    branch_a = 0.1 ** (-0.5)
    branch_b = (0.1 + 2.0) ** (-0.5)
    assert Bc.gamma_lo == pytest.approx(B.gamma_lo * min(branch_a, branch_b))
    assert Bc.gamma_hi == pytest.approx(B.gamma_hi * max(branch_a, branch_b))
    assert Bc.p == 2.0
    # capped function satisfies the p = 2 envelopes on a grid
    t = np.linspace(1e-3, 10.0, 5000)
    rep = al.check_power_growth(Bc, t)
    assert rep.passed, rep.summary()


def test_quadratic_cap_of_quadratic_is_identity():
    B = al.BFunction(
        value=al.quadratic_b().value, d1=al.quadratic_b().d1, d2=al.quadratic_b().d2,
        family="power", p=2.0, kappa=0.5, gamma_lo=1.0, gamma_hi=1.0, name="t^2/2 k>0",
    )
    Bc = al.quadratic_cap(B, 1.0)
    t = np.linspace(0.0, 5.0, 200)
    assert Bc.value(t) == pytest.approx(B.value(t), abs=1e-14)


def test_quadratic_cap_requires_positive_kappa():
    with pytest.raises(AnisolabError):
        al.quadratic_cap(al.power_b(1.5), 1.0)  # kappa = 0 not covered
