"""Smoothing of singular/degenerate nonlinearities and the quadratic cap.

The smoothing replaces B(t) by B(sqrt(eps^2 + t^2)) - B(eps), which is C^2 up
to t = 0, keeps the power-family envelopes with kappa shifted by eps and the
constants scaled by min/max(1, 2^((2-p)/2)), and converges back to B linearly
in eps.  The quadratic cap replaces B beyond a threshold M by its second-order
Taylor polynomial, turning a regularized power nonlinearity into a uniformly
quadratic one.
"""

from __future__ import annotations

import numpy as np

from .conditions import POWER, BFunction, growth_constants_from_envelope
from .errors import AnisolabError
from .norms import euclidean_norm
from .report import FAIL, PASS, ConditionReport

# default continuation ladder for the solver: eps = 2^-3, 2^-5, 2^-7, 2^-9
EPS_LADDER = (0.125, 0.03125, 0.0078125, 0.001953125)


def envelope_scalings(p):
    """(c_p, C_p) = (min, max) of {1, 2^((2-p)/2)} scaling the envelopes after smoothing."""
    s = 2.0 ** ((2.0 - p) / 2.0)
    return min(1.0, s), max(1.0, s)


def regularize(B, eps):
    """The smoothed nonlinearity B_eps(t) = B(sqrt(eps^2 + t^2)) - B(eps).

    B_eps(0) = B_eps'(0) = 0, with
    B_eps'(t) = B'(s) t / s and
    B_eps''(t) = B''(s) t^2/s^2 + B'(s) eps^2 / s^3 for s = sqrt(eps^2 + t^2).
    """
    if not (0.0 < eps < 1.0):
        raise ValueError(f"smoothing level must lie in (0, 1), got {eps}")

    def value(t):
        t = np.asarray(t, dtype=float)
        return B.value(np.sqrt(eps**2 + t**2)) - B.value(eps)

    def d1(t):
        t = np.asarray(t, dtype=float)
        s = np.sqrt(eps**2 + t**2)
        return B.d1(s) * t / s

    def d2(t):
        t = np.asarray(t, dtype=float)
        s2 = eps**2 + t**2
        s = np.sqrt(s2)
        return B.d2(s) * t**2 / s2 + B.d1(s) * eps**2 / (s2 * s)

    if B.family == POWER and B.p is not None and B.gamma_lo is not None:
        c_p, C_p = envelope_scalings(B.p)
        tags = dict(
            p=B.p,
            kappa=B.kappa + eps,
            gamma_lo=c_p * B.gamma_lo,
            gamma_hi=C_p * B.gamma_hi,
        )
    else:
        tags = dict(p=B.p, kappa=B.kappa, gamma_lo=None, gamma_hi=None)

    return BFunction(
        value=value,
        d1=d1,
        d2=d2,
        d3=None,
        family=B.family,
        name=f"{B.name}~eps{eps:g}",
        meta={"eps": eps, "base": B},
        **tags,
    )


def coercivity_offset(p, gamma, kappa):
    """The eps-independent constant c in (B_eps o H)(xi) >= gamma/(2(p-1)p) |xi|^p - c.

    Zero for p >= 2; for 1 < p < 2 it is
    gamma/((p-1)p) (1 + (p-1) 2^(1/(p-1))) (kappa + 1)^p.
    """
    if p >= 2.0:
        return 0.0
    return gamma / ((p - 1.0) * p) * (1.0 + (p - 1.0) * 2.0 ** (1.0 / (p - 1.0))) * (kappa + 1.0) ** p


def check_regularized_envelope(B, eps, t_grid, H=None, sample_count=256, rng=None, tol=1e-10):
    """Verify the smoothed envelopes and the eps-uniform coercivity of B_eps o H.

    On the grid: c_p gamma_lo (kappa+eps+t)^(p-2) t <= B_eps'(t) <= C_p gamma_hi (...) t
    and the same for B_eps''.  On sampled xi (H defaults to the Euclidean
    norm): (B_eps o H)(xi) >= gamma/(2(p-1)p) |xi|^p - c with gamma the derived
    growth constant of the pair and c = coercivity_offset, independent of eps.
    """
    if B.family != POWER or B.p is None:
        raise ValueError("envelope check requires a power-family B")
    rng = np.random.default_rng(rng) if not isinstance(rng, np.random.Generator) else rng
    Be = regularize(B, eps)
    t = np.asarray(t_grid, dtype=float)
    if (t <= 0).any():
        raise ValueError("grid must be strictly positive")

    c_p, C_p = envelope_scalings(B.p)
    env = (B.kappa + eps + t) ** (B.p - 2.0)
    lo1, hi1 = c_p * B.gamma_lo * env * t, C_p * B.gamma_hi * env * t
    lo2, hi2 = c_p * B.gamma_lo * env, C_p * B.gamma_hi * env
    d1, d2 = Be.d1(t), Be.d2(t)
    viol = np.maximum(
        np.maximum((lo1 - d1) / np.abs(lo1), (d1 - hi1) / np.abs(hi1)),
        np.maximum((lo2 - d2) / np.abs(lo2), (d2 - hi2) / np.abs(hi2)),
    )
    worst = int(np.argmax(viol))
    max_viol = max(float(viol[worst]), 0.0)

    if H is None:
        H = euclidean_norm(2)
    from ._utils import sample_points
    from .conditions import comparability_constant, ellipticity_constant

    C = comparability_constant(H)
    lam = ellipticity_constant(H) if H.dimension == 2 else 1.0
    gamma_a, _, _ = growth_constants_from_envelope(B.p, B.kappa, B.gamma_lo, B.gamma_hi, C, lam)
    c_star = coercivity_offset(B.p, gamma_a, B.kappa)
    pts = sample_points(rng, sample_count, H.dimension, lo=1e-2, hi=10.0)
    hv = H.evaluate_many(pts)
    lhs = Be.value(hv)
    rhs = gamma_a / (2.0 * (B.p - 1.0) * B.p) * np.linalg.norm(pts, axis=1) ** B.p - c_star
    coercive_gap = float((lhs - rhs).min())
    if coercive_gap < -1e-12:
        max_viol = max(max_viol, -coercive_gap)

    verdict = PASS if max_viol <= tol else FAIL
    return ConditionReport(
        condition_id="regularized_envelope",
        verdict=verdict,
        max_violation=max_viol,
        tolerance=tol,
        witness=(float(t[worst]),) if verdict == FAIL else None,
        details={
            "eps": eps,
            "c_p": c_p,
            "C_p": C_p,
            "coercivity_offset": c_star,
            "coercivity_slack": coercive_gap,
        },
    )


def convergence_gap(B, eps, M, grid_points=10000):
    """(sup |B_eps - B|, sup |beta_eps - beta|) over [0, M] by grid maximization."""
    if M < 1:
        raise ValueError("requires M >= 1")
    Be = regularize(B, eps)
    t = np.linspace(0.0, M, grid_points)
    gap_b = float(np.abs(Be.value(t) - B.value(t)).max())
    gap_beta = float(np.abs(Be.beta(t) - B.beta(t)).max())
    return gap_b, gap_beta


def convergence_gap_bounds(B, eps, M, grid_points=10000):
    """Linear-in-eps upper bounds for the two sup gaps:
    2 ||B'||_C0([0,2M]) eps and (||B'||_C0 + Lip(beta) on [0,2M]) eps."""
    t = np.linspace(0.0, 2.0 * M, grid_points)
    sup_d1 = float(np.abs(B.d1(t)).max())
    # Lip(beta) on [0, 2M] from beta' = B''(t) t + B'(t)
    tpos = t[1:]
    lip_beta = float(np.abs(B.d2(tpos) * tpos + B.d1(tpos)).max())
    return 2.0 * sup_d1 * eps, (sup_d1 + lip_beta) * eps


def lipschitz_uniformity(B, eps, M, grid_points=10000):
    """eps-uniform Lipschitz bounds: returns a dict with the measured Lipschitz
    constants of B_eps and beta_eps on [0, M] and their eps-independent bounds
    taken on [0, 2M]."""
    Be = regularize(B, eps)
    t = np.linspace(0.0, M, grid_points)[1:]
    t2 = np.linspace(0.0, 2.0 * M, grid_points)[1:]
    lip_beps = float(np.abs(Be.d1(t)).max())
    lip_beta_eps = float(np.abs(Be.d2(t) * t + Be.d1(t)).max())
    bound_b = float(np.abs(B.d1(t2)).max())
    bound_beta = 2.0 * bound_b + float(np.abs(B.d2(t2) * t2 + B.d1(t2)).max())
    return {
        "lip_B_eps": lip_beps,
        "lip_B_bound": bound_b,
        "lip_beta_eps": lip_beta_eps,
        "lip_beta_bound": bound_beta,
    }


def quadratic_cap(B, M):
    """Cap B beyond M by its second-order Taylor polynomial at M.

    Requires a power-family B with kappa > 0.  The capped function agrees with
    B to second order at M, is C^2 across M, and satisfies the power envelopes
    with p = 2 and constants
    gamma = gamma_lo min(kappa^(p-2), (kappa+M)^(p-2)) and the max analogue.
    """
    if B.family != POWER or B.p is None or B.gamma_lo is None:
        raise ValueError("quadratic cap requires a tagged power-family B")
    if B.kappa <= 0.0:
        raise AnisolabError("quadratic cap requires kappa > 0 (singular case not covered)")
    if M <= 0:
        raise ValueError("requires M > 0")
    a = float(B.d2(M)) / 2.0
    b = float(B.d1(M))
    c = float(B.value(M))

    def value(t):
        t = np.asarray(t, dtype=float)
        s = t - M
        return np.where(t < M, B.value(np.minimum(t, M)), a * s**2 + b * s + c)

    def d1(t):
        t = np.asarray(t, dtype=float)
        return np.where(t < M, B.d1(np.minimum(t, M)), 2.0 * a * (t - M) + b)

    def d2(t):
        t = np.asarray(t, dtype=float)
        return np.where(t < M, B.d2(np.minimum(t, M)), 2.0 * a)

    pm2 = B.p - 2.0
    gamma_hat = B.gamma_lo * min(B.kappa**pm2, (B.kappa + M) ** pm2)
    Gamma_hat = B.gamma_hi * max(B.kappa**pm2, (B.kappa + M) ** pm2)
    return BFunction(
        value=value,
        d1=d1,
        d2=d2,
        d3=None,
        family=POWER,
        p=2.0,
        kappa=B.kappa,
        gamma_lo=gamma_hat,
        gamma_hi=Gamma_hat,
        name=f"{B.name}|cap{M:g}",
        meta={"cap": M, "base": B},
    )
