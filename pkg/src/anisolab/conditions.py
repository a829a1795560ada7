"""Nonlinearities B and validators for the structural hypotheses of the model.

Two families of admissible B are supported:

* ``power`` family: B', B'' squeezed between gamma_lo/gamma_hi times
  (kappa + t)^(p-2) t and (kappa + t)^(p-2) respectively (p-Laplacian type,
  possibly regularized by kappa > 0);
* ``nondegenerate`` family: B of class C^3 up to 0 with B''(0) > 0 and
  B'''(0) = 0, which forces an ellipsoidal anisotropy.

The module also validates the pairing conditions relating an anisotropy to
its dual: the exact pairing <H grad H(xi), H* grad H*(x)> = <xi, x> (which
characterizes ellipsoidal norms), its sign-only weakening, and the equivalent
planar orthogonality symmetry.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ._utils import rot90, sample_points, unit_directions
from .duality import dual_norm, duality_map_many
from .errors import InconsistencyError, SmoothnessError
from .norms import EllipsoidNorm
from .report import FAIL, INDETERMINATE, PASS, ConditionReport

POWER = "power"
NONDEGENERATE = "nondegenerate"


@dataclass(frozen=True)
class BFunction:
    """A nonlinearity B with B(0) = B'(0) = 0 and B, B', B'' > 0 for t > 0.

    The callables are vectorized over numpy arrays.  ``beta`` is the
    coercivity density B'(t) t.
    """

    value: Callable
    d1: Callable
    d2: Callable
    d3: Callable | None = None
    family: str = POWER
    p: float | None = None
    kappa: float = 0.0
    gamma_lo: float | None = None
    gamma_hi: float | None = None
    name: str = "B"
    meta: dict = field(default_factory=dict)

    def __call__(self, t):
        return self.value(t)

    def beta(self, t):
        return self.d1(t) * np.asarray(t, dtype=float)

    def __repr__(self):
        return f"BFunction({self.name!r}, family={self.family})"


def power_b(p):
    """B(t) = t^p / p.

    Envelope constants: B'(t) = t^(p-1) matches (0 + t)^(p-2) t exactly, while
    B''(t) = (p-1) t^(p-2) needs gamma_lo = min(1, p-1), gamma_hi = max(1, p-1).
    """
    p = float(p)
    if p <= 1:
        raise ValueError("power nonlinearity requires p > 1")
    return BFunction(
        value=lambda t: np.asarray(t, dtype=float) ** p / p,
        d1=lambda t: np.asarray(t, dtype=float) ** (p - 1.0),
        d2=lambda t: (p - 1.0) * np.asarray(t, dtype=float) ** (p - 2.0),
        d3=lambda t: (p - 1.0) * (p - 2.0) * np.asarray(t, dtype=float) ** (p - 3.0),
        family=POWER,
        p=p,
        kappa=0.0,
        gamma_lo=min(1.0, p - 1.0),
        gamma_hi=max(1.0, p - 1.0),
        name=f"t^{p:g}/{p:g}",
    )


def regularized_power_b(p, kappa):
    """The kappa-regularized power nonlinearity with B'(t) = (kappa + t)^(p-2) t.

    B''(t) = (kappa + t)^(p-3) (kappa + (p-1) t), so the envelope holds with
    gamma_lo = min(1, p-1) and gamma_hi = max(1, p-1).
    """
    p = float(p)
    kappa = float(kappa)
    if p <= 1:
        raise ValueError("requires p > 1")
    if not (0.0 < kappa < 1.0):
        raise ValueError("requires kappa in (0, 1)")

    def value(t):
        t = np.asarray(t, dtype=float)
        kp = (kappa + t) ** p
        kp1 = (kappa + t) ** (p - 1.0)
        return (kp - kappa**p) / p - kappa * (kp1 - kappa ** (p - 1.0)) / (p - 1.0)

    return BFunction(
        value=value,
        d1=lambda t: (kappa + np.asarray(t, dtype=float)) ** (p - 2.0) * np.asarray(t, dtype=float),
        d2=lambda t: (kappa + np.asarray(t, dtype=float)) ** (p - 3.0)
        * (kappa + (p - 1.0) * np.asarray(t, dtype=float)),
        d3=lambda t: (kappa + np.asarray(t, dtype=float)) ** (p - 4.0)
        * (p - 2.0)
        * (2.0 * kappa + (p - 1.0) * np.asarray(t, dtype=float)),
        family=POWER,
        p=p,
        kappa=kappa,
        gamma_lo=min(1.0, p - 1.0),
        gamma_hi=max(1.0, p - 1.0),
        name=f"reg-power(p={p:g},k={kappa:g})",
    )


def quadratic_b(family=POWER):
    """B(t) = t^2 / 2, valid in both families."""
    zero = lambda t: np.zeros_like(np.asarray(t, dtype=float))
    return BFunction(
        value=lambda t: np.asarray(t, dtype=float) ** 2 / 2.0,
        d1=lambda t: np.asarray(t, dtype=float),
        d2=lambda t: np.ones_like(np.asarray(t, dtype=float)),
        d3=zero,
        family=family,
        p=2.0,
        kappa=0.0,
        gamma_lo=1.0,
        gamma_hi=1.0,
        name="t^2/2",
    )


def even_poly_b(c2, c4=0.0):
    """B(t) = c2 t^2/2 + c4 t^4/4, a nondegenerate-family example (c2 > 0)."""
    if c2 <= 0:
        raise ValueError("requires c2 > 0")
    return BFunction(
        value=lambda t: c2 * np.asarray(t, dtype=float) ** 2 / 2.0
        + c4 * np.asarray(t, dtype=float) ** 4 / 4.0,
        d1=lambda t: c2 * np.asarray(t, dtype=float) + c4 * np.asarray(t, dtype=float) ** 3,
        d2=lambda t: c2 + 3.0 * c4 * np.asarray(t, dtype=float) ** 2,
        d3=lambda t: 6.0 * c4 * np.asarray(t, dtype=float),
        family=NONDEGENERATE,
        name=f"{c2:g}t^2/2+{c4:g}t^4/4",
    )


# ---------------------------------------------------------------------------
# pairing conditions
# ---------------------------------------------------------------------------


def _relative_pairing_gap(H, Hd, xi, x):
    """|<dual map(xi), inverse dual map(x)> - <xi, x>| / (|xi| |x|), vectorized."""
    lhs = np.sum(duality_map_many(H, xi) * duality_map_many(Hd, x), axis=1)
    rhs = np.sum(xi * x, axis=1)
    scale = np.linalg.norm(xi, axis=1) * np.linalg.norm(x, axis=1)
    return np.abs(lhs - rhs) / np.maximum(scale, 1e-300)


def check_exact_pairing(H, sample_count=1000, rng=None, tol=1e-8, refine=True):
    """Sampled test of the exact duality pairing; only ellipsoids satisfy it.

    Samples (xi, x) pairs, reports the worst relative gap, and sharpens the
    worst pair by direct maximization over directions before deciding.
    """
    rng = np.random.default_rng(rng) if not isinstance(rng, np.random.Generator) else rng
    if not H.strictly_convex:
        raise ValueError("exact-pairing check requires a declared strictly convex norm")
    Hd = dual_norm(H)
    xi = sample_points(rng, sample_count, H.dimension)
    x = sample_points(rng, sample_count, H.dimension)
    gaps = _relative_pairing_gap(H, Hd, xi, x)
    worst = int(np.argmax(gaps))
    max_gap = float(gaps[worst])
    wit_xi, wit_x = xi[worst], x[worst]

    if refine and H.dimension == 2:
        from scipy.optimize import minimize

        def neg_gap(angles):
            u = np.array([[np.cos(angles[0]), np.sin(angles[0])]])
            v = np.array([[np.cos(angles[1]), np.sin(angles[1])]])
            return -float(_relative_pairing_gap(H, Hd, u, v)[0])

        start = np.array([np.arctan2(wit_xi[1], wit_xi[0]), np.arctan2(wit_x[1], wit_x[0])])
        res = minimize(neg_gap, start, method="Nelder-Mead", options={"xatol": 1e-10, "fatol": 1e-14})
        if -res.fun > max_gap:
            max_gap = -float(res.fun)
            wit_xi = np.array([np.cos(res.x[0]), np.sin(res.x[0])])
            wit_x = np.array([np.cos(res.x[1]), np.sin(res.x[1])])

    verdict = PASS if max_gap <= tol else FAIL
    return ConditionReport(
        condition_id="exact_duality_pairing",
        verdict=verdict,
        max_violation=max_gap,
        tolerance=tol,
        witness=(tuple(wit_xi), tuple(wit_x)) if verdict == FAIL else None,
        details={"samples": sample_count},
    )


def check_sign_pairing(H, sample_count=10000, rng=None, band_scale=1e-8):
    """Sampled test of the sign-only duality pairing.

    Pairs where either inner product falls within ``band_scale * H(xi) H*(x)``
    of zero are skipped as uninformative; the verdict is indeterminate when
    every sample is skipped.
    """
    rng = np.random.default_rng(rng) if not isinstance(rng, np.random.Generator) else rng
    if not H.strictly_convex:
        raise ValueError("sign-pairing check requires a declared strictly convex norm")
    Hd = dual_norm(H)
    xi = sample_points(rng, sample_count, H.dimension)
    x = sample_points(rng, sample_count, H.dimension)

    lhs = np.sum(duality_map_many(H, xi) * duality_map_many(Hd, x), axis=1)
    rhs = np.sum(xi * x, axis=1)
    band = band_scale * H.evaluate_many(xi) * Hd.evaluate_many(x)
    informative = (np.abs(lhs) > band) & (np.abs(rhs) > band)
    skipped = int(sample_count - informative.sum())

    if not informative.any():
        return ConditionReport(
            condition_id="sign_duality_pairing",
            verdict=INDETERMINATE,
            max_violation=0.0,
            tolerance=0.0,
            samples_skipped=skipped,
            details={"samples": sample_count},
        )

    disagree = informative & (np.sign(lhs) != np.sign(rhs))
    scale = np.linalg.norm(xi, axis=1) * np.linalg.norm(x, axis=1)
    # how decisively the signs disagree, in scale-free units
    strength = np.where(disagree, np.minimum(np.abs(lhs), np.abs(rhs)) / scale, 0.0)
    max_viol = float(strength.max())
    verdict = FAIL if disagree.any() else PASS
    worst = int(np.argmax(strength))
    return ConditionReport(
        condition_id="sign_duality_pairing",
        verdict=verdict,
        max_violation=max_viol,
        tolerance=0.0,
        witness=(tuple(xi[worst]), tuple(x[worst])) if verdict == FAIL else None,
        samples_skipped=skipped,
        details={"samples": sample_count, "informative": int(informative.sum()),
                 "disagreements": int(disagree.sum())},
    )


def check_orthogonality_symmetry(H, sample_count=1000, rng=None, tol=1e-6):
    """Planar symmetry of polar orthogonality.

    For sampled xi, the direction eta orthogonal to H(xi) grad H(xi) must in
    turn satisfy <xi, H(eta) grad H(eta)> = 0, and symmetrically.  Violations
    are measured relative to |a| |b| of the vectors paired.
    """
    rng = np.random.default_rng(rng) if not isinstance(rng, np.random.Generator) else rng
    if H.dimension != 2:
        raise ValueError("orthogonality symmetry is a planar check")
    xi = sample_points(rng, sample_count, 2)

    def one_direction(points):
        eta = rot90(duality_map_many(H, points))  # <duality map(points), eta> = 0
        back = duality_map_many(H, eta)
        num = np.abs(np.sum(points * back, axis=1))
        scale = np.linalg.norm(points, axis=1) * np.linalg.norm(back, axis=1)
        return num / np.maximum(scale, 1e-300)

    v_fwd = one_direction(xi)
    eta_samples = sample_points(rng, sample_count, 2)
    v_bwd = one_direction(eta_samples)

    worst = max(float(v_fwd.max()), float(v_bwd.max()))
    verdict = PASS if worst <= tol else FAIL
    src = xi if v_fwd.max() >= v_bwd.max() else eta_samples
    idx = int(np.argmax(v_fwd)) if v_fwd.max() >= v_bwd.max() else int(np.argmax(v_bwd))
    return ConditionReport(
        condition_id="orthogonality_symmetry",
        verdict=verdict,
        max_violation=worst,
        tolerance=tol,
        witness=tuple(src[idx]) if verdict == FAIL else None,
        details={"samples": sample_count},
    )


# ---------------------------------------------------------------------------
# ellipticity
# ---------------------------------------------------------------------------


def ellipticity_constant(H, angular_samples=2048, return_details=False):
    """Sampled uniform-ellipticity constant of a planar anisotropy.

    Minimum over the unit-ball boundary of the tangential Rayleigh quotient
    zeta' Hess H zeta / |zeta|^2 with zeta orthogonal to grad H.  The radial
    direction carries an exact zero eigenvalue and is excluded.  Sectors where
    the Hessian is undefined are skipped and counted.  The degree -1 scaling
    of the Hessian is verified at two extra radii.
    """
    if H.dimension != 2:
        raise ValueError("ellipticity sampling implemented for the plane")
    thetas = 2.0 * np.pi * np.arange(angular_samples) / angular_samples
    dirs = np.stack([np.cos(thetas), np.sin(thetas)], axis=1)
    boundary = dirs / H.evaluate_many(dirs)[:, None]

    lam = np.inf
    skipped = 0
    quotients = np.full(angular_samples, np.nan)
    for k, xi in enumerate(boundary):
        try:
            hess = H.hessian(xi)
        except SmoothnessError:
            skipped += 1
            continue
        g = H.gradient(xi)
        zeta = rot90(g)
        zeta /= np.linalg.norm(zeta)
        q = float(zeta @ hess @ zeta)
        quotients[k] = q
        lam = min(lam, q)

    if not np.isfinite(lam):
        raise SmoothnessError(f"{H.name}: Hessian unavailable on every sampled sector")

    # scaled form: Hess H(t xi) = Hess H(xi) / t, checked at two radii
    rng = np.random.default_rng(0)
    for t in (0.5, 2.0):
        for xi in boundary[rng.integers(0, angular_samples, size=8)]:
            try:
                h1 = H.hessian(xi)
                ht = H.hessian(t * xi)
            except SmoothnessError:
                continue
            gap = np.abs(ht - h1 / t).max()
            if gap > 1e-6 * (1.0 + np.abs(h1).max() / t):
                raise InconsistencyError(
                    f"{H.name}: Hessian violates degree -1 homogeneity (gap {gap:g})"
                )

    if return_details:
        return float(lam), {"skipped_sectors": skipped, "quotients": quotients}
    return float(lam)


def comparability_constant(H, angular_samples=1024):
    """Sampled constant C with |xi|/C <= H <= C|xi|, |grad H| <= C, |Hess H| <= C/|xi|."""
    thetas = 2.0 * np.pi * np.arange(angular_samples) / angular_samples
    if H.dimension == 2:
        dirs = np.stack([np.cos(thetas), np.sin(thetas)], axis=1)
    else:
        dirs = unit_directions(np.random.default_rng(0), angular_samples, H.dimension)
    hv = H.evaluate_many(dirs)
    c = max(float(hv.max()), float(1.0 / hv.min()))
    grads = H.gradient_many(dirs)
    c = max(c, float(np.linalg.norm(grads, axis=1).max()))
    for xi in dirs[:: max(1, angular_samples // 256)]:
        try:
            c = max(c, float(np.abs(H.hessian(xi)).sum()))
        except SmoothnessError:
            continue
    return c


def ellipticity_from_growth(p, gamma, Gamma, C):
    """Certified ellipticity lower bound from the growth constants of Hess(B o H).

    lambda = (p-1) c^(2(2-p)) gamma / (2 C^2 (c+1) Gamma), with c = C for
    p >= 2 and c = 1/C otherwise.
    """
    if p <= 1:
        raise ValueError("requires p > 1")
    if gamma <= 0 or Gamma <= 0 or gamma > Gamma:
        raise ValueError("requires 0 < gamma <= Gamma")
    if C < 1:
        raise ValueError("requires C >= 1")
    c_star = C if p >= 2 else 1.0 / C
    return (p - 1.0) * c_star ** (2.0 * (2.0 - p)) * gamma / (2.0 * C**2 * (c_star + 1.0) * Gamma)


def growth_constants_from_envelope(p, kappa, gamma_lo, gamma_hi, C, lam):
    """Constants (gamma, Gamma, kappa') of the Hessian growth condition for B o H,
    derived from the B-envelope constants, the norm-comparability constant C and
    a sampled ellipticity constant lam.

    gamma (kappa' + |xi|)^(p-2) |zeta|^2 <= zeta' Hess(B o H)(xi) zeta and the
    absolute row sum is bounded by Gamma (kappa' + |xi|)^(p-2).
    """
    c_star = C if p >= 2 else 1.0 / C
    gamma = 0.25 * gamma_lo * c_star ** (2.0 - p) * min(lam / C, 1.0 / C**2)
    Gamma = 2.0 * gamma_hi * C**2 * c_star ** (p - 2.0)
    return gamma, Gamma, kappa / c_star


def hessian_of_composition(B, H, xi):
    """Hess (B o H)(xi) = B''(H) grad H grad H^T + B'(H) Hess H."""
    h = H.evaluate(xi)
    g = H.gradient(xi)
    return float(B.d2(h)) * np.outer(g, g) + float(B.d1(h)) * H.hessian(xi)


# ---------------------------------------------------------------------------
# nonlinearity validators
# ---------------------------------------------------------------------------


def check_power_growth(B, t_grid, tol=1e-10):
    """Check the four power-family envelope inequalities of B on a grid.

    gamma_lo (kappa+t)^(p-2) t <= B'(t) <= gamma_hi (kappa+t)^(p-2) t and the
    same envelopes for B''.  Violations are relative to the envelope value.
    """
    if B.family != POWER or B.p is None or B.gamma_lo is None or B.gamma_hi is None:
        raise ValueError("power-growth check requires a fully tagged power-family B")
    t = np.asarray(t_grid, dtype=float)
    if (t <= 0).any():
        raise ValueError("grid must be strictly positive")
    env = (B.kappa + t) ** (B.p - 2.0)
    lo1, hi1 = B.gamma_lo * env * t, B.gamma_hi * env * t
    lo2, hi2 = B.gamma_lo * env, B.gamma_hi * env
    d1, d2 = B.d1(t), B.d2(t)

    def shortfall(val, lo, hi):
        return np.maximum((lo - val) / np.abs(lo), (val - hi) / np.abs(hi))

    viol = np.maximum(shortfall(d1, lo1, hi1), shortfall(d2, lo2, hi2))
    worst = int(np.argmax(viol))
    max_viol = float(viol[worst])
    verdict = PASS if max_viol <= tol else FAIL
    return ConditionReport(
        condition_id="power_growth_envelope",
        verdict=verdict,
        max_violation=max(max_viol, 0.0),
        tolerance=tol,
        witness=(float(t[worst]),) if verdict == FAIL else None,
        details={"grid_points": t.size, "p": B.p, "kappa": B.kappa},
    )


def check_nondegenerate(B, K=1.0, grid_points=2048, tol=1e-6):
    """Check the nondegenerate-family conditions: B''(0) > 0, B'''(0) = 0,
    and positivity of B, B', B'' on (0, K].

    When no analytic third derivative is present, the one-sided limit of
    B''' at 0 is estimated from B'' by Richardson-combined difference
    quotients at steps 1e-3 and 1e-4.
    """
    if B.family != NONDEGENERATE:
        raise ValueError("nondegenerate check requires a nondegenerate-family B")
    d2_0 = float(B.d2(0.0))
    if B.d3 is not None:
        d3_0 = float(B.d3(0.0))
    else:
        h1, h2 = 1e-3, 1e-4
        e1 = (float(B.d2(h1)) - d2_0) / h1
        e2 = (float(B.d2(h2)) - d2_0) / h2
        d3_0 = (h1 * e2 - h2 * e1) / (h1 - h2)

    t = np.linspace(K / grid_points, K, grid_points)
    positive = (B.value(t) > 0).all() and (B.d1(t) > 0).all() and (B.d2(t) > 0).all()
    at_zero = abs(float(B.value(0.0))) <= 1e-14 and abs(float(B.d1(0.0))) <= 1e-14

    viol = 0.0
    why = []
    if d2_0 <= 0:
        viol = max(viol, 1.0 + abs(d2_0))
        why.append("B''(0) <= 0")
    if abs(d3_0) > tol * (1.0 + abs(d2_0)):
        viol = max(viol, abs(d3_0))
        why.append("B'''(0) != 0")
    if not positive:
        viol = max(viol, 1.0)
        why.append("positivity fails on the grid")
    if not at_zero:
        viol = max(viol, 1.0)
        why.append("B(0) or B'(0) nonzero")

    verdict = PASS if not why else FAIL
    return ConditionReport(
        condition_id="nondegenerate_quadratic",
        verdict=verdict,
        max_violation=viol,
        tolerance=tol,
        witness=(0.0,) if verdict == FAIL else None,
        details={"B''(0)": d2_0, "B'''(0)": d3_0, "reasons": why},
    )


def coercivity_margin(B, K=10.0, grid_points=10000):
    """The margin delta > 0 with B'(t) t - B(t) >= delta B(t).

    Power family: delta = gamma_lo / gamma_hi, valid for every t >= 0.
    Nondegenerate family: delta = min B'' / max B'' over [0, K].  The
    inequality is verified on a grid in (0, K]; a violation means the declared
    constants are wrong.
    """
    if K <= 0:
        raise ValueError("requires K > 0")
    if B.family == POWER:
        if B.gamma_lo is None or B.gamma_hi is None:
            raise ValueError("power-family B lacks envelope constants")
        delta = B.gamma_lo / B.gamma_hi
    else:
        t = np.linspace(0.0, K, grid_points)
        d2 = B.d2(t)
        delta = float(d2.min() / d2.max())
        if delta <= 0:
            raise InconsistencyError("B'' changes sign on [0, K]")
    t = np.linspace(K / grid_points, K, grid_points)
    b = B.value(t)
    lhs = B.beta(t) - b - delta * b
    if (lhs < -1e-12 * (1.0 + np.abs(b))).any():
        worst = float(t[np.argmin(lhs)])
        raise InconsistencyError(
            f"coercivity margin {delta:g} fails at t = {worst:g}: declared constants wrong"
        )
    return delta
