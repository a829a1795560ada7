"""Planar construction of sign-pairing anisotropies from first-quadrant profiles.

A radial profile r on [0, pi/2] with r(0) = 1, r(pi/2) = r* >= 1,
r'(0) = r'(pi/2) = 0 and r r'' < 2 r'^2 + r^2 (strict convexity of the polar
graph) extends uniquely to a pi-periodic radial function whose body satisfies
the sign duality pairing.  The extension reflects the tangent/radius pairing:
the angle theta paired with eta is

    theta = pi/2 + eta - arctan(r'(eta) / r(eta)),

and on [pi/2, pi] the extended radius is r* sqrt(r^2 + r'^2) / r^2 evaluated
at the paired eta.  The module validates profiles, builds extensions and their
norms, checks the second/third-order matching needed for globally smooth
bodies, and provides the concrete families used throughout: circles, ellipses,
p-norm arcs, trigonometric perturbations, and compactly supported bumps.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

import numpy as np

from .errors import ProfileError
from .norms import GluedPQNorm, PolarNorm
from .report import FAIL, PASS, ConditionReport

HALF_PI = 0.5 * np.pi

ENDPOINT_TOL = 1e-10
MARGIN_FAIL = -1e-9
MARGIN_BORDERLINE = 1e-6
BISECT_ITERS = 80


@dataclass(frozen=True)
class RadialProfile:
    """First-quadrant radial profile with derivatives, vectorized on [0, pi/2].

    ``smoothness`` is "C2" (convexity inequality required a.e. only) or "C3a"
    (inequality strict everywhere, third derivative available, smooth-matching
    conditions expected to hold).
    """

    r: Callable
    dr: Callable
    d2r: Callable
    d3r: Callable | None = None
    r_star: float = 1.0
    smoothness: str = "C2"
    name: str = "profile"

    def __post_init__(self):
        if self.smoothness not in ("C2", "C3a"):
            raise ValueError("profile smoothness must be 'C2' or 'C3a'")

    @cached_property
    def _angle_seed_table(self):
        """Dense (tau, eta) table seeding the parallel-angle inversion."""
        eta = np.linspace(0.0, HALF_PI, 2048)
        tau = HALF_PI + eta - np.arctan(self.dr(eta) / self.r(eta))
        return np.maximum.accumulate(tau), eta

    def slope(self, eta):
        """r'(eta) / r(eta)."""
        eta = np.asarray(eta, dtype=float)
        return self.dr(eta) / self.r(eta)

    def convexity_margin(self, theta):
        """2 r'^2 + r^2 - r r''; positive on strictly convex polar graphs."""
        theta = np.asarray(theta, dtype=float)
        r, r1, r2 = self.r(theta), self.dr(theta), self.d2r(theta)
        return 2.0 * r1**2 + r**2 - r * r2


# ---------------------------------------------------------------------------
# concrete profiles
# ---------------------------------------------------------------------------


def circle_profile():
    one = lambda t: np.ones_like(np.asarray(t, dtype=float))
    zero = lambda t: np.zeros_like(np.asarray(t, dtype=float))
    return RadialProfile(one, zero, zero, zero, r_star=1.0, smoothness="C3a", name="circle")


def ellipse_profile(r_star):
    """Radial profile of the axis-aligned ellipse with semi-axes 1 and r_star."""
    r_star = float(r_star)
    if r_star < 1.0:
        raise ProfileError("ellipse profile requires r_star >= 1")
    c = 1.0 - 1.0 / r_star**2

    def g(t):
        return 1.0 - c * np.sin(np.asarray(t, dtype=float)) ** 2

    def r(t):
        return g(t) ** -0.5

    def dr(t):
        t = np.asarray(t, dtype=float)
        return 0.5 * g(t) ** -1.5 * c * np.sin(2.0 * t)

    def d2r(t):
        t = np.asarray(t, dtype=float)
        g1 = -c * np.sin(2.0 * t)
        g2 = -2.0 * c * np.cos(2.0 * t)
        return 0.75 * g(t) ** -2.5 * g1**2 - 0.5 * g(t) ** -1.5 * g2

    def d3r(t):
        t = np.asarray(t, dtype=float)
        g1 = -c * np.sin(2.0 * t)
        g2 = -2.0 * c * np.cos(2.0 * t)
        g3 = 4.0 * c * np.sin(2.0 * t)
        gv = g(t)
        return (
            -1.875 * gv**-3.5 * g1**3
            + 2.25 * gv**-2.5 * g1 * g2
            - 0.5 * gv**-1.5 * g3
        )

    return RadialProfile(r, dr, d2r, d3r, r_star=r_star, smoothness="C3a",
                         name=f"ellipse({r_star:g})")


def pnorm_profile(p):
    """First-quadrant arc of the p-norm unit circle, r = (cos^p + sin^p)^(-1/p).

    For p > 2 the polar convexity inequality degenerates to equality exactly at
    the endpoints (the p-circle is flat to order p at the axes), so this is a
    "C2" profile: the inequality holds a.e. only.
    """
    p = float(p)
    if p <= 2.0:
        raise ProfileError("glued construction uses p-norm arcs with p > 2")

    def parts(t):
        t = np.asarray(t, dtype=float)
        s, c = np.sin(t), np.cos(t)
        g = c**p + s**p
        g1 = p * (s ** (p - 1.0) * c - c ** (p - 1.0) * s)
        g2 = p * (p - 1.0) * (s ** (p - 2.0) * c**2 + c ** (p - 2.0) * s**2) - p * g
        return g, g1, g2

    def r(t):
        g, _, _ = parts(t)
        return g ** (-1.0 / p)

    def dr(t):
        g, g1, _ = parts(t)
        return -(1.0 / p) * g ** (-1.0 / p - 1.0) * g1

    def d2r(t):
        g, g1, g2 = parts(t)
        return (1.0 / p) * (1.0 / p + 1.0) * g ** (-1.0 / p - 2.0) * g1**2 \
            - (1.0 / p) * g ** (-1.0 / p - 1.0) * g2

    return RadialProfile(r, dr, d2r, None, r_star=1.0, smoothness="C2",
                         name=f"pnorm_arc({p:g})")


def trig_profile(amplitude):
    """r = 1 + a sin^2(theta): a valid profile for 0 < a < 1/2 whose extension
    is only C^1 (it violates the second-order matching)."""
    a = float(amplitude)
    if not (0.0 < a < 0.5):
        raise ProfileError("trig profile requires amplitude in (0, 1/2)")
    return RadialProfile(
        r=lambda t: 1.0 + a * np.sin(np.asarray(t, dtype=float)) ** 2,
        dr=lambda t: a * np.sin(2.0 * np.asarray(t, dtype=float)),
        d2r=lambda t: 2.0 * a * np.cos(2.0 * np.asarray(t, dtype=float)),
        d3r=lambda t: -4.0 * a * np.sin(2.0 * np.asarray(t, dtype=float)),
        r_star=1.0 + a,
        smoothness="C2",
        name=f"trig({a:g})",
    )


@dataclass(frozen=True)
class BumpFunction:
    """Smooth bump compactly supported in (lo, hi), peak-normalized to 1."""

    lo: float
    hi: float
    value: Callable = field(init=False, repr=False)
    d1: Callable = field(init=False, repr=False)
    d2: Callable = field(init=False, repr=False)
    d3: Callable = field(init=False, repr=False)

    def __post_init__(self):
        if not (self.hi > self.lo):
            raise ValueError("requires hi > lo")
        width = self.hi - self.lo
        margin = 4e-3  # below this the bump is zero to double precision

        def derivs(theta):
            theta = np.asarray(theta, dtype=float)
            s = (theta - self.lo) / width
            inside = (s > margin) & (s < 1.0 - margin)
            out = [np.zeros_like(s) for _ in range(4)]
            if inside.any():
                si = s[inside]
                w = 1.0 / si + 1.0 / (1.0 - si)
                w1 = -1.0 / si**2 + 1.0 / (1.0 - si) ** 2
                w2 = 2.0 / si**3 + 2.0 / (1.0 - si) ** 3
                w3 = -6.0 / si**4 + 6.0 / (1.0 - si) ** 4
                b = np.exp(4.0 - w)
                out[0][inside] = b
                out[1][inside] = -w1 * b / width
                out[2][inside] = (w1**2 - w2) * b / width**2
                out[3][inside] = (-(w1**3) + 3.0 * w1 * w2 - w3) * b / width**3
            return out

        object.__setattr__(self, "value", lambda t: derivs(t)[0])
        object.__setattr__(self, "d1", lambda t: derivs(t)[1])
        object.__setattr__(self, "d2", lambda t: derivs(t)[2])
        object.__setattr__(self, "d3", lambda t: derivs(t)[3])


def bump_function(lo=np.pi / 8, hi=3 * np.pi / 8):
    return BumpFunction(lo, hi)


def perturbed_profile(psi, eps):
    """r = 1 + eps psi for a bump psi supported compactly in (0, pi/2).

    The matching conditions hold automatically with r* = 1; validity for a
    given eps is decided by validate_profile.
    """
    if eps < 0:
        raise ValueError("requires eps >= 0")
    if not (0.0 <= psi.lo and psi.hi <= HALF_PI):
        raise ProfileError("bump support must sit inside (0, pi/2)")
    return RadialProfile(
        r=lambda t: 1.0 + eps * psi.value(t),
        dr=lambda t: eps * psi.d1(t),
        d2r=lambda t: eps * psi.d2(t),
        d3r=lambda t: eps * psi.d3(t),
        r_star=1.0,
        smoothness="C3a",
        name=f"perturbed(eps={eps:g})",
    )


def profile_from_samples(thetas, radii, smoothness="C2", name="sampled"):
    """Cubic-spline profile from (theta, r) samples on [0, pi/2].

    Endpoint slopes are clamped to zero, matching the required endpoint data;
    derivatives are the spline's.
    """
    from scipy.interpolate import CubicSpline

    thetas = np.asarray(thetas, dtype=float)
    radii = np.asarray(radii, dtype=float)
    order = np.argsort(thetas)
    thetas, radii = thetas[order], radii[order]
    if abs(thetas[0]) > 1e-9 or abs(thetas[-1] - HALF_PI) > 1e-9:
        raise ProfileError("samples must span [0, pi/2]")
    spline = CubicSpline(thetas, radii, bc_type="clamped")
    d1 = spline.derivative(1)
    d2 = spline.derivative(2)
    return RadialProfile(
        r=lambda t: spline(np.asarray(t, dtype=float)),
        dr=lambda t: d1(np.asarray(t, dtype=float)),
        d2r=lambda t: d2(np.asarray(t, dtype=float)),
        d3r=None,
        r_star=float(radii[-1]),
        smoothness=smoothness,
        name=name,
    )


def normalize_body_samples(thetas, radii, grid_size=257, name="normalized"):
    """Rotate and rescale sampled even-body boundary data into the profile frame.

    The angle of maximal radius is rotated to pi/2 and the radius at angle 0
    is scaled to 1; returns the resulting first-quadrant profile.  Whether the
    frame-normalized data actually satisfies the endpoint and convexity
    requirements is left to validate_profile.
    """
    from scipy.interpolate import CubicSpline

    thetas = np.mod(np.asarray(thetas, dtype=float), np.pi)
    radii = np.asarray(radii, dtype=float)
    order = np.argsort(thetas)
    thetas, radii = thetas[order], radii[order]
    # periodic spline over one pi-period
    tt = np.concatenate([thetas, [thetas[0] + np.pi]])
    rr = np.concatenate([radii, [radii[0]]])
    spline = CubicSpline(tt, rr, bc_type="periodic")

    fine = np.linspace(thetas[0], thetas[0] + np.pi, 4096, endpoint=False)
    theta_max = float(fine[np.argmax(spline(fine))])
    shift = theta_max - HALF_PI

    grid = np.linspace(0.0, HALF_PI, grid_size)
    rotated = spline(np.mod(grid + shift - tt[0], np.pi) + tt[0])
    scaled = rotated / rotated[0]
    return profile_from_samples(grid, scaled, name=name)


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------


def validate_profile(profile, grid_size=2048):
    """Endpoint data, positivity, polar convexity and the slope bound, on a grid.

    Endpoint violations reject the profile outright.  The convexity margin
    min(2 r'^2 + r^2 - r r'') is reported; profiles whose margin dips below
    the borderline threshold are flagged rather than failed (the inequality is
    only required almost everywhere for C2 profiles).
    """
    if grid_size < 16:
        raise ValueError("grid_size must be >= 16")
    r0 = float(profile.r(np.array([0.0]))[0])
    r_end = float(profile.r(np.array([HALF_PI]))[0])
    s0 = float(profile.dr(np.array([0.0]))[0])
    s_end = float(profile.dr(np.array([HALF_PI]))[0])
    if abs(r0 - 1.0) > ENDPOINT_TOL:
        raise ProfileError(f"r(0) = {r0!r}, expected 1")
    if abs(r_end - profile.r_star) > ENDPOINT_TOL:
        raise ProfileError(f"r(pi/2) = {r_end!r}, expected r* = {profile.r_star!r}")
    if profile.r_star < 1.0 - 1e-12:
        raise ProfileError(f"r* = {profile.r_star!r} < 1")
    if abs(s0) > ENDPOINT_TOL or abs(s_end) > ENDPOINT_TOL:
        raise ProfileError(f"endpoint slopes must vanish, got {s0!r}, {s_end!r}")

    theta = np.linspace(0.0, HALF_PI, grid_size)
    rv = profile.r(theta)
    if (rv <= 0).any():
        raise ProfileError("profile must be strictly positive")

    margin = profile.convexity_margin(theta)
    scale = float(np.max(rv**2))
    margin_min = float(margin.min())
    margin_arg = float(theta[np.argmin(margin)])

    inner = theta[1:-1]
    slope = profile.slope(inner)
    upper = np.tan(inner) - slope
    lower = slope + 1.0 / np.tan(inner)
    bound_viol = float(np.maximum(-upper, -lower).max())
    bound_ok = bound_viol <= 1e-12 * (1.0 + float(np.abs(slope).max()))

    failed = margin_min < MARGIN_FAIL * scale or not bound_ok
    borderline = margin_min < MARGIN_BORDERLINE
    verdict = FAIL if failed else PASS
    return ConditionReport(
        condition_id="profile_admissibility",
        verdict=verdict,
        max_violation=max(-margin_min, 0.0) if failed else 0.0,
        tolerance=abs(MARGIN_FAIL) * scale,
        witness=(margin_arg,) if failed else None,
        details={
            "margin_min": margin_min,
            "margin_argmin": margin_arg,
            "slope_bound_violation": max(bound_viol, 0.0),
            "borderline": borderline,
            "grid_points": grid_size,
        },
    )


# ---------------------------------------------------------------------------
# the extension
# ---------------------------------------------------------------------------


def parallel_angle(profile, eta):
    """The second-quadrant angle whose radius is parallel to the boundary
    tangent at eta: pi/2 + eta - arctan(r'(eta)/r(eta)).  Vectorized."""
    eta = np.asarray(eta, dtype=float)
    return HALF_PI + eta - np.arctan(profile.slope(eta))


def parallel_angle_inverse(profile, theta, iters=BISECT_ITERS):
    """Preimage of theta in [pi/2, pi] under the parallel-angle map.

    Bracketing on [0, pi/2] (the map is continuous, non-decreasing on valid
    profiles and pinned to pi/2 and pi at the ends) accelerated by safeguarded
    Newton steps using tau' = (r^2 + 2 r'^2 - r r'') / (r^2 + r'^2); any step
    leaving the bracket falls back to bisection.
    """
    scalar = np.isscalar(theta) or np.ndim(theta) == 0
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    if (theta < HALF_PI - 1e-9).any() or (theta > np.pi + 1e-9).any():
        raise ProfileError("parallel-angle inverse requested outside [pi/2, pi]")
    target = np.clip(theta, HALF_PI, np.pi)

    lo = np.zeros_like(target)
    hi = np.full_like(target, HALF_PI)
    tau_tab, eta_tab = profile._angle_seed_table
    eta = np.clip(np.interp(target, tau_tab, eta_tab), 0.0, HALF_PI)
    best = eta.copy()
    best_res = np.full_like(target, np.inf)
    for _ in range(iters):
        r = profile.r(eta)
        r1 = profile.dr(eta)
        tau = HALF_PI + eta - np.arctan(r1 / r)
        resid = tau - target
        abs_res = np.abs(resid)
        improved = abs_res < best_res
        best[improved] = eta[improved]
        best_res[improved] = abs_res[improved]
        # |tau(eta) - theta| directly bounds the extension-value error, so a
        # machine-level residual is the right stopping criterion
        if best_res.max() <= 1e-14:
            break
        above = resid >= 0.0
        hi = np.where(above, np.minimum(hi, eta), hi)
        lo = np.where(above, lo, np.maximum(lo, eta))
        denom = r**2 + r1**2
        tau1 = (denom + r1**2 - r * profile.d2r(eta)) / denom
        with np.errstate(divide="ignore", invalid="ignore"):
            step = np.where(tau1 > 1e-12, resid / np.where(tau1 > 1e-12, tau1, 1.0), np.nan)
        cand = eta - step
        bad = ~np.isfinite(cand) | (cand <= lo) | (cand >= hi)
        eta = np.where(bad, 0.5 * (lo + hi), cand)

    gap = np.abs(parallel_angle(profile, best) - target)
    if (gap > 1e-9).any():
        raise ProfileError(f"parallel-angle inversion failed (max gap {float(gap.max()):g})")
    return float(best[0]) if scalar else best


@dataclass(frozen=True)
class ExtendedProfile:
    """The unique reflection extension of a first-quadrant profile to [0, pi].

    value/deriv/deriv2 are vectorized over all of R, pi-periodically.  On the
    reflected half the derivatives come from the closed forms

        rt(tau(eta))  = r* sqrt(r^2 + r'^2) / r^2,
        rt'(tau(eta)) = -r* r' sqrt(r^2 + r'^2) / r^3,

    and the second derivative from differentiating the reflection identity.
    """

    source: RadialProfile

    @property
    def r_star(self):
        return self.source.r_star

    def _split(self, theta):
        theta = np.mod(np.asarray(theta, dtype=float), np.pi)
        second = theta > HALF_PI
        return theta, second

    def _second_pieces(self, eta):
        src = self.source
        r = src.r(eta)
        r1 = src.dr(eta)
        root = np.sqrt(r**2 + r1**2)
        return r, r1, root

    def value(self, theta):
        theta, second = self._split(theta)
        out = np.empty_like(theta)
        first = ~second
        if first.any():
            out[first] = self.source.r(theta[first])
        if second.any():
            eta = parallel_angle_inverse(self.source, theta[second])
            r, _, root = self._second_pieces(eta)
            out[second] = self.r_star * root / r**2
        return out

    def deriv(self, theta):
        theta, second = self._split(theta)
        out = np.empty_like(theta)
        first = ~second
        if first.any():
            out[first] = self.source.dr(theta[first])
        if second.any():
            eta = parallel_angle_inverse(self.source, theta[second])
            r, r1, root = self._second_pieces(eta)
            out[second] = -self.r_star * r1 * root / r**3
        return out

    def _deriv2_at_eta(self, eta):
        src = self.source
        r, r1, root = self._second_pieces(eta)
        r2 = src.d2r(eta)
        rt = self.r_star * root / r**2
        rt1 = -self.r_star * r1 * root / r**3
        margin = r**2 + 2.0 * r1**2 - r * r2
        return rt1**2 / rt - rt * (r**2 + r1**2) * (r * r2 - r1**2) / (r**2 * margin)

    def deriv2(self, theta):
        theta, second = self._split(theta)
        out = np.empty_like(theta)
        first = ~second
        if first.any():
            out[first] = self.source.d2r(theta[first])
        if second.any():
            eta = parallel_angle_inverse(self.source, theta[second])
            out[second] = self._deriv2_at_eta(eta)
        return out

    def tau(self, eta):
        return parallel_angle(self.source, eta)

    def tau_inverse(self, theta):
        return parallel_angle_inverse(self.source, theta)


def extend_profile(profile, verify_grid=2048, tol=1e-6):
    """Build the reflection extension and verify it on a grid.

    Checks performed: continuity and vanishing one-sided slopes at the gluing
    angles 0, pi/2, pi; agreement of the closed-form derivative with central
    differences of the values on (pi/2, pi); and the reflection identity
    rt'(tau(eta))/rt(tau(eta)) = -r'(eta)/r(eta).
    """
    ext = ExtendedProfile(profile)

    # continuity across the gluing angles
    for glue in (HALF_PI, np.pi):
        left = float(ext.value(np.array([glue - 1e-12]))[0])
        right = float(ext.value(np.array([glue + 1e-12]))[0])
        if abs(left - right) > 1e-8 * (1.0 + abs(left)):
            raise ProfileError(f"extension discontinuous at {glue:g}: {left!r} vs {right!r}")

    # One-sided slopes vanish at 0, pi/2, pi: on both branches the analytic
    # slope at a gluing angle is proportional to r'(0) or r'(pi/2), both zero
    # by the endpoint data.  The extension may be only C^(1,alpha) there
    # (glued p-norm arcs), so a fixed-step quotient decays like h^alpha rather
    # than h; a decreasing-quotient test rules out a genuine corner.
    ends = np.array([0.0, HALF_PI])
    analytic = np.concatenate([
        profile.dr(ends),
        -ext.r_star * profile.dr(ends) * np.sqrt(profile.r(ends) ** 2 + profile.dr(ends) ** 2)
        / profile.r(ends) ** 3,
    ])
    if np.abs(analytic).max() > 1e-9:
        raise ProfileError("one-sided extension slopes do not vanish at the gluing angles")
    for glue in (0.0, HALF_PI, np.pi):
        v0 = float(ext.value(np.array([glue]))[0])
        for sgn in (-1.0, 1.0):
            h1, h2 = 1e-4, 1e-4 / 16.0
            q1 = (float(ext.value(np.array([glue + sgn * h1]))[0]) - v0) / (sgn * h1)
            q2 = (float(ext.value(np.array([glue + sgn * h2]))[0]) - v0) / (sgn * h2)
            if abs(q2) > 1e-9 and abs(q2) > 0.6 * abs(q1):
                raise ProfileError(
                    f"extension has a corner at {glue:g} "
                    f"(one-sided quotients {q1:.2e} -> {q2:.2e})"
                )

    # closed-form derivative vs central differences on the reflected half
    theta = np.linspace(HALF_PI + 1e-3, np.pi - 1e-3, verify_grid)
    fd = (ext.value(theta + 1e-6) - ext.value(theta - 1e-6)) / 2e-6
    gap = np.abs(fd - ext.deriv(theta))
    if gap.max() > tol * (1.0 + np.abs(fd).max()):
        raise ProfileError(f"extension derivative inconsistent (gap {float(gap.max()):g})")

    # reflection identity on the source half
    eta = np.linspace(0.0, HALF_PI, verify_grid)
    tau = parallel_angle(profile, eta)
    lhs = ext.deriv(np.minimum(tau, np.pi)) / ext.value(np.minimum(tau, np.pi))
    rhs = -profile.slope(eta)
    # tau(0) = pi/2 lands on the first branch where the identity is 0 = 0 anyway
    rgap = np.abs(lhs - rhs)
    if rgap.max() > 1e-8 * (1.0 + np.abs(rhs).max()):
        raise ProfileError(f"reflection identity violated (gap {float(rgap.max()):g})")

    return ext


def curvature(ext, theta):
    """Curvature of the polar graph of the extension,
    (2 rt'^2 - rt rt'' + rt^2) / (rt^2 + rt'^2)^(3/2).  Vectorized; at the
    gluing angles the left-branch second derivative is used (see
    curvature_one_sided for both limits)."""
    theta = np.asarray(theta, dtype=float)
    r = ext.value(theta)
    r1 = ext.deriv(theta)
    r2 = ext.deriv2(theta)
    return (2.0 * r1**2 - r * r2 + r**2) / (r**2 + r1**2) ** 1.5


def curvature_one_sided(ext, glue):
    """(left, right) curvature limits at a gluing angle (pi/2 or pi, mod pi)."""
    glue = float(np.mod(glue, np.pi))
    src = ext.source
    if abs(glue - HALF_PI) < 1e-12:
        r = src.r_star
        r2_left = float(src.d2r(np.array([HALF_PI]))[0])
        r2_right = float(ext._deriv2_at_eta(np.array([0.0]))[0])
    elif glue < 1e-12:
        r = 1.0
        r2_left = float(ext._deriv2_at_eta(np.array([HALF_PI]))[0])
        r2_right = float(src.d2r(np.array([0.0]))[0])
    else:
        raise ValueError("one-sided curvature is only split at multiples of pi/2")
    k = lambda r2: (r**2 - r * r2) / r**3
    return k(r2_left), k(r2_right)


def reflected_convexity_margin(ext, grid_size=2048):
    """min over (pi/2, pi) of -(rt rt'' - 2 rt'^2 - rt^2); positive iff the
    reflected half is strictly convex.  Closed form:
    rt(tau)^2 (r^2+r'^2)^2 / (r^2 (r^2 + 2 r'^2 - r r''))."""
    eta = np.linspace(1e-9, HALF_PI - 1e-9, grid_size)
    src = ext.source
    r = src.r(eta)
    r1 = src.dr(eta)
    r2 = src.d2r(eta)
    tau = parallel_angle(src, eta)
    rt = ext.value(tau)
    margin = rt**2 * (r**2 + r1**2) ** 2 / (r**2 * (r**2 + 2.0 * r1**2 - r * r2))
    return float(margin.min())


def norm_from_profile(ext, name=None):
    """The even planar anisotropy whose unit ball has radial function the
    extension: H(xi) = |xi| / rt(theta(xi))."""
    smooth = "C2" if ext.source.smoothness == "C3a" else "C1"
    return PolarNorm(
        radial=ext.value,
        radial_d1=ext.deriv,
        radial_d2=ext.deriv2,
        smoothness=smooth,
        name=name or f"constructed[{ext.source.name}]",
    )


def mirrored_profile_norm(profile, name=None):
    """Negative control: extend by the naive mirror r(pi - theta) instead of
    the reflection rule.  The resulting even norm violates the sign pairing
    unless the profile is an ellipse arc."""

    def fold(theta):
        theta = np.mod(np.asarray(theta, dtype=float), np.pi)
        return np.where(theta > HALF_PI, np.pi - theta, theta), theta > HALF_PI

    def value(theta):
        t, _ = fold(theta)
        return profile.r(t)

    def d1(theta):
        t, flip = fold(theta)
        return np.where(flip, -profile.dr(t), profile.dr(t))

    def d2(theta):
        t, _ = fold(theta)
        return profile.d2r(t)

    return PolarNorm(value, d1, d2, smoothness="C2",
                     name=name or f"mirrored[{profile.name}]")


def glued_pq_norm(p):
    """The glued p/q norm; its first-quadrant radial profile is the p-norm arc."""
    return GluedPQNorm(p)


def curvature_screen(H, angular_samples=1024):
    """Sampled strict-convexity diagnostic for a planar norm: minimum of the
    polar-graph curvature numerator 2 r'^2 + r^2 - r r'' of the unit ball,
    with derivatives by central differences in the angle."""
    theta = np.linspace(0.0, 2.0 * np.pi, angular_samples, endpoint=False)

    def radial(t):
        dirs = np.stack([np.cos(t), np.sin(t)], axis=1)
        return 1.0 / H.evaluate_many(dirs)

    h = 1e-5
    r = radial(theta)
    r1 = (radial(theta + h) - radial(theta - h)) / (2.0 * h)
    r2 = (radial(theta + h) - 2.0 * r + radial(theta - h)) / h**2
    return float((2.0 * r1**2 + r**2 - r * r2).min())


# ---------------------------------------------------------------------------
# smooth matching
# ---------------------------------------------------------------------------


def check_smooth_matching(profile, fd2_step=1e-4, fd3_step=1e-3, tol_eq=1e-8):
    """Verify the second/third-order matching of a C3a profile.

    The equations checked are
        r''(pi/2)  = -r* r''(0) / (1 - r''(0)),
        r'''(pi/2) = -r* r'''(0) / (1 - r''(0))^3,
    followed by a numerical confirmation that the extension is C^2 and C^3
    across pi/2 and pi, via one-sided difference quotients (Richardson-combined
    for the third order).
    """
    if profile.d3r is None:
        raise ProfileError("smooth matching needs a third derivative")
    r2_0 = float(profile.d2r(np.array([0.0]))[0])
    r3_0 = float(profile.d3r(np.array([0.0]))[0])
    r2_h = float(profile.d2r(np.array([HALF_PI]))[0])
    r3_h = float(profile.d3r(np.array([HALF_PI]))[0])
    denom = 1.0 - r2_0
    if denom <= 0.0:
        raise ProfileError("1 - r''(0) must be positive (convexity at the axis)")

    rstar = profile.r_star
    eq2 = abs(r2_h + rstar * r2_0 / denom)
    eq3 = abs(r3_h + rstar * r3_0 / denom**3)

    ext = ExtendedProfile(profile)

    def one_sided_d2(x, side, h):
        sgn = 1.0 if side == "right" else -1.0
        f = ext.value(np.array([x, x + sgn * h, x + 2 * sgn * h]))
        return (f[0] - 2.0 * f[1] + f[2]) / h**2

    def one_sided_d3(x, side, h):
        sgn = 1.0 if side == "right" else -1.0
        f = ext.value(np.array([x, x + sgn * h, x + 2 * sgn * h, x + 3 * sgn * h]))
        return sgn * (-f[0] + 3.0 * f[1] - 3.0 * f[2] + f[3]) / h**3

    def richardson_d3(x, side, h):
        return 2.0 * one_sided_d3(x, side, h / 2.0) - one_sided_d3(x, side, h)

    gaps2, gaps3 = {}, {}
    for label, x in (("pi/2", HALF_PI), ("pi", np.pi)):
        d2l = one_sided_d2(x, "left", fd2_step)
        d2r_ = one_sided_d2(x, "right", fd2_step)
        gaps2[label] = abs(d2l - d2r_) / (1.0 + max(abs(d2l), abs(d2r_)))
        d3l = richardson_d3(x, "left", fd3_step)
        d3r_ = richardson_d3(x, "right", fd3_step)
        gaps3[label] = abs(d3l - d3r_) / (1.0 + max(abs(d3l), abs(d3r_)))

    scale = 1.0 + abs(r2_h) + abs(r3_h)
    max_gap2 = max(gaps2.values())
    max_gap3 = max(gaps3.values())
    failed = eq2 > tol_eq * scale or eq3 > tol_eq * scale or max_gap2 > 1e-5 or max_gap3 > 1e-3
    verdict = FAIL if failed else PASS
    return ConditionReport(
        condition_id="smooth_matching",
        verdict=verdict,
        max_violation=max(eq2 / scale, eq3 / scale, max_gap2, max_gap3),
        tolerance=tol_eq,
        witness=(HALF_PI,) if failed else None,
        details={
            "eq_second_order": eq2,
            "eq_third_order": eq3,
            "fd_gap_second": gaps2,
            "fd_gap_third": gaps3,
        },
    )
