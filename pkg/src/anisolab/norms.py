"""Positive 1-homogeneous anisotropies (generalized norms) and their derivatives.

An anisotropy H is a positive 1-homogeneous function on R^n that is positive
away from the origin and extended continuously by H(0) = 0.  Concrete
families: ellipsoidal norms sqrt(<M xi, xi>), glued p/q norms on the plane,
and polar-profile norms |xi| / r(theta).  Derivatives come from closed forms
where available, with a central finite-difference fallback.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._utils import central_difference_jacobian
from .errors import DomainError, InvalidMatrixError, SingularPointError, SmoothnessError

_SMOOTHNESS_ORDER = {"C1": 1, "C2": 2, "C3": 3}

# Finite-difference step for gradients: h = GRAD_STEP * max(|xi|, 1).
GRAD_STEP = 1e-5


class AnisotropyNorm:
    """Base class: positive 1-homogeneous H with gradient/Hessian access.

    Subclasses override ``_value`` and, when closed forms exist, ``_value_many``,
    ``_grad``, ``_grad_many`` and ``_hess``.  Instances are immutable after
    construction; evaluation is pure.
    """

    def __init__(self, dimension, smoothness="C2", strictly_convex=True, name="H"):
        if dimension < 2:
            raise ValueError("anisotropies are defined for dimension >= 2")
        if smoothness not in _SMOOTHNESS_ORDER:
            raise ValueError(f"smoothness must be one of {sorted(_SMOOTHNESS_ORDER)}")
        self.dimension = int(dimension)
        self.smoothness = smoothness
        self.strictly_convex = bool(strictly_convex)
        self.name = name
        self._dual_cache = {}

    # -- hooks ---------------------------------------------------------------

    def _value(self, xi):
        raise NotImplementedError

    def _value_many(self, pts):
        return np.array([self._value(p) for p in pts])

    _grad = None  # subclasses may define _grad(self, xi) -> ndarray
    _grad_many = None  # and _grad_many(self, pts) -> ndarray
    _hess = None  # and _hess(self, xi) -> ndarray

    def closed_form_dual(self):
        """Return the dual norm when a closed form is known, else None."""
        return None

    # -- validation ----------------------------------------------------------

    def _as_point(self, xi):
        arr = np.asarray(xi, dtype=float)
        if arr.shape != (self.dimension,):
            raise DomainError(
                f"expected a vector of shape ({self.dimension},), got {arr.shape}"
            )
        if not np.all(np.isfinite(arr)):
            raise DomainError("non-finite input")
        return arr

    def _as_points(self, pts):
        arr = np.asarray(pts, dtype=float)
        if arr.ndim != 2 or arr.shape[1] != self.dimension:
            raise DomainError(f"expected (m, {self.dimension}) array, got {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise DomainError("non-finite input")
        return arr

    @property
    def smoothness_order(self):
        return _SMOOTHNESS_ORDER[self.smoothness]

    # -- public evaluation ----------------------------------------------------

    def evaluate(self, xi):
        """H(xi); exactly 0 iff xi = 0."""
        xi = self._as_point(xi)
        if not xi.any():
            return 0.0
        return float(self._value(xi))

    __call__ = evaluate

    def evaluate_many(self, pts):
        """Vectorized evaluation on an (m, n) array of points."""
        pts = self._as_points(pts)
        if pts.shape[0] == 0:
            return np.zeros(0)
        out = np.asarray(self._value_many(pts), dtype=float)
        zero = ~pts.any(axis=1)
        if zero.any():
            out = out.copy()
            out[zero] = 0.0
        return out

    def gradient(self, xi):
        """grad H(xi) for xi != 0; satisfies <grad H, xi> = H(xi)."""
        xi = self._as_point(xi)
        if not xi.any():
            raise SingularPointError("gradient of a 1-homogeneous function at 0")
        if self._grad is not None:
            return np.asarray(self._grad(xi), dtype=float)
        h = GRAD_STEP * max(float(np.linalg.norm(xi)), 1.0)
        out = np.empty(self.dimension)
        for i in range(self.dimension):
            e = np.zeros(self.dimension)
            e[i] = h
            out[i] = (self._value(xi + e) - self._value(xi - e)) / (2.0 * h)
        return out

    def gradient_many(self, pts):
        pts = self._as_points(pts)
        if self._grad_many is not None:
            return np.asarray(self._grad_many(pts), dtype=float)
        return np.array([self.gradient(p) for p in pts])

    def hessian(self, xi):
        """Hess H(xi) for xi != 0; symmetric with Hess H(xi) xi = 0."""
        xi = self._as_point(xi)
        if not xi.any():
            raise SingularPointError("Hessian of a 1-homogeneous function at 0")
        if self._hess is not None:
            return np.asarray(self._hess(xi), dtype=float)
        if self.smoothness_order < 2:
            raise SmoothnessError(
                f"{self.name} is declared {self.smoothness}; no trustworthy Hessian"
            )
        h = GRAD_STEP * max(float(np.linalg.norm(xi)), 1.0)
        if self._grad is not None:
            jac = central_difference_jacobian(self.gradient, xi, h)
            return 0.5 * (jac + jac.T)
        return self._fd_hessian_from_values(xi, h)

    def _fd_hessian_from_values(self, xi, h):
        n = self.dimension
        out = np.empty((n, n))
        f0 = self._value(xi)
        for i in range(n):
            ei = np.zeros(n)
            ei[i] = h
            out[i, i] = (self._value(xi + ei) - 2.0 * f0 + self._value(xi - ei)) / h**2
            for j in range(i + 1, n):
                ej = np.zeros(n)
                ej[j] = h
                val = (
                    self._value(xi + ei + ej)
                    - self._value(xi + ei - ej)
                    - self._value(xi - ei + ej)
                    + self._value(xi - ei - ej)
                ) / (4.0 * h**2)
                out[i, j] = out[j, i] = val
        return out

    def __repr__(self):
        return f"{type(self).__name__}(name={self.name!r}, n={self.dimension})"


class CustomNorm(AnisotropyNorm):
    """Anisotropy defined by user callables.

    ``value`` must accept a length-n vector; optional ``value_many`` a (m, n)
    array.  Gradient/Hessian callables are trusted as given.
    """

    def __init__(
        self,
        dimension,
        value,
        gradient=None,
        hessian=None,
        value_many=None,
        smoothness="C1",
        strictly_convex=False,
        name="custom",
    ):
        super().__init__(dimension, smoothness, strictly_convex, name)
        self._value_fn = value
        self._grad_fn = gradient
        self._hess_fn = hessian
        self._value_many_fn = value_many
        if gradient is not None:
            self._grad = lambda xi: self._grad_fn(xi)
        if hessian is not None:
            self._hess = lambda xi: self._hess_fn(xi)

    def _value(self, xi):
        return self._value_fn(xi)

    def _value_many(self, pts):
        if self._value_many_fn is not None:
            return self._value_many_fn(pts)
        return super()._value_many(pts)


class EllipsoidNorm(AnisotropyNorm):
    """H_M(xi) = sqrt(<M xi, xi>) for a symmetric positive-definite M."""

    def __init__(self, matrix, name=None):
        matrix = np.asarray(matrix, dtype=float)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise InvalidMatrixError(f"expected a square matrix, got shape {matrix.shape}")
        if not np.allclose(matrix, matrix.T, rtol=0, atol=1e-12 * (1 + np.abs(matrix).max())):
            raise InvalidMatrixError("matrix is not symmetric")
        eigs = np.linalg.eigvalsh(matrix)
        if eigs.min() <= 0:
            raise InvalidMatrixError(f"matrix is not positive definite (min eig {eigs.min():g})")
        super().__init__(
            matrix.shape[0],
            smoothness="C3",
            strictly_convex=True,
            name=name or "ellipsoid",
        )
        self.matrix = 0.5 * (matrix + matrix.T)
        self._eig_range = (float(eigs.min()), float(eigs.max()))

    def _value(self, xi):
        q = float(xi @ self.matrix @ xi)
        if q == 0.0 or not np.isfinite(q):
            # rescale to dodge under/overflow of the quadratic form
            scale = float(np.abs(xi).max())
            unit = xi / scale
            return scale * np.sqrt(max(float(unit @ self.matrix @ unit), 0.0))
        return np.sqrt(q)

    def _value_many(self, pts):
        q = np.einsum("ij,jk,ik->i", pts, self.matrix, pts)
        bad = (q == 0.0) | ~np.isfinite(q)
        out = np.sqrt(np.maximum(q, 0.0))
        if bad.any():
            sub = pts[bad]
            scale = np.abs(sub).max(axis=1)
            safe = np.where(scale == 0.0, 1.0, scale)  # zero rows stay zero
            unit = sub / safe[:, None]
            qs = np.einsum("ij,jk,ik->i", unit, self.matrix, unit)
            out[bad] = scale * np.sqrt(np.maximum(qs, 0.0))
        return out

    def _grad(self, xi):
        return (self.matrix @ xi) / self._value(xi)

    def _grad_many(self, pts):
        mp = pts @ self.matrix
        h = self._value_many(pts)
        return mp / h[:, None]

    def _hess(self, xi):
        h = self._value(xi)
        m_xi = self.matrix @ xi
        return self.matrix / h - np.outer(m_xi, m_xi) / h**3

    def closed_form_dual(self):
        return EllipsoidNorm(np.linalg.inv(self.matrix), name=f"{self.name}*")


def euclidean_norm(dimension=2):
    return EllipsoidNorm(np.eye(dimension), name="euclidean")


class GluedPQNorm(AnisotropyNorm):
    """Planar norm equal to the p-norm where xi1*xi2 >= 0 and to the conjugate
    q-norm (q = p/(p-1)) where xi1*xi2 < 0, for p in (2, inf).

    Both branches reduce to |xi_i| on the axes, so the norm is continuous and
    in fact C^1 there, but not C^2: the Hessian is undefined on the axes.
    """

    _AXIS_BAND = 1e-13

    def __init__(self, p):
        p = float(p)
        if not (2.0 < p < np.inf):
            raise ValueError(f"glued p/q norm requires p in (2, inf), got {p}")
        super().__init__(2, smoothness="C1", strictly_convex=True, name=f"glued_pq({p:g})")
        self.p = p
        self.q = p / (p - 1.0)

    def _exponents(self, pts):
        same_sign = pts[:, 0] * pts[:, 1] >= 0.0
        return np.where(same_sign, self.p, self.q)

    def _value(self, xi):
        e = self.p if xi[0] * xi[1] >= 0.0 else self.q
        scale = max(abs(xi[0]), abs(xi[1]))  # rescaling dodges power underflow
        return float(scale * ((abs(xi[0]) / scale) ** e + (abs(xi[1]) / scale) ** e) ** (1.0 / e))

    def _value_many(self, pts):
        e = self._exponents(pts)
        a = np.abs(pts)
        scale = a.max(axis=1)
        safe = np.where(scale == 0.0, 1.0, scale)  # zero rows stay zero
        u = a / safe[:, None]
        return scale * (u[:, 0] ** e + u[:, 1] ** e) ** (1.0 / e)

    def _grad(self, xi):
        return self._grad_many(xi[None, :])[0]

    def _grad_many(self, pts):
        e = self._exponents(pts)[:, None]
        a = np.abs(pts)
        on_axis = a.min(axis=1) == 0.0
        safe = np.where(on_axis[:, None], 1.0, a)
        v = (safe[:, 0:1] ** e + safe[:, 1:2] ** e) ** (1.0 / e)
        grad = np.sign(pts) * (safe / v) ** (e - 1.0)
        if on_axis.any():
            # C^1 limit on the axes: the gradient is the signed unit axis vector
            grad[on_axis] = np.sign(pts[on_axis]) * (a[on_axis] > 0.0)
        return grad

    def radial_value(self, theta):
        """Unit-circle radius at angle theta: (|cos|^e + |sin|^e)^(-1/e)."""
        theta = np.asarray(theta, dtype=float)
        c, s = np.cos(theta), np.sin(theta)
        e = np.where(c * s >= 0.0, self.p, self.q)
        return (np.abs(c) ** e + np.abs(s) ** e) ** (-1.0 / e)

    def _hess(self, xi):
        a0, a1 = abs(xi[0]), abs(xi[1])
        if a0 * a1 <= self._AXIS_BAND * (a0**2 + a1**2):
            raise SmoothnessError("glued p/q norm is not C^2 across the axes")
        e = self.p if xi[0] * xi[1] >= 0.0 else self.q
        v = (a0**e + a1**e) ** (1.0 / e)
        s = np.sign(xi)
        a = np.array([a0, a1])
        grad_pow = s * a ** (e - 1.0) / v ** (e - 1.0)  # = grad H
        diag = np.diag(a ** (e - 2.0)) / v ** (e - 1.0)
        return (e - 1.0) * (diag - np.outer(grad_pow, grad_pow) / v)


class PolarNorm(AnisotropyNorm):
    """Planar norm |xi| / r(theta) from a pi-periodic radial function r.

    ``radial``/``radial_d1``/``radial_d2`` are vectorized callables of the
    polar angle, defined on [0, pi) and extended pi-periodically (the norm is
    even).  The Hessian uses the polar identity
    Hess H = (2 r'^2 - r r'' + r^2) / (r^3 |xi|) * t t^T with t the unit
    tangent, valid wherever r'' exists.
    """

    def __init__(self, radial, radial_d1, radial_d2=None, smoothness="C1", name="polar"):
        super().__init__(2, smoothness=smoothness, strictly_convex=True, name=name)
        self._r = radial
        self._r1 = radial_d1
        self._r2 = radial_d2
        if radial_d2 is not None:
            self._hess = self._hess_polar

    def _angles(self, pts):
        return np.mod(np.arctan2(pts[:, 1], pts[:, 0]), np.pi)

    def _value(self, xi):
        return float(self._value_many(xi[None, :])[0])

    def _value_many(self, pts):
        theta = self._angles(pts)
        return np.hypot(pts[:, 0], pts[:, 1]) / self._r(theta)

    def _grad(self, xi):
        return self._grad_many(xi[None, :])[0]

    def _grad_many(self, pts):
        theta = self._angles(pts)
        r = self._r(theta)
        r1 = self._r1(theta)
        rho = np.hypot(pts[:, 0], pts[:, 1])
        e_rho = pts / rho[:, None]
        e_theta = np.stack([-e_rho[:, 1], e_rho[:, 0]], axis=1)
        return e_rho / r[:, None] - e_theta * (r1 / r**2)[:, None]

    def _hess_polar(self, xi):
        theta = float(self._angles(xi[None, :])[0])
        r = float(self._r(np.array([theta]))[0])
        r1 = float(self._r1(np.array([theta]))[0])
        r2 = float(self._r2(np.array([theta]))[0])
        rho = float(np.hypot(xi[0], xi[1]))
        coeff = (2.0 * r1**2 - r * r2 + r**2) / (r**3 * rho)
        e_rho = xi / rho
        t = np.array([-e_rho[1], e_rho[0]])
        return coeff * np.outer(t, t)

    def radial_value(self, theta):
        """r(theta) on the unit circle of the norm, vectorized."""
        theta = np.mod(np.asarray(theta, dtype=float), np.pi)
        return self._r(theta)


@dataclass
class NormSelfCheck:
    """Max violations of homogeneity and the Euler identities over random samples."""

    homogeneity: float
    euler_gradient: float
    euler_hessian: float | None
    euler_third: float | None
    gradient_fd_gap: float
    hessian_samples_skipped: int
    tolerance: float
    fd_tolerance: float = 1e-6

    @property
    def passed(self):
        vals = [self.homogeneity, self.euler_gradient]
        vals += [v for v in (self.euler_hessian, self.euler_third) if v is not None]
        return all(v <= self.tolerance for v in vals) and self.gradient_fd_gap <= self.fd_tolerance

    def summary(self):
        def fmt(v):
            return "n/a" if v is None else f"{v:.3e}"

        return (
            f"homogeneity {self.homogeneity:.3e} | euler-1 {self.euler_gradient:.3e} | "
            f"euler-2 {fmt(self.euler_hessian)} | euler-3 {fmt(self.euler_third)} | "
            f"fd-gap {self.gradient_fd_gap:.3e} | "
            f"{'pass' if self.passed else 'FAIL'} at {self.tolerance:.1e}"
        )


def check_homogeneity_and_euler(H, sample_count=1000, rng=None, tol=1e-8):
    """Sampled self-check of 1-homogeneity and the Euler identities.

    Checks H(t xi) = t H(xi) for random scalings, <grad H(xi), xi> = H(xi),
    Hess H(xi) xi = 0 (when a Hessian is available), the radial derivative
    identity of the Hessian for C3 norms, and agreement of any analytic
    gradient with central differences at unit scale.  Degenerate inputs
    produce a failing report, never an exception.
    """
    rng = np.random.default_rng(rng) if not isinstance(rng, np.random.Generator) else rng
    if sample_count < 1:
        raise ValueError("sample_count must be >= 1")
    from ._utils import unit_directions

    dirs = unit_directions(rng, sample_count, H.dimension)
    ts = np.exp(rng.uniform(np.log(0.1), np.log(10.0), size=sample_count))

    hom = 0.0
    e1 = 0.0
    fd_gap = 0.0
    e2_vals = []
    e3_vals = []
    skipped = 0

    for xi, t in zip(dirs, ts):
        h1 = H.evaluate(xi)
        ht = H.evaluate(t * xi)
        hom = max(hom, abs(ht - t * h1) / (1.0 + t * h1))

        g = H.gradient(xi)
        e1 = max(e1, abs(float(g @ xi) - h1))

        if H._grad is not None:
            step = GRAD_STEP
            # skip stencils straddling a kink (C1-only norms): a large second
            # difference of the analytic gradient betrays one
            bend = max(
                float(np.abs(H.gradient(xi + step * e) + H.gradient(xi - step * e)
                             - 2.0 * g).max())
                for e in np.eye(H.dimension)
            )
            smooth = bend <= 1e-6 * (1.0 + np.abs(g).max())
            if smooth:
                fd = np.array(
                    [
                        (H.evaluate(xi + step * e) - H.evaluate(xi - step * e)) / (2 * step)
                        for e in np.eye(H.dimension)
                    ]
                )
                denom = max(float(np.linalg.norm(g)), 1e-30)
                fd_gap = max(fd_gap, float(np.linalg.norm(fd - g)) / denom)

        try:
            hess = H.hessian(xi)
        except SmoothnessError:
            skipped += 1
            continue
        e2_vals.append(float(np.abs(hess @ xi).max()))
        if H.smoothness_order >= 3:
            # radial derivative of the Hessian must equal -Hess (degree -1 homogeneity)
            d = 1e-5
            dh = (H.hessian((1.0 + d) * xi) - H.hessian((1.0 - d) * xi)) / (2.0 * d)
            e3_vals.append(float(np.abs(dh + hess).max()))

    return NormSelfCheck(
        homogeneity=hom,
        euler_gradient=e1,
        euler_hessian=max(e2_vals) if e2_vals else None,
        euler_third=max(e3_vals) if e3_vals else None,
        gradient_fd_gap=fd_gap,
        hessian_samples_skipped=skipped,
        tolerance=tol,
    )
