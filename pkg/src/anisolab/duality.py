"""Dual anisotropies, polarity identities, and the duality map.

The dual of H is H*(x) = sup over unit xi of <x, xi> / H(xi).  Ellipsoidal
norms have the closed form dual sqrt(<M^-1 x, x>); everything else is
maximized numerically: in the plane a dense angular scan followed by
golden-section refinement, in higher dimensions multi-start ascent.
The duality map xi -> H(xi) grad H(xi) (the gradient of H^2/2) is a global
homeomorphism whose inverse is the duality map of H*.
"""

from __future__ import annotations

import numpy as np

from ._utils import golden_max_batch, sample_points, unit_directions
from .errors import ConvergenceError, InvalidMatrixError
from .norms import AnisotropyNorm, EllipsoidNorm
from .report import FAIL, PASS, ConditionReport

SCAN_ANGLES = 4096
REFINE_CANDIDATES = 3
GOLDEN_ITERS = 50  # shrinks the 2*2pi/4096 bracket well below 1e-12
# numeric dual values are accurate to machine precision near the maximizer,
# so a much smaller step than the generic fallback is safe; it also keeps the
# error small where the dual itself has curvature kinks (glued-norm duals)
DUAL_GRAD_STEP = 1e-7
ASCENT_RESTARTS = 32


class DualNorm(AnisotropyNorm):
    """The dual H* of an anisotropy, as an anisotropy itself.

    ``strategy`` is "closed_form" (delegates to the primal's closed-form dual)
    or "numeric_sup" (maximizes <x, xi>/H(xi) over directions).
    """

    def __init__(self, primal, strategy=None, scan_angles=SCAN_ANGLES):
        closed = primal.closed_form_dual()
        if strategy is None:
            strategy = "closed_form" if closed is not None else "numeric_sup"
        if strategy == "closed_form" and closed is None:
            raise ValueError(f"{primal.name} has no closed-form dual")
        if strategy not in ("closed_form", "numeric_sup"):
            raise ValueError(f"unknown dual strategy {strategy!r}")
        smooth = "C2" if (primal.smoothness_order >= 2 and primal.strictly_convex) else "C1"
        super().__init__(
            primal.dimension,
            smoothness=smooth,
            strictly_convex=primal.strictly_convex,
            name=f"{primal.name}*",
        )
        self.primal = primal
        self.strategy = strategy
        self._closed = closed if strategy == "closed_form" else None
        if self.strategy == "numeric_sup" and self.dimension == 2:
            thetas = 2.0 * np.pi * np.arange(scan_angles) / scan_angles
            dirs = np.stack([np.cos(thetas), np.sin(thetas)], axis=1)
            self._scan_weights = dirs / primal.evaluate_many(dirs)[:, None]

    # -- evaluation ------------------------------------------------------------

    def _value(self, xi):
        return float(self._value_many(xi[None, :])[0])

    def _value_many(self, pts):
        if self._closed is not None:
            return self._closed.evaluate_many(pts)
        if self.dimension == 2:
            chunk = 2048
            if pts.shape[0] <= chunk:
                return self._numeric_many_2d(pts)
            out = np.empty(pts.shape[0])
            for k in range(0, pts.shape[0], chunk):
                out[k : k + chunk] = self._numeric_many_2d(pts[k : k + chunk])
            return out
        return np.array([self._numeric_nd(p) for p in pts])

    def _grad(self, xi):
        if self._closed is not None:
            return self._closed.gradient(xi)
        return self._grad_many(xi[None, :])[0]

    def _grad_many(self, pts):
        if self._closed is not None:
            return self._closed.gradient_many(pts)
        h = DUAL_GRAD_STEP * np.maximum(np.linalg.norm(pts, axis=1), 1.0)
        m, n = pts.shape
        shifted = np.repeat(pts, 2 * n, axis=0)
        for i in range(n):
            shifted[2 * i :: 2 * n, i] += h
            shifted[2 * i + 1 :: 2 * n, i] -= h
        vals = self.evaluate_many(shifted).reshape(m, 2 * n)
        grad = np.empty((m, n))
        for i in range(n):
            grad[:, i] = (vals[:, 2 * i] - vals[:, 2 * i + 1]) / (2.0 * h)
        return grad

    def hessian(self, xi):
        if self._closed is not None:
            return self._closed.hessian(xi)
        return super().hessian(xi)  # finite differences of the numeric gradient

    # -- numeric maximization ----------------------------------------------------

    def _numeric_many_2d(self, pts):
        scores = pts @ self._scan_weights.T  # (m, K)
        m, K = scores.shape
        is_peak = np.empty(scores.shape, dtype=bool)
        is_peak[:, 1:-1] = (scores[:, 1:-1] >= scores[:, :-2]) & (
            scores[:, 1:-1] >= scores[:, 2:]
        )
        is_peak[:, 0] = (scores[:, 0] >= scores[:, -1]) & (scores[:, 0] >= scores[:, 1])
        is_peak[:, -1] = (scores[:, -1] >= scores[:, -2]) & (scores[:, -1] >= scores[:, 0])
        work = np.where(is_peak, scores, -np.inf)
        row_idx = np.arange(m)
        order = np.empty((m, REFINE_CANDIDATES), dtype=int)
        for c in range(REFINE_CANDIDATES):
            order[:, c] = np.argmax(work, axis=1)
            work[row_idx, order[:, c]] = -np.inf
        centers = 2.0 * np.pi * order / K
        delta = 2.0 * np.pi / K

        m = pts.shape[0]
        rows = np.repeat(np.arange(m), REFINE_CANDIDATES)
        x_rep = pts[rows]

        radial = getattr(self.primal, "radial_value", None)
        if radial is not None:
            # H(e(theta)) = 1 / r(theta) for polar-profile norms
            def objective(thetas):
                proj = x_rep[:, 0] * np.cos(thetas) + x_rep[:, 1] * np.sin(thetas)
                return proj * radial(thetas)

        else:

            def objective(thetas):
                dirs = np.stack([np.cos(thetas), np.sin(thetas)], axis=1)
                hv = self.primal.evaluate_many(dirs)
                return np.sum(x_rep * dirs, axis=1) / hv

        lo = centers.ravel() - delta
        hi = centers.ravel() + delta
        _, refined = golden_max_batch(objective, lo, hi, iters=GOLDEN_ITERS)
        best = refined.reshape(m, REFINE_CANDIDATES).max(axis=1)
        return np.maximum(best, scores.max(axis=1))

    def _numeric_nd(self, x):
        from scipy.optimize import minimize

        rng = np.random.default_rng(12345)
        starts = unit_directions(rng, ASCENT_RESTARTS, self.dimension)
        nx = np.linalg.norm(x)
        if nx > 0:
            starts[0] = x / nx

        def neg(v):
            nv = np.linalg.norm(v)
            if nv < 1e-12:
                return 0.0
            return -float(x @ v) / self.primal.evaluate(v)

        best = -np.inf
        ok = False
        for s in starts:
            res = minimize(neg, s, method="Nelder-Mead", options={"xatol": 1e-12, "fatol": 1e-14, "maxiter": 2000})
            ok = ok or res.success
            best = max(best, -res.fun)
        if not ok:
            raise ConvergenceError("sphere ascent did not converge", best=best)
        return best


def dual_norm(H, strategy=None):
    """The dual anisotropy of H, cached per strategy on the primal."""
    key = strategy or "auto"
    if key not in H._dual_cache:
        H._dual_cache[key] = DualNorm(H, strategy=strategy)
    return H._dual_cache[key]


def dual_evaluate(H, x, strategy=None):
    """H*(x); 0 iff x = 0."""
    return dual_norm(H, strategy).evaluate(x)


def dual_evaluate_many(H, pts, strategy=None):
    return dual_norm(H, strategy).evaluate_many(pts)


def ellipsoid_dual(M):
    """Dual of sqrt(<M xi, xi>) as the ellipsoidal norm of the inverse matrix."""
    M = np.asarray(M, dtype=float)
    try:
        return EllipsoidNorm(M).closed_form_dual()
    except InvalidMatrixError:
        raise
    except np.linalg.LinAlgError as exc:  # pragma: no cover - SPD check precedes
        raise InvalidMatrixError(str(exc)) from exc


def duality_map(H, xi):
    """H(xi) grad H(xi), extended by 0 at the origin."""
    xi = np.asarray(xi, dtype=float)
    if not xi.any():
        return np.zeros(H.dimension)
    return H.evaluate(xi) * H.gradient(xi)


def duality_map_many(H, pts):
    pts = np.asarray(pts, dtype=float)
    out = np.zeros_like(pts)
    nz = pts.any(axis=1)
    if nz.any():
        sub = pts[nz]
        out[nz] = H.evaluate_many(sub)[:, None] * H.gradient_many(sub)
    return out


def duality_map_inverse(H, y):
    """Inverse of the duality map of H, namely the duality map of H*."""
    return duality_map(dual_norm(H), y)


def duality_map_inverse_many(H, pts):
    return duality_map_many(dual_norm(H), pts)


def check_polarity(H, sample_count=1000, rng=None, tol=1e-6):
    """Sampled check of the polarity identities H*(grad H(xi)) = H(grad H*(xi)) = 1."""
    rng = np.random.default_rng(rng) if not isinstance(rng, np.random.Generator) else rng
    if sample_count < 1:
        raise ValueError("sample_count must be >= 1")
    Hd = dual_norm(H)
    pts = sample_points(rng, sample_count, H.dimension)

    grads = H.gradient_many(pts)
    v1 = np.abs(Hd.evaluate_many(grads) - 1.0)
    dual_grads = Hd.gradient_many(pts)
    v2 = np.abs(H.evaluate_many(dual_grads) - 1.0)

    worst = max(float(v1.max()), float(v2.max()))
    idx = int(np.argmax(v1)) if v1.max() >= v2.max() else int(np.argmax(v2))
    verdict = PASS if worst <= tol else FAIL
    return ConditionReport(
        condition_id="polarity",
        verdict=verdict,
        max_violation=worst,
        tolerance=tol,
        witness=tuple(pts[idx]) if verdict == FAIL else None,
        details={
            "max |H*(grad H)-1|": float(v1.max()),
            "max |H(grad H*)-1|": float(v2.max()),
        },
    )
