"""Dirichlet problems for anisotropic, possibly degenerate energies on 2-D grids.

The discrete energy is sum over cells of [B_eps(H(grad u)) - F(u)] h^2 with
cell-centered values, forward-difference gradients and the boundary ring of
cells pinned to the trace.  Minimization is continued down a ladder of
smoothing levels eps with warm starts; the default inner minimizer is
L-BFGS-B on the interior values, with a plain gradient-descent/backtracking
alternative.  On top of the solver sit the Wulff-ball energy diagnostics: the
rescaled energy E(R) = R^(1-n) * integral over {H* < R} of B(H(grad u)) + G(u)
(n = 2), its monotonicity check, the pointwise kinetic/potential bound, and
the mass-growth test behind the Liouville-type rigidity statement.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .conditions import BFunction, coercivity_margin
from .duality import dual_norm
from .errors import AdmissibilityError, ConvergenceError, InconsistencyError
from .regularization import EPS_LADDER, regularize
from .report import FAIL, PASS, ConditionReport

DEGENERATE_GRADIENT = 1e-12  # below this |grad u| the flux is set to zero


# ---------------------------------------------------------------------------
# problem data
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Potential:
    """Forcing potential F with derivatives, vectorized."""

    value: Callable
    d1: Callable
    d2: Callable | None = None
    name: str = "F"

    def __call__(self, t):
        return self.value(t)


def zero_potential():
    zero = lambda t: np.zeros_like(np.asarray(t, dtype=float))
    return Potential(zero, zero, zero, name="zero")


def double_well(a=1.0):
    """F(t) = -(a^2 - t^2)^2 / 4, the symmetric double well with wells at +-a."""
    a = float(a)

    def value(t):
        t = np.asarray(t, dtype=float)
        return -((a**2 - t**2) ** 2) / 4.0

    def d1(t):
        t = np.asarray(t, dtype=float)
        return t * (a**2 - t**2)

    def d2(t):
        t = np.asarray(t, dtype=float)
        return a**2 - 3.0 * t**2

    return Potential(value, d1, d2, name=f"double_well({a:g})")


def poly_potential(coeffs):
    """F(t) = sum_k coeffs[k] t^k."""
    c = np.asarray(coeffs, dtype=float)
    d1c = c[1:] * np.arange(1, c.size)
    d2c = d1c[1:] * np.arange(1, d1c.size) if d1c.size > 1 else np.zeros(1)

    def horner(cs):
        def f(t):
            t = np.asarray(t, dtype=float)
            out = np.zeros_like(t)
            for coef in cs[::-1]:
                out = out * t + coef
            return out

        return f

    return Potential(horner(c), horner(d1c), horner(d2c), name="poly")


@dataclass(frozen=True)
class Rectangle:
    xmin: float
    xmax: float
    ymin: float
    ymax: float

    @property
    def center(self):
        return np.array([0.5 * (self.xmin + self.xmax), 0.5 * (self.ymin + self.ymax)])


def centered_box(half_width):
    s = float(half_width)
    return Rectangle(-s, s, -s, s)


@dataclass(frozen=True)
class ProblemSpec:
    """Anisotropy, nonlinearity, potential, domain, grid, trace, smoothing ladder."""

    norm: object
    b: BFunction
    f: Potential
    domain: Rectangle
    grid: tuple
    trace: Callable  # trace(x, y), vectorized; evaluated on the boundary ring
    eps_ladder: tuple = EPS_LADDER

    def __post_init__(self):
        nx, ny = self.grid
        if nx < 4 or ny < 4:
            raise ValueError("grid must be at least 4x4 cells")
        hx = (self.domain.xmax - self.domain.xmin) / nx
        hy = (self.domain.ymax - self.domain.ymin) / ny
        if abs(hx - hy) > 1e-12 * max(hx, hy):
            raise ValueError(f"cells must be square, got hx={hx!r}, hy={hy!r}")
        if self.norm.dimension != 2:
            raise ValueError("grid solver is two-dimensional")
        if any(not (0.0 < e < 1.0) for e in self.eps_ladder):
            raise ValueError("smoothing levels must lie in (0, 1)")

    @property
    def h(self):
        return (self.domain.xmax - self.domain.xmin) / self.grid[0]

    def cell_centers(self):
        nx, ny = self.grid
        h = self.h
        xs = self.domain.xmin + (np.arange(nx) + 0.5) * h
        ys = self.domain.ymin + (np.arange(ny) + 0.5) * h
        return xs, ys


@dataclass
class SolveInfo:
    energy: float
    residual_l2: float
    residual_target: float
    iterations: int
    eps_final: float
    converged: bool
    stage_energies: list = field(default_factory=list)


@dataclass
class GridField:
    """Cell-centered scalar field with a pinned Dirichlet ring."""

    values: np.ndarray
    h: float
    origin: tuple  # (xmin, ymin)
    info: SolveInfo | None = None

    @property
    def grid(self):
        return self.values.shape

    def cell_centers(self):
        nx, ny = self.values.shape
        xs = self.origin[0] + (np.arange(nx) + 0.5) * self.h
        ys = self.origin[1] + (np.arange(ny) + 0.5) * self.h
        return xs, ys

    @property
    def u_upper(self):
        return float(self.values.max())

    @property
    def u_lower(self):
        return float(self.values.min())

    @property
    def oscillation(self):
        return self.u_upper - self.u_lower

    def cell_gradients(self):
        """Forward-difference gradient per cell, shape (nx-1, ny-1, 2)."""
        u = self.values
        gx = (u[1:, :] - u[:-1, :]) / self.h
        gy = (u[:, 1:] - u[:, :-1]) / self.h
        return np.stack([gx[:, :-1], gy[:-1, :]], axis=-1)

    def save_text(self, path):
        nx, ny = self.values.shape
        with open(path, "w") as fh:
            fh.write(f"{nx} {ny} {self.h!r} {self.origin[0]!r} {self.origin[1]!r}\n")
            np.savetxt(fh, self.values, fmt="%.17g")

    @classmethod
    def load_text(cls, path):
        with open(path) as fh:
            header = fh.readline().split()
            nx, ny = int(header[0]), int(header[1])
            h, x0, y0 = float(header[2]), float(header[3]), float(header[4])
            values = np.loadtxt(fh).reshape(nx, ny)
        return cls(values=values, h=h, origin=(x0, y0))


# ---------------------------------------------------------------------------
# traces and initialization
# ---------------------------------------------------------------------------


def constant_trace(a):
    return lambda x, y: np.full(np.broadcast(x, y).shape, float(a))


def affine_trace(vx, vy, c=0.0):
    return lambda x, y: vx * np.asarray(x, dtype=float) + vy * np.asarray(y, dtype=float) + c


def tanh_interface_trace(width):
    """One-dimensional transition profile tanh(x / width) as boundary data."""
    w = float(width)
    return lambda x, y: np.tanh(np.asarray(x, dtype=float) / w) * np.ones_like(np.asarray(y, dtype=float))


def _trace_on_grid(spec):
    xs, ys = spec.cell_centers()
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    return np.asarray(spec.trace(X, Y), dtype=float)


def _coons_init(spec):
    """Transfinite (Coons) interpolation of the boundary-ring values.

    Reproduces any boundary data of the form f(x) + g(y) exactly, so constant,
    affine, and one-dimensional interface traces start at their exact
    interior extension.
    """
    tr = _trace_on_grid(spec)
    nx, ny = tr.shape
    u = np.array(tr)
    s = np.linspace(0.0, 1.0, nx)[:, None]
    t = np.linspace(0.0, 1.0, ny)[None, :]
    bottom, top = tr[:, 0][:, None], tr[:, -1][:, None]
    left, right = tr[0, :][None, :], tr[-1, :][None, :]
    blend = (
        (1 - t) * bottom
        + t * top
        + (1 - s) * left
        + s * right
        - (1 - s) * (1 - t) * tr[0, 0]
        - (1 - s) * t * tr[0, -1]
        - s * (1 - t) * tr[-1, 0]
        - s * t * tr[-1, -1]
    )
    u[1:-1, 1:-1] = blend[1:-1, 1:-1]
    u[0, :], u[-1, :], u[:, 0], u[:, -1] = tr[0, :], tr[-1, :], tr[:, 0], tr[:, -1]
    return u


# ---------------------------------------------------------------------------
# discrete energy
# ---------------------------------------------------------------------------


def _flux(norm, b_fun, grads):
    """B'(H(g)) grad H(g) per cell, with zero flux below the degeneracy cutoff."""
    shape = grads.shape[:2]
    pts = grads.reshape(-1, 2)
    mag = np.linalg.norm(pts, axis=1)
    active = mag >= DEGENERATE_GRADIENT
    flux = np.zeros_like(pts)
    if active.any():
        sub = pts[active]
        hv = norm.evaluate_many(sub)
        flux[active] = np.asarray(b_fun.d1(hv))[:, None] * norm.gradient_many(sub)
    return flux.reshape(*shape, 2)


def _energy_and_grad(spec, b_fun, u):
    """Discrete energy and its gradient with respect to the interior values."""
    h = spec.h
    gx = (u[1:, :] - u[:-1, :]) / h
    gy = (u[:, 1:] - u[:, :-1]) / h
    grads = np.stack([gx[:, :-1], gy[:-1, :]], axis=-1)

    pts = grads.reshape(-1, 2)
    mag = np.linalg.norm(pts, axis=1)
    hv = np.zeros_like(mag)
    active = mag >= DEGENERATE_GRADIENT
    if active.any():
        hv[active] = spec.norm.evaluate_many(pts[active])
    energy = float(np.sum(b_fun.value(hv))) * h**2 - float(np.sum(spec.f.value(u))) * h**2

    flux = _flux(spec.norm, b_fun, grads)
    px, py = flux[..., 0], flux[..., 1]
    # adj[k,l] = Px[k-1,l] - Px[k,l] + Py[k,l-1] - Py[k,l]  (out of range = 0),
    # so that dE/du_kl = h * adj[k,l] - h^2 F'(u_kl); adj is -h times the
    # backward divergence of the flux.
    adj = np.zeros_like(u)
    adj[: px.shape[0], : px.shape[1]] -= px
    adj[1 : px.shape[0] + 1, : px.shape[1]] += px
    adj[: py.shape[0], : py.shape[1]] -= py
    adj[: py.shape[0], 1 : py.shape[1] + 1] += py
    grad_full = h * adj - h**2 * np.asarray(spec.f.d1(u))
    return energy, grad_full[1:-1, 1:-1]


def residual_field(spec, field, b_fun=None):
    """Pointwise residual div(B'(H(grad u)) grad H(grad u)) + F'(u) at interior cells."""
    b_fun = b_fun or spec.b
    u = field.values
    h = field.h
    _, grad_int = _energy_and_grad(spec, b_fun, u)
    return -grad_int / h**2


def residual(spec, field, b_fun=None):
    """Discrete L2 norm of the weak-form residual over the interior cells."""
    r = residual_field(spec, field, b_fun)
    return float(np.sqrt(np.sum(r**2) * field.h**2))


# ---------------------------------------------------------------------------
# solver
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SolveOptions:
    method: str = "lbfgs"  # "lbfgs" | "gd"
    residual_rtol: float = 1e-6  # target: ||r||_L2 <= rtol * (1 + |E|)
    max_iter: int = 100000  # per smoothing stage
    armijo: float = 1e-4
    min_step: float = 1e-16
    descent_slack: float = 1e-10


def solve_dirichlet(spec, options=None):
    """Minimize the discrete energy down the smoothing ladder with warm starts.

    Returns the field at the final smoothing level with SolveInfo attached.
    Raises ConvergenceError (carrying the last iterate) if the iteration or
    line-search budget runs out before the residual target is met.
    """
    options = options or SolveOptions()
    u = _coons_init(spec)
    ladder = sorted(spec.eps_ladder, reverse=True)
    stage_energies = []
    total_iters = 0

    for k, eps in enumerate(ladder):
        b_eps = regularize(spec.b, eps)
        final = k == len(ladder) - 1
        u, iters, energies = _minimize_stage(spec, b_eps, u, options, final)
        total_iters += iters
        stage_energies.append(energies)

    b_final = regularize(spec.b, ladder[-1])
    field = GridField(values=u, h=spec.h, origin=(spec.domain.xmin, spec.domain.ymin))
    energy, _ = _energy_and_grad(spec, b_final, u)
    res = residual(spec, field, b_final)
    target = options.residual_rtol * (1.0 + abs(energy))
    field.info = SolveInfo(
        energy=energy,
        residual_l2=res,
        residual_target=target,
        iterations=total_iters,
        eps_final=ladder[-1],
        converged=res <= target,
        stage_energies=stage_energies,
    )
    if not field.info.converged:
        raise ConvergenceError(
            f"solver residual {res:g} above target {target:g}", best=field, residual=res
        )
    return field


def _assert_descent(energies, slack):
    arr = np.asarray(energies)
    if arr.size < 2:
        return
    rises = np.diff(arr) - slack * (1.0 + np.abs(arr[:-1]))
    if (rises > 0).any():
        k = int(np.argmax(rises > 0))
        raise InconsistencyError(
            f"energy rose at iteration {k + 1}: {arr[k]!r} -> {arr[k + 1]!r}"
        )


def _minimize_stage(spec, b_eps, u0, options, final):
    if options.method == "gd":
        return _minimize_gd(spec, b_eps, u0, options, final)
    return _minimize_lbfgs(spec, b_eps, u0, options, final)


def _stage_target(spec, b_eps, u, options):
    energy, _ = _energy_and_grad(spec, b_eps, u)
    return options.residual_rtol * (1.0 + abs(energy))


def _minimize_lbfgs(spec, b_eps, u0, options, final):
    from scipy.optimize import minimize

    u = np.array(u0)
    shape_int = (u.shape[0] - 2, u.shape[1] - 2)
    template = np.array(u)

    def fg(z):
        template[1:-1, 1:-1] = z.reshape(shape_int)
        e, g = _energy_and_grad(spec, b_eps, template)
        return e, g.ravel()

    energies = []

    def track(zk):
        template[1:-1, 1:-1] = zk.reshape(shape_int)
        e, _ = _energy_and_grad(spec, b_eps, template)
        energies.append(e)

    z = u[1:-1, 1:-1].ravel().copy()
    e0, _ = fg(z)
    energies.append(e0)
    # residual target and the matching projected-gradient tolerance:
    # ||r||_L2 = ||grad E||_2 / h <= sqrt(N) * pgtol / h
    target = options.residual_rtol * (1.0 + abs(e0))
    n_int = z.size
    pgtol = target * spec.h / np.sqrt(n_int)
    budget = options.max_iter
    iterations = 0

    # a stage that is not final only needs a warm start; cap its effort
    stage_budget = budget if final else max(200, budget // 20)

    while True:
        res = minimize(
            fg,
            z,
            jac=True,
            method="L-BFGS-B",
            callback=track,
            options={
                "maxiter": stage_budget - iterations,
                "maxfun": 4 * (stage_budget - iterations),
                "ftol": 1e-18,
                "gtol": pgtol,
                "maxcor": 20,
            },
        )
        z = res.x
        iterations += res.nit
        template[1:-1, 1:-1] = z.reshape(shape_int)
        e, g = _energy_and_grad(spec, b_eps, template)
        r_l2 = float(np.sqrt(np.sum((g / spec.h**2) ** 2) * spec.h**2))
        target = options.residual_rtol * (1.0 + abs(e))
        if r_l2 <= target or not final:
            break
        if iterations >= stage_budget:
            field = GridField(values=template.copy(), h=spec.h,
                              origin=(spec.domain.xmin, spec.domain.ymin))
            raise ConvergenceError(
                f"iteration budget exhausted (residual {r_l2:g}, target {target:g})",
                best=field,
                residual=r_l2,
            )
        pgtol /= 10.0

    _assert_descent(energies, options.descent_slack)
    out = np.array(u0)
    out[1:-1, 1:-1] = z.reshape(shape_int)
    return out, iterations, energies


def _minimize_gd(spec, b_eps, u0, options, final):
    """Plain gradient descent with Armijo backtracking (halving)."""
    u = np.array(u0)
    e, g = _energy_and_grad(spec, b_eps, u)
    energies = [e]
    step = 1.0
    target = options.residual_rtol * (1.0 + abs(e))
    gnorm_target = target * spec.h  # ||grad E||_2 = h ||r||_L2

    for it in range(options.max_iter):
        gnorm = float(np.linalg.norm(g))
        if gnorm <= gnorm_target:
            _assert_descent(energies, options.descent_slack)
            return u, it, energies
        step *= 2.0
        decrease = options.armijo * gnorm**2
        while True:
            trial = np.array(u)
            trial[1:-1, 1:-1] -= step * g
            e_trial, g_trial = _energy_and_grad(spec, b_eps, trial)
            if e_trial <= e - step * decrease:
                break
            step *= 0.5
            if step < options.min_step:
                field = GridField(values=u, h=spec.h,
                                  origin=(spec.domain.xmin, spec.domain.ymin))
                raise ConvergenceError(
                    "line search failed (step underflow)", best=field,
                    residual=gnorm / spec.h,
                )
        u, e, g = trial, e_trial, g_trial
        energies.append(e)
        target = options.residual_rtol * (1.0 + abs(e))
        gnorm_target = target * spec.h

    field = GridField(values=u, h=spec.h, origin=(spec.domain.xmin, spec.domain.ymin))
    raise ConvergenceError(
        f"iteration budget exhausted (|grad| {float(np.linalg.norm(g)):g})",
        best=field,
        residual=float(np.linalg.norm(g)) / spec.h,
    )


# ---------------------------------------------------------------------------
# Wulff-ball energies
# ---------------------------------------------------------------------------


def in_wulff_ball(H, R, x, center=(0.0, 0.0)):
    """Strict membership H*(x - center) < R."""
    if R <= 0:
        raise ValueError("requires R > 0")
    x = np.asarray(x, dtype=float) - np.asarray(center, dtype=float)
    return bool(dual_norm(H).evaluate(x) < R)


def wulff_mask(H, R, field, center):
    xs, ys = field.cell_centers()
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    pts = np.stack([X.ravel() - center[0], Y.ravel() - center[1]], axis=1)
    vals = dual_norm(H).evaluate_many(pts).reshape(X.shape)
    return vals < R


def gauge(F, field, grid_points=4097):
    """c_u = sup of F over [min u, max u], by grid plus bounded local refinement."""
    from scipy.optimize import minimize_scalar

    lo, hi = field.u_lower, field.u_upper
    if hi - lo < 1e-300:
        return float(F.value(np.array([lo]))[0])
    t = np.linspace(lo, hi, grid_points)
    vals = np.asarray(F.value(t))
    k = int(np.argmax(vals))
    best = float(vals[k])
    a = t[max(k - 1, 0)]
    b = t[min(k + 1, grid_points - 1)]
    if b > a:
        res = minimize_scalar(lambda s: -float(F.value(np.array([s]))[0]),
                              bounds=(a, b), method="bounded",
                              options={"xatol": 1e-12})
        best = max(best, -float(res.fun))
    return best


@dataclass
class EnergyTrace:
    """Sampled rescaled energies and potential masses over Wulff radii."""

    radii: np.ndarray
    energies: np.ndarray
    masses: np.ndarray
    center: tuple
    oscillation: float
    gauge_value: float

    def __post_init__(self):
        r = np.asarray(self.radii, dtype=float)
        if (np.diff(r) <= 0).any():
            raise ValueError("radii must be strictly increasing")
        if (np.asarray(self.energies) < -1e-12).any():
            raise ValueError("rescaled energies must be non-negative")


def _wulff_cell_values(spec, field, c_u):
    """Integrand B(H(grad u)) + G(u) on the gradient-carrying cell lattice."""
    grads = field.cell_gradients()
    pts = grads.reshape(-1, 2)
    mag = np.linalg.norm(pts, axis=1)
    hv = np.zeros_like(mag)
    active = mag >= DEGENERATE_GRADIENT
    if active.any():
        hv[active] = spec.norm.evaluate_many(pts[active])
    kinetic = np.asarray(spec.b.value(hv)).reshape(grads.shape[:2])
    u_cells = field.values[:-1, :-1]
    potential = c_u - np.asarray(spec.f.value(u_cells))
    return kinetic, potential


def rescaled_energy(spec, field, R, center=None, c_u=None):
    """E(R) = R^(1-n) * sum over cells with H*(x - center) < R of
    [B(H(grad u)) + G(u)] h^2, with n = 2."""
    center = spec.domain.center if center is None else np.asarray(center, dtype=float)
    c_u = gauge(spec.f, field) if c_u is None else c_u
    mask = wulff_mask(spec.norm, R, field, center)
    nx, ny = mask.shape
    ring = np.zeros_like(mask)
    ring[:2, :] = ring[-2:, :] = ring[:, :2] = ring[:, -2:] = True
    if (mask & ring).any():
        raise AdmissibilityError(
            f"Wulff ball of radius {R:g} reaches within 2h of the domain boundary"
        )
    kinetic, potential = _wulff_cell_values(spec, field, c_u)
    m = mask[:-1, :-1]
    total = float((kinetic[m] + potential[m]).sum()) * field.h**2
    return total / R


def energy_trace(spec, field, radii, center=None):
    """EnergyTrace of E(R) and the masses integral of G(u) over the Wulff balls."""
    center = spec.domain.center if center is None else np.asarray(center, dtype=float)
    radii = np.asarray(radii, dtype=float)
    c_u = gauge(spec.f, field)
    kinetic, potential = _wulff_cell_values(spec, field, c_u)
    energies, masses = [], []
    for R in radii:
        mask = wulff_mask(spec.norm, R, field, center)
        ring = np.zeros_like(mask)
        ring[:2, :] = ring[-2:, :] = ring[:, :2] = ring[:, -2:] = True
        if (mask & ring).any():
            raise AdmissibilityError(f"Wulff ball of radius {R:g} exits the domain interior")
        m = mask[:-1, :-1]
        energies.append(float((kinetic[m] + potential[m]).sum()) * field.h**2 / R)
        masses.append(float(potential[m].sum()) * field.h**2)
    return EnergyTrace(
        radii=radii,
        energies=np.asarray(energies),
        masses=np.asarray(masses),
        center=tuple(np.asarray(center, dtype=float)),
        oscillation=field.oscillation,
        gauge_value=c_u,
    )


def check_monotonicity(trace, tol):
    """Non-decrease of E(R) within tolerance: E_{k+1} - E_k >= -tol (1 + E_k)."""
    e = np.asarray(trace.energies)
    if e.size < 3:
        raise ValueError("monotonicity check needs at least 3 radii")
    drops = -(np.diff(e)) - tol * (1.0 + e[:-1])
    worst = int(np.argmax(drops))
    max_drop = float(drops[worst])
    verdict = PASS if max_drop <= 0.0 else FAIL
    return ConditionReport(
        condition_id="rescaled_energy_monotone",
        verdict=verdict,
        max_violation=max(max_drop, 0.0),
        tolerance=tol,
        witness=(float(trace.radii[worst]), float(trace.radii[worst + 1]))
        if verdict == FAIL
        else None,
        details={"energies": [float(v) for v in e]},
    )


def check_pointwise_bound(spec, field, slack_factor=10.0, delta=None):
    """Cellwise kinetic/potential bounds of the solved field.

    Checks B'(H)H - B(H) <= G(u) + slack and B(H) <= G(u)/delta + slack with
    delta the coercivity margin of B and slack = slack_factor * (h + residual).
    """
    res = field.info.residual_l2 if field.info is not None else residual(spec, field)
    slack = slack_factor * (field.h + res)
    c_u = gauge(spec.f, field)
    grads = field.cell_gradients()
    pts = grads.reshape(-1, 2)
    mag = np.linalg.norm(pts, axis=1)
    hv = np.zeros_like(mag)
    active = mag >= DEGENERATE_GRADIENT
    if active.any():
        hv[active] = spec.norm.evaluate_many(pts[active])
    if delta is None:
        delta = coercivity_margin(spec.b, K=max(float(hv.max()) * 1.1, 1.0))
    b_vals = np.asarray(spec.b.value(hv))
    p_fun = np.asarray(spec.b.d1(hv)) * hv - b_vals
    g_vals = (c_u - np.asarray(spec.f.value(field.values[:-1, :-1]))).ravel()

    v1 = p_fun - g_vals - slack
    v2 = b_vals - g_vals / delta - slack
    viol = np.maximum(v1, v2)
    worst = int(np.argmax(viol))
    max_viol = float(viol[worst])
    verdict = PASS if max_viol <= 0.0 else FAIL
    nx = grads.shape[0]
    witness_cell = (worst // grads.shape[1], worst % grads.shape[1]) if nx else None
    return ConditionReport(
        condition_id="kinetic_potential_bound",
        verdict=verdict,
        max_violation=max(max_viol, 0.0),
        tolerance=slack,
        witness=witness_cell if verdict == FAIL else None,
        details={
            "delta": delta,
            "slack": slack,
            "max_P_minus_G": float(v1.max() + slack),
            "max_B_minus_G_over_delta": float(v2.max() + slack),
        },
    )


def liouville_mass_test(trace, growth_threshold=0.8, osc_tol=1e-8):
    """Fit mass(R) ~ c R^s, flag sub-critical growth (s < n - 1 - 0.2 = 0.8),
    and check consistency with rigidity.

    The verdict reports consistency: a flagged trace (sub-critical mass
    growth, the rigidity hypothesis) must belong to an essentially constant
    field, so flagged + oscillation beyond tolerance fails.  Near-zero masses
    short-circuit to the trivially flagged case.
    """
    radii = np.asarray(trace.radii, dtype=float)
    masses = np.asarray(trace.masses, dtype=float)
    if radii.size < 4 or radii[-1] / radii[0] < 4.0 - 1e-12:
        raise ValueError("mass-growth fit needs >= 4 radii spanning a factor >= 4")
    tiny = 1e-14 * (1.0 + abs(trace.gauge_value))
    trivial = (masses <= tiny).all()
    if trivial:
        s = 0.0
        flagged = True
    else:
        keep = masses > tiny
        s = float(np.polyfit(np.log(radii[keep]), np.log(masses[keep]), 1)[0])
        flagged = s < growth_threshold
    inconsistent = flagged and trace.oscillation > osc_tol
    verdict = FAIL if inconsistent else PASS
    return ConditionReport(
        condition_id="mass_growth",
        verdict=verdict,
        max_violation=trace.oscillation if inconsistent else 0.0,
        tolerance=osc_tol,
        witness=("oscillation", trace.oscillation) if inconsistent else None,
        details={"exponent": s, "flagged": flagged, "trivial": trivial,
                 "oscillation": trace.oscillation},
    )
