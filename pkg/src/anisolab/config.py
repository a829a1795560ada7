"""Experiment configuration: INI-style files and compact spec strings.

A config file has commented, human-editable sections::

    [experiment]      seed, out, stages
    [norm]            kind = euclidean | ellipsoid | glued_pq | constructor
    [b]               kind = power | regularized_power, p, kappa
    [f]               kind = zero | double_well | poly
    [domain]          half_width (or xmin/xmax/ymin/ymax), nx, ny
    [solve]           trace, epsilons, method
    [energy]          radii, center
    [checks]          require, samples, tol

Compact norm specs ("ellipsoid:2,0,0,1", "glued_pq:3",
"constructor:pnorm:3", ...) serve the single-purpose subcommands.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field

import numpy as np

from .conditions import power_b, regularized_power_b
from .errors import ConfigError
from .norms import EllipsoidNorm, euclidean_norm
from .pde import (
    ProblemSpec,
    Rectangle,
    affine_trace,
    constant_trace,
    double_well,
    poly_potential,
    tanh_interface_trace,
    zero_potential,
)
from .profiles import (
    bump_function,
    ellipse_profile,
    extend_profile,
    glued_pq_norm,
    norm_from_profile,
    perturbed_profile,
    pnorm_profile,
    trig_profile,
    validate_profile,
)

KNOWN_CHECKS = ("exact", "sign", "orthogonality", "polarity", "monotonicity", "pointwise", "mass")


def parse_profile_spec(spec):
    """Profile from "pnorm:3", "ellipse:2", "trig:0.3", "bump:0.1", "circle"."""
    parts = str(spec).split(":")
    kind, args = parts[0], parts[1:]
    try:
        if kind == "circle":
            from .profiles import circle_profile

            return circle_profile()
        if kind == "pnorm":
            return pnorm_profile(float(args[0]))
        if kind == "ellipse":
            return ellipse_profile(float(args[0]))
        if kind == "trig":
            return trig_profile(float(args[0]))
        if kind == "bump":
            return perturbed_profile(bump_function(), float(args[0]))
    except (IndexError, ValueError) as exc:
        raise ConfigError(f"bad profile spec {spec!r}: {exc}", field="profile") from exc
    raise ConfigError(f"unknown profile kind {kind!r}", field="profile")


def parse_norm_spec(spec):
    """Norm from "euclidean", "ellipsoid:m11,m12,m21,m22", "glued_pq:p",
    "constructor:<profile spec>"."""
    parts = str(spec).split(":", 1)
    kind = parts[0]
    arg = parts[1] if len(parts) > 1 else ""
    try:
        if kind == "euclidean":
            return euclidean_norm(2)
        if kind == "ellipsoid":
            entries = [float(v) for v in arg.replace(",", " ").split()]
            n = int(round(len(entries) ** 0.5))
            if n * n != len(entries):
                raise ConfigError("ellipsoid entries must form a square matrix", field="norm")
            return EllipsoidNorm(np.array(entries).reshape(n, n))
        if kind == "glued_pq":
            return glued_pq_norm(float(arg))
        if kind == "constructor":
            profile = parse_profile_spec(arg)
            report = validate_profile(profile)
            if not report.passed:
                raise ConfigError(f"profile {arg!r} fails validation", field="norm")
            return norm_from_profile(extend_profile(profile))
    except ConfigError:
        raise
    except Exception as exc:
        raise ConfigError(f"bad norm spec {spec!r}: {exc}", field="norm") from exc
    raise ConfigError(f"unknown norm kind {kind!r}", field="norm")


def _floats(text):
    return [float(v) for v in str(text).replace(",", " ").split()]


@dataclass
class ExperimentConfig:
    norm: object
    b: object
    f: object
    domain: Rectangle | None
    grid: tuple | None
    trace: object | None
    eps_ladder: tuple
    radii: list
    center: tuple | None
    checks: list
    samples: int
    tol: float | None
    seed: int
    out_dir: str
    stages: list
    solver_method: str = "lbfgs"
    raw: dict = field(default_factory=dict)

    def problem(self):
        if self.domain is None or self.grid is None or self.trace is None:
            raise ConfigError("config lacks a solvable problem (domain/grid/trace)", field="solve")
        return ProblemSpec(
            norm=self.norm,
            b=self.b,
            f=self.f,
            domain=self.domain,
            grid=self.grid,
            trace=self.trace,
            eps_ladder=self.eps_ladder,
        )


def _build_b(section):
    kind = section.get("kind", "power")
    p = float(section.get("p", 2.0))
    if kind == "power":
        return power_b(p)
    if kind == "regularized_power":
        return regularized_power_b(p, float(section.get("kappa", 0.1)))
    raise ConfigError(f"unknown nonlinearity kind {kind!r}", field="b")


def _build_f(section):
    kind = section.get("kind", "zero")
    if kind == "zero":
        return zero_potential()
    if kind == "double_well":
        return double_well(float(section.get("a", 1.0)))
    if kind == "poly":
        return poly_potential(_floats(section.get("coeffs", "0")))
    raise ConfigError(f"unknown potential kind {kind!r}", field="f")


def _build_trace(section, norm):
    spec = section.get("trace", "")
    if not spec:
        return None
    parts = spec.split(":")
    kind = parts[0]
    if kind == "constant":
        return constant_trace(float(parts[1]) if len(parts) > 1 else 0.0)
    if kind == "affine":
        vals = _floats(parts[1]) if len(parts) > 1 else [1.0, 0.0]
        return affine_trace(*vals)
    if kind == "tanh_interface":
        if len(parts) > 1:
            width = float(parts[1])
        elif isinstance(norm, EllipsoidNorm):
            # matched 1-D profile: m11 u'' + u(1 - u^2) = 0 has width sqrt(2 m11)
            width = float(np.sqrt(2.0 * norm.matrix[0, 0]))
        else:
            width = float(np.sqrt(2.0))
        return tanh_interface_trace(width)
    raise ConfigError(f"unknown trace {spec!r}", field="solve")


def _norm_from_section(section):
    kind = section.get("kind", "euclidean")
    if kind == "euclidean":
        return euclidean_norm(2)
    if kind == "ellipsoid":
        return parse_norm_spec("ellipsoid:" + section.get("matrix", "1 0 0 1"))
    if kind == "glued_pq":
        p = float(section.get("p", 3.0))
        if p <= 2.0:
            raise ConfigError(f"glued norm requires p > 2, got {p:g}", field="norm")
        return glued_pq_norm(p)
    if kind == "constructor":
        return parse_norm_spec("constructor:" + section.get("profile", "circle"))
    raise ConfigError(f"unknown norm kind {kind!r}", field="norm")


def load_config(path):
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        with open(path) as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse config: {exc}") from exc

    def section(name):
        return parser[name] if parser.has_section(name) else {}

    exp = section("experiment")
    norm = _norm_from_section(section("norm"))
    b = _build_b(section("b"))
    f = _build_f(section("f"))

    dom = section("domain")
    domain = None
    grid = None
    if dom:
        if "half_width" in dom:
            s = float(dom["half_width"])
            domain = Rectangle(-s, s, -s, s)
        else:
            domain = Rectangle(
                float(dom.get("xmin", -1)), float(dom.get("xmax", 1)),
                float(dom.get("ymin", -1)), float(dom.get("ymax", 1)),
            )
        grid = (int(dom.get("nx", 64)), int(dom.get("ny", 64)))

    solve = section("solve")
    trace = _build_trace(solve, norm) if solve else None
    eps_ladder = tuple(_floats(solve.get("epsilons", "0.125 0.03125"))) if solve else (0.125,)

    energy = section("energy")
    radii = _floats(energy.get("radii", "")) if energy else []
    if radii and sorted(radii) != radii:
        raise ConfigError("radii must be increasing", field="energy")
    center = tuple(_floats(energy["center"])) if energy and "center" in energy else None

    checks_sec = section("checks")
    checks = str(checks_sec.get("require", "")).split() if checks_sec else []
    for name in checks:
        if name not in KNOWN_CHECKS:
            raise ConfigError(f"unknown check {name!r} (known: {', '.join(KNOWN_CHECKS)})",
                              field="checks")
    samples = int(checks_sec.get("samples", 1000)) if checks_sec else 1000
    tol = float(checks_sec["tol"]) if checks_sec and "tol" in checks_sec else None

    if domain is not None and radii:
        # early admissibility: the largest Wulff ball must fit strictly inside
        from .duality import dual_norm

        theta = np.linspace(0, 2 * np.pi, 256, endpoint=False)
        dirs = np.stack([np.cos(theta), np.sin(theta)], axis=1)
        rim = 1.0 / dual_norm(norm).evaluate_many(dirs)
        c = np.asarray(center if center is not None else domain.center)
        ext = max(radii) * rim
        x = c[0] + ext * dirs[:, 0]
        y = c[1] + ext * dirs[:, 1]
        h = (domain.xmax - domain.xmin) / (grid[0] if grid else 64)
        if (
            x.min() < domain.xmin + 2 * h
            or x.max() > domain.xmax - 2 * h
            or y.min() < domain.ymin + 2 * h
            or y.max() > domain.ymax - 2 * h
        ):
            raise ConfigError(
                f"largest radius {max(radii):g} does not fit 2h inside the domain",
                field="energy",
            )

    return ExperimentConfig(
        norm=norm,
        b=b,
        f=f,
        domain=domain,
        grid=grid,
        trace=trace,
        eps_ladder=eps_ladder,
        radii=radii,
        center=center,
        checks=checks,
        samples=samples,
        tol=tol,
        seed=int(exp.get("seed", 0)),
        out_dir=str(exp.get("out", "out")),
        stages=str(exp.get("stages", "check solve energy")).split(),
        solver_method=str(solve.get("method", "lbfgs")) if solve else "lbfgs",
    )
