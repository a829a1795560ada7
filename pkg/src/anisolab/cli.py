"""Command-line front end.

Subcommands: run, dual, check, construct, solve, energy, render.
Exit codes: 0 success; 2 config/parse error; 3 admissibility/precondition
failure; 4 a required condition check failed; 5 solver non-convergence;
6 I/O failure.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_ADMISSIBILITY = 3
EXIT_CHECK_FAILED = 4
EXIT_NO_CONVERGENCE = 5
EXIT_IO = 6

_EPILOG = """exit codes:
  0  success
  2  malformed config or spec string
  3  precondition / admissibility rejection
  4  a required condition check failed
  5  solver did not converge
  6  output could not be written
"""


def _ensure_out(path):
    os.makedirs(path, exist_ok=True)
    return path


def _run_checks(cfg, out_dir):
    """Dispatch the requested condition checks; returns the failing reports."""
    from . import conditions, duality

    rng = np.random.default_rng(cfg.seed)
    reports = []
    for name in cfg.checks:
        if name == "exact":
            reports.append(conditions.check_exact_pairing(
                cfg.norm, sample_count=cfg.samples, rng=rng, tol=cfg.tol or 1e-8))
        elif name == "sign":
            reports.append(conditions.check_sign_pairing(
                cfg.norm, sample_count=cfg.samples, rng=rng))
        elif name == "orthogonality":
            reports.append(conditions.check_orthogonality_symmetry(
                cfg.norm, sample_count=cfg.samples, rng=rng, tol=cfg.tol or 1e-6))
        elif name == "polarity":
            reports.append(duality.check_polarity(
                cfg.norm, sample_count=cfg.samples, rng=rng, tol=cfg.tol or 1e-6))
    failed = []
    for rep in reports:
        print(rep.summary())
        print()
        if not rep.passed:
            failed.append(rep)
    return failed


def cmd_run(args):
    from .config import load_config
    from .errors import AdmissibilityError, ConfigError, ConvergenceError
    from .pde import check_monotonicity, check_pointwise_bound, energy_trace, liouville_mass_test
    from .render import render_field_heatmap, render_unit_ball, write_csv

    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.seed is not None:
        cfg.seed = args.seed
    out = _ensure_out(args.out or cfg.out_dir)

    failed = []
    field = None
    try:
        if "check" in cfg.stages and cfg.checks:
            failed = _run_checks(cfg, out)
        if "solve" in cfg.stages and cfg.trace is not None:
            from .pde import SolveOptions, solve_dirichlet

            spec = cfg.problem()
            field = solve_dirichlet(spec, SolveOptions(method=cfg.solver_method))
            field.save_text(os.path.join(out, "field.txt"))
            print(f"solved: energy {field.info.energy:.9g}, "
                  f"residual {field.info.residual_l2:.3e} "
                  f"(target {field.info.residual_target:.3e}), "
                  f"{field.info.iterations} iterations")
        if "energy" in cfg.stages and field is not None and cfg.radii:
            spec = cfg.problem()
            trace = energy_trace(spec, field, cfg.radii, center=cfg.center)
            write_csv(os.path.join(out, "energy_trace.csv"), "energy",
                      {"R": trace.radii, "energy": trace.energies, "mass": trace.masses})
            render_field_heatmap(os.path.join(out, "gradient.svg"), field,
                                 H=cfg.norm, radii=cfg.radii,
                                 center=cfg.center or spec.domain.center)
            if "monotonicity" in cfg.checks:
                rep = check_monotonicity(trace, tol=cfg.tol or 5.0 * spec.h)
                print(rep.summary())
                print()
                if not rep.passed:
                    failed.append(rep)
            if "pointwise" in cfg.checks:
                rep = check_pointwise_bound(spec, field)
                print(rep.summary())
                print()
                if not rep.passed:
                    failed.append(rep)
            if "mass" in cfg.checks:
                rep = liouville_mass_test(trace)
                print(rep.summary())
                print()
                if not rep.passed:
                    failed.append(rep)
        render_unit_ball(cfg.norm, os.path.join(out, "unit_ball.svg"), include_dual=True)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except AdmissibilityError as exc:
        print(f"admissibility: {exc}", file=sys.stderr)
        return EXIT_ADMISSIBILITY
    except ConvergenceError as exc:
        print(f"no convergence: {exc}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO

    return EXIT_CHECK_FAILED if failed else EXIT_OK


def cmd_dual(args):
    from .config import parse_norm_spec
    from .duality import dual_norm
    from .errors import ConfigError
    from .render import render_unit_ball, write_csv

    try:
        H = parse_norm_spec(args.norm)
    except ConfigError as exc:
        print(f"bad norm spec: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = _ensure_out(args.out)
    theta = np.linspace(0.0, 2.0 * np.pi, args.samples, endpoint=False)
    dirs = np.stack([np.cos(theta), np.sin(theta)], axis=1)
    hv = H.evaluate_many(dirs)
    hd = dual_norm(H).evaluate_many(dirs)
    try:
        write_csv(os.path.join(out, "dual.csv"), "dual",
                  {"theta": theta, "H": hv, "H_dual": hd})
        render_unit_ball(H, os.path.join(out, "balls.svg"), samples=args.samples,
                         include_dual=True)
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    print(f"wrote {out}/dual.csv and {out}/balls.svg")
    return EXIT_OK


def cmd_check(args):
    from . import conditions, duality
    from .config import parse_norm_spec
    from .errors import ConfigError
    from .render import write_csv

    try:
        H = parse_norm_spec(args.norm)
    except ConfigError as exc:
        print(f"bad norm spec: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    rng = np.random.default_rng(args.seed)
    try:
        if args.condition == "exact":
            rep = conditions.check_exact_pairing(H, sample_count=args.samples, rng=rng,
                                                 tol=args.tol or 1e-8)
        elif args.condition == "sign":
            rep = conditions.check_sign_pairing(H, sample_count=args.samples, rng=rng)
        elif args.condition == "orthogonality":
            rep = conditions.check_orthogonality_symmetry(H, sample_count=args.samples,
                                                          rng=rng, tol=args.tol or 1e-6)
        elif args.condition == "polarity":
            rep = duality.check_polarity(H, sample_count=args.samples, rng=rng,
                                         tol=args.tol or 1e-6)
        elif args.condition == "ellipticity":
            lam = conditions.ellipticity_constant(H, angular_samples=args.samples)
            print(f"sampled ellipticity constant: {lam:.9g}")
            return EXIT_OK
        else:  # pragma: no cover - argparse restricts choices
            return EXIT_CONFIG
    except ValueError as exc:
        print(f"precondition: {exc}", file=sys.stderr)
        return EXIT_ADMISSIBILITY
    print(rep.summary())
    if args.out:
        out = _ensure_out(args.out)
        write_csv(os.path.join(out, f"check_{args.condition}.csv"), "check",
                  {"max_violation": [rep.max_violation],
                   "skipped": [float(rep.samples_skipped)]})
    return EXIT_OK if rep.passed else EXIT_CHECK_FAILED


def cmd_construct(args):
    from .config import parse_profile_spec
    from .errors import ConfigError, ProfileError
    from .profiles import curvature, extend_profile, norm_from_profile, validate_profile
    from .render import render_unit_ball, write_csv

    try:
        profile = parse_profile_spec(args.profile)
    except ConfigError as exc:
        print(f"bad profile spec: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        report = validate_profile(profile)
        print(report.summary())
        print()
        if not report.passed:
            return EXIT_CHECK_FAILED
        ext = extend_profile(profile)
    except ProfileError as exc:
        print(f"profile rejected: {exc}", file=sys.stderr)
        return EXIT_ADMISSIBILITY
    out = _ensure_out(args.out)
    theta = np.linspace(0.0, np.pi, args.samples, endpoint=False)
    try:
        write_csv(os.path.join(out, "profile.csv"), "construct",
                  {"theta": theta, "r": ext.value(theta), "curvature": curvature(ext, theta)})
        render_unit_ball(norm_from_profile(ext), os.path.join(out, "unit_ball.svg"),
                         include_dual=True)
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    print(f"wrote {out}/profile.csv and {out}/unit_ball.svg")
    return EXIT_OK


def cmd_solve(args):
    from .config import load_config
    from .errors import ConfigError, ConvergenceError
    from .pde import SolveOptions, solve_dirichlet

    try:
        cfg = load_config(args.config)
        spec = cfg.problem()
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = _ensure_out(args.out or cfg.out_dir)
    try:
        field = solve_dirichlet(spec, SolveOptions(method=cfg.solver_method))
    except ConvergenceError as exc:
        print(f"no convergence: {exc}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    field.save_text(os.path.join(out, "field.txt"))
    print(f"solved: energy {field.info.energy:.9g}, residual {field.info.residual_l2:.3e}, "
          f"{field.info.iterations} iterations -> {out}/field.txt")
    return EXIT_OK


def cmd_energy(args):
    from .config import load_config
    from .errors import AdmissibilityError, ConfigError
    from .pde import GridField, check_monotonicity, energy_trace
    from .render import render_field_heatmap, write_csv

    try:
        cfg = load_config(args.config)
        spec = cfg.problem()
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = _ensure_out(args.out or cfg.out_dir)
    field_path = args.field or os.path.join(out, "field.txt")
    try:
        field = GridField.load_text(field_path)
    except OSError as exc:
        print(f"cannot load field: {exc}", file=sys.stderr)
        return EXIT_IO
    radii = [float(r) for r in args.radii.split(",")] if args.radii else cfg.radii
    if not radii:
        print("no radii given", file=sys.stderr)
        return EXIT_CONFIG
    try:
        trace = energy_trace(spec, field, radii, center=cfg.center)
    except AdmissibilityError as exc:
        print(f"admissibility: {exc}", file=sys.stderr)
        return EXIT_ADMISSIBILITY
    write_csv(os.path.join(out, "energy_trace.csv"), "energy",
              {"R": trace.radii, "energy": trace.energies, "mass": trace.masses})
    render_field_heatmap(os.path.join(out, "gradient.svg"), field, H=cfg.norm,
                         radii=radii, center=cfg.center or spec.domain.center)
    rep = check_monotonicity(trace, tol=args.tol or 5.0 * spec.h)
    print(rep.summary())
    return EXIT_OK if rep.passed else EXIT_CHECK_FAILED


def cmd_render(args):
    from .config import parse_norm_spec
    from .errors import ConfigError
    from .render import render_unit_ball

    try:
        H = parse_norm_spec(args.norm)
    except ConfigError as exc:
        print(f"bad norm spec: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        render_unit_ball(H, args.out, samples=args.samples, include_dual=args.dual)
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    print(f"wrote {args.out}")
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="anisolab",
        description="Numerical laboratory for anisotropic variational PDEs.",
        epilog=_EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="execute the pipeline described by a config file")
    p.add_argument("--config", required=True)
    p.add_argument("--out", default=None)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("dual", help="tabulate H and H* over angles; render both balls")
    p.add_argument("--norm", required=True)
    p.add_argument("--out", default="out")
    p.add_argument("--samples", type=int, default=2048)
    p.set_defaults(func=cmd_dual)

    p = sub.add_parser("check", help="run a structural condition check on a norm")
    p.add_argument("--norm", required=True)
    p.add_argument("--condition", required=True,
                   choices=["exact", "sign", "orthogonality", "polarity", "ellipticity"])
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("construct", help="validate and extend a first-quadrant profile")
    p.add_argument("--profile", required=True)
    p.add_argument("--out", default="out")
    p.add_argument("--samples", type=int, default=2048)
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("solve", help="solve the Dirichlet problem of a config")
    p.add_argument("--config", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("energy", help="rescaled-energy trace of a saved field")
    p.add_argument("--config", required=True)
    p.add_argument("--field", default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--radii", default=None, help="comma-separated, overrides config")
    p.add_argument("--tol", type=float, default=None)
    p.set_defaults(func=cmd_energy)

    p = sub.add_parser("render", help="SVG of a norm's unit ball")
    p.add_argument("--norm", required=True)
    p.add_argument("--out", default="unit_ball.svg")
    p.add_argument("--samples", type=int, default=2048)
    p.add_argument("--dual", action="store_true")
    p.set_defaults(func=cmd_render)

    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
