"""Shared numeric helpers: sampling, vectorized 1-D maximization, rotations."""

from __future__ import annotations

import numpy as np

GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


def unit_directions(rng, count, dim):
    """Uniform directions on the Euclidean unit sphere."""
    v = rng.standard_normal((count, dim))
    n = np.linalg.norm(v, axis=1)
    # resample the (measure-zero) degenerate draws
    bad = n < 1e-12
    while bad.any():
        v[bad] = rng.standard_normal((int(bad.sum()), dim))
        n = np.linalg.norm(v, axis=1)
        bad = n < 1e-12
    return v / n[:, None]


def log_uniform_radii(rng, count, lo=1e-2, hi=1e2):
    return np.exp(rng.uniform(np.log(lo), np.log(hi), size=count))


def sample_points(rng, count, dim, lo=1e-2, hi=1e2):
    """Random points: uniform sphere direction times log-uniform radius in [lo, hi]."""
    return unit_directions(rng, count, dim) * log_uniform_radii(rng, count, lo, hi)[:, None]


def rot90(v):
    """Counterclockwise quarter rotation of planar vectors; works on (..., 2) arrays."""
    v = np.asarray(v, dtype=float)
    out = np.empty_like(v)
    out[..., 0] = -v[..., 1]
    out[..., 1] = v[..., 0]
    return out


def golden_max_batch(f, lo, hi, iters=60):
    """Vectorized golden-section maximization of f on brackets [lo, hi].

    f maps an array of abscissae to an array of values.  Returns the bracket
    midpoints and the values there after the final shrink.
    """
    a = np.array(lo, dtype=float, copy=True)
    b = np.array(hi, dtype=float, copy=True)
    for _ in range(iters):
        span = b - a
        c = b - GOLDEN * span
        d = a + GOLDEN * span
        fc = f(c)
        fd = f(d)
        keep_left = fc > fd
        b = np.where(keep_left, d, b)
        a = np.where(keep_left, a, c)
    mid = 0.5 * (a + b)
    return mid, f(mid)


def bisect_increasing(f, target, lo, hi, iters=60):
    """Vectorized bisection for a continuous non-decreasing f.

    Returns the leftmost abscissa where f crosses each target.  All of
    target/lo/hi may be arrays of the same shape.
    """
    a = np.array(lo, dtype=float, copy=True)
    b = np.array(hi, dtype=float, copy=True)
    t = np.asarray(target, dtype=float)
    for _ in range(iters):
        m = 0.5 * (a + b)
        ge = f(m) >= t
        b = np.where(ge, m, b)
        a = np.where(ge, a, m)
    return 0.5 * (a + b)


def central_difference_jacobian(func, x, step):
    """Central finite-difference Jacobian of func: R^n -> R^m at x."""
    x = np.asarray(x, dtype=float)
    cols = []
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = step
        cols.append((np.asarray(func(x + e)) - np.asarray(func(x - e))) / (2.0 * step))
    return np.stack(cols, axis=-1)
