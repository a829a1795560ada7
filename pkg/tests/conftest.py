"""Shared fixtures: the norm registry and the session-scoped reference solves."""

import time

import numpy as np
import pytest

import anisolab as al


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)


def ellipsoid_registry():
    return [
        al.euclidean_norm(2),
        al.EllipsoidNorm(np.diag([4.0, 1.0])),
        al.EllipsoidNorm([[2.0, 1.0], [1.0, 2.0]]),
    ]


def non_ellipsoid_registry():
    """Strictly convex planar norms that satisfy the sign pairing but not the
    exact pairing."""
    trig = al.norm_from_profile(al.extend_profile(al.trig_profile(0.3)))
    ctor_p3 = al.norm_from_profile(al.extend_profile(al.pnorm_profile(3.0)))
    return [al.GluedPQNorm(3.0), trig, ctor_p3]


@pytest.fixture(scope="session")
def trig_norm():
    return al.norm_from_profile(al.extend_profile(al.trig_profile(0.3)))


@pytest.fixture(scope="session")
def bump_norm():
    prof = al.perturbed_profile(al.bump_function(), 0.01)
    return al.norm_from_profile(al.extend_profile(prof))


class TimedField:
    def __init__(self, spec, field, seconds):
        self.spec = spec
        self.field = field
        self.seconds = seconds


def _solve_allen_cahn(norm, half_width, cells, trace_width):
    spec = al.ProblemSpec(
        norm=norm,
        b=al.power_b(2),
        f=al.double_well(1.0),
        domain=al.centered_box(half_width),
        grid=(cells, cells),
        trace=al.tanh_interface_trace(trace_width),
        eps_ladder=(0.125,),
    )
    t0 = time.perf_counter()
    field = al.solve_dirichlet(spec)
    return TimedField(spec, field, time.perf_counter() - t0)


@pytest.fixture(scope="session")
def ac_256(
):
    """The reference planar interface fixture: box half-width 6, 256^2 cells."""
    return _solve_allen_cahn(al.euclidean_norm(2), 6.0, 256, np.sqrt(2.0))


@pytest.fixture(scope="session")
def ac_256_ellipsoid():
    """Same fixture with the diag(2,1) ellipsoidal anisotropy and its matched
    interface width 2 (the 1-D profile of 2 u'' + u - u^3 = 0)."""
    return _solve_allen_cahn(al.EllipsoidNorm(np.diag([2.0, 1.0])), 6.0, 256, 2.0)


@pytest.fixture(scope="session")
def ac_128():
    return _solve_allen_cahn(al.euclidean_norm(2), 6.0, 128, np.sqrt(2.0))


@pytest.fixture(scope="session")
def ac_wide():
    """Wide box (half-width 24) for the mass-growth exponent: the factor-4
    radius span must sit in the asymptotic regime of linear mass growth."""
    return _solve_allen_cahn(al.euclidean_norm(2), 24.0, 256, np.sqrt(2.0))
