"""Anisotropies and their duals.

Builds a few planar norms, checks the homogeneity/Euler identities, computes
dual norms both in closed form and by angular maximization, and renders the
unit ball next to the unit Wulff shape (the dual ball).
"""

import os

import numpy as np

import anisolab as al

out = os.path.join(os.path.dirname(__file__), "out")
os.makedirs(out, exist_ok=True)

# an anisotropic medium: ellipse with axis ratio 2, and the glued 3/1.5 norm
ellipse = al.EllipsoidNorm(np.diag([4.0, 1.0]))
glued = al.GluedPQNorm(3.0)

for H in (ellipse, glued):
    report = al.check_homogeneity_and_euler(H, sample_count=500, rng=1)
    print(f"{H.name:14s} self-check: {report.summary()}")

# closed-form dual of an ellipsoidal norm is the inverse-matrix norm
dual = al.ellipsoid_dual(np.diag([4.0, 1.0]))
print(f"\ndual matrix of diag(4,1):\n{dual.matrix}")

# the numeric dual agrees with it to machine precision
numeric = al.dual_norm(ellipse, strategy="numeric_sup")
x = np.array([0.7, -1.3])
print(f"H*(x): closed {dual.evaluate(x):.15f}  numeric {numeric.evaluate(x):.15f}")

# for the glued norm the dual swaps the two exponents quadrant-wise;
# at x = (1,1) it takes the 3/2-norm value (1 + 1)^(2/3)
print(f"\nglued dual at (1,1): {al.dual_evaluate(glued, [1.0, 1.0]):.12f}"
      f"  vs 2^(2/3) = {2**(2/3):.12f}")

# polarity: the gradient of H lands on the dual unit sphere and vice versa
for H in (ellipse, glued):
    rep = al.check_polarity(H, sample_count=500, rng=2, tol=1e-5)
    print(f"{H.name:14s} polarity: {rep.verdict} (max violation {rep.max_violation:.2e})")

# pictures: unit ball (blue) with the unit Wulff shape overlay (orange)
from anisolab.render import render_unit_ball  # noqa: E402

for H, name in ((ellipse, "ellipse"), (glued, "glued3")):
    path = os.path.join(out, f"ball_{name}.svg")
    render_unit_ball(H, path, include_dual=True)
    print(f"wrote {path}")
