"""Building sign-pairing anisotropies from first-quadrant arcs.

Any radius function r on [0, pi/2] with r(0) = 1, a critical maximum-style
frame at the ends, and the polar convexity inequality extends uniquely to the
second quadrant so that the resulting even body satisfies the sign pairing.
The extension of the p-norm arc is the conjugate q-norm arc; the extension of
an ellipse arc is the same ellipse.
"""

import os

import numpy as np

import anisolab as al
from anisolab.render import render_unit_ball, write_csv

out = os.path.join(os.path.dirname(__file__), "out")
os.makedirs(out, exist_ok=True)

# 1. validate a gallery of profiles
profiles = [
    al.circle_profile(),
    al.ellipse_profile(2.0),
    al.pnorm_profile(3.0),
    al.trig_profile(0.3),
    al.perturbed_profile(al.bump_function(), 0.01),
]
for prof in profiles:
    rep = al.validate_profile(prof)
    extra = " (borderline)" if rep.details["borderline"] else ""
    print(f"{prof.name:20s} {rep.verdict}  margin {rep.details['margin_min']:+.3f}{extra}")

# an over-aggressive perturbation is rejected by the convexity margin
rep = al.validate_profile(al.perturbed_profile(al.bump_function(), 10.0))
print(f"{'perturbed(eps=10)':20s} {rep.verdict}  margin {rep.details['margin_min']:+.3f}")

# 2. the p-norm arc extends to the conjugate q-norm arc
theta = np.linspace(np.pi / 2, np.pi, 2001)
for p in (2.5, 3.0, 4.0):
    ext = al.extend_profile(al.pnorm_profile(p))
    q = p / (p - 1.0)
    target = (np.abs(np.cos(theta)) ** q + np.abs(np.sin(theta)) ** q) ** (-1.0 / q)
    print(f"p = {p:g}: sup |extension - {q:g}-norm arc| = "
          f"{np.abs(ext.value(theta) - target).max():.2e}")

# 3. smooth matching: which profiles give globally C^2 bodies?
for prof in (al.circle_profile(), al.ellipse_profile(2.0),
              al.perturbed_profile(al.bump_function(), 0.01), al.trig_profile(0.3)):
    rep = al.check_smooth_matching(prof)
    print(f"matching {prof.name:20s} {rep.verdict}  "
          f"(second-order residual {rep.details['eq_second_order']:.1e})")

# 4. curvature along the extension, and the resulting norms
ext = al.extend_profile(al.trig_profile(0.3))
grid = np.linspace(0.0, np.pi, 1024, endpoint=False)
write_csv(os.path.join(out, "trig_extension.csv"), "construct",
          {"theta": grid, "r": ext.value(grid), "curvature": al.curvature(ext, grid)})
print(f"\nwrote {out}/trig_extension.csv "
      f"(min curvature {al.curvature(ext, grid).min():.3f})")

for p in (2.5, 3.0, 4.0):
    H = al.glued_pq_norm(p)
    path = os.path.join(out, f"glued_{p:g}.svg")
    render_unit_ball(H, path, include_dual=True)
    print(f"wrote {path}")
