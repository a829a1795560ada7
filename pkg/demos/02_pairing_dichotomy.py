"""The exact and sign duality pairings.

The exact pairing <H grad H(xi), H* grad H*(x)> = <xi, x> singles out
ellipsoidal norms; the sign-only version admits a much larger planar family,
including the glued p/q norms.  This script runs both checks across a small
gallery and prints the witnesses of failure.
"""

import numpy as np

import anisolab as al

gallery = {
    "euclidean": al.euclidean_norm(2),
    "ellipse diag(4,1)": al.EllipsoidNorm(np.diag([4.0, 1.0])),
    "ellipse [[2,1],[1,2]]": al.EllipsoidNorm([[2.0, 1.0], [1.0, 2.0]]),
    "glued p=5/2": al.GluedPQNorm(2.5),
    "glued p=3": al.GluedPQNorm(3.0),
    "glued p=4": al.GluedPQNorm(4.0),
}

print(f"{'norm':24s} {'exact pairing':>16s} {'sign pairing':>14s}")
for name, H in gallery.items():
    exact = al.check_exact_pairing(H, sample_count=1500, rng=1)
    sign = al.check_sign_pairing(H, sample_count=3000, rng=2)
    print(f"{name:24s} {exact.verdict:>10s} {exact.max_violation:8.1e}"
          f" {sign.verdict:>10s}")
    if not exact.passed:
        xi, x = exact.witness
        print(f"{'':24s} worst pair xi={np.round(xi, 3)}, x={np.round(x, 3)}")

# the naive mirror of the 3-norm arc (the full 3-norm ball) breaks even the
# sign pairing: extensions are unique
mirror = al.mirrored_profile_norm(al.pnorm_profile(3.0))
rep = al.check_sign_pairing(mirror, sample_count=4000, rng=3)
print(f"\nmirrored 3-norm ball sign pairing: {rep.verdict} "
      f"({rep.details['disagreements']} disagreements)")

# in the plane the sign pairing is equivalent to a symmetry of polar
# orthogonality, testable without the dual norm
for name in ("glued p=3",):
    rep = al.check_orthogonality_symmetry(gallery[name], sample_count=2000, rng=4)
    print(f"orthogonality symmetry for {name}: {rep.verdict} "
          f"(max violation {rep.max_violation:.1e})")
