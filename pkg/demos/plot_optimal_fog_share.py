"""
How many fog nodes should a network elect?
==========================================

Each of ``n`` nodes becomes a fog node with probability ``p``. Larger ``p``
shortens device-to-fog links but adds more long fog-to-cloud links. The
expected sum of link costs ``d^alpha`` is convex in ``p`` and has a
closed-form minimizer.
"""
import numpy as np

from fognodes import ObjectiveProfile, analytic_p, numeric_p
from fognodes.cli import reference_tables

a, R = 50.0, 0.0765 * 50.0

# The closed form and a derivative-free search agree closely. For alpha=1
# they agree exactly, and for alpha 2 and 4 to a fraction of a percent.
for alpha in (1, 2, 4):
    for n in (200, 400, 800):
        prof = ObjectiveProfile(alpha, a, R, n)
        pa, pn = analytic_p(alpha, a, R, n), numeric_p(prof)
        print(f"alpha={alpha} n={n:4d}  closed form p={pa:.5f}  search p={pn:.5f}")

# Devices per fog node grow with n, because the share of fog nodes falls
# as n^(-1/2), n^(-2/3) or n^(-4/5) depending on alpha.
print()
for alpha, rows in reference_tables(a, R).items():
    for row in rows:
        print(f"alpha={alpha} n={row.n:4d}  fog nodes={row.avg_fog_nodes:6.2f}  "
              f"devices per fog={row.avg_end_devices:7.2f}")

# The curve itself, coarse enough to read by eye.
prof = ObjectiveProfile(2, a, R, 200)
p = np.array([0.002, 0.005, 0.01, 0.0129, 0.02, 0.05, 0.1, 0.3])
print()
for pi, j in zip(p, prof.value_at(p)):
    print(f"p={pi:.4f}  J2={j:12.1f}")
