"""
Sampling a deployment and checking the distance moments
=======================================================

The objective depends on two averages: the distance from a fog node to the
cloud at the centre of the square, and the distance from each device to its
fog node. Here we draw both and compare them with the closed forms.
"""
import numpy as np

from fognodes import center_distance_moment, empirical_moment, load_config, sample_placement
from fognodes.geometry import bpp_distance_moment, fog_range

cfg = load_config({"a": 50.0, "R": 3.825, "n": 200, "alpha": 2})

# Fog-to-cloud distances: a point uniform in [-a, a]^2 has
# E[|z|^alpha] = 0.765 a, 2 a^2 / 3 and about 0.622 a^4 for alpha 1, 2, 4.
for alpha in (1, 2, 4):
    mc = empirical_moment(alpha, cfg.a, 10**6, seed=3)
    print(f"alpha={alpha}  Monte Carlo={mc / cfg.a**alpha:.4f} a^alpha  "
          f"closed form={center_distance_moment(alpha, cfg.a) / cfg.a**alpha:.4f} a^alpha")

# One placement with three fog nodes, devices scattered inside each fog
# node's range pi R / n1.
place = sample_placement(cfg, n1=3, seed=11, layout="fog_range")
d = place.device_fog_distances()
r = fog_range(cfg.R, 3)
print(f"\nfog range r = {r:.3f} km, {d.size} devices")
print(f"mean device distance {d.mean():.3f} km, max {d.max():.3f} km")

# Inside a disk, the i-th nearest of N uniform points has E[x^2] = r^2 i/(N+1),
# so the average over all i is r^2 / 2.
per_fog = d.size / 3
expected = np.mean([bpp_distance_moment(2, r, i, per_fog) for i in range(1, int(per_fog) + 1)])
print(f"mean squared distance {np.mean(d**2):.3f} vs ordered-point average {expected:.3f}")
print(f"fog-to-cloud distances: {np.round(place.fog_cloud_distances(), 2)}")
