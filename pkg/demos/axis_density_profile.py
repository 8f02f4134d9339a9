"""Intrinsic density of a pitch-1 helicoid as a function of axis distance.

Prints theta_s at a fixed scale for vertices along one ruling, then the
axis density at growing scales. Near the axis the density grows without
bound; far from it the surface is almost flat and the density tends to 1.

    python demos/axis_density_profile.py
"""

import numpy as np

from helidens import geodesic_distance_field, intrinsic_density
from helidens.experiment import axis_vertex, conformal_helicoid


def main():
    surf = conformal_helicoid(1.0, 14.0, 14.0, 0.12)
    u, v = surf.params[:, 0], surf.params[:, 1]
    ruling = np.flatnonzero(v == v[np.argmin(np.abs(v))])
    ruling = ruling[(u[ruling] >= 0) & (u[ruling] <= 8)]

    s = 1.5
    print(f"theta_{s} along a ruling")
    print(f"{'axis dist':>10} {'theta':>8} {'err':>6}")
    for p in ruling[:: max(1, len(ruling) // 10)]:
        rep = intrinsic_density(surf, int(p), s)
        print(f"{u[p]:10.3f} {rep.value:8.4f} {rep.error_estimate:6.3f}")

    a = axis_vertex(surf)
    fld = geodesic_distance_field(surf, a, radius=12.0)
    print("\ntheta_s at the axis")
    print(f"{'s':>6} {'theta':>8} {'err':>6}")
    for r in (1.0, 2.0, 4.0, 6.0, 8.0, 10.0, 12.0):
        rep = intrinsic_density(surf, a, r, field=fld)
        print(f"{r:6.1f} {rep.value:8.4f} {rep.error_estimate:6.3f}")


if __name__ == "__main__":
    main()
