"""Density transport under random piecewise-linear maps of a plane disk.

Each trial distorts the disk, measures the exact stretch bound alpha of the
piecewise-linear map and compares theta_s(f(p)) against
alpha^-4 theta_{s/alpha}(p) and alpha^4 theta_{alpha s}(p).

    python demos/transport_trials.py 20
"""

import sys

import numpy as np

from helidens import check_density_transport, correspondence, face_stretch, make_plane_disk


def distortion(disk, rng):
    x, y = disk.vertices[:, 0], disk.vertices[:, 1]
    A = np.eye(2) + rng.uniform(-0.15, 0.15, size=(2, 2))
    xy = np.column_stack([x, y]) @ A.T
    xy[:, 0] += 0.03 * np.sin(3 * y + rng.uniform(0, 6))
    z = 0.05 * np.sin(2 * (x + y))
    return correspondence(disk, np.column_stack([xy, z]))


def main(trials=20, seed=0):
    rng = np.random.default_rng(seed)
    disk = make_plane_disk(1.0, 24)
    print(f"{'alpha':>7} {'lower':>7} {'theta':>7} {'upper':>7}  ok")
    for _ in range(trials):
        corr = distortion(disk, rng)
        lo, hi = face_stretch(corr)
        alpha = max(hi, 1 / lo) * (1 + 1e-6)
        rep = check_density_transport(corr, 0, float(rng.uniform(0.1, 0.3)), alpha)
        print(f"{alpha:7.4f} {rep.lower:7.4f} {rep.middle:7.4f} {rep.upper:7.4f}  {rep.ok}")


if __name__ == "__main__":
    main(int(sys.argv[1]) if len(sys.argv) > 1 else 20)
