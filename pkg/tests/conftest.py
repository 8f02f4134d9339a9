import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from helidens import HelicoidSpec, make_helicoid, make_plane_disk

settings.register_profile(
    "default", deadline=None, max_examples=25,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.function_scoped_fixture],
)
settings.load_profile("default")


@pytest.fixture(scope="session")
def disk():
    return make_plane_disk(1.0, 40)


@pytest.fixture(scope="session")
def helicoid():
    """Pitch-1 helicoid, |u| <= 3, one full turn each way."""
    return make_helicoid(HelicoidSpec.with_turns(1.0, 3.0, 2, (60, 128)))


@pytest.fixture(scope="session")
def wide_helicoid():
    """Pitch-1 helicoid with room for balls of radius 5 around the axis."""
    return make_helicoid(HelicoidSpec(1.0, 7.0, (-7.0, 7.0), (84, 168), spacing="conformal"))


def icosahedron():
    t = (1 + 5 ** 0.5) / 2
    v = np.array([
        [-1, t, 0], [1, t, 0], [-1, -t, 0], [1, -t, 0],
        [0, -1, t], [0, 1, t], [0, -1, -t], [0, 1, -t],
        [t, 0, -1], [t, 0, 1], [-t, 0, -1], [-t, 0, 1],
    ], dtype=float)
    f = np.array([
        [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
        [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
        [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
        [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
    ])
    return v / np.linalg.norm(v, axis=1, keepdims=True), f


def icosphere(radius=1.0, levels=3):
    """Subdivided icosahedron projected to the sphere of the given radius."""
    from helidens import build_mesh, subdivide

    v, f = icosahedron()
    mesh = build_mesh(v, faces=f)
    for _ in range(levels):
        mesh = subdivide(mesh)
        mesh = build_mesh(mesh.vertices / np.linalg.norm(mesh.vertices, axis=1, keepdims=True),
                          faces=mesh.faces)
    return build_mesh(radius * mesh.vertices, faces=mesh.faces)


def annulus_strip(n=8, rows=2):
    """n x rows grid of quads closed in the first direction, two triangles each."""
    pts, faces = [], []
    for j in range(rows + 1):
        r = 1.0 + j
        for i in range(n):
            a = 2 * np.pi * i / n
            pts.append([r * np.cos(a), r * np.sin(a), 0.0])
    for j in range(rows):
        for i in range(n):
            a, b = j * n + i, j * n + (i + 1) % n
            c, d = a + n, b + n
            faces += [[a, b, d], [a, d, c]]
    return np.array(pts), np.array(faces)
