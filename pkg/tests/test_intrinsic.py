import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import dblquad

from helidens import (
    HelicoidSpec,
    MeshedSurface,
    build_mesh,
    certify_graphical,
    extract_annular_multigraph,
    extrinsic_density,
    geodesic_distance_field,
    graph_density_check,
    intrinsic_ball_area,
    intrinsic_density,
    make_helicoid,
    make_plane_disk,
    subdivide,
)
from helidens.errors import DisconnectedMesh, GraphicalityNotCertified
from helidens.experiment import axis_vertex, conformal_helicoid
from helidens.intrinsic import ball_region, edge_dijkstra, upper_bias_bound


def vertex_at(surf, u, v):
    return int(np.argmin(np.abs(surf.params[:, 0] - u) + np.abs(surf.params[:, 1] - v)))


# ---------------------------------------------------------------------------
# distance fields
# ---------------------------------------------------------------------------

def test_plane_distance_matches_euclid(disk):
    fld = geodesic_distance_field(disk, 0)
    r = np.linalg.norm(disk.vertices, axis=1)
    far = r >= 10 * disk.h_max
    ratio = fld.dist[:disk.mesh.n_vertices][far] / r[far]
    assert np.all(ratio >= 1 - 1e-12)
    assert np.all(ratio <= 1.03)


def _flat_grid(n, aspect):
    from helidens.generators import _grid_faces

    xs = np.linspace(-1, 1, n + 1)
    X, Y = np.meshgrid(xs, aspect * xs, indexing="ij")
    return build_mesh(np.column_stack([X.ravel(), Y.ravel(), 0 * X.ravel()]), faces=_grid_faces(n, n))


@pytest.mark.parametrize("steiner", [1, 3, 5])
@pytest.mark.parametrize("aspect", [1.0, 2.0, 4.0])
def test_bias_calibration_covers_grids(steiner, aspect):
    # the documented bias must cover flat grids, where the true distance is Euclidean
    m = _flat_grid(40, aspect)
    c = 20 * 41 + 20
    fld = geodesic_distance_field(m, c, steiner=steiner)
    r = np.linalg.norm(m.vertices - m.vertices[c], axis=1)
    far = r >= 10 * m.h_max
    assert np.max(fld.dist[:m.n_vertices][far] / r[far]) <= fld.upper_bias_bound


def test_bias_calibration_covers_disk(disk):
    fld = geodesic_distance_field(disk, 0)
    r = np.linalg.norm(disk.vertices, axis=1)
    far = r >= 10 * disk.h_max
    assert np.max(fld.dist[:disk.mesh.n_vertices][far] / r[far]) <= fld.upper_bias_bound


def test_bias_bound_table():
    assert upper_bias_bound(3, 1.2) == upper_bias_bound(3, 2.0) == 1.03
    assert upper_bias_bound(3, 16.26) == pytest.approx(1.33)
    assert upper_bias_bound(1, 3.0) > upper_bias_bound(3, 3.0) > upper_bias_bound(5, 3.0)
    with pytest.raises(ValueError):
        upper_bias_bound(2, 2.0)


def test_helicoid_axis_and_ruling_distances(wide_helicoid):
    s = wide_helicoid
    a = s.meta["axis_vertex"]
    d = geodesic_distance_field(s, a).at_vertices(s.mesh.n_vertices)
    for t in (2.0, 4.0, 6.0):
        i = vertex_at(s, 0.0, t)
        assert d[i] == pytest.approx(abs(s.params[i, 1]), rel=0.03)
    for u in (2.0, 4.0, -5.0):
        i = vertex_at(s, u, 0.0)
        assert d[i] == pytest.approx(abs(s.params[i, 0]), rel=0.03)


def test_distance_field_invariants(helicoid):
    fld = geodesic_distance_field(helicoid, 5)
    d = fld.at_vertices(helicoid.mesh.n_vertices)
    assert d[5] == 0 and np.all(d >= 0)
    e = helicoid.mesh.edges
    assert np.all(np.abs(d[e[:, 0]] - d[e[:, 1]]) <= helicoid.mesh.edge_lengths + 1e-12)


def test_steiner_graph_refines_plain_dijkstra(disk):
    plain = edge_dijkstra(disk, 0)
    fine = geodesic_distance_field(disk, 0).at_vertices(disk.mesh.n_vertices)
    assert np.all(fine <= plain + 1e-12)


def test_local_field_equals_full_field(wide_helicoid):
    s = wide_helicoid
    a = s.meta["axis_vertex"]
    full = geodesic_distance_field(s, a)
    local = geodesic_distance_field(s, a, radius=3.0)
    inside = full.dist <= 3.0
    assert np.array_equal(local.dist[inside], full.dist[inside])
    assert intrinsic_ball_area(s, local, 3.0) == pytest.approx(intrinsic_ball_area(s, full, 3.0), rel=1e-12)
    with pytest.raises(ValueError):
        intrinsic_ball_area(s, local, 4.0)


def test_disconnected_mesh():
    v = np.array([[0.0, 0, 0], [1, 0, 0], [0, 1, 0], [5, 0, 0], [6, 0, 0], [5, 1, 0]])
    m = build_mesh(v, faces=[[0, 1, 2], [3, 4, 5]])
    with pytest.raises(DisconnectedMesh):
        geodesic_distance_field(m, 0)


# ---------------------------------------------------------------------------
# ball areas and densities
# ---------------------------------------------------------------------------

def test_plane_half_radius_area(disk):
    fld = geodesic_distance_field(disk, 0)
    assert intrinsic_ball_area(disk, fld, 0.5) == pytest.approx(np.pi / 4, rel=0.02)
    assert intrinsic_ball_area(disk, fld, 10.0) == pytest.approx(disk.mesh.total_area)


def test_small_balls_are_flat(helicoid):
    a = helicoid.meta["axis_vertex"]
    fine = subdivide(subdivide(helicoid.mesh))
    rep = intrinsic_density(fine, a, 0.25)
    assert rep.value == pytest.approx(1.0, abs=0.03)


def _parameter_area(surface, center, s, c=1.0):
    """Oracle: integrate sqrt(u^2 + c^2) over parameter triangles whose centroid lies in the ball.

    Distances come from a twice-refined copy of the mesh, the area element
    from the closed form, so only the ball membership is shared with the
    method under test.
    """
    fine = subdivide(subdivide(surface.mesh))
    d = geodesic_distance_field(fine, center, radius=s).at_vertices(fine.n_vertices)
    f = fine.faces
    inside = d[f].mean(axis=1) <= s
    uv = fine.params[f[inside]]
    e1, e2 = uv[:, 1] - uv[:, 0], uv[:, 2] - uv[:, 0]
    parea = 0.5 * np.abs(e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])
    u = uv[:, :, 0].mean(axis=1)
    return float(np.sum(np.sqrt(u * u + c * c) * parea))


def test_helicoid_axis_area_exceeds_flat(wide_helicoid):
    s = wide_helicoid
    a = s.meta["axis_vertex"]
    rep = intrinsic_density(s, a, 3.0)
    assert rep.area > np.pi * 9
    oracle = _parameter_area(s, a, 3.0)
    assert rep.area == pytest.approx(oracle, rel=rep.error_estimate)
    assert rep.area == pytest.approx(oracle, rel=0.02)


# theta_s on the pitch-1 axis from an independent fine-lattice computation:
# Dijkstra over a (u, v) grid of step 0.025 with a 24-direction stencil and
# exact metric lengths, area from the analytic element sqrt(u^2 + 1).
AXIS_THETA_LATTICE = {5.0: 1.762, 6.5: 2.048}


@pytest.mark.parametrize("radius", sorted(AXIS_THETA_LATTICE))
def test_helicoid_axis_density_against_lattice(wide_helicoid, radius):
    s = wide_helicoid
    rep = intrinsic_density(s, s.meta["axis_vertex"], radius)
    assert not rep.truncated
    assert rep.value == pytest.approx(AXIS_THETA_LATTICE[radius], rel=rep.error_estimate)
    assert rep.value == pytest.approx(AXIS_THETA_LATTICE[radius], rel=0.02)


def test_helicoid_axis_density_crosses_two(wide_helicoid):
    s = wide_helicoid
    a = s.meta["axis_vertex"]
    assert intrinsic_density(s, a, 5.0).value < 2
    assert intrinsic_density(s, a, 6.5).value > 2


def test_density_matches_refined_mesh(helicoid):
    for p, s in ((helicoid.meta["axis_vertex"], 1.0), (vertex_at(helicoid, 1.5, 1.0), 0.8)):
        coarse = intrinsic_density(helicoid, p, s)
        fine = intrinsic_density(subdivide(helicoid.mesh), p, s)
        assert abs(fine.value - coarse.value) <= coarse.error_estimate * coarse.value


def test_value_is_area_over_pi_s2(helicoid):
    rep = intrinsic_density(helicoid, 10, 0.7)
    assert rep.value == rep.area / (np.pi * 0.49)
    assert rep.as_dict()["boundary_truncated"] == rep.truncated


def test_truncation_flag(disk):
    assert intrinsic_density(disk, 0, 1.5).truncated
    assert not intrinsic_density(disk, 0, 0.5).truncated


def test_plane_extrinsic(disk):
    rep = extrinsic_density(disk, 0, 0.5)
    assert rep.value == pytest.approx(1.0, abs=0.02)
    assert rep.kind == "extrinsic"


def test_helicoid_extrinsic_against_quadrature(wide_helicoid):
    s = wide_helicoid
    rep = extrinsic_density(s, s.meta["axis_vertex"], 1.0)
    # |X(u, v)|^2 = u^2 + v^2 at c = 1, so the ball is the unit parameter disk
    val, _ = dblquad(lambda r, t: np.sqrt((r * np.cos(t)) ** 2 + 1) * r, 0, 2 * np.pi, 0, 1)
    oracle = val / np.pi
    assert 1.0 < oracle < 1.415
    assert 1.0 < rep.value < 1.415
    assert rep.value == pytest.approx(oracle, rel=rep.error_estimate)
    assert rep.value == pytest.approx(oracle, rel=0.01)


def test_intrinsic_at_most_extrinsic(wide_helicoid):
    s = wide_helicoid
    rng = np.random.default_rng(3)
    inner = np.flatnonzero(np.abs(s.params[:, 0]) < 3)
    for p in rng.choice(inner, 8, replace=False):
        for sc in (0.5, 1.5, 3.0):
            i = intrinsic_density(s, int(p), sc)
            e = extrinsic_density(s, int(p), sc)
            assert i.value <= e.value * (1 + i.error_estimate + e.error_estimate)


# ---------------------------------------------------------------------------
# graph bound
# ---------------------------------------------------------------------------

def test_plane_graph_check(disk):
    chk = graph_density_check(disk, 0, 0.5)
    assert chk.passed and chk.certificate == "plane"
    assert chk.density.value == pytest.approx(1.0, abs=0.03)


def test_half_turn_piece_graph_check():
    h = make_helicoid(HelicoidSpec.with_turns(1.0, 10.0, 0.5, (200, 96)))
    band = extract_annular_multigraph(h, 5.0, 10.0, 0.5)
    p = vertex_at(band, 7.5, 0.0)
    chk = graph_density_check(band, p, 1.0)
    assert chk.passed
    assert chk.density.value <= 2


def test_forged_graph_flag_fails_at_axis(wide_helicoid):
    s = wide_helicoid
    a = s.meta["axis_vertex"]
    with pytest.raises(GraphicalityNotCertified):
        graph_density_check(s, a, 6.5)
    # the threshold carries the error budget, so the axis density must clear
    # 2 (1 + err); a radius-12 ball on a larger piece does
    big = conformal_helicoid(1.0, 14.0, 14.0, 0.12)
    chk = graph_density_check(big, axis_vertex(big), 12.0, assume_graph=True)
    assert not chk.density.truncated
    assert chk.density.value > chk.threshold > 2
    assert not chk.passed
    assert chk.certificate == "asserted by caller"


def test_certificate_requires_one_sheet(helicoid):
    u = helicoid.params[:, 0]
    assert certify_graphical(helicoid, u > 0.5) is None  # two full turns
    near = (u > 0.5) & (np.abs(helicoid.params[:, 1]) < 2)
    assert certify_graphical(helicoid, near) is not None
    both = (np.abs(u) > 0.5) & (np.abs(helicoid.params[:, 1]) < 2)
    assert certify_graphical(helicoid, both) is None
    assert certify_graphical(MeshedSurface(helicoid.mesh), near) is None


# ---------------------------------------------------------------------------
# invariants
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("lam", [0.5, 2.0])
def test_scale_invariance(lam):
    spec = HelicoidSpec(1.0, 3.0, (-3, 3), (48, 96))
    a = make_helicoid(spec)
    b = make_helicoid(HelicoidSpec(lam, 3.0 * lam, (-3, 3), (48, 96)))
    p = a.meta["axis_vertex"]
    for s in (0.5, 1.5):
        ra, rb = intrinsic_density(a, p, s), intrinsic_density(b, p, lam * s)
        assert rb.value == pytest.approx(ra.value, rel=1e-9)


def test_axis_density_monotone(wide_helicoid):
    s = wide_helicoid
    a = s.meta["axis_vertex"]
    fld = geodesic_distance_field(s, a, radius=5.5)
    vals = [intrinsic_density(s, a, r, field=fld).value for r in np.linspace(0.5, 5.5, 11)]
    assert np.all(np.diff(vals) >= 0)


def test_screw_symmetry(wide_helicoid):
    s = wide_helicoid
    for u, v1, v2 in ((1.0, -1.0, 2.0), (2.0, 0.0, -1.5), (-1.5, 1.0, -2.0)):
        p, q = vertex_at(s, u, v1), vertex_at(s, u, v2)
        assert s.params[p, 0] == s.params[q, 0]
        rp, rq = intrinsic_density(s, p, 1.5), intrinsic_density(s, q, 1.5)
        assert abs(rp.value - rq.value) <= (rp.error_estimate + rq.error_estimate) * max(rp.value, rq.value)
        assert rp.value == pytest.approx(rq.value, rel=0.01)


def test_ball_region_contains_ball(wide_helicoid):
    s = wide_helicoid
    a = s.meta["axis_vertex"]
    mask = ball_region(s.mesh, a, 2.0)
    d = geodesic_distance_field(s, a).at_vertices(s.mesh.n_vertices)
    touched = d[s.mesh.faces].min(axis=1) <= 2.0
    assert np.all(mask[touched])


@given(s=st.floats(0.1, 0.9), seed=st.integers(0, 1000))
def test_plane_density_property(s, seed):
    disk = make_plane_disk(1.0, 30)
    rng = np.random.default_rng(seed)
    r = np.linalg.norm(disk.vertices, axis=1)
    candidates = np.flatnonzero(r + s < 0.95)
    if len(candidates) == 0:
        return
    p = int(rng.choice(candidates))
    i = intrinsic_density(disk, p, s)
    e = extrinsic_density(disk, p, s)
    assert i.value == pytest.approx(1.0, abs=i.error_estimate)
    assert i.value <= e.value * (1 + i.error_estimate + e.error_estimate)
