import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from helidens import (
    check_density_transport,
    correspondence,
    estimate_bilipschitz,
    extract_annular_multigraph,
    helicoid_match_point,
    intrinsic_density,
    make_plane_disk,
)
from helidens.errors import CombinatoricsMismatch, NonInjectiveVertexMap, TargetOutOfRange
from helidens.lipschitz import accepts, face_stretch
from helidens.mesh import MeshedSurface, build_mesh


@pytest.fixture(scope="module")
def small_disk():
    return make_plane_disk(1.0, 16)


def linear_image(surface, M):
    xy = surface.vertices[:, :2] @ np.asarray(M, dtype=float).T
    return np.column_stack([xy, surface.vertices[:, 2]])


def test_identity(small_disk):
    corr = correspondence(small_disk, small_disk.vertices.copy())
    assert estimate_bilipschitz(corr) == (1.0, 1.0)
    assert face_stretch(corr) == pytest.approx((1.0, 1.0), rel=1e-12)
    assert accepts(corr.stretch, 1.0)


@pytest.mark.parametrize("lam", [0.5, 1.7, 3.0])
def test_uniform_scaling(small_disk, lam):
    corr = correspondence(small_disk, lam * small_disk.vertices)
    lo, hi = estimate_bilipschitz(corr)
    assert lo == pytest.approx(lam, rel=1e-12) and hi == pytest.approx(lam, rel=1e-12)


def test_shear_matches_singular_values(small_disk):
    M = np.array([[1.0, 0.0], [0.1, 1.0]])
    sv = np.linalg.svd(M, compute_uv=False)
    corr = correspondence(small_disk, linear_image(small_disk, M))
    lo, hi = estimate_bilipschitz(corr)
    assert hi == pytest.approx(sv[0], rel=0.02)
    assert lo == pytest.approx(sv[1], rel=0.02)
    assert sv[1] - 1e-12 <= lo <= hi <= sv[0] + 1e-12
    assert face_stretch(corr) == pytest.approx((sv[1], sv[0]), rel=1e-9)


def test_accepts_is_strict_outside_rounding():
    assert accepts((0.9, 1.1), 1.2)
    assert not accepts((0.8, 1.1), 1.2)
    assert not accepts((0.9, 1.25), 1.2)


def test_mismatched_faces(small_disk):
    other = make_plane_disk(1.0, 12)
    with pytest.raises(CombinatoricsMismatch):
        correspondence(small_disk, other)
    with pytest.raises(CombinatoricsMismatch):
        correspondence(small_disk, small_disk.vertices[:-1])


def test_non_injective(small_disk):
    pos = small_disk.vertices.copy()
    pos[5] = pos[7]
    with pytest.raises(NonInjectiveVertexMap):
        correspondence(small_disk, pos)


def test_target_surface_correspondence(small_disk):
    mesh = build_mesh(2 * small_disk.vertices, small_disk.mesh.params, small_disk.mesh.faces)
    corr = correspondence(small_disk, MeshedSurface(mesh))
    assert corr.stretch == pytest.approx((2.0, 2.0))
    np.testing.assert_array_equal(corr.vertex_map, mesh.vertices)


small_linear = st.tuples(*[st.floats(-0.2, 0.2)] * 4).map(
    lambda t: np.eye(2) + np.array(t).reshape(2, 2))


@given(small_linear)
def test_inversion_swaps_bounds(M):
    disk = make_plane_disk(1.0, 8)
    corr = correspondence(disk, linear_image(disk, M))
    lo, hi = corr.stretch
    ilo, ihi = corr.inverse().stretch
    assert ilo == pytest.approx(1 / hi, rel=1e-12)
    assert ihi == pytest.approx(1 / lo, rel=1e-12)


@given(small_linear, small_linear)
def test_composition_bound(M1, M2):
    disk = make_plane_disk(1.0, 8)
    f = correspondence(disk, linear_image(disk, M1))
    g = correspondence(f.target, linear_image(f.target, M2))
    a = max(f.stretch[1], 1 / f.stretch[0]) * (1 + 1e-6)
    b = max(g.stretch[1], 1 / g.stretch[0]) * (1 + 1e-6)
    assert accepts(f.stretch, a) and accepts(g.stretch, b)
    lo, hi = f.compose(g).stretch
    assert 1 / (a * b) < lo <= hi < a * b


def test_compose_requires_shared_combinatorics(small_disk):
    f = correspondence(small_disk, 1.1 * small_disk.vertices)
    other = make_plane_disk(1.0, 12)
    g = correspondence(other, other.vertices.copy())
    with pytest.raises(CombinatoricsMismatch):
        f.compose(g)


# ---------------------------------------------------------------------------
# density transport
# ---------------------------------------------------------------------------

def test_transport_identity(disk):
    corr = correspondence(disk, disk.vertices.copy())
    rep = check_density_transport(corr, 0, 0.4, 1.0)
    assert rep.ok
    assert rep.lower == pytest.approx(rep.middle, rel=1e-12)
    assert rep.upper == pytest.approx(rep.middle, rel=1e-12)


@pytest.mark.parametrize("lam", [1.2, 1.5])
def test_transport_scaling(disk, lam):
    corr = correspondence(disk, lam * disk.vertices)
    alpha = lam * (1 + 1e-6)
    s = 0.3
    rep = check_density_transport(corr, 0, s, alpha)
    assert rep.ok
    # exact scale relation between the two meshes
    assert rep.middle == pytest.approx(intrinsic_density(disk, 0, s / lam).value, rel=1e-9)
    assert rep.upper_slack > 0


def test_transport_requires_acceptance(disk):
    corr = correspondence(disk, 1.5 * disk.vertices)
    with pytest.raises(ValueError):
        check_density_transport(corr, 0, 0.3, 1.2)
    with pytest.raises(ValueError):
        check_density_transport(corr, 0, 0.3, 0.9)
    rep = check_density_transport(corr, 0, 0.3, 1.2, require_accepted=False)
    assert len(rep.densities) == 3
    assert set(rep.as_dict()) >= {"lower", "middle", "upper", "ok"}


# ---------------------------------------------------------------------------
# matching point on a helicoid boundary
# ---------------------------------------------------------------------------

def test_match_point_within_grid_step(helicoid):
    b = np.flatnonzero(helicoid.mesh.boundary_flags)
    v, res = helicoid_match_point(helicoid, b, 0.5)
    step = np.diff(np.unique(helicoid.params[:, 0])).max()
    assert res <= step
    assert abs(helicoid.axis_distance()[v] - 0.5) == pytest.approx(res)
    assert v in set(b.tolist())


def test_match_point_exact_grid_value(helicoid):
    b = np.flatnonzero(helicoid.mesh.boundary_flags)
    target = float(helicoid.axis_distance()[b[len(b) // 3]])
    _, res = helicoid_match_point(helicoid, b, target)
    assert res == 0.0


def test_match_point_out_of_range(helicoid):
    piece = extract_annular_multigraph(helicoid, 0.5, 1.0, 0.5)
    b = np.flatnonzero(piece.mesh.boundary_flags)
    with pytest.raises(TargetOutOfRange):
        helicoid_match_point(piece, b, 0.2)
    with pytest.raises(TargetOutOfRange):
        helicoid_match_point(piece, [], 0.7)


def test_match_point_density_is_screw_invariant(wide_helicoid):
    s = wide_helicoid
    u, v = s.params[:, 0], s.params[:, 1]
    ruling = np.flatnonzero(np.isclose(v, v[np.argmin(np.abs(v - 1.0))]))
    p, _ = helicoid_match_point(s, ruling, 1.5)
    others = np.flatnonzero((u == u[p]) & (np.abs(v) < 2.5) & (v != v[p]))
    assert len(others) > 3
    rp = intrinsic_density(s, p, 1.5)
    for q in others[:: max(1, len(others) // 4)]:
        rq = intrinsic_density(s, int(q), 1.5)
        assert abs(rp.value - rq.value) <= (rp.error_estimate + rq.error_estimate) * max(rp.value, rq.value)
