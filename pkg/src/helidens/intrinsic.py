"""Geodesic distance fields, intrinsic balls and density ratios.

Distances are shortest paths on a refined graph of the mesh: every edge
carries ``steiner`` equally spaced interior points and every pair of points
on the boundary of a face is joined by the straight segment through that
face. Graph paths are curves on the polyhedral surface, so the field is an
upper bound on the polyhedral geodesic distance. With an odd number of
Steiner points the edge midpoints are graph nodes, which gives the field on
the vertices of the once-subdivided mesh; areas are clipped there.

Density ratios are ``area / (pi s^2)``. Both the intrinsic and the extrinsic
ratio clip the same subdivided triangulation against a piecewise-linear
distance, so ``theta <= Theta`` holds exactly at mesh level.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, dijkstra

from .errors import DisconnectedMesh, GraphicalityNotCertified
from .mesh import MeshedSurface, TriMesh, submesh

#: Interior points per edge in the distance graph (odd, so midpoints are nodes).
DEFAULT_STEINER = 3

#: Calibration of the graph-distance overestimate against face elongation
#: (longest edge over its altitude). Values are running maxima, rounded up,
#: of graph / Euclidean distance at range >= 10 h_max on flat grids of
#: right triangles with cell aspect 1 to 8 (elongation 2 to 8.1); Delaunay
#: disks (elongation < 2) stay below the first entry. Reproduced by
#: tests/test_intrinsic.py::test_bias_calibration_covers_grids.
BIAS_CALIBRATION = {
    1: ((2.0, 2.17, 2.5, 3.34, 4.25, 6.17, 8.13), (1.085, 1.135, 1.18, 1.235, 1.27, 1.30, 1.30)),
    3: ((2.0, 2.17, 2.5, 3.34, 4.25, 6.17, 8.13), (1.03, 1.04, 1.065, 1.11, 1.15, 1.165, 1.165)),
    5: ((2.0, 2.17, 2.5, 3.34, 4.25, 6.17, 8.13), (1.015, 1.02, 1.03, 1.06, 1.09, 1.09, 1.09)),
}


def face_elongation(mesh: TriMesh) -> np.ndarray:
    """Longest edge over the altitude onto it, per face (2/sqrt(3) when equilateral)."""
    e = mesh.__dict__.get("_face_elongation")
    if e is None:
        L = _face_hmax(mesh)
        e = L * L / (2.0 * mesh.face_areas)
        mesh.__dict__["_face_elongation"] = e
    return e


def upper_bias_bound(steiner: int, elongation: float) -> float:
    """Calibrated bound on graph distance / true distance for faces up to ``elongation``.

    Beyond the calibrated range the excess over 1 grows in proportion to
    the elongation.
    """
    if steiner not in BIAS_CALIBRATION:
        raise ValueError(f"no bias calibration for steiner={steiner} (have {sorted(BIAS_CALIBRATION)})")
    x, y = BIAS_CALIBRATION[steiner]
    if elongation <= x[-1]:
        return float(np.interp(elongation, x, y))
    return 1.0 + (y[-1] - 1.0) * elongation / x[-1]


@dataclass(frozen=True)
class DistanceField:
    """Distances from ``source`` to every vertex of the subdivided mesh.

    ``dist[:n]`` are the original vertices; ``dist[n:]`` are edge midpoints in
    the order of ``mesh.edges``.
    """

    source: int
    dist: np.ndarray
    method: str
    upper_bias_bound: float
    steiner: int = DEFAULT_STEINER
    radius: float = np.inf

    def at_vertices(self, n: int) -> np.ndarray:
        return self.dist[:n]


@dataclass(frozen=True)
class DensityReport:
    center: int
    scale: float
    value: float
    kind: str  # "intrinsic" | "extrinsic"
    area: float
    error_estimate: float
    truncated: bool = False
    extra: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        d = {
            "center": int(self.center),
            "scale": float(self.scale),
            "value": float(self.value),
            "kind": self.kind,
            "area": float(self.area),
            "error_estimate": float(self.error_estimate),
            "boundary_truncated": bool(self.truncated),
        }
        d.update(self.extra)
        return d


# ---------------------------------------------------------------------------
# distance graph
# ---------------------------------------------------------------------------

class _SteinerGraph:
    """Refined shortest-path graph of one mesh; built once and reused."""

    def __init__(self, mesh: TriMesh, steiner: int):
        if steiner < 1 or steiner % 2 == 0:
            raise ValueError("steiner must be a positive odd integer")
        n = mesh.n_vertices
        e = mesh.edges
        ne = len(e)
        k = steiner
        t = np.arange(1, k + 1) / (k + 1)
        pts = (mesh.vertices[e[:, 0], None, :] * (1 - t)[None, :, None]
               + mesh.vertices[e[:, 1], None, :] * t[None, :, None]).reshape(-1, 3)
        self.points = np.vstack([mesh.vertices, pts])
        self.n = n
        self.k = k
        self.midpoints = n + np.arange(ne) * k + k // 2

        # Points on each face side, ordered along the side; side j runs from
        # f[j] to f[j+1] and holds k interior points.
        f = mesh.faces
        fe = mesh.face_edges
        sides = []
        for j in range(3):
            interior = n + fe[:, j, None] * k + np.arange(k)[None, :]
            forward = f[:, j] == e[fe[:, j], 0]
            interior = np.where(forward[:, None], interior, interior[:, ::-1])
            sides.append(np.concatenate([f[:, j, None], interior, f[:, (j + 1) % 3, None]], axis=1))
        # Straight chords through the face: interior points of side j against
        # interior points of side j+1 and against the corner opposite side j.
        # Corner-to-corner pairs are mesh edges, covered by the chain below.
        lo_parts, hi_parts = [], []
        for j in range(3):
            a_pts = sides[j][:, 1:-1]
            b_pts = sides[(j + 1) % 3][:, 1:]
            ia, ib = np.meshgrid(np.arange(a_pts.shape[1]), np.arange(b_pts.shape[1]), indexing="ij")
            lo_parts.append(a_pts[:, ia.ravel()].ravel())
            hi_parts.append(b_pts[:, ib.ravel()].ravel())
        # consecutive points along every mesh edge
        chain = np.concatenate([e[:, :1], n + np.arange(ne)[:, None] * k + np.arange(k)[None, :], e[:, 1:]], axis=1)
        lo_parts.append(chain[:, :-1].ravel())
        hi_parts.append(chain[:, 1:].ravel())
        idx_t = np.int32 if len(self.points) < 2**31 - 1 else np.int64
        lo = np.concatenate(lo_parts).astype(idx_t)
        hi = np.concatenate(hi_parts).astype(idx_t)
        w = np.linalg.norm(self.points[lo] - self.points[hi], axis=1)
        npts = len(self.points)
        self.graph = csr_matrix(
            (np.concatenate([w, w]), (np.concatenate([lo, hi]), np.concatenate([hi, lo]))),
            shape=(npts, npts),
        )
        self.n_components = connected_components(self.graph, directed=False)[0]

    def distances(self, sources) -> np.ndarray:
        d = dijkstra(self.graph, directed=False, indices=sources)
        return d


_GRAPH_CACHE: dict = {}


def _graph(mesh: TriMesh, steiner: int) -> _SteinerGraph:
    key = (id(mesh), steiner)
    hit = _GRAPH_CACHE.get(key)
    if hit is not None and hit[0] is mesh:
        return hit[1]
    if len(_GRAPH_CACHE) > 8:
        _GRAPH_CACHE.clear()
    g = _SteinerGraph(mesh, steiner)
    _GRAPH_CACHE[key] = (mesh, g)
    return g


def _as_mesh(surface) -> TriMesh:
    return surface.mesh if isinstance(surface, MeshedSurface) else surface


def _face_hmax(mesh: TriMesh) -> np.ndarray:
    h = mesh.__dict__.get("_face_hmax")
    if h is None:
        h = mesh.edge_lengths[mesh.face_edges].max(axis=1)
        mesh.__dict__["_face_hmax"] = h
    return h


def ball_region(mesh: TriMesh, p: int, radius: float) -> np.ndarray:
    """Mask of faces that can carry a path of length <= radius + margin from p.

    A path of length L from p stays in the Euclidean ball B_L(p). The margin
    is the longest edge of the faces reached, iterated to a fixed point, so
    every corner of a face that straddles the level ``radius`` gets its
    full-mesh distance.
    """
    dv = np.linalg.norm(mesh.vertices - mesh.vertices[p], axis=1)
    fmin = dv[mesh.faces].min(axis=1)
    fh = _face_hmax(mesh)
    near = fmin <= radius
    h1 = float(fh[near].max()) if near.any() else float(fh.max())
    margin = h1
    for _ in range(10):
        mask = fmin <= radius + h1 + margin
        new = float(fh[mask].max())
        if new <= margin:
            break
        margin = new
    return mask


def geodesic_distance_field(surface, source: int, steiner: int = DEFAULT_STEINER,
                            radius: float | None = None) -> DistanceField:
    """Shortest-path distance from mesh vertex ``source``.

    With ``radius`` the graph is restricted to :func:`ball_region`; values
    up to ``radius`` equal the full-mesh values, larger ones are upper bounds
    and unreached nodes are ``inf``.

    Raises :class:`DisconnectedMesh` when a full-mesh field cannot reach
    every vertex.
    """
    mesh = _as_mesh(surface)
    if not 0 <= source < mesh.n_vertices:
        raise IndexError(f"source vertex {source} out of range")
    if steiner not in BIAS_CALIBRATION:
        raise ValueError(f"steiner must be one of {sorted(BIAS_CALIBRATION)}")
    if radius is not None:
        mask = ball_region(mesh, source, radius)
        bias = upper_bias_bound(steiner, float(face_elongation(mesh)[mask].max()))
        if not mask.all():
            sub, keep = submesh(mesh, mask)
            g = _SteinerGraph(sub, steiner)
            local_src = int(np.searchsorted(keep, source))
            d = g.distances(local_src)
            n = mesh.n_vertices
            dist = np.full(n + len(mesh.edges), np.inf)
            dist[keep] = d[:g.n]
            ge = keep[sub.edges]
            gkeys = mesh.edges[:, 0].astype(np.int64) * n + mesh.edges[:, 1]
            lkeys = np.minimum(ge[:, 0], ge[:, 1]).astype(np.int64) * n + np.maximum(ge[:, 0], ge[:, 1])
            dist[n + np.searchsorted(gkeys, lkeys)] = d[g.midpoints]
            return DistanceField(int(source), dist, "refined-dijkstra", bias, steiner, float(radius))
    bias = upper_bias_bound(steiner, float(face_elongation(mesh).max()))
    g = _graph(mesh, steiner)
    if g.n_components > 1:
        raise DisconnectedMesh(f"distance graph has {g.n_components} components")
    d = g.distances(source)
    dist = np.concatenate([d[:g.n], d[g.midpoints]])
    return DistanceField(int(source), dist, "refined-dijkstra", bias, steiner)


def edge_dijkstra(surface, source: int) -> np.ndarray:
    """Plain Dijkstra on the mesh edge graph (vertex distances only)."""
    mesh = _as_mesh(surface)
    e = mesh.edges
    w = mesh.edge_lengths
    n = mesh.n_vertices
    g = csr_matrix((np.concatenate([w, w]), (np.concatenate([e[:, 0], e[:, 1]]),
                                             np.concatenate([e[:, 1], e[:, 0]]))), shape=(n, n))
    return dijkstra(g, directed=False, indices=source)


# ---------------------------------------------------------------------------
# clipping
# ---------------------------------------------------------------------------

def sublevel_fraction(d: np.ndarray, s: float) -> np.ndarray:
    """Area fraction of each triangle where the linear interpolant of ``d`` is <= s.

    ``d`` has shape (m, 3), the function values at the triangle corners.
    The fraction is exact for the linear interpolant.
    """
    d = np.sort(d, axis=1)
    a, b, c = d[:, 0], d[:, 1], d[:, 2]
    out = np.zeros(len(d))
    out[s >= c] = 1.0
    with np.errstate(divide="ignore", invalid="ignore"):
        lower = (s > a) & (s <= b) & (s < c)
        frac = (s - a) ** 2 / ((b - a) * (c - a))
        out[lower] = frac[lower]
        upper = (s > b) & (s < c)
        frac = 1.0 - (c - s) ** 2 / ((c - a) * (c - b))
        out[upper] = frac[upper]
    return np.clip(out, 0.0, 1.0)


def _subdivided_clip(mesh: TriMesh, corner: np.ndarray, mid: np.ndarray, s: float, faces=None) -> float:
    """Clip the midpoint subdivision of the selected faces.

    ``corner`` holds values at mesh vertices, ``mid`` at edge midpoints.
    Each face splits into four congruent triangles of a quarter its area.
    """
    if faces is None:
        faces = np.arange(mesh.n_faces)
    if len(faces) == 0:
        return 0.0
    f = mesh.faces[faces]
    fe = mesh.face_edges[faces]
    c0, c1, c2 = corner[f[:, 0]], corner[f[:, 1]], corner[f[:, 2]]
    m0, m1, m2 = mid[fe[:, 0]], mid[fe[:, 1]], mid[fe[:, 2]]
    frac = (sublevel_fraction(np.stack([c0, m0, m2], axis=1), s)
            + sublevel_fraction(np.stack([c1, m1, m0], axis=1), s)
            + sublevel_fraction(np.stack([c2, m2, m1], axis=1), s)
            + sublevel_fraction(np.stack([m0, m1, m2], axis=1), s))
    return float(np.dot(mesh.face_areas[faces], frac) / 4.0)


def _faces_near(mesh: TriMesh, corner: np.ndarray, s: float) -> np.ndarray:
    """Faces whose subdivision can hold a value <= s (midpoints lie within h of a corner)."""
    fmin = corner[mesh.faces].min(axis=1)
    return np.flatnonzero(fmin <= s + _face_hmax(mesh))


def intrinsic_ball_area(surface, field: DistanceField, s: float) -> float:
    """Area of ``{dist <= s}`` under the piecewise-linear distance on the subdivided mesh."""
    if s <= 0:
        raise ValueError("scale must be positive")
    if s > field.radius * (1 + 1e-12):
        raise ValueError(f"field is only exact up to radius {field.radius}, asked for {s}")
    mesh = _as_mesh(surface)
    n = mesh.n_vertices
    corner, mid = field.dist[:n], field.dist[n:]
    return _subdivided_clip(mesh, corner, mid, s, _faces_near(mesh, corner, s))


def _ball_stats(mesh: TriMesh, corner: np.ndarray, s: float) -> tuple[float, bool]:
    touching = corner[mesh.faces].min(axis=1) <= s
    h = float(_face_hmax(mesh)[touching].max()) if touching.any() else mesh.h_max
    truncated = bool((corner[mesh.boundary_flags] < s).any())
    return h, truncated


def intrinsic_density(surface, p: int, s: float, field: DistanceField | None = None,
                      steiner: int = DEFAULT_STEINER) -> DensityReport:
    """theta_s(p): intrinsic ball area over pi s^2.

    The error estimate is ``2 (bias - 1) + 2 h / s`` where ``bias`` is the
    documented graph-distance overestimation factor and ``h`` is the longest
    edge of the faces the ball touches. The report is flagged ``truncated``
    when the ball reaches the mesh boundary.
    """
    mesh = _as_mesh(surface)
    if field is None or field.source != p or field.radius < s:
        field = geodesic_distance_field(mesh, p, steiner, radius=s)
    area = intrinsic_ball_area(mesh, field, s)
    h, truncated = _ball_stats(mesh, field.dist[:mesh.n_vertices], s)
    return DensityReport(
        center=int(p),
        scale=float(s),
        value=area / (np.pi * s * s),
        kind="intrinsic",
        area=area,
        error_estimate=2.0 * (field.upper_bias_bound - 1.0) + 2.0 * h / s,
        truncated=truncated,
        extra={"h_local": h},
    )


def extrinsic_density(surface, p: int, s: float) -> DensityReport:
    """Theta_s(p): area of the mesh inside the Euclidean ball over pi s^2.

    Error estimate ``3 h / s`` with ``h`` the longest edge the ball touches.
    """
    if s <= 0:
        raise ValueError("scale must be positive")
    mesh = _as_mesh(surface)
    x = mesh.vertices[p]
    corner = np.linalg.norm(mesh.vertices - x, axis=1)
    faces = _faces_near(mesh, corner, s)
    e = mesh.edges
    mid = np.full(len(e), np.inf)
    used = np.unique(mesh.face_edges[faces])
    mid[used] = np.linalg.norm(0.5 * (mesh.vertices[e[used, 0]] + mesh.vertices[e[used, 1]]) - x, axis=1)
    area = _subdivided_clip(mesh, corner, mid, s, faces)
    h, truncated = _ball_stats(mesh, corner, s)
    return DensityReport(
        center=int(p),
        scale=float(s),
        value=area / (np.pi * s * s),
        kind="extrinsic",
        area=area,
        error_estimate=3.0 * h / s,
        truncated=truncated,
        extra={"h_local": h},
    )


# ---------------------------------------------------------------------------
# graph bound
# ---------------------------------------------------------------------------

def certify_graphical(surface: MeshedSurface, vertex_mask: np.ndarray) -> str | None:
    """Reason the selected region is a graph, or None when it cannot be certified.

    Certificates come from generator metadata only:

    * plane: always a graph over the x3 = 0 plane;
    * helicoid / multigraph pieces: the selected vertices avoid the axis
      (u of one sign) and their angle v spans less than 2 pi, so the region
      is single-valued over the horizontal plane.
    """
    if not isinstance(surface, MeshedSurface):
        return None
    if surface.kind == "plane":
        return "plane"
    if surface.kind in ("helicoid", "multigraph-annulus") and surface.params is not None:
        uv = surface.params[vertex_mask]
        if len(uv) == 0:
            return None
        u, v = uv[:, 0], uv[:, 1]
        one_sign = bool((u > 0).all() or (u < 0).all())
        # the closed region between sampled vertices stays off the axis only if
        # it is separated from it by at least one grid row
        if not one_sign:
            return None
        span = float(v.max() - v.min())
        if span < 2 * np.pi:
            return f"helicoid sheet: u of one sign, angle span {span:.4f} < 2pi"
        return None
    return None


@dataclass(frozen=True)
class GraphDensityCheck:
    density: DensityReport
    threshold: float
    passed: bool
    certificate: str

    def as_dict(self) -> dict:
        return {
            "density": self.density.as_dict(),
            "threshold": self.threshold,
            "passed": self.passed,
            "certificate": self.certificate,
        }


def graph_density_check(surface, p: int, s: float, *, assume_graph: bool = False,
                        field: DistanceField | None = None) -> GraphDensityCheck:
    """theta_s(p) against the minimal-graph bound 2 (1 + error).

    The ball must be certified graphical by :func:`certify_graphical` unless
    the caller passes ``assume_graph=True``; otherwise
    :class:`GraphicalityNotCertified` is raised.
    """
    mesh = _as_mesh(surface)
    if field is None or field.source != p or field.radius < s:
        field = geodesic_distance_field(mesh, p, radius=s)
    rep = intrinsic_density(mesh, p, s, field=field)
    touching = field.dist[:mesh.n_vertices][mesh.faces].min(axis=1) <= s
    ring = np.zeros(mesh.n_vertices, dtype=bool)
    ring[mesh.faces[touching].ravel()] = True
    cert = certify_graphical(surface, ring)
    if cert is None:
        if not assume_graph:
            raise GraphicalityNotCertified(f"ball of radius {s} at vertex {p} is not certified graphical")
        cert = "asserted by caller"
    threshold = 2.0 * (1.0 + rep.error_estimate)
    return GraphDensityCheck(rep, threshold, bool(rep.value <= threshold), cert)
