"""Triangle meshes with parametric charts.

A :class:`TriMesh` is an immutable, validated, consistently oriented
edge-manifold triangle mesh. A :class:`MeshedSurface` wraps a mesh with a
kind tag and optional closed-form metadata (helicoid pitch and so on).

Vertex indices are dense and 0-based; faces are index triples.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

from .errors import DegenerateFace, InconsistentOrientation, MeshError, NonManifoldEdge

#: Faces with area below this are rejected at build time (model units).
MIN_FACE_AREA = 1e-14

KINDS = ("plane", "helicoid", "multigraph-annulus", "weierstrass", "imported")

# Which parametric coordinates carry length units, per kind. Used when a
# surface is rescaled: the helicoid ruling parameter u scales, its angle v
# does not; Weierstrass parameters live in the complex domain and never scale.
_LENGTH_PARAMS = {
    "plane": (True, True),
    "helicoid": (True, False),
    "multigraph-annulus": (True, False),
    "weierstrass": (False, False),
    "imported": (False, False),
}


@dataclass(frozen=True, eq=False)
class TriMesh:
    """Validated triangle mesh.

    Use :func:`build_mesh` to construct one; the constructor itself does
    not validate.

    Attributes
    ----------
    vertices : (n, 3) float array
    params : (n, 2) float array or None
        Parametric coordinates (u, v), parallel to ``vertices``.
    charts : (n,) int array or None
        Chart id per vertex; -1 marks an absent chart.
    faces : (m, 3) int array
    boundary_flags : (n,) bool array
    """

    vertices: np.ndarray
    faces: np.ndarray
    params: np.ndarray | None = None
    charts: np.ndarray | None = None
    boundary_flags: np.ndarray = field(default=None, repr=False)

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_faces(self) -> int:
        return len(self.faces)

    @cached_property
    def edges(self) -> np.ndarray:
        """Unique undirected edges, shape (E, 2), each row sorted."""
        return _edge_table(self.faces, self.n_vertices)[0]

    @cached_property
    def face_edges(self) -> np.ndarray:
        """Edge index of each face side, shape (m, 3); side k is (f[k], f[k+1])."""
        return _edge_table(self.faces, self.n_vertices)[1]

    @cached_property
    def edge_face_count(self) -> np.ndarray:
        return np.bincount(self.face_edges.ravel(), minlength=len(self.edges))

    @cached_property
    def edge_lengths(self) -> np.ndarray:
        e = self.edges
        return np.linalg.norm(self.vertices[e[:, 0]] - self.vertices[e[:, 1]], axis=1)

    @cached_property
    def h_max(self) -> float:
        return float(self.edge_lengths.max())

    @cached_property
    def face_areas(self) -> np.ndarray:
        return _face_areas(self.vertices, self.faces)

    @cached_property
    def face_normals(self) -> np.ndarray:
        """Unit normals following the face winding."""
        v = self.vertices
        f = self.faces
        n = np.cross(v[f[:, 1]] - v[f[:, 0]], v[f[:, 2]] - v[f[:, 0]])
        return n / np.linalg.norm(n, axis=1, keepdims=True)

    @cached_property
    def vertex_normals(self) -> np.ndarray:
        """Area-weighted average of incident face normals."""
        v = self.vertices
        f = self.faces
        n = np.cross(v[f[:, 1]] - v[f[:, 0]], v[f[:, 2]] - v[f[:, 0]])
        acc = np.zeros_like(v)
        for k in range(3):
            np.add.at(acc, f[:, k], n)
        norm = np.linalg.norm(acc, axis=1, keepdims=True)
        norm[norm == 0] = 1.0
        return acc / norm

    @property
    def total_area(self) -> float:
        return float(self.face_areas.sum())

    @cached_property
    def adjacency(self):
        """Sparse symmetric vertex adjacency (CSR, boolean)."""
        from scipy.sparse import coo_matrix

        e = self.edges
        n = self.n_vertices
        rows = np.concatenate([e[:, 0], e[:, 1]])
        cols = np.concatenate([e[:, 1], e[:, 0]])
        data = np.ones(len(rows), dtype=bool)
        return coo_matrix((data, (rows, cols)), shape=(n, n)).tocsr()

    def neighbors(self, i: int) -> np.ndarray:
        a = self.adjacency
        return a.indices[a.indptr[i]:a.indptr[i + 1]]

    def is_disk(self) -> bool:
        return euler_characteristic(self) == 1 and len(boundary_loops(self)) == 1


def _edge_keys(faces, n):
    tails = faces.ravel()
    heads = np.roll(faces, -1, axis=1).ravel()
    lo = np.minimum(tails, heads).astype(np.int64)
    hi = np.maximum(tails, heads).astype(np.int64)
    return lo * n + hi, tails.astype(np.int64) * n + heads


def _edge_table(faces, n=None):
    if n is None:
        n = int(faces.max()) + 1
    key, _ = _edge_keys(faces, n)
    ukeys, inverse, counts = np.unique(key, return_inverse=True, return_counts=True)
    edges = np.stack([ukeys // n, ukeys % n], axis=1)
    return edges, inverse.reshape(-1, 3), counts


def _face_areas(vertices, faces):
    v = vertices
    f = faces
    return 0.5 * np.linalg.norm(np.cross(v[f[:, 1]] - v[f[:, 0]], v[f[:, 2]] - v[f[:, 0]]), axis=1)


def build_mesh(vertices, params=None, faces=None, charts=None) -> TriMesh:
    """Validate raw arrays and return a :class:`TriMesh`.

    Parameters
    ----------
    vertices : array_like, shape (n, 3)
    params : array_like, shape (n, 2), optional
    faces : array_like, shape (m, 3)
        0-based vertex indices. Winding must be consistent across the mesh.
    charts : array_like of int, optional
        Defaults to chart 0 when ``params`` is given, otherwise -1.

    Raises
    ------
    MeshError
        Bad shapes, out-of-range or repeated indices within a face.
    DegenerateFace
        A face has area below :data:`MIN_FACE_AREA`.
    NonManifoldEdge
        An undirected edge borders more than two faces.
    InconsistentOrientation
        Two faces traverse a shared edge in the same direction.
    """
    vertices = np.array(vertices, dtype=float)
    if vertices.ndim != 2 or vertices.shape[1] != 3:
        raise MeshError(f"vertices must have shape (n, 3), got {vertices.shape}")
    if not np.all(np.isfinite(vertices)):
        bad = int(np.flatnonzero(~np.isfinite(vertices).all(axis=1))[0])
        raise MeshError(f"vertex {bad} has non-finite coordinates", simplex=("vertex", bad))
    n = len(vertices)
    faces = np.array(faces if faces is not None else [], dtype=np.int64).reshape(-1, 3)
    if len(faces) == 0:
        raise MeshError("mesh has no faces")
    if faces.min() < 0 or faces.max() >= n:
        bad = int(np.flatnonzero((faces < 0).any(axis=1) | (faces >= n).any(axis=1))[0])
        raise MeshError(f"face {bad} references a vertex outside [0, {n})", simplex=("face", bad))
    rep = (faces[:, 0] == faces[:, 1]) | (faces[:, 1] == faces[:, 2]) | (faces[:, 0] == faces[:, 2])
    if rep.any():
        bad = int(np.flatnonzero(rep)[0])
        raise MeshError(f"face {bad} repeats a vertex: {faces[bad].tolist()}", simplex=("face", bad))

    if params is not None:
        params = np.array(params, dtype=float).reshape(n, 2)
        if charts is None:
            charts = np.zeros(n, dtype=np.int64)
    if charts is not None:
        charts = np.array(charts, dtype=np.int64).reshape(n)

    areas = _face_areas(vertices, faces)
    degenerate = areas < MIN_FACE_AREA
    if degenerate.any():
        bad = int(np.flatnonzero(degenerate)[0])
        raise DegenerateFace(
            f"face {bad} {faces[bad].tolist()} has area {areas[bad]:.3e} < {MIN_FACE_AREA}",
            simplex=("face", bad),
        )

    edges, inverse, counts = _edge_table(faces, n)
    if (counts > 2).any():
        bad = edges[np.flatnonzero(counts > 2)[0]]
        raise NonManifoldEdge(
            f"edge {tuple(bad.tolist())} borders {counts[counts > 2][0]} faces",
            simplex=("edge", tuple(bad.tolist())),
        )
    _, dkey = _edge_keys(faces, n)
    order = np.sort(dkey)
    dup = np.flatnonzero(order[1:] == order[:-1])
    if len(dup):
        k = order[dup[0]]
        bad = tuple(sorted((int(k // n), int(k % n))))
        raise InconsistentOrientation(
            f"edge {bad} is traversed in the same direction by two faces",
            simplex=("edge", bad),
        )

    boundary_edges = edges[counts == 1]
    flags = np.zeros(n, dtype=bool)
    flags[boundary_edges.ravel()] = True
    mesh = TriMesh(vertices=vertices, faces=faces, params=params, charts=charts, boundary_flags=flags)
    # seed the caches computed above
    mesh.__dict__["edges"] = edges
    mesh.__dict__["face_edges"] = inverse
    mesh.__dict__["edge_face_count"] = counts
    mesh.__dict__["face_areas"] = areas
    for arr in (vertices, faces, params, charts, flags):
        if arr is not None:
            arr.setflags(write=False)
    return mesh


def euler_characteristic(mesh: TriMesh) -> int:
    """V - E + F."""
    return mesh.n_vertices - len(mesh.edges) + mesh.n_faces


def boundary_loops(mesh: TriMesh) -> list[list[int]]:
    """Ordered boundary cycles, each following the face winding.

    A closed mesh returns an empty list.
    """
    fe = mesh.face_edges
    counts = mesh.edge_face_count
    f = mesh.faces
    on_boundary = counts[fe] == 1
    tails = f[on_boundary]
    heads = np.roll(f, -1, axis=1)[on_boundary]
    outgoing: dict[int, list[int]] = {}
    for t, h in zip(tails.tolist(), heads.tolist()):
        outgoing.setdefault(t, []).append(h)
    loops = []
    remaining = len(tails)
    while remaining:
        start = next(v for v, hs in outgoing.items() if hs)
        loop = [start]
        cur = outgoing[start].pop()
        remaining -= 1
        while cur != start:
            loop.append(cur)
            cur = outgoing[cur].pop()
            remaining -= 1
        loops.append(loop)
    return loops


def subdivide(mesh: TriMesh) -> TriMesh:
    """One uniform midpoint subdivision (each face split into four).

    New vertices sit at edge midpoints in space and in parameter space;
    they inherit the chart of the edge's first endpoint.
    """
    n = mesh.n_vertices
    e = mesh.edges
    v = np.vstack([mesh.vertices, 0.5 * (mesh.vertices[e[:, 0]] + mesh.vertices[e[:, 1]])])
    params = charts = None
    if mesh.params is not None:
        params = np.vstack([mesh.params, 0.5 * (mesh.params[e[:, 0]] + mesh.params[e[:, 1]])])
    if mesh.charts is not None:
        charts = np.concatenate([mesh.charts, mesh.charts[e[:, 0]]])
    f = mesh.faces
    m = n + mesh.face_edges  # midpoint of side k: (f[k], f[k+1])
    faces = np.concatenate([
        np.stack([f[:, 0], m[:, 0], m[:, 2]], axis=1),
        np.stack([f[:, 1], m[:, 1], m[:, 0]], axis=1),
        np.stack([f[:, 2], m[:, 2], m[:, 1]], axis=1),
        m,
    ])
    return build_mesh(v, params, faces, charts)


def submesh(mesh: TriMesh, face_mask) -> tuple[TriMesh, np.ndarray]:
    """Mesh made of the selected faces, plus the old index of each kept vertex."""
    faces = mesh.faces[np.asarray(face_mask)]
    keep = np.unique(faces)
    remap = np.full(mesh.n_vertices, -1, dtype=np.int64)
    remap[keep] = np.arange(len(keep))
    params = mesh.params[keep] if mesh.params is not None else None
    charts = mesh.charts[keep] if mesh.charts is not None else None
    return build_mesh(mesh.vertices[keep], params, remap[faces], charts), keep


@dataclass(frozen=True, eq=False)
class MeshedSurface:
    """A mesh plus what is known about the smooth surface it samples.

    ``analytic`` holds closed-form metadata for kinds that have one, e.g.
    ``{"family": "helicoid", "pitch": 1.0}`` or ``{"family": "plane"}``.
    ``meta`` holds free-form generator facts (resolution, graph
    certificates, the Weierstrass path discrepancy, ...).
    """

    mesh: TriMesh
    kind: str = "imported"
    analytic: dict | None = None
    meta: dict = field(default_factory=dict)
    name: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown surface kind {self.kind!r}")
        if self.analytic is not None and self.kind not in ("plane", "helicoid", "multigraph-annulus"):
            raise ValueError(f"kind {self.kind!r} carries no closed-form metadata")

    @property
    def h_max(self) -> float:
        return self.mesh.h_max

    @property
    def vertices(self) -> np.ndarray:
        return self.mesh.vertices

    @property
    def params(self) -> np.ndarray | None:
        return self.mesh.params

    def axis_distance(self) -> np.ndarray:
        """Distance of each vertex to the x3-axis, i.e. |u| on helicoids."""
        if self.kind in ("helicoid", "multigraph-annulus") and self.params is not None:
            return np.abs(self.params[:, 0])
        return np.hypot(self.vertices[:, 0], self.vertices[:, 1])

    def scaled(self, lam: float) -> "MeshedSurface":
        """Uniform scaling about the origin by ``lam`` > 0."""
        if lam <= 0:
            raise ValueError("scale factor must be positive")
        m = self.mesh
        params = None
        if m.params is not None:
            params = m.params * np.where(_LENGTH_PARAMS[self.kind], lam, 1.0)
        mesh = build_mesh(m.vertices * lam, params, m.faces, m.charts)
        analytic = None
        if self.analytic is not None:
            analytic = dict(self.analytic)
            if "pitch" in analytic:
                analytic["pitch"] = analytic["pitch"] * lam
        meta = dict(self.meta)
        meta["scale_factor"] = meta.get("scale_factor", 1.0) * lam
        return dataclasses.replace(self, mesh=mesh, analytic=analytic, meta=meta)

    def refined(self) -> "MeshedSurface":
        """Midpoint subdivision; the new vertices lie on the old flat faces."""
        return dataclasses.replace(self, mesh=subdivide(self.mesh), meta=dict(self.meta, subdivided=True))


# ---------------------------------------------------------------------------
# HDMESH text format
# ---------------------------------------------------------------------------

def write_hdmesh(surface: MeshedSurface | TriMesh, path) -> None:
    """Write ``HDMESH 1`` text: ``v x y z u v chart`` and ``f i j k`` lines.

    Surface metadata goes into ``# key value`` comment lines after the
    header, which readers that do not know them skip.
    """
    if isinstance(surface, TriMesh):
        surface = MeshedSurface(surface)
    m = surface.mesh
    lines = ["HDMESH 1", f"# kind {surface.kind}"]
    if surface.name:
        lines.append(f"# name {surface.name}")
    if surface.analytic:
        for key, val in surface.analytic.items():
            lines.append(f"# analytic.{key} {val!r}" if isinstance(val, float) else f"# analytic.{key} {val}")
    params = m.params if m.params is not None else np.zeros((m.n_vertices, 2))
    charts = m.charts if m.charts is not None else np.full(m.n_vertices, -1)
    for (x, y, z), (u, v), c in zip(m.vertices.tolist(), params.tolist(), charts.tolist()):
        lines.append(f"v {x:.17g} {y:.17g} {z:.17g} {u:.17g} {v:.17g} {c}")
    for i, j, k in m.faces.tolist():
        lines.append(f"f {i} {j} {k}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_hdmesh(path) -> MeshedSurface:
    text = Path(path).read_text().splitlines()
    if not text or text[0].split() != ["HDMESH", "1"]:
        raise MeshError(f"{path}: missing 'HDMESH 1' header")
    verts, params, charts, faces = [], [], [], []
    kind, name, analytic = "imported", "", {}
    for lineno, line in enumerate(text[1:], start=2):
        parts = line.split()
        if not parts:
            continue
        tag = parts[0]
        if tag == "#":
            if len(parts) >= 3 and parts[1] == "kind":
                kind = parts[2]
            elif len(parts) >= 3 and parts[1] == "name":
                name = " ".join(parts[2:])
            elif len(parts) >= 3 and parts[1].startswith("analytic."):
                val = parts[2]
                try:
                    val = float(val)
                except ValueError:
                    pass
                analytic[parts[1][len("analytic."):]] = val
        elif tag == "v":
            if len(parts) != 7:
                raise MeshError(f"{path}:{lineno}: vertex line needs 6 fields")
            verts.append([float(t) for t in parts[1:4]])
            params.append([float(t) for t in parts[4:6]])
            charts.append(int(parts[6]))
        elif tag == "f":
            if len(parts) != 4:
                raise MeshError(f"{path}:{lineno}: face line needs 3 indices")
            faces.append([int(t) for t in parts[1:4]])
        else:
            raise MeshError(f"{path}:{lineno}: unknown record {tag!r}")
    charts = np.array(charts, dtype=np.int64)
    has_params = bool((charts >= 0).any())
    mesh = build_mesh(verts, params if has_params else None, faces, charts)
    if kind not in KINDS:
        kind = "imported"
    return MeshedSurface(mesh, kind=kind, analytic=analytic or None, name=name)
