"""Second fundamental form, mean curvature and blow-up pairs.

Quadric fit: at each interior vertex the 2-ring is expressed in a tangent
frame built from the area-weighted vertex normal, and
``z = a x^2 + b xy + c y^2 + d x + e y`` is fitted by least squares. The
principal curvatures come from the fitted graph's shape operator.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyBall, InsufficientNeighborhood, ZeroCurvatureAtCenter
from .mesh import MeshedSurface, TriMesh

#: Relative tolerance for blow-up pair verification.
DEFAULT_BLOWUP_TOL = 0.05


@dataclass(frozen=True, eq=False)
class CurvatureField:
    """Per-vertex |A|^2 and mean curvature H.

    Vertices without an estimate (boundary vertices under the quadric fit)
    hold NaN.
    """

    A2: np.ndarray
    H: np.ndarray
    method: str
    K: np.ndarray | None = None

    @property
    def valid(self) -> np.ndarray:
        return np.isfinite(self.A2)


def _two_ring(mesh: TriMesh):
    a = mesh.adjacency.astype(np.int8)
    a2 = ((a @ a) + a).tocsr()
    a2.setdiag(0)
    a2.eliminate_zeros()
    counts = np.diff(a2.indptr)
    width = int(counts.max())
    idx = np.zeros((mesh.n_vertices, width), dtype=np.int64)
    mask = np.arange(width)[None, :] < counts[:, None]
    idx[mask] = a2.indices
    return idx, mask, counts


def quadric_fit(mesh: TriMesh, vertices=None) -> CurvatureField:
    """Quadric-fit curvature on the selected vertices (default: all interior).

    Raises
    ------
    InsufficientNeighborhood
        A selected vertex has fewer than 6 distinct 2-ring neighbours.
    """
    n = mesh.n_vertices
    if vertices is None:
        vertices = np.flatnonzero(~mesh.boundary_flags)
    vertices = np.asarray(vertices, dtype=np.int64)
    A2 = np.full(n, np.nan)
    H = np.full(n, np.nan)
    K = np.full(n, np.nan)
    if len(vertices) == 0:
        return CurvatureField(A2, H, "quadric-fit", K)
    idx, mask, counts = _two_ring(mesh)
    few = counts[vertices] < 6
    if few.any():
        bad = int(vertices[few][0])
        raise InsufficientNeighborhood(f"vertex {bad} has {counts[bad]} neighbours in its 2-ring (need 6)")

    normal = mesh.vertex_normals[vertices]
    # tangent frame: any unit vector orthogonal to the normal
    helper = np.where(np.abs(normal[:, :1]) < 0.9, [[1.0, 0.0, 0.0]], [[0.0, 1.0, 0.0]])
    e1 = np.cross(normal, helper)
    e1 /= np.linalg.norm(e1, axis=1, keepdims=True)
    e2 = np.cross(normal, e1)

    nb = idx[vertices]
    w = mask[vertices].astype(float)
    d = mesh.vertices[nb] - mesh.vertices[vertices][:, None, :]
    scale = (np.linalg.norm(d, axis=2) * w).sum(axis=1) / w.sum(axis=1)
    d /= scale[:, None, None]
    x = np.einsum("vkc,vc->vk", d, e1)
    y = np.einsum("vkc,vc->vk", d, e2)
    z = np.einsum("vkc,vc->vk", d, normal)
    phi = np.stack([x * x, x * y, y * y, x, y], axis=-1) * w[..., None]
    M = np.einsum("vki,vkj->vij", phi, phi)
    rhs = np.einsum("vki,vk->vi", phi, z)
    coef = np.linalg.solve(M, rhs[..., None])[..., 0]
    a, b, c, dx, dy = coef.T
    # undo the coordinate scaling: second derivatives carry 1/length
    fxx, fxy, fyy = 2 * a / scale, b / scale, 2 * c / scale
    E, F, G = 1 + dx * dx, dx * dy, 1 + dy * dy
    W = np.sqrt(1 + dx * dx + dy * dy)
    L, Mm, N = fxx / W, fxy / W, fyy / W
    det = E * G - F * F
    Hv = (E * N - 2 * F * Mm + G * L) / (2 * det)
    Kv = (L * N - Mm * Mm) / det
    A2[vertices] = np.maximum(4 * Hv * Hv - 2 * Kv, 0.0)
    H[vertices] = Hv
    K[vertices] = Kv
    return CurvatureField(A2, H, "quadric-fit", K)


def estimate_curvature(surface, method: str = "auto") -> CurvatureField:
    """|A|^2 and H per vertex.

    ``method`` is ``"analytic"`` (closed form from surface metadata),
    ``"quadric"`` or ``"auto"`` (analytic when available).
    """
    if method not in ("auto", "analytic", "quadric"):
        raise ValueError(f"unknown method {method!r}")
    analytic = getattr(surface, "analytic", None)
    if method == "analytic" and not analytic:
        raise ValueError("surface carries no closed-form curvature")
    if method in ("auto", "analytic") and analytic:
        family = analytic.get("family")
        n = surface.mesh.n_vertices
        if family == "plane":
            z = np.zeros(n)
            return CurvatureField(z, z.copy(), "analytic", z.copy())
        if family == "helicoid":
            c = float(analytic["pitch"])
            u = surface.params[:, 0]
            A2 = 2 * c * c / (c * c + u * u) ** 2
            return CurvatureField(A2, np.zeros(n), "analytic", -A2 / 2)
        if method == "analytic":
            raise ValueError(f"no closed form for family {family!r}")
    mesh = surface.mesh if isinstance(surface, MeshedSurface) else surface
    return quadric_fit(mesh)


def mean_curvature_residual(surface) -> float:
    """max |H| over interior vertices, from the quadric fit (never the closed form)."""
    mesh = surface.mesh if isinstance(surface, MeshedSurface) else surface
    cf = quadric_fit(mesh)
    return float(np.nanmax(np.abs(cf.H)))


# ---------------------------------------------------------------------------
# blow-up pairs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BlowUpPair:
    """Outcome of checking ``sup_{B_s(y)} |A|^2 <= 4C^2/s^2 = 4|A|^2(y)``."""

    center: int
    scale: float
    constant: float
    sup_check: float
    center_value: float
    bound: float  # 4 C^2 / s^2
    tol: float
    accepted: bool
    violations: list = field(default_factory=list)
    argmax: int = -1

    def as_dict(self) -> dict:
        return {
            "center": int(self.center),
            "scale": float(self.scale),
            "C": float(self.constant),
            "sup_check": float(self.sup_check),
            "center_value": float(self.center_value),
            "four_C2_over_s2": float(self.bound),
            "four_center_value": float(4 * self.center_value),
            "tol": float(self.tol),
            "accepted": bool(self.accepted),
            "violations": list(self.violations),
            "argmax_vertex": int(self.argmax),
        }


def _field(surface, curvature):
    return curvature if curvature is not None else estimate_curvature(surface)


def check_blow_up_pair(surface, y: int, s: float, C: float, tol: float = DEFAULT_BLOWUP_TOL,
                       curvature: CurvatureField | None = None) -> BlowUpPair:
    """Check whether (y, s) is a (C) blow-up pair on the mesh.

    The supremum runs over mesh vertices inside the closed extrinsic ball
    B_s(y), not only those intrinsically close to y. Accepts iff
    ``sup <= 4C^2/s^2 (1 + tol)`` and ``|4C^2/s^2 - 4|A|^2(y)| <= tol 4|A|^2(y)``.

    Raises :class:`EmptyBall` when the ball holds no vertex with an estimate.
    """
    if s <= 0 or C <= 0:
        raise ValueError("scale and constant must be positive")
    cf = _field(surface, curvature)
    mesh = surface.mesh if isinstance(surface, MeshedSurface) else surface
    dist = np.linalg.norm(mesh.vertices - mesh.vertices[y], axis=1)
    inside = (dist <= s) & cf.valid
    if not inside.any():
        raise EmptyBall(f"no vertex with a curvature estimate within {s} of vertex {y}")
    vals = np.where(inside, cf.A2, -np.inf)
    argmax = int(np.argmax(vals))
    sup = float(vals[argmax])
    center = float(cf.A2[y])
    bound = 4 * C * C / (s * s)
    violations = []
    if not np.isfinite(center):
        violations.append("no curvature estimate at the center")
    if sup > bound * (1 + tol):
        violations.append(f"sup |A|^2 = {sup:.6g} exceeds 4C^2/s^2 = {bound:.6g}")
    if not abs(bound - 4 * center) <= tol * 4 * center:
        violations.append(f"4C^2/s^2 = {bound:.6g} differs from 4|A|^2(y) = {4 * center:.6g}")
    return BlowUpPair(y, float(s), float(C), sup, center, bound, tol, not violations, violations, argmax)


def blow_up_scale(surface, y: int, C: float, curvature: CurvatureField | None = None) -> float:
    """s = C / |A|(y), the scale at which 4C^2/s^2 = 4|A|^2(y)."""
    cf = _field(surface, curvature)
    a2 = float(cf.A2[y])
    if not np.isfinite(a2) or a2 <= 0:
        raise ZeroCurvatureAtCenter(f"|A|^2 at vertex {y} is {a2}")
    return C / np.sqrt(a2)


def curvature_decay_constant(surface, deltas, center=None, curvature: CurvatureField | None = None):
    """Smallest K with ``sup_{|x - center| >= delta} |A|^2 <= K delta^-4`` on the sampled deltas.

    Returns ``(K, rows)`` where rows are ``(delta, sup, delta^4 sup)``.
    """
    cf = _field(surface, curvature)
    mesh = surface.mesh if isinstance(surface, MeshedSurface) else surface
    origin = np.zeros(3) if center is None else mesh.vertices[center]
    r = np.linalg.norm(mesh.vertices - origin, axis=1)
    rows = []
    for d in deltas:
        sel = (r >= d) & cf.valid
        sup = float(cf.A2[sel].max()) if sel.any() else 0.0
        rows.append((float(d), sup, float(d) ** 4 * sup))
    K = max(row[2] for row in rows) if rows else 0.0
    return K, rows
