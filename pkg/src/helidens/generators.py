"""Discretized model surfaces.

* :func:`make_plane_disk` - flat disk in the x3 = 0 plane.
* :func:`make_helicoid` - (u cos v, u sin v, c v) on a parameter rectangle.
* :func:`extract_annular_multigraph` - one-sided band of a helicoid.
* :func:`weierstrass_evaluate` - X(z) = Re int (1/2 (1/g - g), i/2 (1/g + g), 1) dh
  on a rectangle, integrated along grid-aligned staircase paths.
"""

from __future__ import annotations

import ast
import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import Delaunay

from .errors import (
    PathDependenceDetected,
    RangeOutsideParent,
    ResolutionTooCoarse,
    SingularIntegrand,
)
from .mesh import MeshedSurface, build_mesh, submesh


def helicoid_point(u, v, c):
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    return np.stack([u * np.cos(v), u * np.sin(v), c * v], axis=-1)


def helicoid_A2(u, c):
    """Closed-form |A|^2 of the helicoid with pitch c at ruling parameter u."""
    u = np.asarray(u, dtype=float)
    return 2.0 * c * c / (c * c + u * u) ** 2


def _grid_faces(nu: int, nv: int) -> np.ndarray:
    """Two triangles per cell of an (nu+1) x (nv+1) vertex grid, index i*(nv+1)+j."""
    i, j = np.meshgrid(np.arange(nu), np.arange(nv), indexing="ij")
    a = (i * (nv + 1) + j).ravel()
    b = a + (nv + 1)
    return np.concatenate([
        np.stack([a, b, b + 1], axis=1),
        np.stack([a, b + 1, a + 1], axis=1),
    ])


# ---------------------------------------------------------------------------
# plane
# ---------------------------------------------------------------------------

def make_plane_disk(radius: float, resolution: int = 40) -> MeshedSurface:
    """Flat disk of the given radius, meshed by ``resolution`` concentric rings.

    Ring k carries 6k points, so triangles are close to equilateral with
    edge length about ``radius / resolution``.
    """
    if radius <= 0:
        raise ValueError("radius must be positive")
    if resolution < 1:
        raise ValueError("resolution must be >= 1")
    pts = [np.zeros((1, 2))]
    for k in range(1, resolution + 1):
        t = 2 * np.pi * np.arange(6 * k) / (6 * k)
        rk = radius * k / resolution
        pts.append(rk * np.stack([np.cos(t), np.sin(t)], axis=1))
    xy = np.vstack(pts)
    tri = Delaunay(xy).simplices
    p0, p1, p2 = xy[tri[:, 0]], xy[tri[:, 1]], xy[tri[:, 2]]
    cross = (p1 - p0)[:, 0] * (p2 - p0)[:, 1] - (p1 - p0)[:, 1] * (p2 - p0)[:, 0]
    tri[cross < 0] = tri[cross < 0][:, [0, 2, 1]]
    verts = np.column_stack([xy, np.zeros(len(xy))])
    mesh = build_mesh(verts, xy, tri)
    return MeshedSurface(
        mesh,
        kind="plane",
        analytic={"family": "plane"},
        meta={"radius": radius, "resolution": resolution, "center_vertex": 0},
        name=f"plane-disk-r{radius:g}",
    )


# ---------------------------------------------------------------------------
# helicoid
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HelicoidSpec:
    """Helicoid piece ``|u| <= rho_max``, ``v in v_range``.

    ``resolution`` counts grid intervals (n_u across the full u range, n_v
    across v_range). ``spacing="conformal"`` places the u rows at
    ``c sinh(t)`` for uniform t, so cells are close to squares at every axis
    distance; ``"uniform"`` spaces u evenly.
    """

    pitch: float
    rho_max: float
    v_range: tuple[float, float]
    resolution: tuple[int, int]
    spacing: str = "uniform"

    def __post_init__(self):
        if self.pitch <= 0 or self.rho_max <= 0:
            raise ValueError("pitch and rho_max must be positive")
        v0, v1 = self.v_range
        if not v1 > v0:
            raise ValueError("v_range must have positive length")
        nu, nv = self.resolution
        if nu < 2 or nv < 8:
            raise ValueError("resolution must be at least (2, 8)")
        if self.spacing not in ("uniform", "conformal"):
            raise ValueError(f"unknown spacing {self.spacing!r}")

    @classmethod
    def with_turns(cls, pitch, rho_max, turns, resolution, spacing="uniform"):
        """Symmetric v range covering ``turns`` full rotations."""
        half = np.pi * turns
        return cls(pitch, rho_max, (-half, half), resolution, spacing)

    def u_values(self) -> np.ndarray:
        nu = self.resolution[0]
        if self.spacing == "uniform":
            return np.linspace(-self.rho_max, self.rho_max, nu + 1)
        tmax = math.asinh(self.rho_max / self.pitch)
        u = self.pitch * np.sinh(np.linspace(-tmax, tmax, nu + 1))
        if nu % 2 == 0:
            u[nu // 2] = 0.0
        return u

    def v_values(self) -> np.ndarray:
        return np.linspace(self.v_range[0], self.v_range[1], self.resolution[1] + 1)


def make_helicoid(spec: HelicoidSpec) -> MeshedSurface:
    """Mesh X(u, v) = (u cos v, u sin v, c v) on the spec's parameter rectangle.

    The surface carries ``analytic = {"family": "helicoid", "pitch": c}``;
    ``meta["axis_vertex"]`` is the vertex closest to the origin.
    """
    v = spec.v_values()
    dv = v[1] - v[0]
    if dv > np.pi / 8 + 1e-12:
        raise ResolutionTooCoarse(f"angular step {dv:.4f} exceeds pi/8")
    u = spec.u_values()
    nu, nv = len(u) - 1, len(v) - 1
    U, V = np.meshgrid(u, v, indexing="ij")
    X = helicoid_point(U, V, spec.pitch).reshape(-1, 3)
    params = np.column_stack([U.ravel(), V.ravel()])
    mesh = build_mesh(X, params, _grid_faces(nu, nv))
    axis_vertex = int(np.argmin(np.abs(params[:, 0]) + spec.pitch * np.abs(params[:, 1])))
    return MeshedSurface(
        mesh,
        kind="helicoid",
        analytic={"family": "helicoid", "pitch": float(spec.pitch)},
        meta={
            "pitch": spec.pitch,
            "rho_max": spec.rho_max,
            "v_range": list(spec.v_range),
            "resolution": list(spec.resolution),
            "spacing": spec.spacing,
            "axis_vertex": axis_vertex,
            "grid_shape": [nu + 1, nv + 1],
        },
        name=f"helicoid-c{spec.pitch:g}",
    )


def extract_annular_multigraph(helicoid: MeshedSurface, rho_min: float, rho_max: float,
                               turns: float, sign: int = 1) -> MeshedSurface:
    """Sub-mesh with ``rho_min <= sign*u <= rho_max`` and v spanning ``turns`` rotations.

    The v window is centered in the parent's v range. For ``turns <= 1/2``
    the piece is a single-valued graph over a half-annulus and is marked
    ``graph_certified`` in its metadata.
    """
    if helicoid.kind != "helicoid" or helicoid.params is None:
        raise ValueError("parent must be a generated helicoid")
    parent_rho = float(np.abs(helicoid.params[:, 0]).max())
    if not (0 < rho_min < rho_max <= parent_rho + 1e-12):
        raise RangeOutsideParent(
            f"need 0 < rho_min < rho_max <= {parent_rho}, got ({rho_min}, {rho_max})")
    if turns <= 0:
        raise RangeOutsideParent("turns must be positive")
    v = helicoid.params[:, 1]
    v0, v1 = float(v.min()), float(v.max())
    span = 2 * np.pi * turns
    if span > v1 - v0 + 1e-9:
        raise RangeOutsideParent(f"{turns} turns do not fit in the parent's v range [{v0}, {v1}]")
    mid = 0.5 * (v0 + v1)
    lo, hi = mid - span / 2, mid + span / 2
    tol = 1e-9
    su = sign * helicoid.params[:, 0]
    keep_v = (su >= rho_min - tol) & (su <= rho_max + tol) & (v >= lo - tol) & (v <= hi + tol)
    face_mask = keep_v[helicoid.mesh.faces].all(axis=1)
    if not face_mask.any():
        raise RangeOutsideParent("requested band contains no faces at this resolution")
    mesh, _ = submesh(helicoid.mesh, face_mask)
    got_span = float(np.ptp(mesh.params[:, 1]))
    return MeshedSurface(
        mesh,
        kind="multigraph-annulus",
        analytic=dict(helicoid.analytic),
        meta={
            "pitch": helicoid.analytic["pitch"],
            "rho_min": rho_min,
            "rho_max": rho_max,
            "turns": turns,
            "v_window": [lo, hi],
            "graph_certified": got_span < 2 * np.pi,
            "multigraph_certified": True,
        },
        name=f"multigraph-c{helicoid.analytic['pitch']:g}",
    )


# ---------------------------------------------------------------------------
# Weierstrass representation
# ---------------------------------------------------------------------------

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(8)


@dataclass(frozen=True)
class WeierstrassSpec:
    """Gauss map ``g`` and height differential coefficient ``dh`` on a rectangle.

    ``g`` and ``dh`` are vectorized callables on complex arrays. ``domain``
    is ``(re0, re1, im0, im1)``; ``resolution`` counts grid nodes per side.
    """

    g: object
    dh: object
    domain: tuple[float, float, float, float]
    basepoint: complex
    resolution: tuple[int, int]
    name: str = "weierstrass"

    def __post_init__(self):
        re0, re1, im0, im1 = self.domain
        if not (re1 > re0 and im1 > im0):
            raise ValueError("domain must be a nondegenerate rectangle")
        b = complex(self.basepoint)
        if not (re0 <= b.real <= re1 and im0 <= b.imag <= im1):
            raise ValueError("basepoint must lie in the domain")
        if min(self.resolution) < 2:
            raise ValueError("resolution must be at least 2 x 2")

    def integrand(self, z):
        """The C^3-valued coefficient of dz, shape (..., 3)."""
        z = np.asarray(z, dtype=complex)
        g = np.broadcast_to(np.asarray(self.g(z), dtype=complex), z.shape)
        dh = np.broadcast_to(np.asarray(self.dh(z), dtype=complex), z.shape)
        with np.errstate(divide="ignore", invalid="ignore"):
            phi = np.stack([0.5 * (1 / g - g) * dh, 0.5j * (1 / g + g) * dh, dh], axis=-1)
        return phi

    @classmethod
    def from_json(cls, data) -> "WeierstrassSpec":
        """Build from ``{"g": expr, "dh": expr, "domain": [...], "basepoint": [re, im], "res": [n, m]}``."""
        if isinstance(data, (str, bytes)):
            data = json.loads(data)
        bp = data.get("basepoint", [0.0, 0.0])
        res = data.get("res", [64, 64])
        return cls(
            g=parse_expression(data["g"]),
            dh=parse_expression(data["dh"]),
            domain=tuple(float(x) for x in data["domain"]),
            basepoint=complex(bp[0], bp[1]),
            resolution=(int(res[0]), int(res[1])),
            name=data.get("name", "weierstrass"),
        )


def preset(name: str, resolution=(64, 64)) -> WeierstrassSpec:
    if name == "ez":
        return WeierstrassSpec(np.exp, lambda z: np.ones_like(z),
                               (-1.0, 1.0, -np.pi, np.pi), 0j, tuple(resolution), name="ez")
    raise KeyError(f"unknown Weierstrass preset {name!r}")


def _segment_integrals(spec: WeierstrassSpec, za, zb):
    """Gauss-Legendre integral of the integrand along straight segments za -> zb."""
    za = np.asarray(za, dtype=complex)
    zb = np.asarray(zb, dtype=complex)
    half = 0.5 * (zb - za)
    mid = 0.5 * (zb + za)
    nodes = mid[..., None] + half[..., None] * _GL_NODES
    phi = spec.integrand(nodes)
    if not np.all(np.isfinite(phi)):
        raise SingularIntegrand("integrand is singular or non-finite on a quadrature segment")
    return np.einsum("...qk,q->...k", phi, _GL_WEIGHTS) * half[..., None]


def _quadrature_tolerance(spec: WeierstrassSpec, nodes: np.ndarray) -> float:
    """Error scale of the segment rule: compare 8- and 4-point rules on the coarsest row."""
    za, zb = nodes[:-1, 0], nodes[1:, 0]
    fine = _segment_integrals(spec, za, zb)
    x4, w4 = np.polynomial.legendre.leggauss(4)
    half = 0.5 * (zb - za)
    mid = 0.5 * (zb + za)
    coarse = np.einsum("...qk,q->...k", spec.integrand(mid[:, None] + half[:, None] * x4), w4) * half[:, None]
    est = float(np.abs(fine - coarse).sum())
    scale = float(np.abs(fine).sum()) + 1.0
    return max(est, 1e-13 * scale)


def weierstrass_integrate(spec: WeierstrassSpec):
    """Grid node integrals along both staircase orders.

    Returns ``(Z, path_a, path_b)`` where ``Z`` is the complex grid
    (shape (n, m), first index along the real axis), ``path_a`` integrates
    along the first row then up each column and ``path_b`` along the first
    column then across each row. Both are complex arrays of shape (n, m, 3).
    """
    re0, re1, im0, im1 = spec.domain
    n, m = spec.resolution
    x = np.linspace(re0, re1, n)
    y = np.linspace(im0, im1, m)
    Z = x[:, None] + 1j * y[None, :]
    g = np.asarray(spec.g(Z), dtype=complex)
    dh = np.broadcast_to(np.asarray(spec.dh(Z), dtype=complex), Z.shape)
    bad = ~np.isfinite(g) | (np.abs(g) < 1e-12)
    if bad.any() or not np.all(np.isfinite(dh)):
        i, j = np.argwhere(bad | ~np.isfinite(dh))[0]
        raise SingularIntegrand(f"Gauss map vanishes or is non-finite at z = {Z[i, j]:.6g}")

    start = _segment_integrals(spec, np.array([spec.basepoint]), np.array([Z[0, 0]]))[0]
    horiz = _segment_integrals(spec, Z[:-1, :], Z[1:, :])  # (n-1, m, 3)
    vert = _segment_integrals(spec, Z[:, :-1], Z[:, 1:])  # (n, m-1, 3)

    zero_h = np.zeros((1, m, 3), dtype=complex)
    zero_v = np.zeros((n, 1, 3), dtype=complex)
    row_cum = np.concatenate([zero_h, np.cumsum(horiz, axis=0)], axis=0)  # along real axis
    col_cum = np.concatenate([zero_v, np.cumsum(vert, axis=1)], axis=1)  # along imaginary axis

    path_a = start + row_cum[:, :1, :] + (col_cum - col_cum[:, :1, :])
    path_b = start + col_cum[:1, :, :] + (row_cum - row_cum[:1, :, :])
    return Z, path_a, path_b


def weierstrass_evaluate(spec: WeierstrassSpec) -> MeshedSurface:
    """Integrate the Weierstrass data on the grid and mesh the result.

    Raises
    ------
    SingularIntegrand
        g vanishes or is non-finite on the grid or along a quadrature segment.
    PathDependenceDetected
        The two staircase orders disagree by more than 10x the estimated
        quadrature tolerance.
    DegenerateFace
        The data describes a degenerate surface (e.g. g constant).
    """
    Z, pa, pb = weierstrass_integrate(spec)
    discrepancy = float(np.abs(pa.real - pb.real).max())
    tol = _quadrature_tolerance(spec, Z)
    if discrepancy > 10 * tol and discrepancy > 1e-10 * (1 + float(np.abs(pa).max())):
        raise PathDependenceDetected(
            f"staircase paths disagree by {discrepancy:.3e} (quadrature tolerance {tol:.3e})")
    X = pa.real.reshape(-1, 3)
    n, m = spec.resolution
    params = np.column_stack([Z.real.ravel(), Z.imag.ravel()])
    mesh = build_mesh(X, params, _grid_faces(n - 1, m - 1))
    return MeshedSurface(
        mesh,
        kind="weierstrass",
        meta={
            "domain": list(spec.domain),
            "basepoint": [spec.basepoint.real, spec.basepoint.imag],
            "resolution": list(spec.resolution),
            "path_discrepancy": discrepancy,
            "quadrature_tolerance": tol,
        },
        name=spec.name,
    )


# ---------------------------------------------------------------------------
# expression grammar for JSON specs
# ---------------------------------------------------------------------------

_FUNCS = {"exp": np.exp}
_CONSTS = {"i": 1j, "j": 1j, "pi": np.pi}


def parse_expression(text: str):
    """Compile a small complex expression in ``z`` into a vectorized callable.

    Grammar: numbers (``2``, ``0.5``, ``3j``), the variable ``z``, the
    constants ``i`` and ``pi``, ``+ - * /``, unary minus, parentheses and
    ``exp(...)``. ``**`` with a literal integer exponent is also accepted.
    """
    tree = ast.parse(text, mode="eval").body

    def ev(node, z):
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float, complex)):
            return node.value
        if isinstance(node, ast.Name):
            if node.id == "z":
                return z
            if node.id in _CONSTS:
                return _CONSTS[node.id]
            raise ValueError(f"unknown name {node.id!r} in {text!r}")
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            val = ev(node.operand, z)
            return -val if isinstance(node.op, ast.USub) else val
        if isinstance(node, ast.BinOp):
            a, b = ev(node.left, z), ev(node.right, z)
            if isinstance(node.op, ast.Add):
                return a + b
            if isinstance(node.op, ast.Sub):
                return a - b
            if isinstance(node.op, ast.Mult):
                return a * b
            if isinstance(node.op, ast.Div):
                return a / b
            if isinstance(node.op, ast.Pow) and isinstance(node.right, ast.Constant) \
                    and isinstance(node.right.value, int):
                return a ** node.right.value
        if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) \
                and node.func.id in _FUNCS and len(node.args) == 1:
            return _FUNCS[node.func.id](ev(node.args[0], z))
        raise ValueError(f"unsupported syntax in expression {text!r}")

    def fn(z):
        z = np.asarray(z, dtype=complex)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            out = ev(tree, z)
        return np.broadcast_to(np.asarray(out, dtype=complex), z.shape).copy()

    fn(np.zeros(1))  # reject bad syntax early
    fn.expression = text
    return fn


__all__ = [
    "HelicoidSpec",
    "WeierstrassSpec",
    "extract_annular_multigraph",
    "helicoid_A2",
    "helicoid_point",
    "make_helicoid",
    "make_plane_disk",
    "parse_expression",
    "preset",
    "weierstrass_evaluate",
    "weierstrass_integrate",
]
