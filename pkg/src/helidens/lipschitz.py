"""Vertex-level correspondences and the density transport inequality.

A correspondence maps the vertices of a source mesh to new positions with
the same face list. Its stretch bounds are the extremal ratios of target to
source edge length. An injective map with ``alpha^-1 < Lip f < alpha``
satisfies

    alpha^-4 theta_{s/alpha}(p) <= theta_s(f(p)) <= alpha^4 theta_{alpha s}(p),

which :func:`check_density_transport` evaluates on meshes.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from .errors import CombinatoricsMismatch, NonInjectiveVertexMap, TargetOutOfRange
from .intrinsic import intrinsic_density
from .mesh import MeshedSurface, build_mesh


@dataclass(frozen=True, eq=False)
class LipschitzCorrespondence:
    source: MeshedSurface
    target: MeshedSurface

    @property
    def vertex_map(self) -> np.ndarray:
        return self.target.vertices

    @property
    def stretch(self) -> tuple[float, float]:
        return estimate_bilipschitz(self)

    def inverse(self) -> "LipschitzCorrespondence":
        return LipschitzCorrespondence(self.target, self.source)

    def compose(self, other: "LipschitzCorrespondence") -> "LipschitzCorrespondence":
        """``other`` after ``self``: source of self to target of other."""
        _check_combinatorics(self.target, other.source)
        return LipschitzCorrespondence(self.source, other.target)


def _check_combinatorics(a: MeshedSurface, b: MeshedSurface):
    fa, fb = a.mesh.faces, b.mesh.faces
    if fa.shape != fb.shape or not np.array_equal(fa, fb):
        raise CombinatoricsMismatch("source and target meshes have different face lists")


def correspondence(source: MeshedSurface, target) -> LipschitzCorrespondence:
    """Build a correspondence from a target surface or an (n, 3) array of positions.

    Raises
    ------
    CombinatoricsMismatch
        Different face lists or vertex counts.
    NonInjectiveVertexMap
        Two source vertices land on the same target position.
    """
    if not isinstance(target, MeshedSurface):
        pos = np.asarray(target, dtype=float)
        if pos.shape != source.vertices.shape:
            raise CombinatoricsMismatch(
                f"vertex map has shape {pos.shape}, source has {source.vertices.shape}")
        _check_injective(pos)
        mesh = build_mesh(pos, source.mesh.params, source.mesh.faces, source.mesh.charts)
        target = MeshedSurface(mesh, kind="imported", meta={"mapped_from": source.name})
    else:
        _check_combinatorics(source, target)
        _check_injective(target.vertices)
    return LipschitzCorrespondence(source, target)


def _check_injective(pos: np.ndarray, tol: float = 1e-12):
    scale = max(float(np.abs(pos).max()), 1.0)
    q = np.round(pos / (tol * scale)).astype(np.int64)
    _, first, counts = np.unique(q, axis=0, return_index=True, return_counts=True)
    if (counts > 1).any():
        row = q[first[np.flatnonzero(counts > 1)[0]]]
        dup = np.flatnonzero((q == row).all(axis=1))
        raise NonInjectiveVertexMap(f"vertices {dup.tolist()} map to the same point")


def estimate_bilipschitz(corr: LipschitzCorrespondence) -> tuple[float, float]:
    """(min, max) over edges of target length / source length."""
    _check_combinatorics(corr.source, corr.target)
    ratio = corr.target.mesh.edge_lengths / corr.source.mesh.edge_lengths
    return float(ratio.min()), float(ratio.max())


def face_stretch(corr: LipschitzCorrespondence) -> tuple[float, float]:
    """Extremal singular values of the per-face affine maps.

    The piecewise-linear map is exactly ``max`` -Lipschitz for the intrinsic
    metrics, which the edge ratios of :func:`estimate_bilipschitz` only
    bound from below.
    """
    _check_combinatorics(corr.source, corr.target)
    f = corr.source.mesh.faces
    s, t = corr.source.vertices, corr.target.vertices
    es = np.stack([s[f[:, 1]] - s[f[:, 0]], s[f[:, 2]] - s[f[:, 0]]], axis=2)  # (m, 3, 2)
    et = np.stack([t[f[:, 1]] - t[f[:, 0]], t[f[:, 2]] - t[f[:, 0]]], axis=2)
    # differential restricted to the source face: et = D es, so D = et es^+
    D = et @ np.linalg.pinv(es)
    # restrict to the source tangent plane before taking singular values
    q, _ = np.linalg.qr(es)
    sv = np.linalg.svd(D @ q, compute_uv=False)
    return float(sv[:, -1].min()), float(sv[:, 0].max())


#: Relative rounding allowance of :func:`accepts`; lets the identity pass at alpha = 1.
ACCEPT_RTOL = 1e-9


def accepts(stretch: tuple[float, float], alpha: float) -> bool:
    """Mesh-level acceptance: (lo, hi) inside (1/alpha, alpha) up to rounding."""
    lo, hi = stretch
    return (1.0 - ACCEPT_RTOL) / alpha < lo and hi < alpha * (1.0 + ACCEPT_RTOL)


@dataclass(frozen=True)
class TransportReport:
    alpha: float
    lower: float  # alpha^-4 theta_{s/alpha}(p, source)
    middle: float  # theta_s(f(p), target)
    upper: float  # alpha^4 theta_{alpha s}(p, source)
    lower_slack: float  # middle - lower
    upper_slack: float  # upper - middle
    lower_budget: float
    upper_budget: float
    lower_ok: bool
    upper_ok: bool
    densities: tuple

    @property
    def ok(self) -> bool:
        return self.lower_ok and self.upper_ok

    def as_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["densities"] = [r.as_dict() for r in self.densities]
        d["ok"] = self.ok
        return d


def check_density_transport(corr: LipschitzCorrespondence, p: int, s: float, alpha: float,
                            require_accepted: bool = True) -> TransportReport:
    """Evaluate both sides of the transport inequality at vertex p.

    Each inequality ``A <= B`` is accepted when ``A - B`` does not exceed the
    combined error budget ``eA A + eB B`` of the two density reports.
    """
    if alpha < 1:
        raise ValueError("alpha must be >= 1")
    if require_accepted and not accepts(estimate_bilipschitz(corr), alpha):
        raise ValueError(f"correspondence is not accepted as {alpha}-bi-Lipschitz")
    small = intrinsic_density(corr.source, p, s / alpha)
    big = intrinsic_density(corr.source, p, s * alpha)
    mid = intrinsic_density(corr.target, p, s)
    a4 = alpha ** 4
    lower, upper = small.value / a4, big.value * a4
    lb = small.error_estimate * lower + mid.error_estimate * mid.value
    ub = big.error_estimate * upper + mid.error_estimate * mid.value
    return TransportReport(
        alpha=float(alpha),
        lower=lower,
        middle=mid.value,
        upper=upper,
        lower_slack=mid.value - lower,
        upper_slack=upper - mid.value,
        lower_budget=lb,
        upper_budget=ub,
        lower_ok=bool(lower - mid.value <= lb),
        upper_ok=bool(mid.value - upper <= ub),
        densities=(small, mid, big),
    )


def helicoid_match_point(helicoid_piece: MeshedSurface, boundary_set, target_axis_distance: float,
                         tol: float = 1e-9) -> tuple[int, float]:
    """Vertex of ``boundary_set`` whose axis distance is nearest the target.

    Returns ``(vertex, residual)``. Raises :class:`TargetOutOfRange` when the
    target lies outside the axis distances attained on ``boundary_set``.
    """
    b = np.asarray(list(boundary_set), dtype=np.int64)
    if len(b) == 0:
        raise TargetOutOfRange("boundary set is empty")
    r = helicoid_piece.axis_distance()[b]
    if not (r.min() - tol <= target_axis_distance <= r.max() + tol):
        raise TargetOutOfRange(
            f"target axis distance {target_axis_distance} outside [{r.min():.6g}, {r.max():.6g}]")
    k = int(np.argmin(np.abs(r - target_axis_distance)))
    return int(b[k]), float(abs(r[k] - target_axis_distance))
