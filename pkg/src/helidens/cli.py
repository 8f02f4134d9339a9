"""Command line entry point: ``helidens <subcommand> ...``.

Subcommands mirror the library: ``generate``, ``curvature``, ``blowup``,
``density``, ``lipschitz-check`` and ``experiment``. JSON goes to stdout
unless ``--out`` / ``-o`` names a file; CSV likewise.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import curvature as curv
from . import experiment as exp
from . import generators as gen
from . import intrinsic as intr
from . import lipschitz as lip
from .errors import HelidensError
from .mesh import read_hdmesh, write_hdmesh

log = logging.getLogger("helidens")


def _pair(text, cast=int):
    parts = [p for p in text.replace(" ", "").split(",") if p]
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected two comma-separated values, got {text!r}")
    return tuple(cast(p) for p in parts)


def _grid(text):
    try:
        lo, hi, n = text.split(":")
        return np.linspace(float(lo), float(hi), int(n))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected lo:hi:n, got {text!r}") from exc


def _emit(text: str, out):
    if out in (None, "-"):
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    else:
        Path(out).write_text(text if text.endswith("\n") else text + "\n")


def _dump(obj) -> str:
    return json.dumps(exp._jsonable(obj), indent=2)


# ---------------------------------------------------------------------------
# handlers
# ---------------------------------------------------------------------------

def cmd_generate(args):
    if args.family == "helicoid":
        nu, nv = args.res
        spec = gen.HelicoidSpec.with_turns(args.pitch, args.rho_max, args.turns, (nu, nv), args.spacing)
        surf = gen.make_helicoid(spec)
    elif args.family == "plane":
        surf = gen.make_plane_disk(args.radius, args.res)
    else:
        if bool(args.preset) == bool(args.spec):
            raise SystemExit("generate weierstrass needs exactly one of --preset or --spec")
        if args.preset:
            spec = gen.preset(args.preset, args.res or (64, 64))
        else:
            spec = gen.WeierstrassSpec.from_json(Path(args.spec).read_text())
        surf = gen.weierstrass_evaluate(spec)
    write_hdmesh(surf, args.output)
    log.info("wrote %s: %d vertices, %d faces, h_max %.4g", args.output,
             surf.mesh.n_vertices, surf.mesh.n_faces, surf.h_max)


def cmd_curvature(args):
    surf = read_hdmesh(args.mesh)
    cf = curv.estimate_curvature(surf, args.method)
    params = surf.params if surf.params is not None else np.full((surf.mesh.n_vertices, 2), np.nan)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["vertex", "u", "v", "A2", "H"])
    for i in range(surf.mesh.n_vertices):
        w.writerow([i, repr(float(params[i, 0])), repr(float(params[i, 1])),
                    repr(float(cf.A2[i])), repr(float(cf.H[i]))])
    _emit(buf.getvalue(), args.out)


def cmd_blowup(args):
    surf = read_hdmesh(args.mesh)
    cf = curv.estimate_curvature(surf)
    s = args.scale if args.scale is not None else curv.blow_up_scale(surf, args.center_vertex, args.constant, cf)
    rep = curv.check_blow_up_pair(surf, args.center_vertex, s, args.constant, curvature=cf)
    _emit(_dump(rep.as_dict()), args.out)
    return 0 if rep.accepted else 1


def cmd_density(args):
    surf = read_hdmesh(args.mesh)
    if args.profile:
        rows = _axis_profile(surf, args.scale, args.samples)
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["axis_distance", "theta"])
        for r, t in rows:
            w.writerow([repr(r), repr(t)])
        _emit(buf.getvalue(), args.out)
        return 0
    if args.vertex is None:
        raise SystemExit("density needs --vertex or --profile axis-distance")
    if args.kind == "intrinsic":
        rep = intr.intrinsic_density(surf, args.vertex, args.scale)
    else:
        rep = intr.extrinsic_density(surf, args.vertex, args.scale)
    if args.json:
        _emit(_dump(rep.as_dict()), args.out)
    else:
        _emit(f"{rep.value:.10g} +- {rep.error_estimate * rep.value:.3g}", args.out)
    return 0


def _axis_profile(surf, s, samples):
    """theta_s at vertices spread over axis distance, skipping truncated balls."""
    r = surf.axis_distance()
    order = np.argsort(r)
    picks = order[np.linspace(0, len(order) - 1, samples).astype(np.int64)]
    rows = []
    for p in picks:
        rep = intr.intrinsic_density(surf, int(p), s)
        if not rep.truncated:
            rows.append((float(r[p]), float(rep.value)))
    return rows


def _read_map(path, n):
    pos = np.full((n, 3), np.nan)
    data = np.loadtxt(path, delimiter=",", ndmin=2)
    idx = data[:, 0].astype(np.int64)
    if data.shape[1] != 4 or idx.min() < 0 or idx.max() >= n:
        raise SystemExit(f"{path}: expected lines vertex_index,x,y,z with indices below {n}")
    pos[idx] = data[:, 1:]
    if np.isnan(pos).any():
        raise SystemExit(f"{path}: map does not cover every source vertex")
    return pos


def cmd_lipschitz(args):
    source = read_hdmesh(args.source)
    if args.map:
        target = _read_map(args.map, source.mesh.n_vertices)
    elif args.target:
        target = read_hdmesh(args.target)
    else:
        raise SystemExit("lipschitz-check needs --target or --map")
    corr = lip.correspondence(source, target)
    lo, hi = lip.estimate_bilipschitz(corr)
    out = {
        "stretch_lo": lo,
        "stretch_hi": hi,
        "face_stretch": list(lip.face_stretch(corr)),
        "alpha": args.alpha,
        "accepted": lip.accepts((lo, hi), args.alpha),
    }
    if args.transport:
        p, s = args.transport
        out["transport"] = lip.check_density_transport(corr, int(p), s, args.alpha,
                                                       require_accepted=False).as_dict()
    _emit(_dump(out), args.out)
    return 0 if out["accepted"] else 1


def cmd_experiment(args):
    if args.pipeline == "density-gap":
        surf = read_hdmesh(args.surface)
        cfg = exp.ExperimentConfig.from_json(Path(args.config).read_text())
        cert = exp.run_density_gap(surf, cfg)
        if args.refine:
            data = cert.as_dict()
            data["refinement"] = exp.refinement_check(surf, cert, cfg)
            _emit(_dump(data), args.out)
        else:
            _emit(cert.to_json(), args.out)
        return 0 if cert.valid else 1
    if args.pipeline == "lemma-search":
        try:
            res = exp.lemma_radius_search(args.pitch, args.C, args.D, args.r_grid, delta=args.delta)
        except exp.TargetNotReached as exc:
            _emit(_dump({"error": str(exc), "table": exc.table}), args.out)
            return 1
        _emit(_dump(res.as_dict()), args.out)
        return 0
    manifest = json.loads(Path(args.manifest).read_text())
    base = Path(args.manifest).parent
    members = manifest["members"]
    surfaces = [read_hdmesh(base / m["surface"]) for m in members]
    rep = exp.validate_family_properties(
        surfaces, [m["a"] for m in members],
        C=float(manifest.get("C", 1.0)),
        K_probe=manifest.get("K_probe"),
        delta_grid=tuple(manifest.get("delta_grid", (0.1, 0.2, 0.4, 0.8))),
    )
    _emit(_dump(rep), args.out)
    return 0 if rep["passed"] else 1


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="helidens", description="Minimal-surface density experiments on meshes.")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a generated surface as HDMESH")
    gs = g.add_subparsers(dest="family", required=True)
    h = gs.add_parser("helicoid")
    h.add_argument("--pitch", type=float, default=1.0)
    h.add_argument("--rho-max", type=float, default=1.0)
    h.add_argument("--turns", type=float, default=0.5)
    h.add_argument("--res", type=_pair, default=(32, 64), help="nu,nv grid intervals")
    h.add_argument("--spacing", choices=("uniform", "conformal"), default="uniform")
    h.add_argument("-o", "--output", required=True)
    p = gs.add_parser("plane")
    p.add_argument("--radius", type=float, default=1.0)
    p.add_argument("--res", type=int, default=40)
    p.add_argument("-o", "--output", required=True)
    w = gs.add_parser("weierstrass")
    w.add_argument("--preset", choices=("ez",))
    w.add_argument("--spec")
    w.add_argument("--res", type=_pair, default=None, help="grid nodes n,m (preset only)")
    w.add_argument("-o", "--output", required=True)
    for q in (h, p, w):
        q.set_defaults(func=cmd_generate)

    c = sub.add_parser("curvature", help="per-vertex |A|^2 and H as CSV")
    c.add_argument("mesh")
    c.add_argument("--method", choices=("auto", "analytic", "quadric"), default="auto")
    c.add_argument("--out")
    c.set_defaults(func=cmd_curvature)

    b = sub.add_parser("blowup", help="check a blow-up pair")
    b.add_argument("mesh")
    b.add_argument("--center-vertex", type=int, required=True)
    b.add_argument("--constant", type=float, required=True)
    b.add_argument("--scale", type=float)
    b.add_argument("--out")
    b.set_defaults(func=cmd_blowup)

    d = sub.add_parser("density", help="intrinsic or extrinsic density ratio")
    d.add_argument("mesh")
    d.add_argument("--vertex", type=int)
    d.add_argument("--scale", type=float, required=True)
    d.add_argument("--kind", choices=("intrinsic", "extrinsic"), default="intrinsic")
    d.add_argument("--json", action="store_true")
    d.add_argument("--profile", choices=("axis-distance",))
    d.add_argument("--samples", type=int, default=20)
    d.add_argument("--out")
    d.set_defaults(func=cmd_density)

    lc = sub.add_parser("lipschitz-check", help="stretch bounds and density transport")
    lc.add_argument("--source", required=True)
    lc.add_argument("--target")
    lc.add_argument("--map")
    lc.add_argument("--alpha", type=float, required=True)
    lc.add_argument("--transport", type=lambda t: _pair(t, float), help="p,s")
    lc.add_argument("--out")
    lc.set_defaults(func=cmd_lipschitz)

    e = sub.add_parser("experiment", help="radius search, density gap, family validation")
    es = e.add_subparsers(dest="pipeline", required=True)
    dg = es.add_parser("density-gap")
    dg.add_argument("--surface", required=True)
    dg.add_argument("--config", required=True)
    dg.add_argument("--refine", action="store_true", help="also recompute densities after one refinement")
    dg.add_argument("--out")
    ls = es.add_parser("lemma-search")
    ls.add_argument("--pitch", type=float, default=1.0)
    ls.add_argument("--C", type=float, default=1.0)
    ls.add_argument("--D", type=float, required=True)
    ls.add_argument("--r-grid", type=_grid, required=True, help="lo:hi:n")
    ls.add_argument("--delta", type=float, default=0.12, help="conformal grid step")
    ls.add_argument("--out")
    vf = es.add_parser("validate-family")
    vf.add_argument("--manifest", required=True)
    vf.add_argument("--out")
    for q in (dg, ls, vf):
        q.set_defaults(func=cmd_experiment)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return int(args.func(args) or 0)
    except HelidensError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
