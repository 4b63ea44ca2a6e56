"""Command line front end: phantoms, forward transforms, inversions, verification suites.

Fields and sinograms are exchanged as JSON header + raw payload pairs (see
`fileio`); reports are JSON, curves CSV.
"""
import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import fileio, invert, verify
from .fields import UniformGrid, gaussian_phantom, phi_space_phantom, set_threads
from .frac import semyanistyi_forward
from .slice import MixingConfig, invert_fourier
from .xform import radon_heisenberg, radon_transversal, sinogram_grid

METHODS = ["fourier", "semyanistyi", "derivative", "laplacian", "cbp", "cbpx", "hypersingular",
           "heisenberg-fourier", "heisenberg-derivative"]


def parse_alpha(text):
    """'re' or 're,im' to a float or complex."""
    parts = [float(p) for p in text.split(",")]
    if len(parts) == 1:
        return parts[0]
    if len(parts) == 2:
        return complex(parts[0], parts[1]) if parts[1] else parts[0]
    raise argparse.ArgumentTypeError("alpha must be 're' or 're,im'")


def _dim(args):
    if args.n is not None:
        return 2 * args.n + 1
    return args.m


def _grid(args, m):
    return UniformGrid.symmetric(m, args.grid, args.extent)


def _write_json(path, obj):
    text = verify.to_json(obj) + "\n"
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_text(text)


def cmd_phantom(args):
    m = _dim(args)
    g = _grid(args, m)
    if args.kind == "gaussian":
        f = gaussian_phantom(g, width=args.width)
    else:
        dual = g.dual()
        nyq = min(dual.spacing[k] * (g.shape[k] // 2) for k in range(m))
        lo, hi = args.band
        f = phi_space_phantom(g, (lo * nyq, hi * nyq), 2 * dual.spacing[-1], seed=args.seed)
    fileio.save(args.out, f)
    return 0


def cmd_forward(args):
    f = fileio.load(args.input)
    m = f.grid.dim
    geo = sinogram_grid(m, f.grid.axis_grid(m - 1), args.a_extent, args.na)
    if args.method == "transversal":
        out = radon_transversal(f, geo, upsample=args.upsample)
    elif args.method == "heisenberg":
        out = radon_heisenberg(f, geo, upsample=args.upsample)
    elif args.method == "semyanistyi":
        out = semyanistyi_forward(f, args.alpha, geo, upsample=args.upsample)
    else:
        raise SystemExit(f"unknown forward method {args.method!r}")
    fileio.save(args.out, out)
    return 0


def cmd_invert(args):
    phi = fileio.load(args.input)
    m = phi.grid.dim
    if args.grid is None:
        g = UniformGrid(m, phi.grid.shape[-1:] * m, phi.grid.origin[-1:] * m,
                        phi.grid.spacing[-1:] * m)
    else:
        g = _grid(args, m)
    report = {"method": args.method, "grid": g.header()}
    method = args.method
    cfg = MixingConfig(gap=args.gap, radius=args.radius, refine=args.refine)
    if method == "fourier":
        f, rep = invert_fourier(phi, g, cfg)
        report.update(rep)
    elif method == "semyanistyi":
        f = invert.invert_semyanistyi(phi, g, alpha=args.alpha, beta=args.beta,
                                      refine=args.refine)
    elif method == "derivative":
        f = invert.invert_derivative_odd(phi, g, args.placement, refine=args.refine)
    elif method == "laplacian":
        bp = "spectral" if args.margin == 0 and args.refine > 1 else "cubic"
        f, _ = invert.invert_laplacian_odd(phi, g, refine=args.refine, backproject=bp,
                                           margin=args.margin)
    elif method in ("cbp", "cbpx"):
        spec = invert.WaveletSpec(m, args.ell, mode=method)
        eps = None if args.eps is None else args.eps
        f, rep = invert.cbp_reconstruct(phi, spec, g, t0=args.t0, levels=args.levels, eps=eps)
        report.update(rep)
    elif method == "hypersingular":
        spec = invert.HypersingularSpec(m, args.ell, eps=args.eps or 0.125, Y=args.Y)
        M = int(np.ceil(max(sh for _, _, sh in spec.shifts()) * spec.Y / g.spacing[0]))
        ext = UniformGrid(m, tuple(s + 2 * M for s in g.shape),
                          tuple(o - M * h for o, h in zip(g.origin, g.spacing)), g.spacing)
        data = invert.riesz_data(phi, ext)
        f, info = invert.hypersingular_invert(data, spec)
        f = f.with_values(f.values.real)
        report.update(info)
    elif method == "heisenberg-fourier":
        f = invert.invert_heisenberg(phi, g, "fourier", cfg, refine=args.refine)
    elif method == "heisenberg-derivative":
        f = invert.invert_heisenberg(phi, g, "derivative", refine=args.refine)
    else:
        raise SystemExit(f"unknown method {method!r}")
    fileio.save(args.out, f)
    _write_json(args.report or str(Path(args.out).with_suffix("")) + ".report.json", report)
    return 0


def cmd_verify(args):
    rep = verify.run_suite(args.suite, seed=args.seed, p=args.p)
    _write_json(args.out, rep)
    if args.csv:
        Path(args.csv).parent.mkdir(parents=True, exist_ok=True)
        Path(args.csv).write_text(verify.curves_csv(rep))
    return 0


def cmd_report(args):
    rep = json.loads(Path(args.input).read_text())
    for suite, items in rep["reports"].items():
        for r in items:
            name, value = r["measure"]
            shown = "n/a" if value is None else f"{value:.3e}"
            print(f"{suite:11s} {r['name']:34s} {name}={shown}")
    if args.csv:
        Path(args.csv).write_text(verify.curves_csv(rep))
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="transradon",
                                description="Transversal and Heisenberg Radon transforms.")
    p.add_argument("--threads", type=int, default=None,
                   help="worker count (TRANSRADON_THREADS overrides)")
    sub = p.add_subparsers(dest="command", required=True)

    def dims(q):
        q.add_argument("--m", type=int, default=2, help="ambient dimension")
        q.add_argument("--n", type=int, default=None, help="Heisenberg n (sets m = 2n+1)")

    def grid(q, default=128):
        q.add_argument("--grid", type=int, default=default, metavar="N", help="nodes per axis")
        q.add_argument("--extent", type=float, default=8.0, metavar="L",
                       help="half-width of the cube [-L, L]^m")

    q = sub.add_parser("phantom", help="write a test field")
    dims(q)
    grid(q)
    q.add_argument("--kind", choices=["gaussian", "phi"], default="gaussian")
    q.add_argument("--width", type=float, default=1.0)
    q.add_argument("--band", type=float, nargs=2, default=(0.1, 0.3),
                   help="band edges of a phi phantom as fractions of the Nyquist radius")
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--out", required=True, metavar="FILE")
    q.set_defaults(func=cmd_phantom)

    q = sub.add_parser("forward", help="transform a field to a sinogram")
    q.add_argument("input", metavar="FIELD")
    q.add_argument("--method", choices=["transversal", "heisenberg", "semyanistyi"],
                   default="transversal")
    q.add_argument("--a-extent", type=float, default=None, metavar="A")
    q.add_argument("--na", type=int, default=None, help="nodes per slope axis")
    q.add_argument("--alpha", type=parse_alpha, default=0.5)
    q.add_argument("--upsample", type=int, default=2)
    q.add_argument("--out", required=True, metavar="FILE")
    q.set_defaults(func=cmd_forward)

    q = sub.add_parser("invert", help="reconstruct a field from a sinogram")
    q.add_argument("input", metavar="SINOGRAM")
    q.add_argument("--method", choices=METHODS, default="fourier")
    q.add_argument("--grid", type=int, default=None, metavar="N")
    q.add_argument("--extent", type=float, default=8.0, metavar="L")
    q.add_argument("--alpha", type=parse_alpha, default=None)
    q.add_argument("--beta", type=float, default=0.0)
    q.add_argument("--placement", choices=["post", "pre", "split"], default="post")
    q.add_argument("--refine", type=int, default=1)
    q.add_argument("--gap", type=float, default=None)
    q.add_argument("--radius", type=float, default=None)
    q.add_argument("--margin", type=int, default=0,
                   help="extra nodes per side for the Laplacian method")
    q.add_argument("--ell", type=int, default=1)
    q.add_argument("--t0", type=float, default=1.0)
    q.add_argument("--levels", type=int, default=6)
    q.add_argument("--eps", type=float, default=None)
    q.add_argument("--Y", type=float, default=8.0)
    q.add_argument("--out", required=True, metavar="FILE")
    q.add_argument("--report", default=None, metavar="FILE",
                   help="JSON report path (default: next to --out)")
    q.set_defaults(func=cmd_invert)

    q = sub.add_parser("verify", help="run verification suites")
    q.add_argument("--suite", choices=["identities", "inversion", "scaling", "all"],
                   default="all")
    q.add_argument("--seed", type=int, default=7)
    q.add_argument("--threads", type=int, default=argparse.SUPPRESS)
    q.add_argument("--out", default=None, metavar="FILE", help="JSON report (default stdout)")
    q.add_argument("--csv", default=None, metavar="FILE", help="curves as x,y,label CSV")
    q.add_argument("--p", type=float, default=1.5, help="Lebesgue exponent of the scaling suite")
    q.set_defaults(func=cmd_verify)

    q = sub.add_parser("report", help="summarise a verification report")
    q.add_argument("input", metavar="JSON")
    q.add_argument("--csv", default=None, metavar="FILE")
    q.set_defaults(func=cmd_report)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    threads = os.environ.get("TRANSRADON_THREADS") or getattr(args, "threads", None)
    if threads is not None:
        set_threads(int(threads))
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
