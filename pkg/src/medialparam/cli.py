"""``medialparam run <domain.json> ...`` command line entry point."""
from __future__ import annotations

import argparse
import sys
import warnings

from .curves import EQUAL_COUNT, LENGTH_DEPENDENT
from .errors import PipelineError
from .pipeline import RunConfig, run_pipeline
from .remesh import mesh_stats


def _floats(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated numbers, got {text!r}")


def _point(text):
    vals = _floats(text)
    if len(vals) != 2:
        raise argparse.ArgumentTypeError(f"expected x,y, got {text!r}")
    return tuple(vals)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="medialparam",
                                     description="Medial (curve, theta, r) parametrization "
                                                 "of planar Bezier domains.")
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run the full pipeline on a domain JSON file")
    run.add_argument("input")
    run.add_argument("--samples", type=int, default=200)
    run.add_argument("--sampling", choices=[EQUAL_COUNT, LENGTH_DEPENDENT], default=EQUAL_COUNT)
    run.add_argument("--alpha", type=float, default=0.1)
    run.add_argument("--epsilon-scale", type=float, default=0.01)
    run.add_argument("--frame-scale", type=float, default=2.0)
    run.add_argument("--contours", type=_floats, default=[])
    run.add_argument("--query", type=_point, nargs="+", default=[], metavar="X,Y")
    run.add_argument("--svg")
    run.add_argument("--mesh")
    run.add_argument("--field")
    run.add_argument("--field-resolution", type=int, default=101)
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--verify", action="store_true",
                     help="check the Voronoi diagram against a brute-force oracle")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    cfg = RunConfig(input=args.input, samples=args.samples, sampling=args.sampling,
                    alpha=args.alpha, epsilon_scale=args.epsilon_scale,
                    frame_scale=args.frame_scale, contours=args.contours, queries=args.query,
                    svg=args.svg, mesh=args.mesh, field=args.field,
                    field_resolution=args.field_resolution, seed=args.seed, verify=args.verify)
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            art = run_pipeline(cfg)
        for w in caught:
            print(f"warning: {w.message}", file=sys.stderr)
    except PipelineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    stats = mesh_stats(art.mesh)
    lt = art.labeled
    print(f"samples {len(art.samples)}  sites {len(art.sites)}  "
          f"triangles {len(art.triangulation)}")
    print(f"edges boundary {len(lt.E_B)}  limb {len(lt.E_L)}  spine {len(lt.E_S)}  "
          f"collapsed {lt.n_collapsed}  epsilon {lt.epsilon:.6g}")
    print(f"mesh quads {stats['n_quads']}  triangles {stats['n_triangles']}  "
          f"euler {stats['euler']}")
    if art.verify_report is not None:
        rep = art.verify_report
        print(f"voronoi oracle passed ({rep.checked} vertices, worst {rep.worst_violation:.3g})")
    for p, res in art.queries:
        if isinstance(res, Exception):
            print(f"query {p[0]:.17g},{p[1]:.17g} -> outside ({res})")
        else:
            print(f"query {p[0]:.17g},{p[1]:.17g} -> curve {res.curve_id} "
                  f"theta {res.theta:.17g} r {res.r:.17g}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
