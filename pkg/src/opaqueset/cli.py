"""Command-line interface.

Exit codes: 0 success (certified / all checks satisfied), 1 malformed input,
2 non-opaque with witness, 3 inconclusive, 4 an audited inequality failed.
"""
from __future__ import annotations

import argparse
import csv
import sys
from contextlib import contextmanager

import numpy as np

from . import constructions
from .bounds import AuditConfig, audit
from .errors import OpaqueSetError, SceneFormatError
from .measures import DEFAULT_ELL_MAX, measure_of_segments
from .opacity import CERTIFIED, DEFAULT_MAX_REFINEMENTS, DEFAULT_N_SWEEP, NON_OPAQUE, verify
from .optimizer import SearchConfig, shorten
from .render import render_svg
from .scenefile import dump_report, dump_scene, parse_scene
from .shadows import DEFAULT_N_GRID, sample_profile

EXIT_OK, EXIT_INPUT, EXIT_NON_OPAQUE, EXIT_INCONCLUSIVE, EXIT_VIOLATED = 0, 1, 2, 3, 4


def _read_scene(path: str):
    if path == "-":
        text = sys.stdin.read()
    else:
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise SceneFormatError(f"{path}: {exc.strerror}") from None
    return parse_scene(text)


@contextmanager
def _output(path: str | None):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            yield fh


def _cmd_verify(args) -> int:
    scene = _read_scene(args.scene)
    cert = verify(scene.domain, scene.segments, args.sweep, args.refinements)
    print(f"verdict {cert.verdict} method={cert.method} sweep={cert.n_sweep} refinements={cert.refinements}")
    if cert.verdict == CERTIFIED:
        return EXIT_OK
    if cert.verdict == NON_OPAQUE:
        theta, offset = cert.witness
        print(f"witness theta={theta:.5g} offset={offset:.5g}")
        return EXIT_NON_OPAQUE
    return EXIT_INCONCLUSIVE


def _cmd_audit(args) -> int:
    scene = _read_scene(args.scene)
    cfg = AuditConfig(n_grid=args.grid, n_sweep=args.sweep, max_refinements=args.refinements,
                      ell_max=args.lmax)
    report = audit(scene.domain, scene.segments, cfg)
    flat = {"scene": scene.name}
    flat.update(report.to_dict())
    with _output(args.output) as fh:
        fh.write(dump_report(flat))
    return EXIT_OK if report.all_satisfied else EXIT_VIOLATED


def _cmd_generate(args) -> int:
    name = args.name
    if name == "random":
        scene = constructions.random_scene(args.seed, args.vertices, args.segments,
                                           include_boundary=args.with_boundary)
    elif name == "triangle-tripod":
        scene = constructions.triangle_tripod(args.side)
    elif name == "rectangle-three-sides":
        scene = constructions.rectangle_three_sides(args.width, args.height)
    elif name == "disk-whiskers":
        scene = constructions.disk_half_circle_whiskers(args.n_arc)
    else:
        scene = constructions.GENERATORS[name]()
    with _output(args.output) as fh:
        fh.write(dump_scene(scene, {"generator": name}))
    return EXIT_OK


def _cmd_optimize(args) -> int:
    scene = _read_scene(args.scene)
    cfg = SearchConfig(seed=args.seed, max_iters=args.iters, n_restarts=args.restarts,
                       bias_weight=args.bias, n_sweep=args.search_sweep, final_sweep=args.sweep,
                       max_refinements=args.refinements)
    best, trace = shorten(scene, cfg)
    with _output(args.output) as fh:
        fh.write(dump_scene(best, {"seed": args.seed, "iterations": args.iters,
                                   "input_length": scene.length, "length": best.length}))
    if args.trace:
        with open(args.trace, "w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["iter", "length"])
            for it, length in trace:
                w.writerow([it, "%.17g" % length])
    print(f"length {scene.length:.17g} -> {best.length:.17g}", file=sys.stderr)
    return EXIT_OK


def _cmd_profile(args) -> int:
    scene = _read_scene(args.scene)
    prof = sample_profile(scene.domain, measure_of_segments(scene.segments), args.n)
    with _output(args.output) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["theta", "f", "g", "gap"])
        for row in np.column_stack([prof.thetas, prof.f_values, prof.g_values, prof.gap_values]):
            w.writerow(["%.17g" % v for v in row])
    return EXIT_OK


def _cmd_render(args) -> int:
    scene = _read_scene(args.scene)
    with _output(args.output) as fh:
        fh.write(render_svg(scene, args.size))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="opaqueset", description="Verify and audit opaque sets of convex polygons.")
    sub = p.add_subparsers(dest="command", required=True)

    def scene_cmd(name, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("scene", help="scene file, or - for stdin")
        return sp

    def sweep_flags(sp):
        sp.add_argument("--sweep", type=int, default=DEFAULT_N_SWEEP, help="angular sweep size")
        sp.add_argument("--refinements", type=int, default=DEFAULT_MAX_REFINEMENTS)

    sp = scene_cmd("verify", "certify opacity or print a witness line")
    sweep_flags(sp)
    sp.set_defaults(func=_cmd_verify)

    sp = scene_cmd("audit", "write the flat audit report")
    sweep_flags(sp)
    sp.add_argument("--grid", type=int, default=DEFAULT_N_GRID, help="shadow sampling grid")
    sp.add_argument("--lmax", type=int, default=DEFAULT_ELL_MAX, help="Fourier truncation")
    sp.add_argument("-o", "--output")
    sp.set_defaults(func=_cmd_audit)

    sp = sub.add_parser("generate", help="write a named scene")
    sp.add_argument("--name", required=True, choices=sorted(constructions.GENERATORS))
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--vertices", type=int, default=8)
    sp.add_argument("--segments", type=int, default=6)
    sp.add_argument("--with-boundary", action="store_true")
    sp.add_argument("--side", type=float, default=1.0)
    sp.add_argument("--width", type=float, default=1.0)
    sp.add_argument("--height", type=float, default=0.01)
    sp.add_argument("--n-arc", type=int, default=1024)
    sp.add_argument("-o", "--output")
    sp.set_defaults(func=_cmd_generate)

    sp = scene_cmd("optimize", "shorten a certified barrier by local search")
    sweep_flags(sp)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--iters", type=int, default=300)
    sp.add_argument("--restarts", type=int, default=1)
    sp.add_argument("--bias", type=float, default=0.0)
    sp.add_argument("--search-sweep", type=int, default=8192)
    sp.add_argument("--trace", help="CSV file for the (iter, length) trace")
    sp.add_argument("-o", "--output")
    sp.set_defaults(func=_cmd_optimize)

    sp = scene_cmd("profile", "CSV of theta, f, g and g - f")
    sp.add_argument("--n", type=int, default=DEFAULT_N_GRID)
    sp.add_argument("-o", "--output")
    sp.set_defaults(func=_cmd_profile)

    sp = scene_cmd("render", "SVG drawing")
    sp.add_argument("--size", type=int, default=480)
    sp.add_argument("-o", "--output")
    sp.set_defaults(func=_cmd_render)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (OpaqueSetError, ValueError) as exc:
        # Scene-format, validation and precondition failures all mean bad input.
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


run = main

if __name__ == "__main__":
    sys.exit(main())
