"""Command-line interface: ``robinqg <subcommand> --graph FILE ...``.

Exit status 0 on success, 1 on a domain error (message on stderr), 2 on a
usage error.  Numeric output is CSV with a header row and 17 significant
digits, so identical inputs give byte-identical files.
"""

from __future__ import annotations

import argparse
import csv
import io
import logging
import os
import sys

import numpy as np

from .graph import GraphError, load_graph, validate
from .secular import ContourError, Region

log = logging.getLogger("robinqg")


class DomainError(Exception):
    pass


def fmt(x) -> str:
    return format(float(x), ".17g")


def parse_complex(text: str) -> complex:
    parts = [p.strip() for p in text.split(",")]
    try:
        if len(parts) == 1:
            return complex(float(parts[0]), 0.0)
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        pass
    raise argparse.ArgumentTypeError(f"expected RE or RE,IM, got {text!r}")


def parse_assignment(text: str):
    """``ID=RE[,IM]`` -> (id, complex); a bare number applies to every Robin vertex (id None)."""
    if "=" in text:
        vid, val = text.split("=", 1)
        return vid.strip(), parse_complex(val)
    return None, parse_complex(text)


def tolerance(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 1e-14 <= v <= 1e-2:
        raise argparse.ArgumentTypeError("tolerance must lie in [1e-14, 1e-2]")
    return v


def positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


def _alpha_overrides(graph, items):
    if not items:
        return graph
    mapping = {}
    for vid, val in items:
        if vid is None:
            if not graph.robin:
                raise DomainError("no Robin vertices to assign a coupling to")
            for v in graph.robin:
                mapping[v] = val
        else:
            if vid not in graph.vertex_ids:
                raise DomainError(f"unknown vertex id in alpha override: {vid!r}")
            mapping[vid] = val
    return graph.with_alpha(mapping)


def _region(args) -> Region:
    try:
        return Region(*args.region)
    except ValueError as exc:
        raise DomainError(f"region: {exc}") from None


def _write(args, header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(x) if isinstance(x, (float, int, np.floating, np.integer)) and not isinstance(x, bool)
                    else x for x in r])
    text = buf.getvalue()
    if getattr(args, "output", None):
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load(args):
    try:
        g = load_graph(args.graph)
    except OSError as exc:
        raise DomainError(f"cannot read graph file: {exc}") from None
    return g


def _checked(args):
    g = _load(args)
    report = validate(g)
    if not report.valid:
        raise DomainError("invalid graph: " + "; ".join(report.violations))
    return _alpha_overrides(g, args.alpha)


# -- subcommands ---------------------------------------------------------------

def cmd_validate(args):
    g = _load(args)
    report = validate(g)
    if report.valid:
        print(f"valid: {len(g.vertices)} vertices, {len(g.edges)} edges, {len(g.robin)} Robin")
        return 0
    for v in report.violations:
        print(f"violation: {v}", file=sys.stderr)
    return 1


def cmd_spectrum(args):
    from .secular import dirichlet_spectrum, find_roots, flag_near_dirichlet

    g = _checked(args)
    region = _region(args)
    roots = find_roots(g, None, region, tol=args.tol, workers=args.workers)
    if g.robin:
        try:
            dspec = dirichlet_spectrum(g, region.expanded(1e-3), tol=args.tol, workers=args.workers)
        except ContourError:
            dspec = []
        for r in flag_near_dirichlet(roots, dspec):
            if r.near_dirichlet:
                print(f"note: root {r.lam} lies within 1e-6 of the Dirichlet spectrum", file=sys.stderr)
    _write(args, ["re_lambda", "im_lambda", "multiplicity", "residual"],
           [(r.lam.real, r.lam.imag, r.multiplicity, r.residual) for r in roots])
    return 0


def cmd_dirichlet_spectrum(args):
    from .secular import dirichlet_spectrum

    g = _checked(args)
    roots = dirichlet_spectrum(g, _region(args), tol=args.tol, full=args.full, workers=args.workers)
    _write(args, ["re_lambda", "im_lambda", "multiplicity", "residual"],
           [(r.lam.real, r.lam.imag, r.multiplicity, r.residual) for r in roots])
    return 0


def cmd_dtn(args):
    from .dtn import assemble_full_dtn, reduce_dtn

    g = _checked(args)
    lam = args.lam
    full = assemble_full_dtn(g, lam)
    if args.full:
        M, order = full.matrix, full.order
    else:
        red = reduce_dtn(full)
        M, order = red.matrix, full.order[: full.k]
    rows = [(order[i], order[j], M[i, j].real, M[i, j].imag)
            for i in range(M.shape[0]) for j in range(M.shape[1])]
    _write(args, ["row", "col", "re", "im"], rows)
    return 0


def cmd_sweep(args):
    from .continuation import ContinuationConfig, ParameterPath, classify_limit, trace_branch
    from .secular import dirichlet_spectrum, find_roots

    g = _checked(args)
    if not g.robin:
        raise DomainError("sweep needs at least one Robin vertex")
    vel = {v: 0j for v in g.robin}
    for vid, val in args.velocity or []:
        if vid is None:
            for v in g.robin:
                vel[v] = val
        elif vid not in vel:
            raise DomainError(f"unknown Robin vertex id in velocity: {vid!r}")
        else:
            vel[vid] = val
    path = ParameterPath.linear(g.alpha, [vel[v] for v in g.robin], args.T)
    ts = tuple(float(t) for t in np.linspace(0, args.T, args.samples + 1)[1:])
    config = ContinuationConfig(tol=args.tol, div_threshold=args.div_threshold, conv_tol=args.conv_tol,
                                t_eval=ts)
    if args.start is not None:
        starts = [args.start]
    else:
        starts = find_roots(g, None, _region(args), tol=args.tol, workers=args.workers)
    end_alpha = g.with_alpha(list(path.alpha(args.T)))
    dspec = []
    if args.region is not None:
        try:
            dspec = dirichlet_spectrum(end_alpha, _region(args), tol=args.tol)
        except ContourError:
            dspec = []
    header = (["branch", "t"] + [f"re_alpha_{v}" for v in g.robin] + [f"im_alpha_{v}" for v in g.robin]
              + ["re_lambda", "im_lambda", "status"])
    rows = []
    for b_i, s in enumerate(starts):
        br = trace_branch(g, path, s, config)
        status = classify_limit(br, dspec, config)
        for t, lam in br.samples:
            a = path.alpha(t)
            rows.append([b_i, t, *a.real, *a.imag, lam.real, lam.imag, status])
    _write(args, header, rows)
    return 0


def cmd_bounds(args):
    from .bounds import first_eigenvalue_upper_bound, real_part_lower_bound, star_secular_solve
    from .graph import graph_metrics

    g = _checked(args)
    if not g.robin:
        raise DomainError("empty Robin set: coupling-dependent bounds are undefined")
    met = graph_metrics(g)
    al = g.alpha
    rows = [("D", met.min_robin_degree), ("ell_G", met.min_length), ("total_length", met.total_length),
            ("k", len(g.robin))]
    if len(set(al)) == 1:
        a = al[0]
        rows.append(("real_part_lower_bound", real_part_lower_bound(a, met.min_robin_degree, met.min_length)))
        if a.imag == 0 and a.real < 0:
            rows.append(("first_eigenvalue_upper_bound", first_eigenvalue_upper_bound(a.real, g)))
            lam = star_secular_solve(a.real, met.min_length, met.min_robin_degree)
            if lam is not None:
                rows.append(("star_first_eigenvalue", lam))
    else:
        for v, a in zip(g.robin, al):
            rows.append((f"real_part_lower_bound_{v}",
                         real_part_lower_bound(a, met.min_robin_degree, met.min_length)))
    _write(args, ["quantity", "value"], rows)
    return 0


def cmd_sample_range(args):
    from .bounds import RangeRegion, random_test_function, rayleigh_quotient, region_membership

    g = _checked(args)
    region = RangeRegion.for_graph(g)
    rng = np.random.default_rng(args.seed)
    rows = []
    for _ in range(args.samples):
        f = random_test_function(g, rng, nodes=args.nodes, complex_valued=args.complex)
        q = rayleigh_quotient(g, None, f)
        rows.append((q.real, q.imag, int(bool(region_membership(q, region)))))
    _write(args, ["re_q", "im_q", "member"], rows)
    return 0


def cmd_oracle_compare(args):
    from .fd import discretize, eigs_window, match_spectra
    from .secular import find_roots

    g = _checked(args)
    region = _region(args)
    op = discretize(g, None, args.N)
    h = op.h_max
    tol_fn = lambda lam: 5 * h * h * (1 + abs(lam))
    pad = tol_fn(max(abs(region.re_min), abs(region.re_max)) + max(abs(region.im_min), abs(region.im_max)))
    wide = region.expanded(pad)
    exact = [r.lam for r in find_roots(g, None, wide, tol=args.tol, workers=args.workers)]
    approx = eigs_window(op, wide)
    pairs, miss, extra = match_spectra(exact, approx, tol_fn)
    inside = lambda z: region.contains(z)
    rows = []
    for e, a in pairs:
        if inside(e) or inside(a):
            rows.append((e.real, e.imag, a.real, a.imag, abs(e - a), 1))
    bad = 0
    for e in miss:
        if inside(e):
            rows.append((e.real, e.imag, "", "", "", 0))
            bad += 1
    for a in extra:
        if inside(a):
            rows.append(("", "", a.real, a.imag, "", 0))
            bad += 1
    _write(args, ["re_secular", "im_secular", "re_fd", "im_fd", "distance", "matched"], rows)
    if bad:
        print(f"{bad} unmatched value(s)", file=sys.stderr)
        return 1
    return 0


# -- parser -----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--graph", required=True, help="graph description (JSON)")
    common.add_argument("--tol", type=tolerance, default=1e-10, help="solver tolerance in [1e-14, 1e-2]")
    common.add_argument("--alpha", type=parse_assignment, action="append", metavar="[ID=]RE[,IM]",
                        help="coupling override; repeatable; a bare value applies to all Robin vertices")
    common.add_argument("--workers", type=positive_int, default=os.cpu_count() or 1)
    common.add_argument("--output", "-o", help="write CSV here instead of stdout")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="robinqg", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    sub.add_parser("validate", parents=[common], help="check a graph file")

    region_kw = dict(nargs=4, type=float, metavar=("RE_MIN", "RE_MAX", "IM_MIN", "IM_MAX"))
    s = sub.add_parser("spectrum", parents=[common], help="eigenvalues in a rectangle")
    s.add_argument("--region", required=True, **region_kw)

    s = sub.add_parser("dirichlet-spectrum", parents=[common], help="spectrum with Dirichlet on the Robin set")
    s.add_argument("--region", required=True, **region_kw)
    s.add_argument("--full", action="store_true", help="Dirichlet at every vertex")

    s = sub.add_parser("dtn", parents=[common], help="Dirichlet-to-Neumann matrix at one lambda")
    s.add_argument("--lambda", dest="lam", type=parse_complex, required=True, metavar="RE[,IM]")
    s.add_argument("--full", action="store_true", help="unreduced matrix over all non-Dirichlet vertices")

    s = sub.add_parser("sweep", parents=[common], help="trace eigenvalue branches along a coupling path")
    s.add_argument("--velocity", type=parse_assignment, action="append", metavar="[ID=]RE[,IM]",
                   help="d alpha/dt per Robin vertex (default 0)")
    s.add_argument("--T", type=float, required=True)
    s.add_argument("--samples", type=positive_int, default=100)
    s.add_argument("--region", **region_kw, help="trace every root in this region at t=0")
    s.add_argument("--start", type=parse_complex, metavar="RE[,IM]", help="trace a single root")
    s.add_argument("--div-threshold", type=float, default=1e3)
    s.add_argument("--conv-tol", type=float, default=1e-6)

    sub.add_parser("bounds", parents=[common], help="eigenvalue bounds for the given couplings")

    s = sub.add_parser("sample-range", parents=[common], help="random Rayleigh quotients and membership")
    s.add_argument("--samples", type=positive_int, default=1000)
    s.add_argument("--nodes", type=int, default=16)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--complex", action="store_true", help="complex-valued test functions")

    s = sub.add_parser("oracle-compare", parents=[common], help="secular roots against finite elements")
    s.add_argument("--region", required=True, **region_kw)
    s.add_argument("--N", type=float, default=64, help="cells per unit length")
    return p


COMMANDS = {
    "validate": cmd_validate,
    "spectrum": cmd_spectrum,
    "dirichlet-spectrum": cmd_dirichlet_spectrum,
    "dtn": cmd_dtn,
    "sweep": cmd_sweep,
    "bounds": cmd_bounds,
    "sample-range": cmd_sample_range,
    "oracle-compare": cmd_oracle_compare,
}


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR, format="%(message)s")
    if args.command == "sweep" and args.start is None and args.region is None:
        parser.print_usage(sys.stderr)
        print("robinqg sweep: error: give --start or --region", file=sys.stderr)
        return 2
    try:
        return COMMANDS[args.command](args)
    except (DomainError, GraphError, ContourError, ValueError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
