"""tpoly: transportation polytopes from the command line.

Exit status is 0 on success, 1 when a verification fails and 2 on bad input.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from fractions import Fraction

from .catalogue import (build_catalogue, catalogue_header, chamber_count, check_desk_scale, conjecture_report,
                        distinct_counts, named_example, read_catalogue, verify_tables, write_catalogue)
from .diameter import AxialPolytope, NonGenericMarginals, path_length_bound, path_to_well_ordered, well_ordered_vertex
from .gale import enumerate_regular_triangulations, gale_transform, is_totally_cyclic
from .linalg import fraction_str
from .models import Family, InputError, build_system, load_marginals, marginals_from_json
from .universal import build_universal_constraints, solution_dimension, vertex_count_bounds
from .vertices import bfs_distances, count_facets, enumerate_vertices_pivot, graph_diameter, graph_to_dot, graph_to_json

log = logging.getLogger("tpoly")


class VerificationFailed(Exception):
    pass


def _emit(data, as_json: bool, text: str) -> None:
    print(json.dumps(data, indent=1, sort_keys=True) if as_json else text)


def _load(args):
    if args.example:
        return marginals_from_json(named_example(args.example))
    if not args.marginals:
        raise InputError("give --marginals FILE or --example NAME")
    return load_marginals(args.marginals)


def _skeleton(args):
    m = _load(args)
    g = enumerate_vertices_pivot(build_system(m.family, m))
    return m, g


# ----------------------------------------------------------------- commands


def cmd_enumerate(args) -> int:
    f = Family.parse(args.family, args.shape)
    check_desk_scale(f, args.allow_large)
    progress = (lambda n: log.info("%d chambers so far", n)) if args.verbose else None
    entries = build_catalogue(f, seed=args.seed, symmetry=args.symmetry, progress=progress)
    if args.out:
        write_catalogue(args.out, catalogue_header(f, args.seed, args.symmetry), entries)
    counts = distinct_counts(entries)
    print("%s: %d chambers in %d entries" % (f, chamber_count(entries), len(entries)))
    print(" ".join(map(str, counts)))
    return 0


def cmd_vertices(args) -> int:
    m, g = _skeleton(args)
    data = {
        "family": m.family.kind,
        "shape": m.family.shape_str,
        "count": len(g.vertices),
        "degenerate": g.flags["degenerate"],
        "dimension": g.flags["dimension"],
        "vertices": [v.to_json() for v in g.vertices],
    }
    lines = ["%d vertices (%s)" % (len(g.vertices), "degenerate" if g.flags["degenerate"] else "non-degenerate")]
    if args.list:
        for v in g.vertices:
            lines.append("  " + " ".join("%s=%s" % (",".join(map(str, c)), fraction_str(x))
                                         for c, x in sorted(v.table.items())))
    _emit(data, args.json, "\n".join(lines))
    return 0


def cmd_graph(args) -> int:
    _, g = _skeleton(args)
    if args.dot:
        print(graph_to_dot(g))
    else:
        data = graph_to_json(g)
        _emit(data, args.json, "%d vertices, %d edges, simple=%s" % (len(g.vertices), g.num_edges(), g.is_simple))
    return 0


def cmd_diameter(args) -> int:
    _, g = _skeleton(args)
    d = graph_diameter(g)
    data = {"vertices": len(g.vertices), "diameter": d, "adjacency_exact": g.flags["adjacency_exact"]}
    _emit(data, args.json, "diameter %d over %d vertices" % (d, len(g.vertices)))
    return 0


def cmd_facets(args) -> int:
    m = _load(args)
    n = count_facets(build_system(m.family, m))
    _emit({"facets": n}, args.json, "%d facets" % n)
    return 0


def cmd_path(args) -> int:
    m, g = _skeleton(args)
    if m.family.kind != "axial":
        raise InputError("paths are constructed for axial polytopes only")
    if g.flags["degenerate"]:
        raise NonGenericMarginals("the polytope is degenerate; perturb the marginals explicitly first")
    poly = AxialPolytope(m)
    target = g.index_of(well_ordered_vertex(poly))
    dist = bfs_distances(g.edges, target)
    starts = range(len(g.vertices)) if args.all else [args.start]
    bound = path_length_bound(m.family.shape)
    report, ok = [], True
    for i in starts:
        if not 0 <= i < len(g.vertices):
            raise InputError("vertex index %d out of range 0..%d" % (i, len(g.vertices) - 1))
        path = path_to_well_ordered(poly, g.vertices[i])
        good = len(path) <= bound and dist[i] <= len(path)
        ok &= good
        item = {"start": i, "length": len(path), "bfs_distance": dist[i], "bound": bound, "within_bound": good}
        if not args.all:
            item["path"] = path.to_json()
        report.append(item)
    if args.json:
        print(json.dumps(report if args.all else report[0], indent=1, sort_keys=True))
    else:
        for item in report:
            print("vertex %d: constructed %d, bfs %d, bound %d%s" % (
                item["start"], item["length"], item["bfs_distance"], bound, "" if item["within_bound"] else "  FAIL"))
    if not ok:
        raise VerificationFailed("a constructed path exceeds its bound")
    return 0


def cmd_verify_tables(args) -> int:
    checks = verify_tables(args.catalogue)
    for c in checks:
        print("%-7s %s  %s" % (c.status.upper(), c.name, c.detail))
    if any(c.status == "fail" for c in checks):
        raise VerificationFailed("table verification failed")
    return 0


def cmd_conjectures(args) -> int:
    _, entries = read_catalogue(args.catalogue)
    rows = conjecture_report(entries)
    if args.json:
        print(json.dumps([dict(vars(r), hirsch_gap=r.hirsch_gap) for r in rows], indent=1))
        return 0
    below = sum(r.hirsch_gap > 0 for r in rows)
    equal = sum(r.hirsch_gap == 0 for r in rows)
    above = sum(r.hirsch_gap < 0 for r in rows)
    ham = {k: sum(r.hamiltonian == k for r in rows) for k in ("yes", "no", "unknown")}
    print("%d entries" % len(rows))
    print("diameter < f-d: %d, = f-d: %d, > f-d: %d" % (below, equal, above))
    print("hamiltonian: %d yes, %d no, %d unknown" % (ham["yes"], ham["no"], ham["unknown"]))
    print("largest diameter: %d" % max((r.diameter for r in rows), default=0))
    return 0


def cmd_gale(args) -> int:
    f = Family.parse(args.family, args.shape)
    conf = gale_transform(f)
    data = {"family": f.kind, "shape": f.shape_str, "rank": conf.rank,
            "vectors": [list(v) for v in conf.vectors], "totally_cyclic": is_totally_cyclic(conf)}
    if conf.rank == 2:
        u = build_universal_constraints(conf)
        lo, hi = vertex_count_bounds(u)
        data["universal_bounds"] = [fraction_str(lo), fraction_str(hi)]
        data["universal_dimension"] = solution_dimension(u)
    if args.triangulations:
        check_desk_scale(f, args.allow_large)
        data["regular_triangulations"] = len(enumerate_regular_triangulations(conf))
    lines = ["%s: Gale transform of rank %d" % (f, conf.rank)]
    lines += ["  %s %s" % (",".join(map(str, c)), v) for c, v in zip(f.cells, conf.vectors)]
    for key in ("universal_bounds", "universal_dimension", "regular_triangulations"):
        if key in data:
            lines.append("%s: %s" % (key.replace("_", " "), data[key]))
    _emit(data, args.json, "\n".join(lines))
    return 0


def cmd_example(args) -> int:
    print(json.dumps(named_example(args.name), indent=1))
    return 0


# ------------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tpoly", description="Exact computations on transportation polytopes.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def shape_args(sp):
        sp.add_argument("--family", required=True, choices=["classical", "axial", "planar"])
        sp.add_argument("--shape", required=True, help="e.g. 2x3 or 2x2x3")
        sp.add_argument("--allow-large", action="store_true", help="lift the desk-scale size limits")

    def marginal_args(sp):
        src = sp.add_mutually_exclusive_group()
        src.add_argument("--marginals", metavar="FILE", help="marginals JSON file")
        src.add_argument("--example", metavar="NAME", help="a bundled example (see `tpoly example --list`)")
        sp.add_argument("--json", action="store_true")

    sp = sub.add_parser("enumerate", help="catalogue all chambers of a shape")
    shape_args(sp)
    sp.add_argument("--out", metavar="FILE")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--symmetry", action="store_true", help="one entry per symmetry orbit, with multiplicity")
    sp.set_defaults(func=cmd_enumerate)

    sp = sub.add_parser("vertices", help="list vertices")
    marginal_args(sp)
    sp.add_argument("--list", action="store_true", help="print every vertex")
    sp.set_defaults(func=cmd_vertices)

    sp = sub.add_parser("graph", help="vertex-edge graph")
    marginal_args(sp)
    sp.add_argument("--dot", action="store_true")
    sp.set_defaults(func=cmd_graph)

    sp = sub.add_parser("diameter", help="graph diameter")
    marginal_args(sp)
    sp.set_defaults(func=cmd_diameter)

    sp = sub.add_parser("facets", help="number of facets")
    marginal_args(sp)
    sp.set_defaults(func=cmd_facets)

    sp = sub.add_parser("path", help="constructed path to the well-ordered vertex (axial)")
    marginal_args(sp)
    grp = sp.add_mutually_exclusive_group()
    grp.add_argument("--start", type=int, default=0, help="index of the start vertex")
    grp.add_argument("--all", action="store_true", help="every vertex, summary only")
    sp.set_defaults(func=cmd_path)

    sp = sub.add_parser("verify-tables", help="compare catalogues with the expected rows")
    sp.add_argument("--catalogue", required=True, metavar="DIR")
    sp.set_defaults(func=cmd_verify_tables)

    sp = sub.add_parser("conjectures", help="Hamiltonicity and diameter versus f-d")
    sp.add_argument("--catalogue", required=True, metavar="FILE")
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_conjectures)

    sp = sub.add_parser("gale", help="Gale transform, universal bounds, regular triangulations")
    shape_args(sp)
    sp.add_argument("--triangulations", action="store_true", help="also count regular triangulations")
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_gale)

    sp = sub.add_parser("example", help="print a bundled marginals file")
    sp.add_argument("name")
    sp.set_defaults(func=cmd_example)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except VerificationFailed as exc:
        print("verification failed: %s" % exc, file=sys.stderr)
        return 1
    except InputError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
