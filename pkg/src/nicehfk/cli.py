"""Command-line interface: validate, stats, nicefy, hfk, bench.

Exit codes: 0 success, 1 invalid input or usage, 2 a checked bound or
internal assertion failed.
"""
from __future__ import annotations

import argparse
import csv
import json
import random
import sys
import time
from pathlib import Path

from . import moves
from .diagram import MalformedDiagram, parse, serialize
from .fixtures import NAMES as FIXTURES, fixture_text
from .homology import NonIntegralGrading, SingularSystem, compute_hfk
from .nicefy import MODES, IterationCap, StuckStep, nicefy

OK, INVALID, FAILED = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def read_diagram(source):
    """Load a diagram from a path, or a bundled fixture by name."""
    path = Path(source)
    if path.exists():
        return parse(path.read_text(encoding="utf-8"))
    if source in FIXTURES:
        return parse(fixture_text(source))
    raise FileNotFoundError(f"no such file or fixture: {source}")


def _emit(text, out=None):
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


# ----------------------------------------------------------------------
# commands

def cmd_validate(args):
    d = read_diagram(args.path)
    m = d.metrics
    print(f"valid: genus {m.genus}, {m.vertices} vertices, {m.regions} regions")
    return OK


def stats_dict(diagram, regions=False):
    m = diagram.metrics
    lhs, rhs = m.euler_identity()
    out = {
        "genus": m.genus,
        "vertices": m.vertices,
        "regions": m.regions,
        "bigons": m.bigons,
        "badness": m.badness,
        "badness_z": m.badness_z,
        "badness_by_distance": {str(k): v for k, v in m.badness_by_distance.items()},
        "distance": m.distance,
        "ugliness": m.ugliness,
        "all_disk": m.all_disk,
        "nice": m.nice,
        "euler_identity": {"lhs": lhs, "rhs": rhs,
                           "status": ("PASS" if lhs == rhs else "FAIL") if m.all_disk else "n/a"},
    }
    if regions:
        dist = diagram.distances
        out["region_list"] = [
            {"id": r.id, "corners": len(r.corners), "edges": r.edge_count,
             "boundary_components": len(r.boundary), "genus": r.genus,
             "badness": r.badness, "euler_measure": str(r.euler_measure),
             "distance": dist[r.id], "z": r.id == diagram.z_region, "w": r.id == diagram.w_region}
            for r in diagram.regions]
    return out


def cmd_stats(args):
    d = read_diagram(args.path)
    s = stats_dict(d, args.regions)
    if args.format == "json":
        print(json.dumps(s, indent=2))
        return OK
    for key in ("genus", "vertices", "regions", "bigons", "badness", "badness_z",
                "distance", "ugliness", "all_disk", "nice"):
        val = s[key]
        if isinstance(val, bool):
            val = str(val).lower()
        print(f"{key:<10} {val}")
    by_d = " ".join(f"{k}:{v}" for k, v in s["badness_by_distance"].items()) or "-"
    print(f"{'by_dist':<10} {by_d}")
    e = s["euler_identity"]
    print(f"b+b_z = 4(g-1)+B: {e['lhs']} = {e['rhs']}: {e['status']}")
    if args.regions:
        print()
        print(" id corners bdry genus bad   e     dist")
        for r in s["region_list"]:
            tag = ("z" if r["z"] else "") + ("w" if r["w"] else "")
            print(f"{r['id']:>3} {r['corners']:>7} {r['boundary_components']:>4} {r['genus']:>5} "
                  f"{r['badness']:>3} {r['euler_measure']:>5} {r['distance']:>5} {tag}")
    return OK


def _trace_sink(directory):
    if not directory:
        return None
    root = Path(directory)
    root.mkdir(parents=True, exist_ok=True)
    counter = [0]

    def sink(label, diagram):
        counter[0] += 1
        (root / f"{counter[0]:04d}-{label}.hd").write_text(serialize(diagram), encoding="utf-8")

    return sink


def _print_checks(report, stream):
    for c in report.bound_checks:
        status = "PASS" if c.passed else ("FAIL" if c.gating else "FAIL (not gating)")
        print(f"{c.name}: {status}  [{c.lhs} vs {c.rhs}]", file=stream)


def cmd_nicefy(args):
    d = read_diagram(args.path)
    nice, report = nicefy(d, mode=args.mode, skip_distance_one=args.skip_distance_one,
                          trace=_trace_sink(args.trace_dir))
    _emit(serialize(nice), args.output)
    if args.report:
        Path(args.report).write_text(json.dumps(report.to_json(), indent=2) + "\n", encoding="utf-8")
    _print_checks(report, sys.stderr if not args.output else sys.stdout)
    return OK if report.passed else FAILED


def laurent(coeffs):
    """Format {power: coefficient} as a Laurent polynomial in t."""
    text = ""
    for a, c in sorted(coeffs.items(), reverse=True):
        mono = "" if a == 0 else ("t" if a == 1 else f"t^{a}")
        mag = abs(c)
        body = f"{mag}" if not mono else (mono if mag == 1 else f"{mag}{mono}")
        if not text:
            text = ("-" if c < 0 else "") + body
        else:
            text += (" - " if c < 0 else " + ") + body
    return text or "0"


def rank_table(result):
    if not result.ranks:
        return "(zero)\n"
    alex = sorted({a for a, _ in result.ranks})
    masl = sorted({m for _, m in result.ranks}, reverse=True)
    width = max(3, max(len(str(a)) for a in alex) + 1)
    lines = ["M\\A " + "".join(f"{a:>{width}}" for a in alex)]
    for m in masl:
        cells = "".join(f"{result.ranks.get((a, m), 0) or '.':>{width}}" for a in alex)
        lines.append(f"{m:>3} " + cells)
    chi = laurent(result.euler)
    lines.append(f"total rank {result.total_rank}; generators {result.generators}")
    lines.append(f"euler {chi}  ({result.normalization} gradings)")
    return "\n".join(lines) + "\n"


def cmd_hfk(args):
    d = read_diagram(args.path)
    report = None
    if not d.metrics.nice:
        if args.auto_nicefy:
            d, report = nicefy(d, mode=args.mode, trace=_trace_sink(args.trace_dir))
        elif not args.assume_nice:
            print("error: diagram is not nice; rerun with --auto-nicefy", file=sys.stderr)
            return INVALID
    result = compute_hfk(d, normalize=args.normalize)
    if args.format == "json":
        out = result.to_json()
        if report is not None:
            out["nicefy"] = {"passed": report.passed, "vertices": d.num_vertices, "genus": d.genus}
        text = json.dumps(out, indent=2) + "\n"
    else:
        text = rank_table(result)
    _emit(text, args.output)
    if args.report and report is not None:
        Path(args.report).write_text(json.dumps(report.to_json(), indent=2) + "\n", encoding="utf-8")
    if report is not None and not report.passed:
        return FAILED
    return OK


BENCH_COLUMNS = ["file", "mode", "v0", "g0", "b0", "d0", "steps", "new_vertices",
                 "bound_lhs", "bound_rhs", "pass", "wall_ms"]


def bench_rows(inputs, modes, scrambles=0, seed=0):
    """Yield one dict per (input, mode); inputs are (name, diagram) pairs."""
    rng = random.Random(seed)
    items = []
    for name, d in inputs:
        items.append((name, d))
        for k in range(scrambles):
            items.append((f"{name}~{k}", moves.scramble(d, rng, rng.randint(1, 4))))
    for name, d in items:
        m = d.metrics
        for mode in modes:
            t0 = time.perf_counter()
            row = {"file": name, "mode": mode, "v0": m.vertices, "g0": m.genus,
                   "b0": m.badness, "d0": m.distance}
            try:
                _, report = nicefy(d, mode=mode)
            except (StuckStep, IterationCap, AssertionError, MalformedDiagram) as exc:
                row.update(steps="", new_vertices="", bound_lhs="", bound_rhs="",
                           **{"pass": f"error: {exc}"})
            else:
                loop = [c for c in report.bound_checks if c.name.endswith("steps <= bound")]
                row.update(
                    steps=report.steps[-1].moves,
                    new_vertices=report.total_new_vertices,
                    bound_lhs=loop[0].lhs if loop else "",
                    bound_rhs=loop[0].rhs if loop else "",
                    **{"pass": report.passed},
                )
            row["wall_ms"] = round((time.perf_counter() - t0) * 1000, 1)
            yield row


def cmd_bench(args):
    if args.dir:
        files = sorted(Path(args.dir).glob("*.hd"))
        inputs = [(f.name, parse(f.read_text(encoding="utf-8"))) for f in files]
    else:
        inputs = [(f"{n}.hd", parse(fixture_text(n))) for n in sorted(FIXTURES)]
    modes = MODES if args.mode == "both" else (args.mode,)
    out = open(args.output, "w", newline="", encoding="utf-8") if args.output else sys.stdout
    ok = True
    try:
        writer = csv.DictWriter(out, fieldnames=BENCH_COLUMNS, lineterminator="\n")
        writer.writeheader()
        for row in bench_rows(inputs, modes, args.random, args.seed):
            ok &= row["pass"] is True
            writer.writerow(row)
    finally:
        if out is not sys.stdout:
            out.close()
    return OK if ok else FAILED


# ----------------------------------------------------------------------
# argument parsing

def build_parser():
    p = _Parser(prog="nicehfk", description="Nice Heegaard diagrams and knot Floer homology.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    v = sub.add_parser("validate", help="parse and check a diagram")
    v.add_argument("path", help="diagram file or bundled fixture name")
    v.set_defaults(func=cmd_validate)

    s = sub.add_parser("stats", help="print diagram metrics")
    s.add_argument("path")
    s.add_argument("--regions", action="store_true", help="list every region")
    s.add_argument("--format", choices=("table", "json"), default="table")
    s.set_defaults(func=cmd_stats)

    n = sub.add_parser("nicefy", help="turn a diagram into a nice one")
    n.add_argument("path")
    n.add_argument("-o", "--output", help="write the nice diagram here (default stdout)")
    n.add_argument("--report", help="write the JSON report here")
    n.add_argument("--mode", choices=MODES, default="modified")
    n.add_argument("--trace-dir", help="write every intermediate diagram into this directory")
    n.add_argument("--skip-distance-one", action="store_true",
                   help="do not attach handles before the Sarkar-Wang loop")
    n.set_defaults(func=cmd_nicefy)

    h = sub.add_parser("hfk", help="compute knot Floer homology ranks")
    h.add_argument("path")
    group = h.add_mutually_exclusive_group()
    group.add_argument("--assume-nice", action="store_true",
                       help="compute even if the diagram is not nice (results may be wrong)")
    group.add_argument("--auto-nicefy", action="store_true", help="nicefy first when needed")
    h.add_argument("--mode", choices=MODES, default="modified")
    h.add_argument("--format", choices=("table", "json"), default="table")
    h.add_argument("--normalize", choices=("relative", "symmetric"), default="relative")
    h.add_argument("--report", help="write the nicefy JSON report here")
    h.add_argument("--trace-dir")
    h.add_argument("-o", "--output")
    h.set_defaults(func=cmd_hfk)

    b = sub.add_parser("bench", help="CSV of nicefy cost per diagram and mode")
    b.add_argument("dir", nargs="?", help="directory of .hd files (default: bundled fixtures)")
    b.add_argument("--mode", choices=MODES + ("both",), default="both")
    b.add_argument("--random", type=int, default=0, metavar="N",
                   help="also bench N randomly scrambled copies of each input")
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("-o", "--output")
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return INVALID
    try:
        return args.func(args)
    except MalformedDiagram as exc:
        print(f"invalid: {exc}", file=sys.stderr)
        return INVALID
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return INVALID
    except SingularSystem as exc:
        print(f"invalid: {exc}", file=sys.stderr)
        return INVALID
    except (StuckStep, IterationCap, NonIntegralGrading, AssertionError) as exc:
        print(f"failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return FAILED


if __name__ == "__main__":
    sys.exit(main())
