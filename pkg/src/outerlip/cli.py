"""Command-line front end: ``outerlip <command> ...``."""
from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path as FilePath

import numpy as np

from .suites import EXIT_PASS, EXIT_USAGE, EXIT_VIOLATION, SUITES, UnknownSuite, fmt, run_suite
from .scene import PRESETS, Scene, SceneError, parse_scene, preset_text


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def load_text(source: str, epsilon: float = 0.1) -> str:
    """A file path, or ``@name`` for a built-in preset."""
    if source.startswith("@"):
        return preset_text(source[1:], epsilon)
    try:
        return FilePath(source).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {source}: {exc.strerror}") from None


def _graph_scene(scene: Scene, name: str | None) -> Scene:
    sc = scene.scene(name)
    if sc.graph is None:
        options = ", ".join(k for k, _ in scene.graphs())
        raise UsageError(f"scene has no top-level graph; pick one with --graph ({options})")
    return sc


class Output:
    def __init__(self, quiet: bool):
        self.quiet = quiet
        self.lines: list[str] = []

    def kv(self, key, value):
        self.line(f"{key}={fmt(value) if isinstance(value, (float, np.floating)) else value}")

    def line(self, text: str):
        self.lines.append(text)

    def text(self) -> str:
        return "\n".join(self.lines) + "\n"


# -- commands -----------------------------------------------------------------------

def cmd_validate(args, scene: Scene, out: Output) -> int:
    from .freeprod import validate_marking

    found = list(scene.graphs())
    bad = 0
    for name, sc in found:
        g = sc.graph
        out.line(f"graph={name}\tr={g.r}\tn={g.n}\tvertices={g.n_vertices}\tedges={g.n_orbits}")
        for mname, marked in sc.markings.items():
            problems = validate_marking(marked, battery=64)
            bad += bool(problems)
            out.line(f"marking={name}.{mname}\t" + ("ok" if not problems else "; ".join(problems)))
    out.kv("status", "valid" if not bad else "invalid")
    return EXIT_PASS if not bad else EXIT_USAGE


def cmd_candidates(args, scene: Scene, out: Output) -> int:
    from .graph import evaluate_loop
    from .lipschitz import enumerate_candidates

    sc = _graph_scene(scene, args.graph)
    ell = sc.metric(args.metric)
    cs = enumerate_candidates(sc.graph)
    out.kv("count", len(cs))
    out.line("index\tshape\tloop\tlength")
    for k, c in enumerate(cs):
        out.line(f"{k}\t{c.shape}\t{c.label(sc.graph)}\t{fmt(evaluate_loop(sc.graph, c.loop, ell)[0])}")
    return EXIT_PASS


def cmd_distance(args, scene: Scene, out: Output) -> int:
    from .lipschitz import distance, same_simplex

    A, B = scene.marked(args.mark_a), scene.marked(args.mark_b)
    d, witness = distance(A, B)
    out.kv("distance", d)
    out.kv("ratio", math.exp(d))
    out.kv("witness", witness.label(A.graph))
    if args.oracle:
        from .oracle import max_ratio_oracle

        if not same_simplex(A, B):
            raise UsageError("--oracle compares within one simplex only")
        o = max_ratio_oracle(A, B)
        out.kv("oracle", o)
        if o > d + args.tolerance:
            out.kv("verdict", "FAIL")
            return EXIT_VIOLATION
    return EXIT_PASS


def cmd_norm(args, scene: Scene, out: Output) -> int:
    from .lipschitz import lip_norm

    sc, key = scene.resolve(args.tangent)
    sc = _graph_scene(sc, None)
    value, witness = lip_norm(sc.metric(args.metric), sc.tangent(key), sc.graph)
    out.kv("norm", value)
    out.kv("witness", witness.label(sc.graph))
    return EXIT_PASS


def cmd_corrected(args, scene: Scene, out: Output) -> int:
    from .correction import correction_constants, n_value
    from .lipschitz import lip_norm

    sc, key = scene.resolve(args.tangent)
    sc = _graph_scene(sc, None)
    ell, tau = sc.metric(args.metric), sc.tangent(key)
    c = correction_constants(sc.graph)
    normL = lip_norm(ell, tau, sc.graph)[0]
    N = n_value(ell, tau, sc.graph, sc.groups)
    out.kv("regime", c.regime)
    out.kv("K", c.K)
    out.kv("A", c.A)
    out.kv("normL", normL)
    out.kv("N", N)
    out.kv("normN", normL + N / (c.K + 1))
    return EXIT_PASS


def cmd_psi(args, scene: Scene, out: Output) -> int:
    from .correction import correction_constants, psi

    sc = _graph_scene(scene, args.graph)
    c = correction_constants(sc.graph)
    out.kv("regime", c.regime)
    out.kv("K", c.K)
    out.kv("psi", psi(sc.metric(args.metric), sc.graph, sc.groups))
    return EXIT_PASS


def cmd_classes(args, scene: Scene, out: Output) -> int:
    from .correction import InfeasibleClass, class_length, enumerate_classes
    from .freeprod import MarkedGraph, identity_marking
    from .lipschitz import loop_label
    from .oracle import class_length_oracle

    sc = _graph_scene(scene, args.graph)
    g, ell = sc.graph, sc.metric(args.metric)
    marked = MarkedGraph(g, ell, sc.groups, identity_marking(g))
    status = EXIT_PASS
    out.line("support\tvector\tlength\trealizer" + ("\toracle" if args.oracle else ""))
    for cls in enumerate_classes(g):
        try:
            length, loops = class_length(ell, cls, g, sc.groups)
            real = loop_label(g, loops[0])
        except InfeasibleClass:
            length, real = math.inf, "-"
        support = ",".join(str(i) for i in sorted(cls.support)) or "-"
        vector = "".join(map(str, cls.vector)) or "-"
        row = f"{support}\t{vector}\t{fmt(length)}\t{real}"
        if args.oracle:
            o = class_length_oracle(ell, cls, marked)
            row += f"\t{fmt(o)}"
            same = (math.isinf(o) and math.isinf(length)) or abs(o - length) <= 1e-12
            if not same:
                status = EXIT_VIOLATION
                row += "\tFAIL"
        out.line(row)
    return status


def cmd_covers(args, scene: Scene, out: Output) -> int:
    from .correction import correction_constants, double_covers

    sc = _graph_scene(scene, args.graph)
    c = correction_constants(sc.graph)
    out.kv("regime", c.regime)
    out.kv("K", c.K)
    out.kv("A", c.A)
    if sc.graph.n <= 1:
        out.kv("covers", 0)
        return EXIT_PASS
    covers = double_covers(sc.graph, sc.groups)
    out.kv("covers", len(covers))
    out.line("cocycle\tvertices\tedges\tr\tbetti")
    for cov in covers:
        out.line(f"{''.join(map(str, cov.cocycle))}\t{cov.graph.n_vertices}\t{cov.graph.n_orbits}\t"
                 f"{cov.graph.r}\t{cov.graph.n}")
    return EXIT_PASS


def cmd_pathlen(args, scene: Scene, out: Output) -> int:
    from .correction import psi
    from .geodesy import path_length_L, path_length_N, path_length_quadrature, reverse_path

    path = scene.path(args.path)
    g, groups = path.graph, path.groups
    lL, lN = path_length_L(path), path_length_N(path)
    back = reverse_path(path)
    out.kv("lenL", lL)
    out.kv("lenN", lN)
    out.kv("dpsi", psi(path.points[-1], g, groups) - psi(path.points[0], g, groups))
    out.kv("lenL_reverse", path_length_L(back))
    out.kv("lenN_reverse", path_length_N(back))
    if args.oracle:
        qL = path_length_quadrature(path)
        qN = path_length_quadrature(path, corrected=True)
        out.kv("quadL", qL)
        out.kv("quadN", qN)
        if abs(qL - lL) > 1e-6 or abs(qN - lN) > 1e-6:
            out.kv("verdict", "FAIL")
            return EXIT_VIOLATION
    return EXIT_PASS


def cmd_expansion(args, scene: Scene, out: Output) -> int:
    from .correction import correction_constants
    from .spectral import check_expansion_bound

    f, f_inv = scene.selfmap(args.map_a), scene.selfmap(args.map_b)
    if f.graph != f_inv.graph:
        raise UsageError("the two maps live on different graphs")
    rep = check_expansion_bound(f, f_inv, correction_constants(f.graph), args.tolerance)
    out.kv("lambda", rep.lam)
    out.kv("mu", rep.mu)
    out.kv("A", rep.A)
    verdict = {True: "pass", False: "FAIL", None: "withheld"}[rep.passed]
    out.kv("verdict", verdict)
    if rep.note:
        out.kv("note", rep.note)
    return EXIT_VIOLATION if rep.passed is False else EXIT_PASS


def cmd_check(args, out: Output) -> int:
    text = load_text(args.scene, args.epsilon) if args.scene else None
    report = run_suite(args.suite, args.seed, args.cases, text, args.tolerance, args.workers)
    for line in report.text().rstrip("\n").split("\n"):
        out.line(line)
    return report.exit_code


COMMANDS = {
    "validate": cmd_validate,
    "candidates": cmd_candidates,
    "distance": cmd_distance,
    "norm": cmd_norm,
    "corrected-norm": cmd_corrected,
    "psi": cmd_psi,
    "classes": cmd_classes,
    "covers": cmd_covers,
    "pathlen": cmd_pathlen,
    "expansion": cmd_expansion,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--report", help="also write the output to this file")
    common.add_argument("--tolerance", type=float, default=1e-9)
    common.add_argument("--oracle", action="store_true", help="force a brute-force cross-check")
    common.add_argument("--quiet", action="store_true")
    common.add_argument("--epsilon", type=float, default=0.1, help="parameter of the example1 preset")

    p = _Parser(prog="outerlip", description="Lipschitz geometry of relative Outer space on small graphs of groups.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def scene_cmd(name, help_text, graph=True, metric=True):
        s = sub.add_parser(name, parents=[common], help=help_text)
        s.add_argument("file", help="scene file, or @preset")
        if graph:
            s.add_argument("--graph", help="qualified preset holding the graph")
        if metric:
            s.add_argument("--metric", default="default")
        return s

    scene_cmd("validate", "parse and validate a scene", graph=False, metric=False)
    scene_cmd("candidates", "list candidate loops")
    s = scene_cmd("distance", "asymmetric Lipschitz distance", graph=False, metric=False)
    s.add_argument("mark_a")
    s.add_argument("mark_b")
    s = scene_cmd("norm", "Lipschitz norm of a tangent", graph=False)
    s.add_argument("tangent")
    s = scene_cmd("corrected-norm", "corrected norm of a tangent", graph=False)
    s.add_argument("tangent")
    scene_cmd("psi", "the potential Psi")
    scene_cmd("classes", "class lengths and realizers")
    scene_cmd("covers", "connected double covers and constants", metric=False)
    s = scene_cmd("pathlen", "lengths of a piecewise-linear path", graph=False, metric=False)
    s.add_argument("path")
    s = scene_cmd("expansion", "expansion-factor bound for a map and its inverse", graph=False, metric=False)
    s.add_argument("map_a")
    s.add_argument("map_b")

    s = sub.add_parser("check", parents=[common], help="run a seeded fuzz suite")
    s.add_argument("suite", help=", ".join(SUITES))
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--cases", type=int, default=100)
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--scene", help="restrict to the graphs of a scene file or @preset")

    s = sub.add_parser("preset", parents=[common], help="print a built-in preset as scene text")
    s.add_argument("name", help=", ".join(PRESETS))
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # argparse usage errors and --help
        return int(exc.code or 0)
    out = Output(args.quiet)
    try:
        if args.command == "preset":
            out.lines.append(preset_text(args.name, args.epsilon).rstrip("\n"))
            code = EXIT_PASS
        elif args.command == "check":
            code = cmd_check(args, out)
        else:
            scene = parse_scene(load_text(args.file, args.epsilon))
            code = COMMANDS[args.command](args, scene, out)
    except (UsageError, SceneError, UnknownSuite, ValueError, KeyError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"outerlip: error: {msg}", file=sys.stderr)
        return EXIT_USAGE
    text = out.text()
    if args.report:
        FilePath(args.report).write_text(text)
    if not args.quiet:
        sys.stdout.write(text)
    elif code == EXIT_VIOLATION:
        print("violation found", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
