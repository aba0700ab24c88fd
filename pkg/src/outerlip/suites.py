"""Deterministic seeded fuzz suites and their delimited-text reports."""
from __future__ import annotations

import hashlib
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .correction import (InfeasibleClass, class_length, correction_constants, corrected_norm, enumerate_classes,
                         n_value, psi)
from .freeprod import AbelClass, MarkedGraph, identity_marking
from .geodesy import (PLPath, check_main_theorem, path_length_L, path_length_N, random_metric, random_tangent,
                      reverse_path)
from .graph import is_thick
from .lipschitz import lip_norm, metric_distance
from .oracle import class_length_oracle
from .scene import Scene, example1_text, parse_scene, test_graphs

EXIT_PASS, EXIT_USAGE, EXIT_VIOLATION = 0, 1, 2


class UnknownSuite(ValueError):
    pass


@dataclass
class Row:
    graph: str
    inputs: str
    values: tuple
    margin: float
    passed: bool


@dataclass
class Report:
    suite: str
    header: dict
    columns: tuple
    rows: list

    @property
    def violations(self) -> int:
        return sum(not r.passed for r in self.rows)

    @property
    def exit_code(self) -> int:
        return EXIT_VIOLATION if self.violations else EXIT_PASS

    def text(self) -> str:
        out = [f"{k}={v}" for k, v in self.header.items()]
        out.append(f"violations={self.violations}")
        if self.rows:
            out.append(f"min_margin={fmt(min(r.margin for r in self.rows))}")
        out.append("\t".join(("case", "graph", "inputs") + self.columns + ("margin", "verdict")))
        for k, r in enumerate(self.rows):
            cells = [str(k), r.graph, r.inputs] + [fmt(v) for v in r.values] + [fmt(r.margin),
                                                                               "pass" if r.passed else "FAIL"]
            out.append("\t".join(cells))
        return "\n".join(out) + "\n"


def fmt(x) -> str:
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return "%.12g" % float(x)


def digest(*arrays) -> str:
    h = hashlib.sha256()
    for a in arrays:
        h.update(np.ascontiguousarray(np.asarray(a, dtype=float)).tobytes())
    return h.hexdigest()[:12]


# -- graph sets ---------------------------------------------------------------------

@lru_cache(maxsize=4)
def default_graphs(group: str = "Z/3") -> tuple:
    return tuple(test_graphs(group).items())


def scene_graphs(scene: Scene | None, group: str = "Z/3") -> tuple:
    if scene is None:
        return default_graphs(group)
    found = tuple(scene.graphs())
    if not found:
        raise ValueError("scene carries no graph")
    return found


def _thick_metric(graph, rng, floor=0.05):
    while True:
        ell = random_metric(graph, rng)
        if ell.min() >= floor:
            return ell


# -- individual suites --------------------------------------------------------------
# each case function returns (values, margin, inputs-hash)

def _norm_axioms(name, sc, rng, tol):
    g = sc.graph
    ell = random_metric(g, rng, zero_prob=0.15)
    t1, t2 = random_tangent(g, ell, rng), random_tangent(g, ell, rng)
    c = float(rng.uniform(0.1, 10.0))
    n1, n2 = lip_norm(ell, t1, g)[0], lip_norm(ell, t2, g)[0]
    n12 = lip_norm(ell, t1 + t2, g)[0]
    nc = lip_norm(ell, c * t1, g)[0]
    zero = lip_norm(ell, np.zeros_like(ell), g)[0]
    # a one-edge graph has only the zero tangent, whose norm must vanish
    pos = [n if np.any(t) else tol - abs(n) for n, t in ((n1, t1), (n2, t2))]
    margin = min(*pos, n1 + n2 - n12 + tol, tol - abs(nc - c * n1), tol - abs(zero))
    ok = all(p > 0 for p in pos) and n12 <= n1 + n2 + tol and abs(nc - c * n1) <= tol * max(1.0, nc) \
        and abs(zero) <= tol
    return (n1, n2, n12, c, nc), margin, ok, digest(ell, t1, t2, [c])


def _sandwich(name, sc, rng, tol):
    g = sc.graph
    K = correction_constants(g).K
    ell = random_metric(g, rng, zero_prob=0.15)
    tau = random_tangent(g, ell, rng)
    fwd, back = lip_norm(ell, tau, g)[0], lip_norm(ell, -tau, g)[0]
    nn = corrected_norm(ell, tau, g, sc.groups)
    lo, hi = max(fwd, back) / (K + 1), 2 * fwd + back
    margin = min(nn - lo, hi - nn)
    return (fwd, back, nn, lo, hi), margin, margin >= -tol, digest(ell, tau)


def _reverse(name, sc, rng, tol):
    g = sc.graph
    A = correction_constants(g).A
    ell = random_metric(g, rng, zero_prob=0.15)
    tau = random_tangent(g, ell, rng)
    a = corrected_norm(ell, tau, g, sc.groups)
    b = corrected_norm(ell, -tau, g, sc.groups)
    margin = A * b - a
    return (a, b), margin, margin >= -tol, digest(ell, tau)


def _relation(name, sc, rng, tol):
    g, groups = sc.graph, sc.groups
    K = correction_constants(g).K
    t = 1e-5
    ell = _thick_metric(g, rng)
    tau = random_tangent(g, ell, rng)
    tau /= max(1.0, float(np.abs(tau).max()))
    moved = ell + t * tau
    fd_psi = (psi(moved, g, groups) - psi(ell, g, groups)) / t
    rel = n_value(ell, tau, g, groups) / (K + 1)
    fd_d = metric_distance(g, ell, moved)[0] / t
    norm = lip_norm(ell, tau, g)[0]
    err_psi = abs(fd_psi - rel) / max(1.0, abs(rel))
    err_d = abs(fd_d - norm) / max(1.0, abs(norm))
    margin = min(1e-3 - err_psi, 1e-3 - err_d)
    return (fd_psi, rel, fd_d, norm), margin, margin >= 0, digest(ell, tau)


def _random_path(g, groups, rng):
    k = int(rng.integers(1, 5))
    pts = [random_metric(g, rng, zero_prob=0.1) for _ in range(k + 1)]
    return PLPath.through(g, groups, pts)


def _len_identity(name, sc, rng, tol):
    g, groups = sc.graph, sc.groups
    A = correction_constants(g).A
    path = _random_path(g, groups, rng)
    lL, lN = path_length_L(path), path_length_N(path)
    dpsi = psi(path.points[-1], g, groups) - psi(path.points[0], g, groups)
    back = path_length_N(reverse_path(path))
    err = abs(lN - lL - dpsi)
    margin = min(tol - err, A * lN + tol - back)
    return (len(path.points) - 1, lL, lN, dpsi, back), margin, margin >= 0, digest(*path.points)


def _main_theorem(name, sc, rng, tol):
    g, groups = sc.graph, sc.groups
    a = random_metric(g, rng, zero_prob=0.1)
    b = random_metric(g, rng, zero_prob=0.1)
    mark = identity_marking(g)
    rep = check_main_theorem(MarkedGraph(g, tuple(a), groups, mark), MarkedGraph(g, tuple(b), groups, mark), tol)
    return (rep.d_ts, rep.d_st, rep.psi_t, rep.psi_s, rep.A), rep.margin, rep.passed, digest(a, b)


def _example1_row(tol):
    sc = parse_scene(example1_text(0.1))
    rep = check_main_theorem(sc.marked("T.std"), sc.marked("S.std"), tol)
    return Row("example1-cross", digest(sc.metric("T.default"), sc.metric("S.default")),
               (rep.d_ts, rep.d_st, rep.psi_t, rep.psi_s, rep.A), rep.margin, rep.passed)


def _oracle_agreement(name, sc, rng, tol):
    g, groups = sc.graph, sc.groups
    ell = random_metric(g, rng, zero_prob=0.1)
    marked = MarkedGraph(g, tuple(ell), groups, identity_marking(g))
    worst, checked = 0.0, 0
    ok = True
    for cls in enumerate_classes(g):
        try:
            fast = class_length(ell, cls, g, groups)[0]
        except InfeasibleClass:
            fast = math.inf
        slow = class_length_oracle(ell, AbelClass(cls.support, cls.vector), marked)
        checked += 1
        if math.isinf(fast) or math.isinf(slow):
            ok &= fast == slow
            continue
        diff = abs(fast - slow)
        worst = max(worst, diff)
        ok &= diff <= 1e-12
    return (checked, worst), 1e-12 - worst if ok else -1.0, ok, digest(ell)


def _thick_symmetry(name, sc, rng, tol, eps=0.2):
    g = sc.graph
    while True:
        a, b = random_metric(g, rng), random_metric(g, rng)
        if is_thick(g, a, eps) and is_thick(g, b, eps):
            d_ab = metric_distance(g, a, b)[0]
            if d_ab > 1e-9:
                break
    d_ba = metric_distance(g, b, a)[0]
    ratio = d_ba / d_ab
    return (d_ab, d_ba, ratio), 1.0 / ratio, math.isfinite(ratio), digest(a, b)


def _expansion_pairs():
    from .scene import fibonacci_text

    sc = parse_scene(fibonacci_text())
    return [("fibonacci", sc, sc.selfmap("phi"), sc.selfmap("phi_inv")),
            ("fibonacci-inverse", sc, sc.selfmap("phi_inv"), sc.selfmap("phi")),
            ("unit-ident", sc.scene("unit"), sc.selfmap("unit.ident"), sc.selfmap("unit.ident"))]


def _expansion(name, sc, rng, tol, case=0):
    from .spectral import (check_expansion_bound, eigenmetric, iterate_distance, rose_word_images,
                           transition_matrix)

    label, scene, f, f_inv = _expansion_pairs()[case % 3]
    g = scene.graph
    const = correction_constants(g)
    rep = check_expansion_bound(f, f_inv, const, tol)
    lam, mu = rep.lam, rep.mu
    margin = min(const.A * math.log(lam) - math.log(mu), const.A * math.log(mu) - math.log(lam))
    ok = bool(rep.passed)
    iter_err = 0.0
    if label == "fibonacci":
        # d(T, phi^k T) at the eigenmetric equals k log lambda
        M = transition_matrix(f)
        ell = tuple(eigenmetric(M.T))
        marked = MarkedGraph(g, ell, scene.groups, identity_marking(g))
        images, inv = rose_word_images(f), rose_word_images(f_inv)
        k = 1 + case // 3 % 3
        iter_err = abs(iterate_distance(marked, images, inv, k) - k * math.log(lam))
        ok &= iter_err <= 1e-9
    return (lam, mu, const.A, iter_err), margin, ok, label


SUITES = {
    "norm-axioms": ("norm axioms: positivity, subadditivity, positive homogeneity of the Lipschitz norm",
                    _norm_axioms),
    "sandwich": ("sandwich lemma: max(|t|L,|-t|L)/(K+1) <= |t|N <= 2|t|L + |-t|L", _sandwich),
    "reverse": ("reverse corollary: |t|N <= A |-t|N with A = 3(K+1)", _reverse),
    "relation": ("relation: directional derivative of Psi equals N/(K+1); derivative property as companion",
                 _relation),
    "len-identity": ("len1 identity: lenN = lenL + Psi(end) - Psi(start); len2 bound lenN(-g) <= A lenN(g)",
                     _len_identity),
    "main-theorem": ("main theorem: d(T,S) <= A d(S,T) + (A+1)(Psi(T) - Psi(S))", _main_theorem),
    "oracle-agreement": ("class lengths from F_m tables equal brute-force word minima (B = 8)",
                         _oracle_agreement),
    "thick-symmetry": ("thick part quasi-symmetry: d(S,T) <= D d(T,S) for systole >= 0.2", _thick_symmetry),
    "expansion": ("expansion bound: log mu <= A log lambda and log lambda <= A log mu", _expansion),
}

COLUMNS = {
    "norm-axioms": ("norm1", "norm2", "norm_sum", "c", "norm_scaled"),
    "sandwich": ("normL", "normL_rev", "normN", "lower", "upper"),
    "reverse": ("normN", "normN_rev"),
    "relation": ("dpsi_fd", "N_over_K1", "dist_fd", "normL"),
    "len-identity": ("segments", "lenL", "lenN", "dpsi", "lenN_rev"),
    "main-theorem": ("d_TS", "d_ST", "psi_T", "psi_S", "A"),
    "oracle-agreement": ("classes", "max_diff"),
    "thick-symmetry": ("d_TS", "d_ST", "ratio"),
    "expansion": ("lambda", "mu", "A", "iterate_err"),
}


def _pick(graphs, suite, case):
    if suite == "oracle-agreement":
        graphs = [x for x in graphs if x[1].graph.n_orbits <= 3]
    if suite == "thick-symmetry":
        graphs = [x for x in graphs if x[0] == "example2"] or graphs[:1]
    if not graphs:
        raise ValueError("no graph in the scene qualifies for this suite")
    return graphs[case % len(graphs)]


def run_case(suite: str, seed: int, case: int, scene_text: str | None, tol: float) -> Row:
    scene = parse_scene(scene_text) if scene_text else None
    fn = SUITES[suite][1]
    if suite == "expansion":
        values, margin, ok, label = fn(None, None, None, tol, case)
        return Row(label, label, values, margin, ok)
    group = "Z/3"
    if suite == "oracle-agreement" and scene is None and case % 2:
        group = "Z/2"
    graphs = scene_graphs(scene, group)
    name, sc = _pick(list(graphs), suite, case // (2 if scene is None and suite == "oracle-agreement" else 1))
    rng = np.random.default_rng([seed, case])
    values, margin, ok, h = fn(name, sc, rng, tol)
    if group != "Z/3":
        name = f"{name}[{group}]"
    return Row(name, h, tuple(values), float(margin), bool(ok))


def _run_chunk(args):
    suite, seed, cases, scene_text, tol = args
    return [run_case(suite, seed, c, scene_text, tol) for c in cases]


def run_suite(name: str, seed: int, cases: int, scene_text: str | None = None, tol: float = 1e-9,
              workers: int = 1) -> Report:
    if name not in SUITES:
        raise UnknownSuite(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    if cases < 1:
        raise ValueError("cases must be positive")
    scene = parse_scene(scene_text) if scene_text else None
    graphs = scene_graphs(scene) if name != "expansion" else ()
    header = {"suite": name, "statement": SUITES[name][0], "seed": seed, "cases": cases, "tolerance": fmt(tol)}
    consts = []
    for gname, sc in graphs:
        c = correction_constants(sc.graph)
        consts.append(f"{gname}:K={c.K},A={c.A},regime={c.regime}")
    if name == "expansion":
        for label, sc, _, _ in _expansion_pairs()[:3]:
            c = correction_constants(sc.graph)
            consts.append(f"{label}:K={c.K},A={c.A},regime={c.regime}")
    header["constants"] = ";".join(consts)
    idx = list(range(cases))
    if workers <= 1:
        rows = _run_chunk((name, seed, idx, scene_text, tol))
    else:
        chunks = [idx[k::workers] for k in range(workers)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_run_chunk, [(name, seed, ch, scene_text, tol) for ch in chunks]))
        rows = [None] * cases
        for ch, part in zip(chunks, parts):
            for c, row in zip(ch, part):
                rows[c] = row
    if name == "main-theorem" and scene is None:
        rows.append(_example1_row(tol))
    if name == "thick-symmetry":
        header["D"] = fmt(max(r.values[2] for r in rows))
    return Report(name, header, COLUMNS[name], rows)
