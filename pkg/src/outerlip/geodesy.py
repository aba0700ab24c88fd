"""Piecewise-linear paths in a simplex: Lipschitz and corrected lengths, Main Theorem."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .correction import correction_constants, pieces, psi
from .freeprod import MarkedGraph
from .graph import TOL, GraphOfGroups, is_integrable, validate_graph
from .groups import GroupSpec
from .lipschitz import distance, enumerate_candidates, lip_norm


@dataclass(frozen=True)
class PLPath:
    graph: GraphOfGroups
    groups: GroupSpec
    points: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        if len(self.points) < 2:
            raise ValueError("a path needs at least two breakpoints")
        for p in self.points:
            problems = validate_graph(self.graph, p)
            if problems:
                raise ValueError("path leaves the valid-metric region: " + "; ".join(problems))

    def __hash__(self):
        return hash((self.graph, self.points))

    @classmethod
    def through(cls, graph: GraphOfGroups, groups: GroupSpec, points) -> "PLPath":
        return cls(graph, groups, tuple(tuple(float(x) for x in p) for p in points))

    def segments(self):
        for a, b in zip(self.points, self.points[1:]):
            yield np.asarray(a, dtype=float), np.asarray(b, dtype=float)

    def at(self, s: float) -> np.ndarray:
        """Point at global parameter s in [0, 1], segments sharing it uniformly."""
        k = len(self.points) - 1
        j = min(int(s * k), k - 1)
        t = s * k - j
        a, b = np.asarray(self.points[j]), np.asarray(self.points[j + 1])
        return a + t * (b - a)


def reverse_path(path: PLPath) -> PLPath:
    return PLPath(path.graph, path.groups, tuple(reversed(path.points)))


def _breakpoints(a: np.ndarray, b: np.ndarray) -> list[float]:
    """Parameters in (0, 1) where two ratio functions a/(b + t a) swap order."""
    # a_g (b_h + t a_h) = a_h (b_g + t a_g) is linear in t
    p = np.outer(a, b) - np.outer(b, a)
    q = np.outer(a, a) - np.outer(a, a).T
    with np.errstate(divide="ignore", invalid="ignore"):
        roots = -p / q
    roots = roots[np.isfinite(roots) & (q != 0)]
    ts = {0.0, 1.0}
    for t in roots:
        if TOL < t < 1 - TOL:
            ts.add(float(t))
    return sorted(ts)


def segment_length_L(graph: GraphOfGroups, start, end) -> float:
    start = np.asarray(start, dtype=float)
    tau = np.asarray(end, dtype=float) - start
    if not np.any(tau):
        return 0.0
    cs = enumerate_candidates(graph)
    a = cs.counts @ tau
    b = cs.counts @ start
    total = 0.0
    ts = _breakpoints(a, b)
    for t0, t1 in zip(ts, ts[1:]):
        mid = 0.5 * (t0 + t1)
        _, k = kernels.ratio_max(cs.counts, np.ascontiguousarray(tau), np.ascontiguousarray(start + mid * tau), TOL)
        total += math.log((b[k] + t1 * a[k]) / (b[k] + t0 * a[k]))
    return total


def path_length_L(path: PLPath) -> float:
    return sum(segment_length_L(path.graph, a, b) for a, b in path.segments())


def _envelope_log_ratio(rows: np.ndarray, ell0: np.ndarray, tau: np.ndarray) -> float:
    """log(min_r L_r(1) / min_r L_r(0)) accumulated along the lower envelope."""
    base = rows @ ell0
    slope = rows @ tau
    t = 0.0
    low = base.min()
    cand = np.flatnonzero(base <= low + TOL * max(1.0, low))
    act = cand[np.argmin(slope[cand])]
    total = 0.0
    while True:
        cur = base[act] + t * slope[act]
        steeper = slope < slope[act] - TOL
        nxt = 1.0
        if np.any(steeper):
            cross = (base[steeper] - base[act]) / (slope[act] - slope[steeper])
            cross = cross[cross > t + TOL]
            if cross.size:
                nxt = min(1.0, float(cross.min()))
        total += math.log((base[act] + nxt * slope[act]) / cur)
        if nxt >= 1.0:
            return total
        t = nxt
        vals = base + t * slope
        low = vals.min()
        cand = np.flatnonzero(vals <= low + TOL * max(1.0, low))
        act = cand[np.argmin(slope[cand])]


def segment_n_integral(graph: GraphOfGroups, groups: GroupSpec, start, end, m: int = 2) -> float:
    """Integral over the segment of N(ell_t, tau), class by class along lower envelopes."""
    start = np.asarray(start, dtype=float)
    tau = np.asarray(end, dtype=float) - start
    total = 0.0
    for piece in pieces(graph, groups, m):
        t = piece.table
        ell_i, tau_i = start[piece.lift], tau[piece.lift]
        for c in range(len(t.classes)):
            rows = t.counts[t.offsets[c]:t.offsets[c + 1]]
            total -= _envelope_log_ratio(rows, ell_i, tau_i)
    return total


def path_length_N(path: PLPath, m: int = 2) -> float:
    K = correction_constants(path.graph).K
    total = 0.0
    for a, b in path.segments():
        total += segment_length_L(path.graph, a, b)
        total += segment_n_integral(path.graph, path.groups, a, b, m) / (K + 1)
    return total


def path_length_quadrature(path: PLPath, corrected: bool = False, panels: int = 512, order: int = 4,
                           tol: float = 1e-12, max_depth: int = 40) -> float:
    """Adaptive Gauss-Legendre integration of the Finsler norm of the velocity (self-check).

    The corrected norm jumps where a class switches realizer, so panels whose
    halves disagree with the whole are split until they agree.
    """
    from .correction import corrected_norm

    nodes, weights = np.polynomial.legendre.leggauss(order)

    def rule(f, lo, hi):
        half = 0.5 * (hi - lo)
        return half * sum(w * f(lo + half * (x + 1.0)) for x, w in zip(nodes, weights))

    def adapt(f, lo, hi, whole, depth):
        mid = 0.5 * (lo + hi)
        left, right = rule(f, lo, mid), rule(f, mid, hi)
        if depth >= max_depth or abs(left + right - whole) <= tol * max(1.0, hi - lo):
            return left + right
        return adapt(f, lo, mid, left, depth + 1) + adapt(f, mid, hi, right, depth + 1)

    total = 0.0
    for a, b in path.segments():
        tau = b - a
        if not np.any(tau):
            continue
        if corrected:
            def f(s, a=a, tau=tau):
                return corrected_norm(a + s * tau, tau, path.graph, path.groups)
        else:
            def f(s, a=a, tau=tau):
                return lip_norm(a + s * tau, tau, path.graph)[0]
        grid = np.linspace(0.0, 1.0, panels + 1)
        for lo, hi in zip(grid, grid[1:]):
            total += adapt(f, lo, hi, rule(f, lo, hi), 0)
    return total


@dataclass(frozen=True)
class MainTheoremReport:
    d_ts: float
    d_st: float
    psi_t: float
    psi_s: float
    A: int
    lhs: float
    rhs: float
    passed: bool

    @property
    def margin(self) -> float:
        return self.rhs - self.lhs


def check_main_theorem(T: MarkedGraph, S: MarkedGraph, tol: float = 1e-9) -> MainTheoremReport:
    """d(T,S) <= A d(S,T) + (A+1)(Psi(T) - Psi(S))."""
    if (T.graph.r, T.graph.n) != (S.graph.r, S.graph.n):
        raise ValueError("marking mismatch: different (r, n)")
    d_ts = distance(T, S)[0]
    d_st = distance(S, T)[0]
    psi_t = psi(T.ell, T.graph, T.groups)
    psi_s = psi(S.ell, S.graph, S.groups)
    A = correction_constants(T.graph).A
    lhs = d_ts
    rhs = A * d_st + (A + 1) * (psi_t - psi_s)
    return MainTheoremReport(d_ts, d_st, psi_t, psi_s, A, lhs, rhs, lhs <= rhs + tol)


def random_metric(graph: GraphOfGroups, rng: np.random.Generator, zero_prob: float = 0.0) -> np.ndarray:
    """Dirichlet metric; with ``zero_prob`` some edges are set to 0 when that stays valid."""
    while True:
        ell = rng.dirichlet(np.ones(graph.n_orbits))
        if zero_prob:
            for e in range(graph.n_orbits):
                if rng.random() < zero_prob:
                    trial = ell.copy()
                    trial[e] = 0.0
                    if trial.sum() <= 0.0:
                        continue
                    trial /= trial.sum()
                    if not validate_graph(graph, trial):
                        ell = trial
        if not validate_graph(graph, ell):
            return ell


def random_tangent(graph: GraphOfGroups, ell, rng: np.random.Generator) -> np.ndarray:
    """Sum-zero tangent, integrable at ell."""
    while True:
        tau = rng.normal(size=graph.n_orbits)
        tau -= tau.mean()
        zero = np.abs(ell) <= TOL
        if zero.any():
            tau[zero] = np.abs(tau[zero])
            rest = ~zero
            tau[rest] -= tau.sum() / rest.sum()
        if is_integrable(ell, tau) and abs(tau.sum()) <= TOL:
            return tau


def thick_symmetry(graph: GraphOfGroups, eps: float, pairs: int, rng: np.random.Generator) -> float:
    """Empirical D = max d(S,T)/d(T,S) over random pairs in the eps-thick part."""
    from .graph import is_thick
    from .lipschitz import metric_distance

    worst = 0.0
    done = 0
    while done < pairs:
        a, b = random_metric(graph, rng), random_metric(graph, rng)
        if not (is_thick(graph, a, eps) and is_thick(graph, b, eps)):
            continue
        d_ab = metric_distance(graph, a, b)[0]
        d_ba = metric_distance(graph, b, a)[0]
        if d_ab < 1e-9:
            continue
        worst = max(worst, d_ba / d_ab)
        done += 1
    return worst
