"""Candidate loops, the asymmetric Lipschitz distance and the Finsler norm."""
from __future__ import annotations

import itertools
import math
import threading
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import kernels
from .freeprod import MarkedGraph, instantiate_flags, translation_length, validate_marking, word_of_loop
from .graph import (
    TOL,
    GraphOfGroups,
    MarkedLoop,
    crossing_counts,
    cycle_vertices,
    embedded_cycles,
    embedded_paths,
    is_integrable,
    rev,
    rotate_cycle_to,
)
from .groups import FLAG

SHAPES = (
    "embedded-loop",
    "figure-eight",
    "barbell",
    "simply-degenerate-barbell",
    "doubly-degenerate-barbell",
)


@dataclass(frozen=True)
class Candidate:
    shape: str
    loop: MarkedLoop  # FLAG on flagged visits, None elsewhere
    counts: tuple[int, ...]

    @property
    def pattern(self) -> tuple[bool, ...]:
        return tuple(m == FLAG for m in self.loop.markers)

    def label(self, graph: GraphOfGroups) -> str:
        return loop_label(graph, self.loop)


def loop_label(graph: GraphOfGroups, loop) -> str:
    """Edges in order, with ``[v]`` for a flagged turn and ``[v:x]`` for a concrete element."""
    parts = []
    for d, m in zip(loop.edges, loop.markers):
        v = graph.vertices[graph.source(d)]
        if m == FLAG:
            parts.append(f"[{v}]")
        elif m is not None:
            parts.append(f"[{v}:{','.join(map(str, m))}]")
        parts.append(graph.edges[d >> 1] + ("~" if d & 1 else ""))
    return " ".join(parts)


@dataclass(frozen=True)
class CandidateSet:
    candidates: tuple[Candidate, ...]
    counts: np.ndarray  # (M, n_orbits) crossing counts

    def __len__(self):
        return len(self.candidates)

    def __iter__(self):
        return iter(self.candidates)

    def __getitem__(self, k):
        return self.candidates[k]


def _shape_loops(graph: GraphOfGroups) -> list[tuple[str, tuple[int, ...]]]:
    cycles = embedded_cycles(graph)
    cverts = [set(cycle_vertices(graph, c)) for c in cycles]
    nonfree = graph.nonfree_vertices
    out = [("embedded-loop", c) for c in cycles]
    for a, b in itertools.combinations(range(len(cycles)), 2):
        common = cverts[a] & cverts[b]
        c1, c2 = cycles[a], cycles[b]
        if len(common) == 1:
            (p,) = common
            r1 = rotate_cycle_to(graph, c1, p)
            r2 = rotate_cycle_to(graph, c2, p)
            back = tuple(rev(d) for d in reversed(r2))
            out.append(("figure-eight", r1 + r2))
            out.append(("figure-eight", r1 + back))
        elif not common:
            avoid = frozenset(cverts[a] | cverts[b])
            for p in sorted(cverts[a]):
                for q in sorted(cverts[b]):
                    for beta in embedded_paths(graph, p, q, avoid):
                        r1 = rotate_cycle_to(graph, c1, p)
                        r2 = rotate_cycle_to(graph, c2, q)
                        bb = tuple(rev(d) for d in reversed(beta))
                        back = tuple(rev(d) for d in reversed(r2))
                        out.append(("barbell", r1 + beta + r2 + bb))
                        out.append(("barbell", r1 + beta + back + bb))
    for k, c in enumerate(cycles):
        for w in nonfree:
            if w in cverts[k]:
                continue
            for p in sorted(cverts[k]):
                for beta in embedded_paths(graph, p, w, frozenset(cverts[k])):
                    bb = tuple(rev(d) for d in reversed(beta))
                    out.append(("simply-degenerate-barbell", rotate_cycle_to(graph, c, p) + beta + bb))
    for u, w in itertools.combinations(nonfree, 2):
        for beta in embedded_paths(graph, u, w):
            bb = tuple(rev(d) for d in reversed(beta))
            out.append(("doubly-degenerate-barbell", beta + bb))
    return out


def _patterns(graph: GraphOfGroups, edges: tuple[int, ...]):
    L = len(edges)
    forced, optional = [], []
    for k in range(L):
        v = graph.source(edges[k])
        if graph.is_free(v):
            continue
        (forced if edges[k] == rev(edges[k - 1]) else optional).append(k)
    for bits in itertools.product((False, True), repeat=len(optional)):
        markers = [None] * L
        for k in forced:
            markers[k] = FLAG
        for k, b in zip(optional, bits):
            if b:
                markers[k] = FLAG
        yield MarkedLoop(edges, tuple(markers))


_cache_lock = threading.Lock()


@lru_cache(maxsize=256)
def _enumerate(graph: GraphOfGroups) -> CandidateSet:
    seen = {}
    for shape, edges in _shape_loops(graph):
        for loop in _patterns(graph, edges):
            key = loop.canonical()
            if key in seen:
                continue
            edges_c, marks_c = key
            canon = MarkedLoop(edges_c, tuple(FLAG if m == (1,) else None for m in marks_c))
            counts = tuple(int(x) for x in crossing_counts(graph, edges_c))
            seen[key] = Candidate(shape, canon, counts)
    cands = tuple(seen[k] for k in sorted(seen))
    counts = np.array([c.counts for c in cands], dtype=np.int64).reshape(len(cands), graph.n_orbits)
    return CandidateSet(cands, counts)


def enumerate_candidates(graph: GraphOfGroups) -> CandidateSet:
    """All candidates with all marker patterns, deduplicated, in lexicographic order."""
    with _cache_lock:
        return _enumerate(graph)


def lip_norm(metric, tangent, graph: GraphOfGroups) -> tuple[float, Candidate]:
    """max over candidates of tau(g)/ell(g), with the first maximizer as witness."""
    cs = enumerate_candidates(graph)
    ell = np.ascontiguousarray(metric, dtype=float)
    tau = np.ascontiguousarray(tangent, dtype=float)
    value, k = kernels.ratio_max(cs.counts, tau, ell, TOL)
    return float(value), cs[k]


# -- distance ---------------------------------------------------------------------

_valid_cache: dict = {}
_transfer_cache: dict = {}


def _marking_key(marked: MarkedGraph):
    return (marked.graph, marked.marking, tuple(sorted((i, g.moduli) for i, g in marked.groups.items())))


def _check_marking(marked: MarkedGraph) -> None:
    key = _marking_key(marked)
    with _cache_lock:
        known = _valid_cache.get(key)
    if known is None:
        # structural battery only; the metric is checked separately below
        known = validate_marking(marked.with_metric(_barycenter(marked.graph)))
        with _cache_lock:
            _valid_cache[key] = known
    if known:
        raise ValueError("invalid marking: " + "; ".join(known))


def _barycenter(graph: GraphOfGroups) -> np.ndarray:
    return np.full(graph.n_orbits, 1.0 / graph.n_orbits)


def transfer_counts(A: MarkedGraph, B: MarkedGraph) -> np.ndarray:
    """Crossing counts in B of the image of every candidate of A (metric independent)."""
    key = (_marking_key(A), _marking_key(B))
    with _cache_lock:
        hit = _transfer_cache.get(key)
    if hit is not None:
        return hit
    rows = []
    for cand in enumerate_candidates(A.graph):
        word = word_of_loop(A, instantiate_flags(A.graph, cand.loop, A.groups))
        _, loop = translation_length(B, word)
        if loop is None:
            raise ValueError(f"candidate {cand.label(A.graph)} becomes elliptic under the marking")
        rows.append(crossing_counts(B.graph, loop.edges))
    out = np.array(rows, dtype=np.int64).reshape(len(rows), B.graph.n_orbits)
    with _cache_lock:
        _transfer_cache[key] = out
    return out


def same_simplex(A: MarkedGraph, B: MarkedGraph) -> bool:
    return _marking_key(A) == _marking_key(B)


def distance(A: MarkedGraph, B: MarkedGraph) -> tuple[float, Candidate]:
    """d(A, B) = log max_g ell_B(g) / ell_A(g) over candidates g of A (natural log)."""
    if A.rank != B.rank or (A.graph.r, A.graph.n) != (B.graph.r, B.graph.n):
        raise ValueError(f"incompatible ranks {A.rank} and {B.rank}")
    cs = enumerate_candidates(A.graph)
    if same_simplex(A, B):
        num = np.ascontiguousarray(B.ell)
        value, k = kernels.ratio_max(cs.counts, num, np.ascontiguousarray(A.ell), TOL)
        return math.log(value), cs[k]
    _check_marking(A)
    _check_marking(B)
    lens_b = transfer_counts(A, B) @ B.ell
    lens_a = cs.counts @ A.ell
    ratios = lens_b / lens_a
    best = float(ratios.max())
    cut = best - TOL * max(1.0, abs(best))
    k = int(np.argmax(ratios >= cut))
    return math.log(best), cs[k]


def metric_distance(graph: GraphOfGroups, ell_a, ell_b) -> tuple[float, Candidate]:
    """Same-simplex distance between two metrics on one graph."""
    cs = enumerate_candidates(graph)
    value, k = kernels.ratio_max(cs.counts, np.ascontiguousarray(ell_b, dtype=float),
                                 np.ascontiguousarray(ell_a, dtype=float), TOL)
    return math.log(value), cs[k]


@dataclass(frozen=True)
class ConeWitness:
    candidate: Candidate
    index: int
    stable: bool


def max_cone_witness(metric, tangent, graph: GraphOfGroups, probes=(1e-4, 1e-3)) -> ConeWitness:
    """Candidate maximizing tau/ell, checked to realize d(ell, ell + t tau) at the probes."""
    ell = np.asarray(metric, dtype=float)
    tau = np.asarray(tangent, dtype=float)
    if not is_integrable(ell, tau):
        raise ValueError("tangent is not integrable: negative on a zero-length edge")
    cs = enumerate_candidates(graph)
    value, k = kernels.ratio_max(cs.counts, np.ascontiguousarray(tau), np.ascontiguousarray(ell), TOL)
    lens = cs.counts @ ell
    stable = True
    for t in probes:
        moved = ell + t * tau
        if np.any(moved < -TOL):
            stable = False
            break
        ratios = (cs.counts @ moved) / lens
        best = ratios.max()
        # the witness must attain the max (ties with other members of its cone allowed)
        if ratios[k] < best - 1e-12 * max(1.0, best):
            stable = False
    return ConeWitness(cs[k], k, stable)
