"""Quotient graphs of groups, metrics, tangent vectors and marked loops.

Directed edges are encoded as ints: orbit ``e`` traversed forwards is
``2*e`` and backwards ``2*e + 1``, so reversal is ``d ^ 1``.
"""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .groups import FLAG, AbelianGroup, is_trivial, marker_key, merge_markers

TOL = 1e-12


def rev(d: int) -> int:
    return d ^ 1


def orbit(d: int) -> int:
    return d >> 1


@dataclass(frozen=True)
class GraphOfGroups:
    vertices: tuple[str, ...]
    factors: tuple[int, ...]  # 0 marks a free vertex, i >= 1 the vertex carrying G_i
    edges: tuple[str, ...]
    ends: tuple[tuple[int, int], ...]  # (source, target) per edge orbit
    basepoint: int = 0
    tree: tuple[int, ...] | None = None
    _parent: tuple = field(default=(), repr=False, compare=False, hash=False)

    def __post_init__(self):
        if len(self.vertices) != len(self.factors):
            raise ValueError("vertex names and factor labels differ in length")
        if len(self.edges) != len(self.ends):
            raise ValueError("edge names and endpoints differ in length")
        if self.tree is None:
            object.__setattr__(self, "tree", self._bfs_tree())
        else:
            object.__setattr__(self, "tree", tuple(sorted(self.tree)))
        object.__setattr__(self, "_parent", self._tree_parents())

    @classmethod
    def build(cls, vertices: Sequence[tuple[str, int]], edges: Sequence[tuple[str, str, str]],
              basepoint: str | None = None, tree: Iterable[str] | None = None) -> "GraphOfGroups":
        names = [v for v, _ in vertices]
        index = {v: k for k, v in enumerate(names)}
        if len(index) != len(names):
            raise ValueError("duplicate vertex name")
        enames = [e for e, _, _ in edges]
        if len(set(enames)) != len(enames):
            raise ValueError("duplicate edge name")
        ends = []
        for e, s, t in edges:
            if s not in index or t not in index:
                raise KeyError(f"edge {e} refers to unknown vertex")
            ends.append((index[s], index[t]))
        base = index[basepoint] if basepoint is not None else 0
        tree_ids = None
        if tree is not None:
            eidx = {e: k for k, e in enumerate(enames)}
            tree_ids = tuple(eidx[e] for e in tree)
        return cls(tuple(names), tuple(f for _, f in vertices), tuple(enames), tuple(ends), base, tree_ids)

    # -- combinatorics -------------------------------------------------
    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_orbits(self) -> int:
        return len(self.edges)

    @property
    def r(self) -> int:
        return sum(1 for f in self.factors if f)

    @property
    def n(self) -> int:
        return self.n_orbits - self.n_vertices + 1

    def source(self, d: int) -> int:
        s, t = self.ends[d >> 1]
        return t if d & 1 else s

    def target(self, d: int) -> int:
        s, t = self.ends[d >> 1]
        return s if d & 1 else t

    def out_edges(self, v: int) -> list[int]:
        return [d for d in range(2 * self.n_orbits) if self.source(d) == v]

    def valence(self, v: int) -> int:
        return len(self.out_edges(v))

    def is_free(self, v: int) -> bool:
        return self.factors[v] == 0

    def factor_vertex(self, i: int) -> int:
        return self.factors.index(i)

    @property
    def nonfree_vertices(self) -> list[int]:
        return [v for v, f in enumerate(self.factors) if f]

    @property
    def non_tree(self) -> tuple[int, ...]:
        tree = set(self.tree)
        return tuple(e for e in range(self.n_orbits) if e not in tree)

    def edge_index(self, name: str) -> int:
        return self.edges.index(name)

    def vertex_index(self, name: str) -> int:
        return self.vertices.index(name)

    def _bfs_tree(self) -> tuple[int, ...]:
        seen = {self.basepoint}
        queue = deque([self.basepoint])
        tree = []
        while queue:
            v = queue.popleft()
            for d in range(2 * self.n_orbits):
                if self.source(d) == v and self.target(d) not in seen:
                    seen.add(self.target(d))
                    tree.append(d >> 1)
                    queue.append(self.target(d))
        return tuple(sorted(tree))

    def _tree_parents(self) -> tuple:
        # parent[v] = directed tree edge arriving at v from the basepoint side
        parent: list[int | None] = [None] * self.n_vertices
        tree = set(self.tree)
        seen = {self.basepoint}
        queue = deque([self.basepoint])
        while queue:
            v = queue.popleft()
            for d in range(2 * self.n_orbits):
                if (d >> 1) in tree and self.source(d) == v and self.target(d) not in seen:
                    seen.add(self.target(d))
                    parent[self.target(d)] = d
                    queue.append(self.target(d))
        return tuple(parent)

    def tree_path(self, v: int) -> tuple[int, ...]:
        """Directed tree edges from the basepoint to ``v``."""
        out = []
        while v != self.basepoint:
            d = self._parent[v]
            if d is None:
                raise ValueError("spanning tree does not reach every vertex")
            out.append(d)
            v = self.source(d)
        return tuple(reversed(out))

    def structural_problems(self) -> list[str]:
        problems = []
        if not self.vertices:
            return ["graph has no vertices"]
        if not 0 <= self.basepoint < self.n_vertices:
            problems.append("basepoint out of range")
        # connectivity
        seen = {0}
        stack = [0]
        while stack:
            v = stack.pop()
            for e, (s, t) in enumerate(self.ends):
                for a, b in ((s, t), (t, s)):
                    if a == v and b not in seen:
                        seen.add(b)
                        stack.append(b)
        if len(seen) != self.n_vertices:
            problems.append("graph is not connected")
        labels = sorted(f for f in self.factors if f)
        if labels != list(range(1, len(labels) + 1)):
            problems.append(f"factor labels {labels} are not exactly 1..r once each")
        for v in range(self.n_vertices):
            if self.is_free(v) and self.valence(v) < 3:
                problems.append(f"free vertex {self.vertices[v]} has valence {self.valence(v)} (minimality)")
            if not self.is_free(v) and self.valence(v) < 1:
                problems.append(f"non-free vertex {self.vertices[v]} is isolated")
        r, n = self.r, self.n
        if r + n < 2 or (r == 0 and n < 2):
            problems.append(f"inadmissible ranks r={r}, n={n}")
        tree = set(self.tree)
        if len(tree) != self.n_vertices - 1 or any(p is None for k, p in enumerate(self._parent) if k != self.basepoint):
            problems.append("designated spanning tree is not a spanning tree")
        return problems


def as_vector(values, graph: GraphOfGroups, what: str = "metric") -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.shape != (graph.n_orbits,):
        raise ValueError(f"{what} has shape {arr.shape}, expected ({graph.n_orbits},)")
    return arr


def degenerate_problems(graph: GraphOfGroups, metric) -> list[str]:
    """Zero-length subgraph must be a forest whose components hold <= 1 non-free vertex."""
    ell = np.asarray(metric, dtype=float)
    zero = [e for e in range(graph.n_orbits) if abs(ell[e]) <= TOL]
    comp = list(range(graph.n_vertices))

    def find(x):
        while comp[x] != x:
            comp[x] = comp[comp[x]]
            x = comp[x]
        return x

    problems = []
    for e in zero:
        s, t = graph.ends[e]
        a, b = find(s), find(t)
        if a == b:
            problems.append(f"zero-length subgraph contains a cycle through {graph.edges[e]}")
        else:
            comp[a] = b
    groups: dict[int, list[int]] = {}
    for v in graph.nonfree_vertices:
        groups.setdefault(find(v), []).append(v)
    for vs in groups.values():
        if len(vs) > 1:
            names = ",".join(graph.vertices[v] for v in vs)
            problems.append(f"zero-length subgraph joins non-free vertices {names}")
    return problems


def validate_graph(graph: GraphOfGroups, metric) -> list[str]:
    """List of violated invariants; empty iff (graph, metric) is a point of the simplex."""
    problems = graph.structural_problems()
    ell = np.asarray(metric, dtype=float)
    if ell.shape != (graph.n_orbits,):
        return problems + [f"metric has {ell.size} entries for {graph.n_orbits} edge orbits"]
    if not np.all(np.isfinite(ell)):
        return problems + ["metric has non-finite values"]
    if np.any(ell < -TOL) or np.any(ell > 1 + TOL):
        problems.append("metric values outside [0, 1]")
    if abs(ell.sum() - 1.0) > TOL:
        problems.append(f"normalization violated: lengths sum to {ell.sum():.15g}")
    problems.extend(degenerate_problems(graph, ell))
    return problems


def validate_tangent(graph: GraphOfGroups, tangent) -> list[str]:
    tau = np.asarray(tangent, dtype=float)
    if tau.shape != (graph.n_orbits,):
        return [f"tangent has {tau.size} entries for {graph.n_orbits} edge orbits"]
    if abs(tau.sum()) > TOL:
        return [f"tangent values sum to {tau.sum():.3g}, not 0"]
    return []


def is_integrable(metric, tangent) -> bool:
    ell = np.asarray(metric, dtype=float)
    tau = np.asarray(tangent, dtype=float)
    return not np.any((tau < -TOL) & (np.abs(ell) <= TOL))


# -- paths and loops ----------------------------------------------------

@dataclass(frozen=True)
class Path:
    """Edge path with a marker at every vertex it passes (len(markers) = len(edges) + 1)."""
    start: int
    edges: tuple[int, ...] = ()
    markers: tuple = (None,)

    def __post_init__(self):
        if len(self.markers) != len(self.edges) + 1:
            raise ValueError("a path needs one marker per vertex visit")

    def end(self, graph: GraphOfGroups) -> int:
        return graph.target(self.edges[-1]) if self.edges else self.start

    def reversed(self, graph: GraphOfGroups, groups=None) -> "Path":
        markers = tuple(_inverse_marker(graph, groups, v, m)
                        for v, m in zip(reversed(_path_vertices(graph, self)), reversed(self.markers)))
        return Path(self.end(graph), tuple(rev(d) for d in reversed(self.edges)), markers)


def _path_vertices(graph: GraphOfGroups, path: Path) -> list[int]:
    vs = [path.start]
    for d in path.edges:
        vs.append(graph.target(d))
    return vs


def _inverse_marker(graph, groups, v, m):
    if is_trivial(m) or m == FLAG:
        return None if is_trivial(m) else m
    return groups[graph.factors[v]].inv(m)


@dataclass(frozen=True)
class MarkedLoop:
    """Cyclic edge path; ``markers[k]`` sits at the source of ``edges[k]``."""
    edges: tuple[int, ...]
    markers: tuple = ()

    def __post_init__(self):
        if not self.markers:
            object.__setattr__(self, "markers", (None,) * len(self.edges))
        if len(self.markers) != len(self.edges):
            raise ValueError("a loop needs one marker per vertex visit")

    def __len__(self):
        return len(self.edges)

    @property
    def is_empty(self) -> bool:
        return not self.edges

    def vertices(self, graph: GraphOfGroups) -> list[int]:
        return [graph.source(d) for d in self.edges]

    def rotated(self, k: int) -> "MarkedLoop":
        k %= max(1, len(self.edges))
        return MarkedLoop(self.edges[k:] + self.edges[:k], self.markers[k:] + self.markers[:k])

    def reversed(self) -> "MarkedLoop":
        # visit before rev(e_k) sits at target(e_k) = source(e_{k+1})
        L = len(self.edges)
        edges = tuple(rev(self.edges[k]) for k in range(L - 1, -1, -1))
        markers = tuple(self.markers[(k + 1) % L] for k in range(L - 1, -1, -1))
        return MarkedLoop(edges, markers)

    def with_markers(self, markers) -> "MarkedLoop":
        return MarkedLoop(self.edges, tuple(markers))

    def canonical(self) -> tuple:
        """Key identifying the loop up to rotation and reversal."""
        if not self.edges:
            return ((), ())
        best = None
        for loop in (self, self.reversed()):
            for k in range(len(loop.edges)):
                rot = loop.rotated(k)
                key = (rot.edges, tuple(marker_key(m) for m in rot.markers))
                if best is None or key < best:
                    best = key
        return best


def is_closed(graph: GraphOfGroups, loop: MarkedLoop) -> bool:
    L = len(loop.edges)
    return all(graph.target(loop.edges[k]) == graph.source(loop.edges[(k + 1) % L]) for k in range(L))


def is_reduced(graph: GraphOfGroups, loop: MarkedLoop) -> bool:
    L = len(loop.edges)
    for k in range(L):
        prev, cur = loop.edges[k - 1], loop.edges[k]
        if cur == rev(prev):
            v = graph.source(cur)
            if graph.is_free(v) or is_trivial(loop.markers[k]):
                return False
    return True


def _group_at(graph: GraphOfGroups, groups, v: int) -> AbelianGroup | None:
    f = graph.factors[v]
    if f == 0:
        return None
    if groups is None:
        return None
    return groups[f]


def _check_marker(graph: GraphOfGroups, v: int, m) -> None:
    if graph.is_free(v) and not is_trivial(m):
        raise ValueError(f"marker attached to free vertex {graph.vertices[v]}")


class _PathReducer:
    """Stack-based free reduction of an edge path in the graph of groups."""

    def __init__(self, graph: GraphOfGroups, groups, start: int):
        self.graph = graph
        self.groups = groups
        self.vertex = [start]
        self.edges: list[int] = []
        self.markers: list = [None]

    def mult(self, m) -> None:
        v = self.vertex[-1]
        _check_marker(self.graph, v, m)
        self.markers[-1] = merge_markers(_group_at(self.graph, self.groups, v), self.markers[-1], m)

    def push(self, d: int, m=None) -> None:
        g = self.graph
        if g.source(d) != self.vertex[-1]:
            raise ValueError("path is not connected")
        if self.edges and self.edges[-1] == rev(d) and is_trivial(self.markers[-1]):
            self.edges.pop()
            self.markers.pop()
            self.vertex.pop()
            self.mult(m)
            return
        self.edges.append(d)
        self.vertex.append(g.target(d))
        self.markers.append(None)
        self.mult(m)

    def extend(self, path: Path) -> None:
        self.mult(path.markers[0])
        for d, m in zip(path.edges, path.markers[1:]):
            self.push(d, m)

    def path(self) -> Path:
        return Path(self.vertex[0], tuple(self.edges), tuple(self.markers))


def concat(graph: GraphOfGroups, groups, paths: Sequence[Path], start: int | None = None) -> Path:
    """Concatenate and freely reduce paths (each must start where the last ended)."""
    if start is None:
        start = paths[0].start if paths else graph.basepoint
    red = _PathReducer(graph, groups, start)
    for p in paths:
        red.extend(p)
    return red.path()


def tighten_path(graph: GraphOfGroups, path: Path, groups=None) -> Path:
    return concat(graph, groups, [path], start=path.start)


def close_path(graph: GraphOfGroups, path: Path, groups=None) -> MarkedLoop:
    """Turn a closed path into a cyclic loop, merging its end markers."""
    if path.end(graph) != path.start:
        raise ValueError("path is not closed")
    if not path.edges:
        return MarkedLoop(())
    first = merge_markers(_group_at(graph, groups, path.start), path.markers[-1], path.markers[0])
    return MarkedLoop(path.edges, (first,) + tuple(path.markers[1:-1]))


def _cyclic_reduce(graph: GraphOfGroups, groups, edges: list, markers: list) -> MarkedLoop:
    while len(edges) >= 2 and edges[-1] == rev(edges[0]) and is_trivial(markers[0]):
        if len(edges) == 2:
            return MarkedLoop(())
        v = graph.source(edges[-1])
        merged = merge_markers(_group_at(graph, groups, v), markers[-1], markers[1])
        edges = edges[1:-1]
        markers = [merged] + markers[2:-1]
    return MarkedLoop(tuple(edges), tuple(markers))


def tighten_loop(graph: GraphOfGroups, loop: MarkedLoop, groups=None) -> MarkedLoop:
    """Reduced, cyclically reduced representative of a marked loop.

    A backtrack ``d, rev(d)`` cancels iff the marker at the turn is trivial;
    markers meeting at a visit are multiplied in the vertex group.
    """
    if not loop.edges:
        return loop
    if not is_closed(graph, loop):
        raise ValueError("loop is not closed")
    for d, m in zip(loop.edges, loop.markers):
        _check_marker(graph, graph.source(d), m)
    start = graph.source(loop.edges[0])
    path = Path(start, loop.edges, tuple(loop.markers) + (None,))
    red = tighten_path(graph, path, groups)
    if red.end(graph) != start:
        raise AssertionError("tightening changed the endpoint")
    closed = close_path(graph, red, groups)
    if closed.is_empty:
        return closed
    return _cyclic_reduce(graph, groups, list(closed.edges), list(closed.markers))


def crossing_counts(graph: GraphOfGroups, edges: Iterable[int]) -> np.ndarray:
    counts = np.zeros(graph.n_orbits, dtype=np.int64)
    for d in edges:
        counts[d >> 1] += 1
    return counts


def evaluate_loop(graph: GraphOfGroups, loop: MarkedLoop, metric, tangent=None) -> tuple[float, float | None]:
    """Length and tau-value of a loop, edges counted with multiplicity."""
    counts = crossing_counts(graph, loop.edges)
    length = float(counts @ np.asarray(metric, dtype=float))
    tau = None if tangent is None else float(counts @ np.asarray(tangent, dtype=float))
    return length, tau


# -- embedded cycles and paths ----------------------------------------------

def _canonical_cycle(edges: tuple[int, ...]) -> tuple[int, ...]:
    L = len(edges)
    back = tuple(rev(d) for d in reversed(edges))
    return min(min(seq[k:] + seq[:k] for k in range(L)) for seq in (edges, back))


def embedded_cycles(graph: GraphOfGroups) -> list[tuple[int, ...]]:
    """Embedded circles, one directed representative each, sorted."""
    found = set()
    D = 2 * graph.n_orbits
    for s in range(graph.n_vertices):
        stack = [(s, (), frozenset([s]))]
        while stack:
            v, path, seen = stack.pop()
            for d in range(D):
                if graph.source(d) != v or (path and (d >> 1) in {x >> 1 for x in path}):
                    continue
                t = graph.target(d)
                if t == s:
                    found.add(_canonical_cycle(path + (d,)))
                elif t not in seen:
                    stack.append((t, path + (d,), seen | {t}))
    return sorted(found)


def cycle_vertices(graph: GraphOfGroups, cycle: Sequence[int]) -> list[int]:
    return [graph.source(d) for d in cycle]


def rotate_cycle_to(graph: GraphOfGroups, cycle: tuple[int, ...], v: int) -> tuple[int, ...]:
    for k, d in enumerate(cycle):
        if graph.source(d) == v:
            return cycle[k:] + cycle[:k]
    raise ValueError("vertex not on cycle")


def embedded_paths(graph: GraphOfGroups, u: int, w: int, avoid: frozenset = frozenset()) -> list[tuple[int, ...]]:
    """Simple edge paths from u to w (u != w) whose interior avoids ``avoid``."""
    out = []
    D = 2 * graph.n_orbits
    stack = [(u, (), frozenset([u]))]
    while stack:
        v, path, seen = stack.pop()
        for d in range(D):
            if graph.source(d) != v:
                continue
            t = graph.target(d)
            if t in seen:
                continue
            if t == w:
                out.append(path + (d,))
            elif t not in avoid:
                stack.append((t, path + (d,), seen | {t}))
    return sorted(out)


def systole(graph: GraphOfGroups, metric) -> float:
    """Shortest hyperbolic translation length: embedded circles and doubled non-free arcs."""
    ell = np.asarray(metric, dtype=float)
    best = np.inf
    for cyc in embedded_cycles(graph):
        best = min(best, float(sum(ell[d >> 1] for d in cyc)))
    nonfree = graph.nonfree_vertices
    for u, w in itertools.combinations(nonfree, 2):
        for p in embedded_paths(graph, u, w, avoid=frozenset(nonfree)):
            best = min(best, 2.0 * float(sum(ell[d >> 1] for d in p)))
    return best


def is_thick(graph: GraphOfGroups, metric, eps: float) -> bool:
    return systole(graph, metric) >= eps - TOL


# -- forest collapse ---------------------------------------------------------

def collapse_forest(graph: GraphOfGroups, metric, tangent, forest: Iterable[int]):
    """Collapse a forest of zero-length, zero-tangent edge orbits.

    Returns ``(graph', metric', tangent')``.  Components may contain one
    non-free vertex, which absorbs the rest of the component.
    """
    forest = sorted(set(forest))
    ell = as_vector(metric, graph)
    tau = as_vector(tangent, graph, "tangent") if tangent is not None else np.zeros(graph.n_orbits)
    comp = list(range(graph.n_vertices))

    def find(x):
        while comp[x] != x:
            comp[x] = comp[comp[x]]
            x = comp[x]
        return x

    for e in forest:
        s, t = graph.ends[e]
        if s == t:
            raise ValueError(f"forest contains loop edge {graph.edges[e]}")
        if abs(ell[e]) > TOL or abs(tau[e]) > TOL:
            raise ValueError(f"forest edge {graph.edges[e]} has nonzero length or tangent")
        a, b = find(s), find(t)
        if a == b:
            raise ValueError("forest contains a cycle")
        comp[a] = b
    members: dict[int, list[int]] = {}
    for v in range(graph.n_vertices):
        members.setdefault(find(v), []).append(v)
    new_vertices = []
    image = {}
    for root in sorted(members, key=lambda c: min(members[c])):
        vs = members[root]
        nonfree = [v for v in vs if not graph.is_free(v)]
        if len(nonfree) > 1:
            raise ValueError("forest component contains two non-free vertices")
        rep = nonfree[0] if nonfree else min(vs)
        for v in vs:
            image[v] = len(new_vertices)
        new_vertices.append((graph.vertices[rep], graph.factors[rep]))
    keep = [e for e in range(graph.n_orbits) if e not in set(forest)]
    new_edges = [(graph.edges[e], new_vertices[image[graph.ends[e][0]]][0],
                  new_vertices[image[graph.ends[e][1]]][0]) for e in keep]
    base = new_vertices[image[graph.basepoint]][0]
    g2 = GraphOfGroups.build(new_vertices, new_edges, basepoint=base)
    return g2, ell[keep].copy(), tau[keep].copy()
