"""Words in G = G_1 * ... * G_r * F_n and marked graphs of groups.

A letter is ``(0, +-j)`` for the free generator x_j or its inverse, and
``(i, g)`` for a nontrivial element g of the vertex group G_i.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .graph import (
    TOL,
    GraphOfGroups,
    MarkedLoop,
    Path,
    close_path,
    concat,
    crossing_counts,
    evaluate_loop,
    rev,
    tighten_loop,
    tighten_path,
    validate_graph,
)
from .groups import FLAG, GroupSpec, is_trivial

Word = tuple


def free(j: int) -> tuple:
    return (0, j)


def inverse_word(word: Sequence, groups: GroupSpec) -> Word:
    out = []
    for f, p in reversed(word):
        out.append((0, -p) if f == 0 else (f, groups[f].inv(p)))
    return tuple(out)


def _push(stack: list, letter, groups: GroupSpec) -> None:
    f, p = letter
    if f != 0 and not any(p):
        return
    if stack:
        tf, tp = stack[-1]
        if f == 0 and tf == 0 and tp == -p:
            stack.pop()
            return
        if f != 0 and tf == f:
            stack.pop()
            prod = groups[f].mul(tp, p)
            if any(prod):
                stack.append((f, prod))
            return
    stack.append((f, tuple(p) if f else p))


def reduce_word(word: Sequence, groups: GroupSpec) -> Word:
    """Alternating normal form: merge same-factor letters, cancel x x^-1."""
    stack: list = []
    for letter in word:
        _push(stack, letter, groups)
    return tuple(stack)


def cyclic_reduce(word: Sequence, groups: GroupSpec) -> Word:
    w = list(reduce_word(word, groups))
    while len(w) >= 2:
        (f0, p0), (f1, p1) = w[0], w[-1]
        if f0 == 0 and f1 == 0 and p0 == -p1:
            w = w[1:-1]
        elif f0 != 0 and f0 == f1:
            prod = groups[f0].mul(p1, p0)
            w = w[1:-1]
            if any(prod):
                w = [(f0, prod)] + w
        else:
            break
    return tuple(w)


def is_elliptic(word: Sequence, groups: GroupSpec) -> bool:
    w = cyclic_reduce(word, groups)
    return len(w) == 0 or (len(w) == 1 and w[0][0] != 0)


def conjugate_words(u: Sequence, w: Sequence, groups: GroupSpec) -> bool:
    """True iff u and w are conjugate (cyclically reduced forms agree up to rotation)."""
    a, b = cyclic_reduce(u, groups), cyclic_reduce(w, groups)
    if len(a) != len(b):
        return False
    if not a:
        return True
    return any(a[k:] + a[:k] == b for k in range(len(a)))


def format_word(word: Sequence) -> str:
    parts = []
    for f, p in word:
        if f == 0:
            parts.append(f"x{abs(p)}" + ("^-1" if p < 0 else ""))
        else:
            parts.append(f"g{f}{list(p)}")
    return " ".join(parts) if parts else "1"


@dataclass(frozen=True)
class AbelClass:
    support: frozenset
    vector: tuple

    @property
    def is_zero(self) -> bool:
        return not self.support and not any(self.vector)

    def __str__(self):
        sup = ",".join(str(i) for i in sorted(self.support))
        vec = "".join(str(b) for b in self.vector)
        return f"{{{sup}}}|{vec or '-'}"

    def sort_key(self):
        return (len(self.support), tuple(sorted(self.support)), self.vector)


def instantiate_flags(graph: GraphOfGroups, loop: MarkedLoop, groups: GroupSpec) -> MarkedLoop:
    """Replace flagged markers by the fixed generator of the vertex group."""
    markers = []
    for d, m in zip(loop.edges, loop.markers):
        if m == FLAG:
            m = groups[graph.factors[graph.source(d)]].generator
        markers.append(m)
    return MarkedLoop(loop.edges, tuple(markers))


def loop_class(graph: GraphOfGroups, loop: MarkedLoop, groups: GroupSpec) -> AbelClass:
    loop = instantiate_flags(graph, loop, groups)
    sums: dict[int, tuple] = {}
    for d, m in zip(loop.edges, loop.markers):
        v = graph.source(d)
        f = graph.factors[v]
        if f and not is_trivial(m):
            sums[f] = groups[f].mul(sums.get(f, groups[f].identity), m)
    support = frozenset(f for f, s in sums.items() if any(s))
    counts = crossing_counts(graph, loop.edges)
    return AbelClass(support, tuple(int(counts[e] % 2) for e in graph.non_tree))


def word_class(word: Sequence, n: int, groups: GroupSpec) -> AbelClass:
    sums: dict[int, tuple] = {}
    parity = [0] * n
    for f, p in word:
        if f == 0:
            parity[abs(p) - 1] ^= 1
        else:
            sums[f] = groups[f].mul(sums.get(f, groups[f].identity), p)
    return AbelClass(frozenset(f for f, s in sums.items() if any(s)), tuple(parity))


def abel_class(obj, graph: GraphOfGroups, groups: GroupSpec) -> AbelClass:
    """Relative abelianization class: nontrivial factor coordinates plus Z/2 homology."""
    if isinstance(obj, MarkedLoop):
        return loop_class(graph, obj, groups)
    return word_class(reduce_word(obj, groups), graph.n, groups)


# -- marked graphs -------------------------------------------------------------

@dataclass(frozen=True)
class Marking:
    """Forward images of the generators of G plus the inverse data.

    ``gens[j-1]`` is a based loop at the basepoint, ``factors[i-1]`` a path from
    the basepoint to the vertex carrying the image of G_i.  ``edge_words[e]``
    is the word of the loop p_s e p_t^-1 for non-tree orbits (None on tree
    edges); ``vertex_conj[v]`` is ``(i, c)`` with p_v [g] p_v^-1 = c (i, g) c^-1.
    """
    gens: tuple
    factors: tuple
    edge_words: tuple
    vertex_conj: tuple


def identity_marking(graph: GraphOfGroups) -> Marking:
    gens = []
    edge_words: list = [None] * graph.n_orbits
    for j, e in enumerate(graph.non_tree, start=1):
        d = 2 * e
        p = graph.tree_path(graph.source(d)) + (d,) + tuple(rev(x) for x in reversed(graph.tree_path(graph.target(d))))
        gens.append(Path(graph.basepoint, p, (None,) * (len(p) + 1)))
        edge_words[e] = (free(j),)
    factors = []
    vertex_conj: list = [None] * graph.n_vertices
    for i in range(1, graph.r + 1):
        v = graph.factor_vertex(i)
        p = graph.tree_path(v)
        factors.append(Path(graph.basepoint, p, (None,) * (len(p) + 1)))
        vertex_conj[v] = (i, ())
    return Marking(tuple(gens), tuple(factors), tuple(edge_words), tuple(vertex_conj))


def derive_inverse(graph: GraphOfGroups, groups: GroupSpec, gens: Sequence[Path], factors: Sequence[Path],
                   edge_words=None, vertex_conj=None) -> Marking:
    """Complete a forward marking with inverse data.

    Inverse entries are read off when a generator tightens to p_s e p_t^-1
    for a single non-tree edge, or a factor path tightens to a tree path.
    Explicitly supplied entries take precedence.
    """
    ew: list = list(edge_words) if edge_words is not None else [None] * graph.n_orbits
    vc: list = list(vertex_conj) if vertex_conj is not None else [None] * graph.n_vertices
    tree_paths = {v: graph.tree_path(v) for v in range(graph.n_vertices)}
    for j, loop in enumerate(gens, start=1):
        p = tighten_path(graph, loop, groups)
        if any(not is_trivial(m) for m in p.markers):
            continue
        for d in p.edges:
            e = d >> 1
            if e in graph.tree:
                continue
            s, t = graph.source(d), graph.target(d)
            std = tree_paths[s] + (d,) + tuple(rev(x) for x in reversed(tree_paths[t]))
            if p.edges == std and ew[e] is None:
                ew[e] = (free(j if d % 2 == 0 else -j),)
    for i, path in enumerate(factors, start=1):
        p = tighten_path(graph, path, groups)
        v = p.end(graph)
        if graph.is_free(v):
            raise ValueError(f"factor {i} is sent to free vertex {graph.vertices[v]}")
        if p.edges == tree_paths[v] and all(is_trivial(m) for m in p.markers) and vc[v] is None:
            vc[v] = (i, ())
    missing = [graph.edges[e] for e in graph.non_tree if ew[e] is None]
    missing += [graph.vertices[v] for v in graph.nonfree_vertices if vc[v] is None]
    if missing:
        raise ValueError(f"cannot derive inverse marking for {', '.join(missing)}; supply it explicitly")
    return Marking(tuple(gens), tuple(factors), tuple(ew), tuple(vc))


@dataclass(frozen=True)
class MarkedGraph:
    graph: GraphOfGroups
    metric: tuple
    groups: GroupSpec
    marking: Marking

    def __hash__(self):
        return hash((self.graph, self.metric, self.marking))

    @classmethod
    def standard(cls, graph: GraphOfGroups, metric, groups: GroupSpec) -> "MarkedGraph":
        return cls(graph, tuple(float(x) for x in metric), groups, identity_marking(graph))

    @property
    def ell(self) -> np.ndarray:
        return np.asarray(self.metric, dtype=float)

    @property
    def rank(self) -> tuple[int, int]:
        return len(self.marking.factors), len(self.marking.gens)

    def with_metric(self, metric) -> "MarkedGraph":
        return MarkedGraph(self.graph, tuple(float(x) for x in metric), self.groups, self.marking)

    def letter_image(self, letter) -> Path:
        f, p = letter
        g = self.graph
        if f == 0:
            base = self.marking.gens[abs(p) - 1]
            return base if p > 0 else base.reversed(g, self.groups)
        path = self.marking.factors[f - 1]
        end = path.end(g)
        if self.groups[g.factors[end]].moduli != self.groups[f].moduli:
            raise ValueError(f"factor {f} sent to a vertex with a different group")
        mid = Path(end, (), (tuple(p),))
        return concat(g, self.groups, [path, mid, path.reversed(g, self.groups)])

    def image(self, word: Sequence) -> MarkedLoop:
        g = self.graph
        based = concat(g, self.groups, [self.letter_image(x) for x in word], start=g.basepoint)
        return tighten_loop(g, close_path(g, based, self.groups), self.groups)


def translation_length(marked: MarkedGraph, word: Sequence) -> tuple[float, MarkedLoop | None]:
    """Length of the tightened image loop; 0 and no loop for elliptic words."""
    loop = marked.image(reduce_word(word, marked.groups))
    if loop.is_empty:
        return 0.0, None
    return evaluate_loop(marked.graph, loop, marked.ell)[0], loop


def word_of_loop(marked: MarkedGraph, loop: MarkedLoop) -> Word:
    """Read a loop with concrete markers back into a word of G."""
    g = marked.graph
    groups = marked.groups
    out: list = []
    for d, m in zip(loop.edges, loop.markers):
        if m == FLAG:
            raise ValueError("loop has flagged markers; instantiate them first")
        v = g.source(d)
        if not is_trivial(m):
            if g.is_free(v):
                raise ValueError("marker attached to free vertex")
            i, c = marked.marking.vertex_conj[v]
            out.extend(c)
            out.append((i, tuple(m)))
            out.extend(inverse_word(c, groups))
        e = d >> 1
        w = marked.marking.edge_words[e]
        if w is not None:
            out.extend(w if d % 2 == 0 else inverse_word(w, groups))
    return reduce_word(out, groups)


def validate_marking(marked: MarkedGraph, battery: int = 0, tol: float = 1e-9) -> list[str]:
    """Heuristic consistency battery for forward and inverse marking data.

    Checks generators, one nontrivial element per factor, products of those,
    and every candidate loop (plus ``battery`` extra seeded words).  Empty
    list means pass.
    """
    from .lipschitz import enumerate_candidates

    g = marked.graph
    groups = marked.groups
    problems = validate_graph(g, marked.ell)
    r, n = marked.rank
    if r != g.r:
        problems.append(f"marking sends {r} factors but the graph has {g.r}")
    if n != g.n:
        problems.append(f"marking has {n} generators but the graph has Betti number {g.n}")
    if problems:
        return problems
    probes = [marked.ell, np.full(g.n_orbits, 1.0 / g.n_orbits)]
    gens = [(free(j),) for j in range(1, n + 1)]
    elems = [((i, groups[i].generator),) for i in range(1, r + 1)]
    words = list(gens)
    words += [a + b for a in gens for b in elems]
    words += [a + b for k, a in enumerate(elems) for b in elems[k + 1:]]
    words += [a + b for k, a in enumerate(gens) for b in gens[k + 1:]]
    rng = np.random.default_rng(0)
    letters = gens + [((0, -j),) for j in range(1, n + 1)] + elems
    for _ in range(battery):
        k = int(rng.integers(2, 6))
        words.append(sum((letters[int(rng.integers(len(letters)))] for _ in range(k)), ()))
    for w in words:
        w = cyclic_reduce(w, groups)
        if is_elliptic(w, groups):
            continue
        loop = marked.image(w)
        if loop.is_empty:
            problems.append(f"hyperbolic word {format_word(w)} maps to an elliptic loop")
            continue
        back = word_of_loop(marked, loop)
        if not conjugate_words(back, w, groups):
            problems.append(f"inverse of image of {format_word(w)} is {format_word(back)}")
        loop2 = marked.image(back)
        for ell in probes:
            a = evaluate_loop(g, loop, ell)[0]
            b = evaluate_loop(g, loop2, ell)[0] if not loop2.is_empty else 0.0
            if abs(a - b) > tol:
                problems.append(f"length of {format_word(w)} disagrees: {a:.12g} vs {b:.12g}")
                break
    for cand in enumerate_candidates(g):
        loop = instantiate_flags(g, cand.loop, groups)
        w = word_of_loop(marked, loop)
        img = marked.image(w)
        for ell in probes:
            a = evaluate_loop(g, loop, ell)[0]
            b = evaluate_loop(g, img, ell)[0] if not img.is_empty else 0.0
            if abs(a - b) > tol:
                problems.append(f"candidate {cand.label(g)} round trip changes length {a:.12g} -> {b:.12g}")
                break
    return problems
