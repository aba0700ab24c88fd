"""Homothety classes, class lengths, double covers, N, Psi and the corrected norm."""
from __future__ import annotations

import itertools
import math
import threading
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import kernels
from .freeprod import AbelClass, instantiate_flags, loop_class
from .graph import TOL, GraphOfGroups, MarkedLoop, crossing_counts, rev
from .groups import FLAG, AbelianGroup, GroupSpec
from .lipschitz import Candidate, lip_norm


class InfeasibleClass(ValueError):
    pass


@dataclass(frozen=True)
class HClass(AbelClass):
    def __post_init__(self):
        if self.is_zero:
            raise ValueError("the zero class is excluded from H(T)")


def groups_key(groups: GroupSpec) -> tuple:
    return tuple(sorted((i, g.moduli) for i, g in groups.items()))


def _groups_from_key(key) -> GroupSpec:
    return GroupSpec({i: AbelianGroup(m) for i, m in key})


def enumerate_classes(graph: GraphOfGroups) -> list[HClass]:
    """All 2^r 2^b - 1 nonzero classes, ordered by support size, support, vector."""
    r, b = graph.r, graph.n
    out = []
    for mask in range(1 << r):
        support = frozenset(i + 1 for i in range(r) if mask >> i & 1)
        for vec in itertools.product((0, 1), repeat=b):
            if support or any(vec):
                out.append(HClass(support, vec))
    out.sort(key=AbelClass.sort_key)
    return out


# -- realizer tables ---------------------------------------------------------------

def _factor_options(group: AbelianGroup, k: int, has_pass: bool) -> tuple[bool, ...]:
    """Achievable "factor in support" values for a vertex visited k times."""
    if k == 0:
        return (False,)
    if has_pass:
        return (False, True)
    # every visit is a forced nontrivial marker
    if k == 1:
        return (True,)
    if group.is_order_two:
        return (k % 2 == 1,)
    return (False, True)


@dataclass(frozen=True)
class ClassTable:
    graph: GraphOfGroups
    classes: tuple[HClass, ...]
    counts: np.ndarray  # realizer count vectors, grouped by class
    offsets: np.ndarray
    walks: tuple  # one directed walk per row

    def rows(self, c: int) -> range:
        return range(int(self.offsets[c]), int(self.offsets[c + 1]))


def _prune_dominated(rows: list[tuple]) -> list[tuple]:
    # a count vector >= another row is never the unique minimizer on an integrable path
    keep = []
    vecs = [np.array(c) for c, _ in rows]
    for a, (c, w) in enumerate(rows):
        dominated = False
        for b in range(len(rows)):
            if b != a and np.all(vecs[b] <= vecs[a]) and np.any(vecs[b] < vecs[a]):
                dominated = True
                break
        if not dominated:
            keep.append((c, w))
    return keep


@lru_cache(maxsize=64)
def _class_table(graph: GraphOfGroups, gkey: tuple, m: int) -> ClassTable:
    groups = _groups_from_key(gkey)
    D = 2 * graph.n_orbits
    src = np.array([graph.source(d) for d in range(D)], dtype=np.int64)
    dst = np.array([graph.target(d) for d in range(D)], dtype=np.int64)
    slot = np.array([f - 1 if f else -1 for f in graph.factors], dtype=np.int64)
    non_tree = graph.non_tree
    r = graph.r
    found: dict[AbelClass, dict[tuple, tuple]] = {}
    for usage, bits, walk in kernels.loop_signatures(src, dst, slot, m):
        counts = tuple(usage[2 * e] + usage[2 * e + 1] for e in range(graph.n_orbits))
        vec = tuple(counts[e] % 2 for e in non_tree)
        visits = [0] * (r + 1)
        for d in range(D):
            f = graph.factors[src[d]]
            if f:
                visits[f] += usage[d]
        opts = [_factor_options(groups[i], visits[i], bool(bits >> (i - 1) & 1)) for i in range(1, r + 1)]
        for choice in itertools.product(*opts):
            support = frozenset(i + 1 for i, x in enumerate(choice) if x)
            if not support and not any(vec):
                continue
            rows = found.setdefault(AbelClass(support, vec), {})
            rows.setdefault(counts, walk)
    classes = enumerate_classes(graph)
    all_rows, walks, offsets = [], [], [0]
    for cls in classes:
        rows = sorted(found.get(AbelClass(cls.support, cls.vector), {}).items())
        rows = _prune_dominated(rows)
        for c, w in rows:
            all_rows.append(c)
            walks.append(w)
        offsets.append(len(all_rows))
    counts = np.array(all_rows, dtype=np.int64).reshape(len(all_rows), graph.n_orbits)
    return ClassTable(graph, tuple(classes), counts, np.array(offsets, dtype=np.int64), tuple(walks))


_lock = threading.Lock()


def class_table(graph: GraphOfGroups, groups: GroupSpec, m: int = 2) -> ClassTable:
    with _lock:
        return _class_table(graph, groups_key(groups), m)


def _solve_markers(group: AbelianGroup, n_free: int, n_forced: int, want: bool) -> list:
    """Marker values for the visits of one factor: forced visits first, then free ones."""
    g = group.generator
    total = group.identity
    forced = [g] * n_forced
    for x in forced:
        total = group.mul(total, x)
    free_vals = [None] * n_free
    if n_free:
        if any(total) != want:
            free_vals[0] = g if want else group.inv(total)
        return forced + free_vals
    if any(total) == want:
        return forced
    # adjust the last one or two forced visits
    letters = group.letter_closure()
    head = group.identity
    for x in forced[:-2]:
        head = group.mul(head, x)
    tail = 2 if n_forced >= 2 else 1
    for combo in itertools.product(letters, repeat=tail):
        s = head
        for x in combo:
            s = group.mul(s, x)
        if any(s) == want:
            return forced[:-tail] + list(combo)
    raise InfeasibleClass("marker pattern cannot realize the requested support")


def realize_markers(graph: GraphOfGroups, groups: GroupSpec, walk, support) -> MarkedLoop:
    """Concrete markers on a reduced closed walk so that its class has the given support."""
    L = len(walk)
    forced = [walk[k] == rev(walk[k - 1]) for k in range(L)]
    markers: list = [None] * L
    for v in graph.nonfree_vertices:
        f = graph.factors[v]
        ks = [k for k in range(L) if graph.source(walk[k]) == v]
        if not ks:
            continue
        fk = [k for k in ks if forced[k]]
        pk = [k for k in ks if not forced[k]]
        vals = _solve_markers(groups[f], len(pk), len(fk), f in support)
        for k, x in zip(fk + pk, vals):
            markers[k] = x
    return MarkedLoop(tuple(walk), tuple(markers))


def class_length(metric, cls: AbelClass, graph: GraphOfGroups, groups: GroupSpec, m: int = 2):
    """Minimal length over F_m loops realizing the class, with all argmin realizers."""
    if cls.is_zero:
        raise ValueError("the zero class is excluded")
    table = class_table(graph, groups, m)
    c = table.classes.index(HClass(cls.support, cls.vector))
    rows = table.rows(c)
    if not len(rows):
        raise InfeasibleClass(f"class {cls} has no realizer crossing each directed edge <= {m} times")
    ell = np.asarray(metric, dtype=float)
    lens = table.counts[rows.start:rows.stop] @ ell
    best = float(lens.min())
    cut = best + TOL * max(1.0, best)
    loops = [realize_markers(graph, groups, table.walks[k], cls.support)
             for k, x in zip(rows, lens) if x <= cut]
    return best, loops


# -- double covers -------------------------------------------------------------------

@dataclass(frozen=True)
class CoverSpec:
    cocycle: tuple[int, ...]
    graph: GraphOfGroups
    groups: GroupSpec
    lift: tuple[int, ...]  # base orbit of each cover orbit

    def __hash__(self):
        return hash((self.cocycle, self.graph))

    def lift_metric(self, values) -> np.ndarray:
        return np.asarray(values, dtype=float)[list(self.lift)]

    def sheet_edge(self, e: int, s: int) -> int:
        return 2 * e + s


def _build_cover(graph: GraphOfGroups, groups: GroupSpec, z: tuple[int, ...]) -> CoverSpec:
    r = graph.r
    zfull = [0] * graph.n_orbits
    for e, bit in zip(graph.non_tree, z):
        zfull[e] = bit
    vertices = []
    for s in (0, 1):
        for v, name in enumerate(graph.vertices):
            f = graph.factors[v]
            vertices.append((f"{name}.{s}", f + s * r if f else 0))
    edges, lift = [], []
    for e, (u, w) in enumerate(graph.ends):
        for s in (0, 1):
            edges.append((f"{graph.edges[e]}.{s}", f"{graph.vertices[u]}.{s}",
                          f"{graph.vertices[w]}.{s ^ zfull[e]}"))
            lift.append(e)
    # vertex order: keep sheet-major order so (v, s) has index v + s*|V|
    cover = GraphOfGroups.build(vertices, edges, basepoint=f"{graph.vertices[graph.basepoint]}.0")
    cg = GroupSpec({i + s * r: groups[i] for i in range(1, r + 1) for s in (0, 1)})
    return CoverSpec(tuple(z), cover, cg, tuple(lift))


def double_covers(graph: GraphOfGroups, groups: GroupSpec | None = None) -> list[CoverSpec]:
    """One connected double cover per nonzero Z/2 cocycle on the non-tree edges."""
    if graph.n <= 1:
        raise ValueError(f"double covers are used only when n >= 2 (graph has n={graph.n})")
    if groups is None:
        groups = GroupSpec.uniform(graph.r)
    out = []
    for z in itertools.product((0, 1), repeat=graph.n):
        if any(z):
            out.append(_build_cover(graph, groups, z))
    return out


@dataclass(frozen=True)
class CorrectionConstants:
    regime: str
    K: int
    A: int


def correction_constants(graph: GraphOfGroups) -> CorrectionConstants:
    r, n = graph.r, graph.n
    if n <= 1:
        K = 2 ** r * 2 ** n - 1
        regime = "base"
    else:
        K = (2 ** n - 1) * (2 ** (2 * r) * 2 ** (2 * n - 1) - 1)
        regime = "covers"
    return CorrectionConstants(regime, K, 3 * (K + 1))


@dataclass(frozen=True)
class _Piece:
    graph: GraphOfGroups
    groups: GroupSpec
    lift: np.ndarray
    table: ClassTable

    def __hash__(self):
        return id(self)


@lru_cache(maxsize=64)
def _pieces(graph: GraphOfGroups, gkey: tuple, m: int) -> tuple[_Piece, ...]:
    groups = _groups_from_key(gkey)
    if graph.n <= 1:
        return (_Piece(graph, groups, np.arange(graph.n_orbits), _class_table(graph, gkey, m)),)
    out = []
    for cov in double_covers(graph, groups):
        out.append(_Piece(cov.graph, cov.groups, np.array(cov.lift),
                          _class_table(cov.graph, groups_key(cov.groups), m)))
    return tuple(out)


def pieces(graph: GraphOfGroups, groups: GroupSpec, m: int = 2) -> tuple[_Piece, ...]:
    with _lock:
        return _pieces(graph, groups_key(groups), m)


def _minima(piece: _Piece, ell: np.ndarray, tau: np.ndarray):
    t = piece.table
    lengths, taus, _ = kernels.class_minima(t.counts, t.offsets, np.ascontiguousarray(ell[piece.lift]),
                                            np.ascontiguousarray(tau[piece.lift]), TOL)
    if np.any(np.isinf(lengths)):
        bad = [str(t.classes[c]) for c in np.flatnonzero(np.isinf(lengths))]
        raise InfeasibleClass(f"classes without F_m realizer: {', '.join(bad)}")
    return lengths, taus


def class_lengths(metric, graph: GraphOfGroups, groups: GroupSpec, m: int = 2) -> np.ndarray:
    """All summand class lengths (over covers in the covers regime), in summand order."""
    ell = np.asarray(metric, dtype=float)
    zero = np.zeros_like(ell)
    return np.concatenate([_minima(p, ell, zero)[0] for p in pieces(graph, groups, m)])


def n_value(metric, tangent, graph: GraphOfGroups, groups: GroupSpec, m: int = 2) -> float:
    """N = -sum over classes of (min tau over realizers) / class length."""
    ell = np.asarray(metric, dtype=float)
    tau = np.asarray(tangent, dtype=float)
    total = 0.0
    for p in pieces(graph, groups, m):
        lengths, taus = _minima(p, ell, tau)
        total -= float(np.sum(taus / lengths))
    return total


def psi(metric, graph: GraphOfGroups, groups: GroupSpec, m: int = 2) -> float:
    K = correction_constants(graph).K
    return -float(np.sum(np.log(class_lengths(metric, graph, groups, m)))) / (K + 1)


def corrected_norm(metric, tangent, graph: GraphOfGroups, groups: GroupSpec, m: int = 2) -> float:
    K = correction_constants(graph).K
    return lip_norm(metric, tangent, graph)[0] + n_value(metric, tangent, graph, groups, m) / (K + 1)


# -- invariance ---------------------------------------------------------------------

def exact_class_lengths(metric, graph: GraphOfGroups, groups: GroupSpec, m: int = 2) -> list[float]:
    """Sorted class lengths, each a correctly rounded sum so that edge order cannot matter."""
    ell = np.asarray(metric, dtype=float)
    out = []
    for p in pieces(graph, groups, m):
        t = p.table
        lifted = ell[p.lift]
        for c in range(len(t.classes)):
            rows = t.counts[t.offsets[c]:t.offsets[c + 1]]
            approx = rows @ lifted
            low = approx.min()
            near = np.flatnonzero(approx <= low + 1e-9 * max(1.0, low))
            out.append(min(math.fsum(rows[k] * lifted) for k in near))
    return sorted(out)


def _edge_automorphism(graph: GraphOfGroups, edge_perm, factor_perm=None) -> None:
    """Raise unless edge e -> edge_perm[e] (negative index = reversed) extends to a graph symmetry."""
    vmap: dict[int, int] = {}
    relabel = [0] + list(factor_perm or range(1, graph.r + 1))
    if sorted(abs(x) - 1 for x in edge_perm) != list(range(graph.n_orbits)):
        raise ValueError("edge permutation is not a bijection")
    for e, x in enumerate(edge_perm):
        u, w = graph.ends[e]
        s, t = graph.ends[abs(x) - 1]
        if x < 0:
            s, t = t, s
        for a, b in ((u, s), (w, t)):
            if vmap.setdefault(a, b) != b or relabel[graph.factors[a]] != graph.factors[b]:
                raise ValueError("edge permutation does not come from a graph symmetry")


def psi_invariance(metric, graph: GraphOfGroups, groups: GroupSpec, factor_perm=None, edge_perm=None):
    """Class-length multisets before and after a factor relabelling and/or graph symmetry.

    ``factor_perm[i-1]`` is the new label of G_i; ``edge_perm`` lists 1-based signed edge images.
    Returns (before, after, equal); Psi agrees exactly when the multisets do.
    """
    before = exact_class_lengths(metric, graph, groups)
    g2, groups2 = graph, groups
    ell2 = np.asarray(metric, dtype=float).copy()
    if factor_perm:
        if sorted(factor_perm) != list(range(1, graph.r + 1)):
            raise ValueError("factor permutation is not a bijection of 1..r")
        g2 = GraphOfGroups(graph.vertices, tuple(factor_perm[f - 1] if f else 0 for f in graph.factors),
                           graph.edges, graph.ends, graph.basepoint)
        groups2 = GroupSpec({factor_perm[i - 1]: groups[i] for i in groups})
    if edge_perm:
        _edge_automorphism(graph, edge_perm, factor_perm)
        for e, x in enumerate(edge_perm):
            ell2[abs(x) - 1] = metric[e]
    after = exact_class_lengths(ell2, g2, groups2)
    return before, after, before == after


# -- lifts ----------------------------------------------------------------------------

def lift_loop(cover: CoverSpec, base: GraphOfGroups, loop: MarkedLoop) -> MarkedLoop | None:
    """Lift starting on sheet 0; None if the lift does not close up."""
    r_vertices = base.n_vertices
    zfull = [0] * base.n_orbits
    for e, bit in zip(base.non_tree, cover.cocycle):
        zfull[e] = bit
    s = 0
    edges = []
    for d in loop.edges:
        e = d >> 1
        if d & 1 == 0:
            edges.append(2 * cover.sheet_edge(e, s))
            s ^= zfull[e]
        else:
            s2 = s ^ zfull[e]
            edges.append(2 * cover.sheet_edge(e, s2) + 1)
            s = s2
    if s != 0:
        return None
    lifted = MarkedLoop(tuple(edges), loop.markers)
    assert all(cover.graph.source(d) % r_vertices == base.source(b)
               for d, b in zip(lifted.edges, loop.edges))
    return lifted


def check_lifts_lemma(candidate: Candidate, graph: GraphOfGroups, groups: GroupSpec | None = None,
                      m: int = 2, probes: int = 5, seed: int = 0):
    """First cover in which the candidate lifts and uniquely realizes its class length.

    Returns ``(cocycle or None, verdict)``.
    """
    if graph.n <= 1:
        raise ValueError("the lifts lemma concerns the covers regime (n >= 2)")
    if groups is None:
        groups = GroupSpec.uniform(graph.r)
    rng = np.random.default_rng(seed)
    metrics = [rng.dirichlet(np.ones(graph.n_orbits)) for _ in range(probes)]
    base_loop = instantiate_flags(graph, candidate.loop, groups)
    for cov in double_covers(graph, groups):
        lifted = lift_loop(cov, graph, base_loop)
        if lifted is None:
            continue
        cls = loop_class(cov.graph, lifted, cov.groups)
        if cls.is_zero:
            continue
        table = class_table(cov.graph, cov.groups, m)
        c = table.classes.index(HClass(cls.support, cls.vector))
        rows = table.counts[table.rows(c).start:table.rows(c).stop]
        mine = crossing_counts(cov.graph, lifted.edges)
        ok = True
        for ell in metrics:
            lens = rows @ cov.lift_metric(ell)
            own = float(mine @ cov.lift_metric(ell))
            best = float(lens.min()) if len(lens) else math.inf
            ties = int(np.sum(lens <= best + TOL * max(1.0, best)))
            if own > best + TOL * max(1.0, best) or ties != 1:
                ok = False
                break
        if ok:
            return cov.cocycle, True
    return None, False
