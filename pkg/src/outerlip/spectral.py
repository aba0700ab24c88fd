"""Self-maps of graphs of groups, transition matrices and expansion factors."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .correction import CorrectionConstants
from .freeprod import MarkedGraph, Marking, free, inverse_word, reduce_word
from .graph import GraphOfGroups, Path, concat, crossing_counts, tighten_path
from .groups import GroupSpec


class ReducibleMatrixWarning(UserWarning):
    pass


@dataclass(frozen=True)
class GraphSelfMap:
    graph: GraphOfGroups
    groups: GroupSpec
    vertex_map: tuple[int, ...]
    edge_images: tuple[Path, ...]  # image of each orbit, read forwards
    factor_perm: tuple[int, ...] = ()  # factor_perm[i-1] = image factor of G_i
    # free-group automorphism data on generators, for round-trip checks on roses
    word_images: tuple = ()

    def __hash__(self):
        return hash((self.graph, self.vertex_map, self.edge_images))

    def problems(self) -> list[str]:
        g = self.graph
        out = []
        perm = self.factor_perm or tuple(range(1, g.r + 1))
        if sorted(perm) != list(range(1, g.r + 1)):
            out.append("factor permutation is not a bijection of 1..r")
        for v, w in enumerate(self.vertex_map):
            f = g.factors[v]
            if f and g.factors[w] != perm[f - 1]:
                out.append(f"vertex {g.vertices[v]} maps to a vertex not carrying G_{perm[f - 1]}")
        for e, img in enumerate(self.edge_images):
            u, w = g.ends[e]
            if img.start != self.vertex_map[u] or img.end(g) != self.vertex_map[w]:
                out.append(f"image of {g.edges[e]} has wrong endpoints")
            elif tighten_path(g, img, self.groups).edges != img.edges:
                out.append(f"image of {g.edges[e]} is not reduced")
        return out

    def image_of_path(self, path: Path) -> Path:
        """f(path), tightened; markers are carried along the vertex map unchanged."""
        g = self.graph
        parts = [Path(self.vertex_map[path.start], (), (path.markers[0],))]
        for d, m in zip(path.edges, path.markers[1:]):
            img = self.edge_images[d >> 1]
            parts.append(img if d % 2 == 0 else img.reversed(g, self.groups))
            parts.append(Path(parts[-1].end(g), (), (m,)))
        return concat(g, self.groups, parts, start=self.vertex_map[path.start])


def transition_matrix(fmap: GraphSelfMap) -> np.ndarray:
    """Entry (e, e') = number of crossings of orbit e' by the tightened image of e."""
    g = fmap.graph
    rows = []
    for e, img in enumerate(fmap.edge_images):
        t = tighten_path(g, img, fmap.groups)
        if t.start != img.start or t.end(g) != img.end(g) or not t.edges:
            raise ValueError(f"image of {g.edges[e]} tightens to a different endpoint structure")
        rows.append(crossing_counts(g, t.edges))
    return np.array(rows, dtype=np.int64)


def is_irreducible(M) -> bool:
    M = np.asarray(M)
    n = M.shape[0]
    if n == 1:
        return bool(M[0, 0] > 0)
    reach = (M > 0).astype(np.int64) + np.eye(n, dtype=np.int64)
    for _ in range(int(math.ceil(math.log2(n))) + 1):
        reach = ((reach @ reach) > 0).astype(np.int64)
    return bool(reach.all())


def pf_factor(M, tol: float = 1e-10, max_iter: int = 10 ** 6) -> float:
    """Dominant eigenvalue of a nonnegative matrix by power iteration.

    Iterates on M + I (same Perron vector, no periodic oscillation) from the
    all-ones vector and subtracts the shift at the end.
    """
    M = np.asarray(M, dtype=float)
    if np.any(M < 0):
        raise ValueError("matrix has negative entries")
    if not is_irreducible(M):
        warnings.warn("transition matrix is reducible (not an IWIP representative)", ReducibleMatrixWarning,
                      stacklevel=2)
    B = M + np.eye(M.shape[0])
    v = np.ones(M.shape[0])
    est = 0.0
    for _ in range(max_iter):
        w = B @ v
        new = float(np.max(w))
        w /= new
        if abs(new - est) <= tol * max(1.0, new) and np.max(np.abs(w - v)) <= tol:
            return new - 1.0
        v, est = w, new
    raise RuntimeError("power iteration did not converge")


def check_train_track(fmap: GraphSelfMap) -> bool:
    """Shallow legality check: images reduced and still reduced after one more application."""
    if fmap.problems():
        return False
    g = fmap.graph
    for img in fmap.edge_images:
        twice = fmap.image_of_path(img)
        raw = sum(len(fmap.edge_images[d >> 1].edges) for d in img.edges)
        if len(twice.edges) != raw:
            return False
    return True


@dataclass(frozen=True)
class ExpansionReport:
    lam: float
    mu: float
    A: int
    passed: bool | None
    note: str = ""


def check_expansion_bound(phi: GraphSelfMap, phi_inv: GraphSelfMap, constants: CorrectionConstants,
                          tol: float = 1e-9) -> ExpansionReport:
    """log mu <= A log lambda and log lambda <= A log mu."""
    Ma, Mb = transition_matrix(phi), transition_matrix(phi_inv)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ReducibleMatrixWarning)
        lam, mu = pf_factor(Ma), pf_factor(Mb)
    A = constants.A
    if not (is_irreducible(Ma) and is_irreducible(Mb)):
        return ExpansionReport(lam, mu, A, None, "reducible transition matrix; verdict withheld")
    ok = math.log(mu) <= A * math.log(lam) + tol and math.log(lam) <= A * math.log(mu) + tol
    return ExpansionReport(lam, mu, A, ok)


# -- iterated markings on roses ----------------------------------------------------------

def rose_word_images(fmap: GraphSelfMap):
    """Generator images of a self-map of a free rose under the identity marking."""
    g = fmap.graph
    if g.r or g.n_vertices != 1:
        raise ValueError("word images are defined here for free roses only")
    letter = {e: j + 1 for j, e in enumerate(g.non_tree)}
    return tuple(tuple(free(letter[d >> 1] * (1 if d % 2 == 0 else -1)) for d in img.edges)
                 for img in fmap.edge_images)


def substitute(word, images, groups: GroupSpec):
    """Apply a free-group endomorphism given by generator images."""
    out = []
    for f, p in word:
        if f:
            out.append((f, p))
        else:
            img = images[abs(p) - 1]
            out.extend(img if p > 0 else inverse_word(img, groups))
    return reduce_word(out, groups)


def power_images(images, k: int, groups: GroupSpec):
    cur = tuple((free(j),) for j in range(1, len(images) + 1))
    for _ in range(k):
        cur = tuple(substitute(w, images, groups) for w in cur)
    return cur


def twisted(marked: MarkedGraph, images, inverse_images) -> MarkedGraph:
    """The point phi.T: same graph and metric, generators sent to images of phi."""
    g = marked.graph
    if g.r:
        raise ValueError("twisting is implemented for free-vertex roses (r = 0)")
    gens = []
    for w in images:
        p = concat(g, marked.groups, [marked.letter_image(x) for x in w], start=g.basepoint)
        gens.append(p)
    edge_words = list(marked.marking.edge_words)
    for j, e in enumerate(g.non_tree):
        base = marked.marking.edge_words[e]
        edge_words[e] = substitute(base, inverse_images, marked.groups)
    marking = Marking(tuple(gens), (), tuple(edge_words), marked.marking.vertex_conj)
    return MarkedGraph(g, marked.metric, marked.groups, marking)


def eigenmetric(M) -> np.ndarray:
    """Normalized right Perron vector: lengths with ell(f(e)) = lambda ell(e)."""
    vals, vecs = np.linalg.eig(np.asarray(M, dtype=float))
    k = int(np.argmax(vals.real))
    v = np.abs(vecs[:, k].real)
    return v / v.sum()


def iterate_distance(marked: MarkedGraph, images, inverse_images, k: int) -> float:
    """d(T, phi^k T) through the candidate formula."""
    from .lipschitz import distance

    twist = twisted(marked, power_images(images, k, marked.groups),
                    power_images(inverse_images, k, marked.groups))
    return distance(marked, twist)[0]
