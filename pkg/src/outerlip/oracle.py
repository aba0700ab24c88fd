"""Brute-force ground truth: enumerate cyclically reduced words and their images."""
from __future__ import annotations

import threading

import numpy as np

from . import kernels
from .freeprod import AbelClass, MarkedGraph, free
from .groups import is_trivial

_lock = threading.Lock()
_tables: dict = {}


def alphabet(marked: MarkedGraph, cap: int = 8) -> list[tuple]:
    n = marked.graph.n
    letters = [free(j) for j in range(1, n + 1)] + [free(-j) for j in range(1, n + 1)]
    for i in sorted(marked.groups):
        letters += [(i, x) for x in marked.groups[i].letter_closure(cap)]
    return letters


def _compatible(a, b) -> bool:
    if a[0] == 0 and b[0] == 0:
        return a[1] != -b[1]
    return not (a[0] != 0 and a[0] == b[0])


def scan_args(marked: MarkedGraph, max_len: int) -> tuple:
    """Flat kernel inputs: letter images as directed edges and padded marker vectors."""
    g = marked.graph
    letters = alphabet(marked)
    width = max([grp.rank for grp in marked.groups.values()] or [1])
    vmod = []
    for v in range(g.n_vertices):
        f = g.factors[v]
        mod = marked.groups[f].moduli if f else ()
        vmod.append(tuple(mod) + (1,) * (width - len(mod)))

    def pad(m, v):
        if is_trivial(m):
            return (0,) * width
        return tuple(m) + (0,) * (width - len(m))

    img_edges, img_markers = [], []
    for a in letters:
        path = marked.letter_image(a)
        vs = [path.start] + [g.target(d) for d in path.edges]
        img_edges.append(tuple(path.edges))
        img_markers.append(tuple(pad(m, v) for m, v in zip(path.markers, vs)))
    compat = [[_compatible(a, b) for b in letters] for a in letters]
    D = 2 * g.n_orbits
    src = [g.source(d) for d in range(D)]
    dst = [g.target(d) for d in range(D)]
    slot = [f - 1 if f else -1 for f in g.factors]
    return (img_edges, img_markers, compat, src, dst, vmod, slot, g.n_orbits, max_len, g.basepoint)


def word_table(marked: MarkedGraph, max_len: int = 8) -> dict[AbelClass, np.ndarray]:
    """Class -> distinct crossing-count vectors of hyperbolic words of length <= max_len."""
    from .lipschitz import _marking_key

    key = (_marking_key(marked), max_len)
    with _lock:
        hit = _tables.get(key)
    if hit is not None:
        return hit
    g = marked.graph
    found = kernels.oracle_scan(*scan_args(marked, max_len))
    non_tree = g.non_tree
    rows: dict[AbelClass, set] = {}
    for counts, mask in found:
        cls = AbelClass(frozenset(i + 1 for i in range(g.r) if mask >> i & 1),
                        tuple(counts[e] % 2 for e in non_tree))
        rows.setdefault(cls, set()).add(tuple(counts))
    out = {c: np.array(sorted(v), dtype=np.int64) for c, v in rows.items()}
    with _lock:
        _tables[key] = out
    return out


def class_length_oracle(metric, cls: AbelClass, marked: MarkedGraph, max_len: int = 8) -> float:
    """Minimal translation length over hyperbolic words of the class (inf if none found)."""
    if cls.is_zero:
        raise ValueError("the zero class is excluded")
    if max_len < 2:
        raise ValueError("syllable bound must be at least 2")
    rows = word_table(marked, max_len).get(AbelClass(frozenset(cls.support), tuple(cls.vector)))
    if rows is None:
        return float("inf")
    return float((rows @ np.asarray(metric, dtype=float)).min())


def max_ratio_oracle(A: MarkedGraph, B: MarkedGraph, max_len: int = 8) -> float:
    """log max over hyperbolic words of ell_B / ell_A, same graph and marking."""
    counts = np.concatenate([v for v in word_table(A, max_len).values()])
    return float(np.log(np.max((counts @ B.ell) / (counts @ A.ell))))
