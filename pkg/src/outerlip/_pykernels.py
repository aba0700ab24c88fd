"""Pure-Python kernels.  The compiled ``_ckernels`` module mirrors these exactly."""
from __future__ import annotations

import numpy as np

BACKEND = "python"


def ratio_max(counts, num, den, rtol=1e-12):
    """Max over rows of (c . num) / (c . den); first row within ``rtol`` wins."""
    M, E = counts.shape
    vals = [0.0] * M
    best = -np.inf
    for k in range(M):
        a = 0.0
        b = 0.0
        row = counts[k]
        for e in range(E):
            c = row[e]
            if c:
                a += c * num[e]
                b += c * den[e]
        v = a / b
        vals[k] = v
        if v > best:
            best = v
    cut = best - rtol * max(1.0, abs(best))
    for k in range(M):
        if vals[k] >= cut:
            return best, k
    return best, -1


def class_minima(counts, offsets, ell, tau, rtol=1e-12):
    """Per class: min length, min tau among near-minimal rows, first argmin row."""
    C = len(offsets) - 1
    E = counts.shape[1]
    lengths = np.full(C, np.inf)
    taus = np.full(C, np.nan)
    first = np.full(C, -1, dtype=np.int64)
    for c in range(C):
        lo, hi = offsets[c], offsets[c + 1]
        if lo == hi:
            continue
        lens = []
        for k in range(lo, hi):
            row = counts[k]
            lens.append(sum(row[e] * ell[e] for e in range(E) if row[e]))
        best = min(lens)
        cut = best + rtol * max(1.0, abs(best))
        mt = np.inf
        arg = -1
        for k in range(lo, hi):
            if lens[k - lo] <= cut:
                if arg < 0:
                    arg = k
                row = counts[k]
                t = sum(row[e] * tau[e] for e in range(E) if row[e])
                if t < mt:
                    mt = t
        lengths[c] = best
        taus[c] = mt
        first[c] = arg
    return lengths, taus, first


def loop_signatures(src, dst, slot, m):
    """Reduced closed walks using each directed edge at most ``m`` times.

    Backtracks are allowed only at vertices with ``slot >= 0`` (non-free).
    Returns ``[(usage, pass_bits, walk)]``: directed-edge multiplicities, a
    bitmask of slots having a non-backtrack (pass-through) visit, and one
    witnessing walk per distinct (usage, pass_bits).
    """
    D = len(src)
    base = m + 1
    P = [base ** d for d in range(D)]
    out_edges = {}
    for d in range(D):
        out_edges.setdefault(int(src[d]), []).append(d)
    results = {}
    for s in range(D):
        start = (s, P[s], 0)
        parent = {start: None}
        frontier = [start]
        while frontier:
            nxt = []
            for state in frontier:
                last, code, bits = state
                w = int(dst[last])
                if w == src[s]:
                    ok = True
                    fb = bits
                    if s == last ^ 1:
                        ok = slot[w] >= 0
                    elif slot[w] >= 0:
                        fb = bits | (1 << int(slot[w]))
                    if ok and (code, fb) not in results:
                        walk = []
                        st = state
                        while st is not None:
                            walk.append(st[0])
                            st = parent[st]
                        results[(code, fb)] = tuple(reversed(walk))
                for d in out_edges.get(w, ()):
                    if d < s or (code // P[d]) % base >= m:
                        continue
                    nb = bits
                    if d == last ^ 1:
                        if slot[w] < 0:
                            continue
                    elif slot[w] >= 0:
                        nb = bits | (1 << int(slot[w]))
                    ns = (d, code + P[d], nb)
                    if ns not in parent:
                        parent[ns] = state
                        nxt.append(ns)
            frontier = nxt
    out = []
    for (code, bits), walk in sorted(results.items()):
        usage = tuple((code // P[d]) % base for d in range(D))
        out.append((usage, bits, walk))
    return out


def _add(a, b, mod):
    return tuple((x + y) % q if q else x + y for x, y, q in zip(a, b, mod))


def oracle_scan(img_edges, img_markers, compat, src, dst, vmod, slot, n_orbits, max_len, basepoint):
    """Crossing counts and support masks of all cyclically reduced words.

    ``img_edges[a]`` / ``img_markers[a]`` give the based image path of letter
    ``a`` (markers as tuples, one per vertex visit).  Words are sequences of
    letters with ``compat[a][b]`` for consecutive letters, cyclically too,
    of length 1..max_len.  Elliptic images are skipped.
    """
    A = len(img_edges)
    W = len(vmod[0]) if len(vmod) else 1
    zero = (0,) * W
    found = set()

    def extend(E, M, a):
        E = list(E)
        M = list(M)
        marks = img_markers[a]
        v = dst[E[-1]] if E else basepoint
        M[-1] = _add(M[-1], marks[0], vmod[v])
        for d, mk in zip(img_edges[a], marks[1:]):
            if E and E[-1] == d ^ 1 and not any(M[-1]):
                E.pop()
                M.pop()
                v = dst[d]
                M[-1] = _add(M[-1], mk, vmod[v])
            else:
                E.append(d)
                v = dst[d]
                M.append(_add(zero, mk, vmod[v]))
        return E, M

    def finish(E, M):
        if not E:
            return
        v0 = src[E[0]]
        first = _add(M[-1], M[0], vmod[v0])
        edges = list(E)
        marks = [first] + list(M[1:-1])
        while len(edges) >= 2 and edges[-1] == edges[0] ^ 1 and not any(marks[0]):
            v = src[edges[-1]]
            merged = _add(marks[-1], marks[1], vmod[v])
            edges = edges[1:-1]
            marks = [merged] + marks[2:-1]
        if not edges:
            return
        counts = [0] * n_orbits
        sums = {}
        for d, mk in zip(edges, marks):
            counts[d >> 1] += 1
            v = src[d]
            if slot[v] >= 0 and any(mk):
                sums[v] = _add(sums.get(v, zero), mk, vmod[v])
        mask = 0
        for v, s in sums.items():
            if any(s):
                mask |= 1 << int(slot[v])
        found.add((tuple(counts), mask))

    def rec(first, last, depth, E, M):
        if compat[last][first]:
            finish(E, M)
        if depth == max_len:
            return
        for b in range(A):
            if compat[last][b]:
                E2, M2 = extend(E, M, b)
                rec(first, b, depth + 1, E2, M2)

    for a in range(A):
        E, M = extend([], [zero], a)
        rec(a, a, 1, E, M)
    return found
