# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled counterparts of ``_pykernels`` (same signatures and results)."""
import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, INFINITY
from libc.stdint cimport int64_t, uint64_t
from libcpp.unordered_map cimport unordered_map
from libcpp.unordered_set cimport unordered_set
from libcpp.vector cimport vector

from . import _pykernels

cnp.import_array()

BACKEND = "cython"


def ratio_max(const int64_t[:, :] counts, const double[:] num, const double[:] den, double rtol=1e-12):
    cdef Py_ssize_t M = counts.shape[0], E = counts.shape[1], k, e
    cdef double a, b, v, best = -INFINITY, cut
    cdef double[:] vals = np.empty(M)
    for k in range(M):
        a = 0.0
        b = 0.0
        for e in range(E):
            if counts[k, e]:
                a += counts[k, e] * num[e]
                b += counts[k, e] * den[e]
        v = a / b
        vals[k] = v
        if v > best:
            best = v
    cut = best - rtol * max(1.0, fabs(best))
    for k in range(M):
        if vals[k] >= cut:
            return best, k
    return best, -1


def class_minima(const int64_t[:, :] counts, const int64_t[:] offsets, const double[:] ell,
                 const double[:] tau, double rtol=1e-12):
    cdef Py_ssize_t C = offsets.shape[0] - 1, E = counts.shape[1], c, k, e
    lengths_np = np.full(C, np.inf)
    taus_np = np.full(C, np.nan)
    first_np = np.full(C, -1, dtype=np.int64)
    cdef double[:] lengths = lengths_np
    cdef double[:] taus = taus_np
    cdef int64_t[:] first = first_np
    cdef double[:] lens = np.empty(max(1, counts.shape[0]))
    cdef double best, cut, s, mt
    cdef int64_t arg
    for c in range(C):
        if offsets[c] == offsets[c + 1]:
            continue
        best = INFINITY
        for k in range(offsets[c], offsets[c + 1]):
            s = 0.0
            for e in range(E):
                if counts[k, e]:
                    s += counts[k, e] * ell[e]
            lens[k] = s
            if s < best:
                best = s
        cut = best + rtol * max(1.0, fabs(best))
        mt = INFINITY
        arg = -1
        for k in range(offsets[c], offsets[c + 1]):
            if lens[k] <= cut:
                if arg < 0:
                    arg = k
                s = 0.0
                for e in range(E):
                    if counts[k, e]:
                        s += counts[k, e] * tau[e]
                if s < mt:
                    mt = s
        lengths[c] = best
        taus[c] = mt
        first[c] = arg
    return lengths_np, taus_np, first_np


def loop_signatures(src_in, dst_in, slot_in, int m):
    cdef int64_t[:] src = np.ascontiguousarray(src_in, dtype=np.int64)
    cdef int64_t[:] dst = np.ascontiguousarray(dst_in, dtype=np.int64)
    cdef int64_t[:] slot = np.ascontiguousarray(slot_in, dtype=np.int64)
    cdef int D = src.shape[0]
    cdef int S = 0
    cdef Py_ssize_t v
    for v in range(slot.shape[0]):
        if slot[v] + 1 > S:
            S = slot[v] + 1
    cdef int64_t base = m + 1
    cdef double span = float(base) ** D * D * (1 << S)
    if span > 9.0e18:
        return _pykernels.loop_signatures(src_in, dst_in, slot_in, m)
    cdef vector[int64_t] P = vector[int64_t](D)
    cdef int d
    P[0] = 1
    for d in range(1, D):
        P[d] = P[d - 1] * base
    # adjacency by source vertex
    cdef vector[vector[int]] out_edges = vector[vector[int]](slot.shape[0])
    for d in range(D):
        out_edges[src[d]].push_back(d)
    cdef int64_t nbits = 1 << S
    cdef unordered_map[int64_t, int64_t] parent
    cdef vector[int64_t] frontier, nxt
    cdef int64_t state, ns, code, bits, nb, fb
    cdef int s, last, w, k
    cdef bint ok
    results = {}
    for s in range(D):
        parent.clear()
        frontier.clear()
        state = (P[s] * D + s) * nbits
        parent[state] = -1
        frontier.push_back(state)
        while frontier.size():
            nxt.clear()
            for k in range(<int>frontier.size()):
                state = frontier[k]
                bits = state % nbits
                last = <int>((state // nbits) % D)
                code = state // nbits // D
                w = <int>dst[last]
                if w == src[s]:
                    ok = True
                    fb = bits
                    if s == (last ^ 1):
                        ok = slot[w] >= 0
                    elif slot[w] >= 0:
                        fb = bits | (1 << slot[w])
                    if ok and (code, fb) not in results:
                        walk = []
                        ns = state
                        while ns != -1:
                            walk.append(<int>((ns // nbits) % D))
                            ns = parent[ns]
                        results[(code, fb)] = tuple(reversed(walk))
                for d in out_edges[w]:
                    if d < s or (code // P[d]) % base >= m:
                        continue
                    nb = bits
                    if d == (last ^ 1):
                        if slot[w] < 0:
                            continue
                    elif slot[w] >= 0:
                        nb = bits | (1 << slot[w])
                    ns = ((code + P[d]) * D + d) * nbits + nb
                    if parent.count(ns) == 0:
                        parent[ns] = state
                        nxt.push_back(ns)
            frontier.swap(nxt)
    out = []
    for (code, bits), walk in sorted(results.items()):
        usage = tuple(int((code // P[d]) % base) for d in range(D))
        out.append((usage, int(bits), walk))
    return out


cdef inline int64_t _addmod(int64_t x, int64_t y, int64_t q) nogil:
    if q:
        return (x + y) % q
    return x + y


cdef class _Scanner:
    cdef int A, W, V, n_orbits, max_len, base, cap
    cdef int64_t[:, :] img_edge      # (A, Lmax)
    cdef int64_t[:] img_len
    cdef int64_t[:, :, :] img_mark   # (A, Lmax + 1, W)
    cdef unsigned char[:, :] compat
    cdef int64_t[:] src, dst, slot
    cdef int64_t[:, :] vmod
    cdef int64_t[:, :] E             # (depth, cap) edge stacks
    cdef int64_t[:, :, :] M          # (depth, cap + 1, W) markers
    cdef int64_t[:] n
    cdef int64_t[:] cnt
    cdef int64_t[:, :] sums
    cdef int64_t[:] ce
    cdef int64_t[:, :] cm
    cdef unordered_set[uint64_t] found

    cdef void extend(self, int depth, int a):
        # copy state depth-1 -> depth, then append letter a with free reduction
        cdef int L = self.n[depth - 1], k, w, i, d, v
        for k in range(L):
            self.E[depth, k] = self.E[depth - 1, k]
        for k in range(L + 1):
            for w in range(self.W):
                self.M[depth, k, w] = self.M[depth - 1, k, w]
        v = self.dst[self.E[depth, L - 1]] if L else self.base
        for w in range(self.W):
            self.M[depth, L, w] = _addmod(self.M[depth, L, w], self.img_mark[a, 0, w], self.vmod[v, w])
        for i in range(self.img_len[a]):
            d = self.img_edge[a, i]
            v = self.dst[d]
            if L and self.E[depth, L - 1] == (d ^ 1) and self._zero(depth, L):
                L -= 1
                for w in range(self.W):
                    self.M[depth, L, w] = _addmod(self.M[depth, L, w], self.img_mark[a, i + 1, w], self.vmod[v, w])
            else:
                self.E[depth, L] = d
                L += 1
                for w in range(self.W):
                    self.M[depth, L, w] = _addmod(0, self.img_mark[a, i + 1, w], self.vmod[v, w])
        self.n[depth] = L

    cdef bint _zero(self, int depth, int k):
        cdef int w
        for w in range(self.W):
            if self.M[depth, k, w]:
                return False
        return True

    cdef void finish(self, int depth):
        cdef int L = self.n[depth], k, w, v, lo, hi, e
        if L == 0:
            return
        # cyclic buffer: edges ce[0..L), markers cm[k] at source of ce[k]
        for k in range(L):
            self.ce[k] = self.E[depth, k]
        v = self.src[self.ce[0]]
        for w in range(self.W):
            self.cm[0, w] = _addmod(self.M[depth, L, w], self.M[depth, 0, w], self.vmod[v, w])
        for k in range(1, L):
            for w in range(self.W):
                self.cm[k, w] = self.M[depth, k, w]
        lo = 0
        hi = L  # live window [lo, hi), marker of the window start stored at cm[lo]
        while hi - lo >= 2 and self.ce[hi - 1] == (self.ce[lo] ^ 1):
            for w in range(self.W):
                if self.cm[lo, w]:
                    break
            else:
                if hi - lo == 2:
                    return
                v = self.src[self.ce[hi - 1]]
                for w in range(self.W):
                    self.cm[lo + 1, w] = _addmod(self.cm[hi - 1, w], self.cm[lo + 1, w], self.vmod[v, w])
                lo += 1
                hi -= 1
                continue
            break
        for e in range(self.n_orbits):
            self.cnt[e] = 0
        for v in range(self.V):
            for w in range(self.W):
                self.sums[v, w] = 0
        for k in range(lo, hi):
            self.cnt[self.ce[k] >> 1] += 1
            v = self.src[self.ce[k]]
            if self.slot[v] >= 0:
                for w in range(self.W):
                    self.sums[v, w] = _addmod(self.sums[v, w], self.cm[k, w], self.vmod[v, w])
        cdef uint64_t key = 0
        for e in range(self.n_orbits):
            key = key * 128 + <uint64_t>self.cnt[e]
        cdef uint64_t mask = 0
        for v in range(self.V):
            if self.slot[v] >= 0:
                for w in range(self.W):
                    if self.sums[v, w]:
                        mask |= (<uint64_t>1) << self.slot[v]
                        break
        self.found.insert(key * 256 + mask)

    cdef void rec(self, int first, int last, int depth):
        cdef int b
        if self.compat[last, first]:
            self.finish(depth)
        if depth == self.max_len:
            return
        for b in range(self.A):
            if self.compat[last, b]:
                self.extend(depth + 1, b)
                self.rec(first, b, depth + 1)


def oracle_scan(img_edges, img_markers, compat, src, dst, vmod, slot, int n_orbits, int max_len, int basepoint):
    cdef int A = len(img_edges)
    cdef int a
    cdef int W = len(vmod[0]) if len(vmod) else 1
    cdef int Lmax = max([len(x) for x in img_edges] + [1])
    cdef int cap = Lmax * max_len + 2
    n_slots = max(list(slot) + [-1]) + 1
    if n_orbits * 7 > 56 or n_slots > 8 or cap > 127:
        return _pykernels.oracle_scan(img_edges, img_markers, compat, src, dst, vmod, slot,
                                      n_orbits, max_len, basepoint)
    cdef _Scanner sc = _Scanner()
    sc.A, sc.W, sc.V = A, W, len(vmod)
    sc.n_orbits, sc.max_len, sc.base, sc.cap = n_orbits, max_len, basepoint, cap
    ie = np.zeros((A, Lmax), dtype=np.int64)
    il = np.zeros(A, dtype=np.int64)
    im = np.zeros((A, Lmax + 1, W), dtype=np.int64)
    for a in range(A):
        il[a] = len(img_edges[a])
        for i, d in enumerate(img_edges[a]):
            ie[a, i] = d
        for i, mk in enumerate(img_markers[a]):
            im[a, i, :] = mk
    sc.img_edge, sc.img_len, sc.img_mark = ie, il, im
    sc.compat = np.asarray(compat, dtype=np.uint8)
    sc.src = np.asarray(src, dtype=np.int64)
    sc.dst = np.asarray(dst, dtype=np.int64)
    sc.slot = np.asarray(slot, dtype=np.int64)
    sc.vmod = np.asarray(vmod, dtype=np.int64).reshape(len(vmod), W)
    sc.E = np.zeros((max_len + 1, cap), dtype=np.int64)
    sc.M = np.zeros((max_len + 1, cap + 1, W), dtype=np.int64)
    sc.n = np.zeros(max_len + 1, dtype=np.int64)
    sc.cnt = np.zeros(n_orbits, dtype=np.int64)
    sc.sums = np.zeros((len(vmod), W), dtype=np.int64)
    sc.ce = np.zeros(cap, dtype=np.int64)
    sc.cm = np.zeros((cap, W), dtype=np.int64)
    for a in range(A):
        sc.extend(1, a)
        sc.rec(a, a, 1)
    out = set()
    cdef uint64_t key, mask
    for key in sc.found:
        mask = key % 256
        key //= 256
        counts = []
        for _ in range(n_orbits):
            counts.append(int(key % 128))
            key //= 128
        out.add((tuple(reversed(counts)), int(mask)))
    return out
