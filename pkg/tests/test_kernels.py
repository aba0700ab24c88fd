import numpy as np
import pytest

from outerlip import _pykernels as py
from outerlip import kernels
from outerlip.correction import class_table
from outerlip.freeprod import MarkedGraph, identity_marking
from outerlip.groups import GroupSpec
from outerlip.oracle import scan_args

try:
    from outerlip import _ckernels as cy
except ImportError:  # pure-Python install
    cy = None

needs_c = pytest.mark.skipif(cy is None, reason="compiled kernels not built")


def test_backend_selected():
    assert kernels.BACKEND in ("cython", "python")


@needs_c
def test_ratio_max_parity(rng):
    for _ in range(50):
        counts = rng.integers(0, 4, size=(20, 3)).astype(np.int64)
        counts[counts.sum(axis=1) == 0, 0] = 1
        den = rng.dirichlet(np.ones(3))
        num = rng.normal(size=3)
        assert py.ratio_max(counts, num, den, 1e-12) == cy.ratio_max(counts, num, den, 1e-12)


@needs_c
def test_class_minima_parity(graphs, rng):
    t = class_table(graphs["tripod"].graph, graphs["tripod"].groups)
    ell = rng.dirichlet(np.ones(3))
    tau = rng.normal(size=3)
    a = py.class_minima(t.counts, t.offsets, ell, tau, 1e-12)
    b = cy.class_minima(t.counts, t.offsets, ell, tau, 1e-12)
    for x, y in zip(a, b):
        assert np.array_equal(np.asarray(x), np.asarray(y))


@needs_c
@pytest.mark.parametrize("name", ["example2", "rose-n2", "theta", "tripod", "fibonacci"])
def test_loop_signatures_parity(graphs, name):
    g = graphs[name].graph
    D = 2 * g.n_orbits
    src = np.array([g.source(d) for d in range(D)], dtype=np.int64)
    dst = np.array([g.target(d) for d in range(D)], dtype=np.int64)
    slot = np.array([f - 1 if f else -1 for f in g.factors], dtype=np.int64)

    def norm(rows):
        return sorted((tuple(u), b, tuple(w)) for u, b, w in rows)

    assert norm(py.loop_signatures(src, dst, slot, 2)) == norm(cy.loop_signatures(src, dst, slot, 2))


@needs_c
@pytest.mark.parametrize("name, group", [("example2", "Z/3"), ("theta", "Z/2"), ("example1-S", "Z/3")])
def test_oracle_scan_parity(graphs, name, group):
    sc = graphs[name]
    g = sc.graph
    groups = GroupSpec.uniform(g.r, group)
    M = MarkedGraph(g, sc.metric(), groups, identity_marking(g))
    args = scan_args(M, 5)
    assert py.oracle_scan(*args) == cy.oracle_scan(*args)
