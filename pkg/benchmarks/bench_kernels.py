"""Time the pure-Python and compiled kernels on the same inputs.

    python3 benchmarks/bench_kernels.py [--repeat 5]
"""
import argparse
import timeit

import numpy as np

from outerlip import _pykernels
from outerlip.correction import class_table
from outerlip.freeprod import MarkedGraph, identity_marking
from outerlip.lipschitz import enumerate_candidates
from outerlip.oracle import scan_args
from outerlip.scene import test_graphs

try:
    from outerlip import _ckernels
except ImportError:
    _ckernels = None


def cases():
    graphs = test_graphs()
    rng = np.random.default_rng(0)
    out = []

    g = graphs["theta0"].graph
    counts = enumerate_candidates(g).counts
    ell = rng.dirichlet(np.ones(g.n_orbits))
    tau = rng.normal(size=g.n_orbits)
    out.append(("ratio_max[theta0]", "ratio_max", (counts, tau, ell, 1e-12), 2000))

    sc = graphs["tripod"]
    t = class_table(sc.graph, sc.groups)
    ell = rng.dirichlet(np.ones(sc.graph.n_orbits))
    tau = rng.normal(size=sc.graph.n_orbits)
    out.append(("class_minima[tripod]", "class_minima", (t.counts, t.offsets, ell, tau, 1e-12), 500))

    g = graphs["theta"].graph
    D = 2 * g.n_orbits
    src = np.array([g.source(d) for d in range(D)], dtype=np.int64)
    dst = np.array([g.target(d) for d in range(D)], dtype=np.int64)
    slot = np.array([f - 1 if f else -1 for f in g.factors], dtype=np.int64)
    out.append(("loop_signatures[theta]", "loop_signatures", (src, dst, slot, 2), 3))

    sc = graphs["example2"]
    M = MarkedGraph(sc.graph, sc.metric(), sc.groups, identity_marking(sc.graph))
    out.append(("oracle_scan[example2,B=6]", "oracle_scan", scan_args(M, 6), 2))
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    print(f"{'kernel':28s} {'python ms':>11s} {'cython ms':>11s} {'speedup':>8s}")
    for label, fn, fargs, number in cases():
        row = []
        for mod in (_pykernels, _ckernels):
            if mod is None:
                row.append(float("nan"))
                continue
            f = getattr(mod, fn)
            best = min(timeit.repeat(lambda: f(*fargs), number=number, repeat=args.repeat))
            row.append(1e3 * best / number)
        print(f"{label:28s} {row[0]:11.4f} {row[1]:11.4f} {row[0] / row[1]:8.1f}x")


if __name__ == "__main__":
    main()
