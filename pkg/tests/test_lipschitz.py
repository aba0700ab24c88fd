import math

import numpy as np
import pytest

from outerlip.freeprod import MarkedGraph, identity_marking
from outerlip.lipschitz import (SHAPES, distance, enumerate_candidates, lip_norm, max_cone_witness,
                                metric_distance)
from outerlip.scene import example1_text, parse_scene

from conftest import CHAIN_ELL, CHAIN_MID, TAU


def test_chain_candidates(chain):
    cs = enumerate_candidates(chain)
    labels = [c.label(chain) for c in cs]
    # C1, C2, and the [v1,v3] barbell with both pass patterns at v2; the two
    # one-sided patterns are mirror images and share a canonical form
    assert labels == [
        "[v1] e1 [v2] e1~",
        "[v1] e1 e2 [v3] e2~ e1~",
        "[v1] e1 e2 [v3] e2~ [v2] e1~",
        "[v1] e1 [v2] e2 [v3] e2~ [v2] e1~",
        "[v2] e2 [v3] e2~",
    ]
    assert {c.shape for c in cs} == {"doubly-degenerate-barbell"}
    assert {c.counts for c in cs} == {(2, 0), (2, 2), (0, 2)}


def test_example1_T_candidates(ex1):
    T = ex1.presets["T"].graph
    assert [c.label(T) for c in enumerate_candidates(T)] == ["a", "[v1] a"]


def test_shapes_are_known(graphs):
    for _, sc in graphs.items():
        assert {c.shape for c in enumerate_candidates(sc.graph)} <= set(SHAPES)


def test_chain_norm(chain):
    value, witness = lip_norm(CHAIN_ELL, TAU, chain)
    assert value == 4.0 and witness.counts == (2, 0)
    value, witness = lip_norm(CHAIN_ELL, (-1.0, 1.0), chain)
    assert value == pytest.approx(4 / 3, abs=1e-12) and witness.counts == (0, 2)
    assert lip_norm(CHAIN_ELL, (0.0, 0.0), chain)[0] == 0.0


def test_chain_norm_diverges(chain):
    assert lip_norm((0.01, 0.99), TAU, chain)[0] > 50


def test_example1_distances(ex1):
    d, w = distance(ex1.marked("T.std"), ex1.marked("S.std"))
    assert abs(d - math.log(1.9)) <= 1e-12
    assert w.label(ex1.presets["T"].graph) == "[v1] a"
    d, _ = distance(ex1.marked("S.std"), ex1.marked("T.std"))
    assert abs(d - math.log(10)) <= 1e-12


def test_asymmetry_grows():
    sc = parse_scene(example1_text(0.01))
    ts = distance(sc.marked("T.std"), sc.marked("S.std"))[0]
    st = distance(sc.marked("S.std"), sc.marked("T.std"))[0]
    assert st / ts > 3


def test_chain_distance(chain):
    d, w = metric_distance(chain, CHAIN_ELL, CHAIN_MID)
    assert d == pytest.approx(math.log(2), abs=1e-15) and w.counts == (2, 0)


def test_distance_to_self_is_zero(ex2):
    assert distance(ex2.marked("std"), ex2.marked("std"))[0] == 0.0


def test_relabel_orbit_pair(ex2):
    a = distance(ex2.marked("std"), ex2.marked("relabel"))[0]
    b = distance(ex2.marked("relabel"), ex2.marked("std"))[0]
    assert a == pytest.approx(math.log(3), abs=1e-12) and b == pytest.approx(math.log(3), abs=1e-12)


def test_cone_witness(chain):
    w = max_cone_witness(CHAIN_ELL, TAU, chain)
    assert w.candidate.counts == (2, 0) and w.stable


def test_cone_witness_tie_break(chain):
    assert max_cone_witness(CHAIN_ELL, (0.0, 0.0), chain).index == 0


def test_cone_witness_rejects_nonintegrable(chain):
    with pytest.raises(ValueError):
        max_cone_witness((0.0, 1.0), TAU[::-1], chain)


def test_continuity(chain, rng):
    for _ in range(50):
        x = rng.uniform(0.05, 0.95)
        ell = np.array([x, 1 - x])
        tau = np.array([1.0, -1.0]) * rng.normal()
        bump = rng.normal(size=2) * 1e-6
        bump -= bump.mean()
        assert abs(lip_norm(ell, tau, chain)[0] - lip_norm(ell + bump, tau, chain)[0]) <= 1e-3


def test_candidates_suffice_against_oracle(graphs, rng):
    # distances within one simplex are never beaten by brute-force words
    from outerlip.oracle import max_ratio_oracle

    for name in ("example2", "rose-n2", "theta", "fibonacci"):
        sc = graphs[name]
        g = sc.graph
        for _ in range(3):
            a, b = rng.dirichlet(np.ones(g.n_orbits)), rng.dirichlet(np.ones(g.n_orbits))
            A = MarkedGraph(g, tuple(a), sc.groups, identity_marking(g))
            B = A.with_metric(b)
            d = distance(A, B)[0]
            assert max_ratio_oracle(A, B, 6) <= d + 1e-12
