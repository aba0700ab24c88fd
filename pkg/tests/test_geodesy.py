import math

import numpy as np
import pytest

from outerlip.freeprod import MarkedGraph, identity_marking
from outerlip.geodesy import (PLPath, check_main_theorem, path_length_L, path_length_N, path_length_quadrature,
                              random_metric, reverse_path, segment_length_L)
from outerlip.groups import GroupSpec
from outerlip.lipschitz import metric_distance

from conftest import CHAIN_ELL, CHAIN_MID, chain_graph, marked

Z3 = GroupSpec.uniform(3)
LEN_N = 3 * math.log(2) / 8 + math.log(7.5) / 8
LEN_N_BACK = math.log(1.5) + 5 * math.log(2) / 8 - math.log(7.5) / 8


@pytest.fixture(scope="module")
def seg():
    return PLPath.through(chain_graph(), Z3, [CHAIN_ELL, CHAIN_MID])


def test_len_L(seg):
    assert path_length_L(seg) == pytest.approx(math.log(2), abs=1e-15)
    assert path_length_L(reverse_path(seg)) == pytest.approx(math.log(1.5), abs=1e-15)


def test_constant_path():
    p = PLPath.through(chain_graph(), Z3, [CHAIN_ELL, CHAIN_ELL])
    assert path_length_L(p) == 0.0 and path_length_N(p) == 0.0


def test_there_and_back(seg):
    loop = PLPath.through(chain_graph(), Z3, [CHAIN_ELL, CHAIN_MID, CHAIN_ELL])
    assert path_length_L(loop) == pytest.approx(math.log(2) + math.log(1.5), abs=1e-15)


def test_len_N(seg):
    assert path_length_N(seg) == pytest.approx(LEN_N, abs=1e-12)
    back = path_length_N(reverse_path(seg))
    assert back == pytest.approx(LEN_N_BACK, abs=1e-12)
    assert back <= 24 * path_length_N(seg)


def test_reverse_twice(seg):
    assert reverse_path(reverse_path(seg)).points == seg.points


def test_path_leaving_region_rejected():
    with pytest.raises(ValueError):
        PLPath.through(chain_graph(), Z3, [CHAIN_ELL, (0.0, 1.0)])


def test_quadrature_matches(seg):
    assert path_length_quadrature(seg) == pytest.approx(path_length_L(seg), abs=1e-6)
    assert path_length_quadrature(seg, corrected=True) == pytest.approx(path_length_N(seg), abs=1e-6)


def test_quadrature_random_segments(graphs, rng):
    for name in ("theta", "tripod", "example1-S"):
        sc = graphs[name]
        p = PLPath.through(sc.graph, sc.groups, [random_metric(sc.graph, rng), random_metric(sc.graph, rng)])
        assert path_length_quadrature(p) == pytest.approx(path_length_L(p), abs=1e-6)
        assert path_length_quadrature(p, corrected=True) == pytest.approx(path_length_N(p), abs=1e-6)


def test_geodesic_consistency(graphs, rng):
    for sc in graphs.values():
        g = sc.graph
        for _ in range(5):
            a, b = random_metric(g, rng), random_metric(g, rng)
            assert segment_length_L(g, a, b) >= metric_distance(g, a, b)[0] - 1e-9


def test_main_theorem_chain():
    c = chain_graph()
    rep = check_main_theorem(marked(c, CHAIN_ELL, Z3), marked(c, CHAIN_MID, Z3))
    assert rep.passed
    assert rep.lhs == pytest.approx(math.log(2), abs=1e-12)
    expected = 24 * math.log(1.5) + 25 * (5 * math.log(2) / 8 - math.log(7.5) / 8)
    assert rep.rhs == pytest.approx(expected, abs=1e-12)


def test_main_theorem_trivial():
    M = marked(chain_graph(), CHAIN_ELL, Z3)
    rep = check_main_theorem(M, M)
    assert rep.lhs == 0.0 and rep.rhs == 0.0 and rep.passed


def test_main_theorem_orbit_pair(ex2):
    rep = check_main_theorem(ex2.marked("std"), ex2.marked("relabel"))
    assert rep.passed and rep.psi_t == rep.psi_s


def test_main_theorem_cross_simplex(ex1):
    assert check_main_theorem(ex1.marked("T.std"), ex1.marked("S.std")).passed
    assert check_main_theorem(ex1.marked("S.std"), ex1.marked("T.std")).passed


def test_rank_mismatch(ex1, ex2):
    with pytest.raises(ValueError):
        check_main_theorem(ex1.marked("T.std"), ex2.marked("std"))
