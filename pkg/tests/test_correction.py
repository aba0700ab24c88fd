import math

import numpy as np
import pytest

from outerlip.correction import (HClass, InfeasibleClass, check_lifts_lemma, class_length, class_lengths,
                                 corrected_norm, correction_constants, double_covers, enumerate_classes, n_value,
                                 psi, psi_invariance)
from outerlip.freeprod import AbelClass
from outerlip.graph import GraphOfGroups, crossing_counts
from outerlip.groups import GroupSpec
from outerlip.lipschitz import enumerate_candidates
from outerlip.oracle import class_length_oracle

from conftest import CHAIN_ELL, CHAIN_MID, TAU, chain_graph, marked, rose_graph

Z3 = GroupSpec.uniform(3)


def cls(*support):
    return HClass(frozenset(support), ())


def test_class_counts(graphs):
    assert len(enumerate_classes(chain_graph())) == 7
    assert len(enumerate_classes(graphs["pair"].graph)) == 3
    assert len(enumerate_classes(rose_graph())) == 7


def test_zero_class_rejected():
    with pytest.raises(ValueError):
        HClass(frozenset(), ())


# Frozen chain values, derived by hand from the shortest words in each class:
#   {1,2}: g1 g2 over e1 twice -> 2(0.25) = 0.5
#   {1}:   g1 g2 g1 g2^-1, e1 four times -> 1.0
#   {3}:   g1 g2 g1^-1 g3 g2^-1, e1 four times and e2 twice -> 1.0 + 1.5 = 2.5
CHAIN_CLASS_LENGTHS = {(1,): 1.0, (2,): 1.0, (3,): 2.5, (1, 2): 0.5, (1, 3): 2.0, (2, 3): 1.5, (1, 2, 3): 2.0}


@pytest.mark.parametrize("support, length", sorted(CHAIN_CLASS_LENGTHS.items()))
def test_chain_class_lengths(support, length):
    got, loops = class_length(CHAIN_ELL, cls(*support), chain_graph(), Z3)
    assert got == pytest.approx(length, abs=1e-15)
    assert loops


def test_class_one_realizer_crosses_e1_four_times():
    _, loops = class_length(CHAIN_ELL, cls(1), chain_graph(), Z3)
    assert tuple(crossing_counts(chain_graph(), loops[0].edges)) == (4, 0)


def test_class_three_beats_the_long_candidate():
    # the word g3 g2 g3 g2^-1 has length 3.0; a shorter word of the class exists
    c = chain_graph()
    M = marked(c, CHAIN_ELL, Z3)
    assert class_length_oracle(CHAIN_ELL, AbelClass(frozenset({3}), ()), M) == 2.5
    from outerlip.freeprod import translation_length

    g = (1,)
    assert translation_length(M, [(1, g), (2, g), (1, (2,)), (3, g), (2, (2,))])[0] == 2.5


def test_oracle_values():
    c = chain_graph()
    M = marked(c, CHAIN_ELL, Z3)
    assert class_length_oracle(CHAIN_ELL, AbelClass(frozenset({1, 2}), ()), M) == 0.5
    assert class_length_oracle(CHAIN_ELL, AbelClass(frozenset({1}), ()), M) == 1.0
    with pytest.raises(ValueError):
        class_length_oracle(CHAIN_ELL, AbelClass(frozenset(), ()), M)


def test_order_two_pair_has_infeasible_classes(graphs):
    # in Z/2 * Z/2 every hyperbolic element has both coordinates nontrivial
    g = graphs["pair"].graph
    z2 = GroupSpec.uniform(2, "Z/2")
    with pytest.raises(InfeasibleClass):
        class_length((1.0,), cls(1), g, z2)
    M = marked(g, (1.0,), z2)
    assert math.isinf(class_length_oracle((1.0,), AbelClass(frozenset({1}), ()), M))
    assert class_length((1.0,), cls(1, 2), g, z2)[0] == 2.0


def test_constants(graphs):
    assert correction_constants(chain_graph()) == correction_constants(graphs["tripod"].graph)
    c = correction_constants(chain_graph())
    assert (c.regime, c.K, c.A) == ("base", 7, 24)
    c = correction_constants(rose_graph())
    assert (c.regime, c.K, c.A) == ("covers", 93, 282)
    c = correction_constants(graphs["example1-T"].graph)
    assert (c.K, c.A) == (3, 12)


def test_rose_covers(rose):
    covers = double_covers(rose, GroupSpec.uniform(1))
    assert [c.cocycle for c in covers] == [(0, 1), (1, 0), (1, 1)]
    for cov in covers:
        g = cov.graph
        assert len(g.nonfree_vertices) == 2 and g.n == 3 and g.r == 2
        assert g.structural_problems() == []


def test_covers_need_rank_two(chain):
    with pytest.raises(ValueError):
        double_covers(chain, Z3)


N_CHAIN = -172 / 15  # -(4 + 4 + 0.8 + 4 + 0 - 4/3 + 0)


def test_n_value():
    c = chain_graph()
    assert n_value(CHAIN_ELL, TAU, c, Z3) == pytest.approx(N_CHAIN, abs=1e-12)
    assert n_value(CHAIN_ELL, (-1.0, 1.0), c, Z3) == pytest.approx(-N_CHAIN, abs=1e-12)
    assert n_value(CHAIN_ELL, (0.0, 0.0), c, Z3) == 0.0


def test_psi():
    c = chain_graph()
    assert psi(CHAIN_ELL, c, Z3) == pytest.approx(-math.log(7.5) / 8, abs=1e-15)
    assert psi(CHAIN_MID, c, Z3) == pytest.approx(-5 * math.log(2) / 8, abs=1e-15)


def test_corrected_norm():
    c = chain_graph()
    assert corrected_norm(CHAIN_ELL, TAU, c, Z3) == pytest.approx(77 / 30, abs=1e-12)
    assert corrected_norm(CHAIN_ELL, (-1.0, 1.0), c, Z3) == pytest.approx(83 / 30, abs=1e-12)
    assert corrected_norm(CHAIN_ELL, (0.0, 0.0), c, Z3) == 0.0


def test_psi_relabel_invariance():
    c = chain_graph()
    for ell in (CHAIN_MID, CHAIN_ELL, (0.1, 0.9)):
        assert psi_invariance(ell, c, Z3, factor_perm=(3, 2, 1))[2]
        assert psi_invariance(ell, c, Z3, factor_perm=(3, 2, 1), edge_perm=(-2, -1))[2]


def test_psi_swap_invariance(rose, fib):
    assert psi_invariance((0.3, 0.7), rose, GroupSpec.uniform(1), edge_perm=(2, 1))[2]
    assert psi_invariance((0.3, 0.7), fib.graph, fib.groups, edge_perm=(2, -1))[2]


def test_non_symmetry_rejected(chain):
    with pytest.raises(ValueError):
        psi_invariance(CHAIN_ELL, chain, Z3, edge_perm=(-2, -1))


def test_class_lengths_cover_every_summand(rose):
    assert len(class_lengths((0.5, 0.5), rose, GroupSpec.uniform(1))) == 93


LIFTS = {"a": (0, 1), "b": (1, 0), "a b": (1, 1), "a b~": (1, 1)}


def test_lifts_lemma_rose(rose):
    groups = GroupSpec.uniform(1)
    for cand in enumerate_candidates(rose):
        cocycle, ok = check_lifts_lemma(cand, rose, groups)
        assert ok
        bare = cand.label(rose).replace("[v1] ", "")
        assert cocycle == LIFTS[bare]


def test_lifts_lemma_doubly_degenerate():
    g = GraphOfGroups.build([("v1", 1), ("v2", 2)], [("e", "v1", "v2"), ("f", "v1", "v2"), ("h", "v1", "v2")])
    groups = GroupSpec.uniform(2)
    found = [c for c in enumerate_candidates(g) if c.shape == "doubly-degenerate-barbell"]
    assert len(found) == 3
    for cand in found:
        assert check_lifts_lemma(cand, g, groups)[1]
