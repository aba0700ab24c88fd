import pytest

from outerlip.freeprod import (MarkedGraph, Marking, abel_class, free, is_elliptic, reduce_word,
                               translation_length, validate_marking, word_of_loop)
from outerlip.graph import MarkedLoop, Path
from outerlip.groups import GroupSpec

from conftest import CHAIN_ELL, chain_graph, marked, rose_graph

Z3 = GroupSpec.uniform(3)
g = (1,)


def test_free_cancellation():
    assert reduce_word([free(1), free(-1)], Z3) == ()


def test_vertex_letters_merge():
    assert reduce_word([(1, g), (1, g)], Z3) == ((1, (2,)),)


def test_cube_of_generator_vanishes():
    assert reduce_word([(1, g)] * 3, Z3) == ()


@pytest.mark.parametrize("word, expected", [
    ([(1, g)], True),
    ([free(1)], False),
    ([(1, g), (2, g)], False),
    ([free(1), (1, g), free(-1)], True),
])
def test_is_elliptic(word, expected):
    assert is_elliptic(word, Z3) is expected


def test_translation_length_example1(ex1):
    T, S = ex1.marked("T.std"), ex1.marked("S.std")
    assert translation_length(T, [free(1)])[0] == 1.0
    assert translation_length(S, [free(1), (1, g)])[0] == pytest.approx(1.9, abs=1e-15)


def test_translation_length_chain():
    M = marked(chain_graph(), CHAIN_ELL, Z3)
    assert translation_length(M, [(1, g), (2, g), (3, g)])[0] == 2.0
    assert translation_length(M, [(1, g)]) == (0.0, None)


def test_abel_classes(rose):
    c = chain_graph()
    cls = abel_class([(1, g), (2, g)], c, Z3)
    assert cls.support == {1, 2} and cls.vector == ()
    cls = abel_class([(1, g), (2, g), (1, g), (2, (2,))], c, Z3)
    assert cls.support == {1} and cls.vector == ()
    cls = abel_class(MarkedLoop((0,), (None,)), rose, GroupSpec.uniform(1))
    assert cls.support == frozenset() and cls.vector == (1, 0)


def test_word_of_loop_c1():
    M = marked(chain_graph(), CHAIN_ELL, Z3)
    assert word_of_loop(M, MarkedLoop((0, 1), (g, g))) == ((1, g), (2, g))


def test_word_of_loop_petal(rose):
    R = marked(rose, (0.5, 0.5), GroupSpec.uniform(1))
    assert word_of_loop(R, MarkedLoop((0,), (None,))) == (free(1),)


def test_identity_markings_validate(ex1):
    assert validate_marking(marked(chain_graph(), CHAIN_ELL, Z3), battery=32) == []
    assert validate_marking(ex1.marked("T.std"), battery=32) == []
    assert validate_marking(ex1.marked("S.std"), battery=32) == []


def test_squaring_marking_fails(rose):
    R = marked(rose, (0.5, 0.5), GroupSpec.uniform(1))
    m = R.marking
    square = Marking((Path(0, (0, 0), (None,) * 3), m.gens[1]), m.factors, m.edge_words, m.vertex_conj)
    problems = validate_marking(MarkedGraph(rose, (0.5, 0.5), R.groups, square), battery=16)
    assert any("disagrees" in p for p in problems)
