import math

import numpy as np
import pytest

from outerlip.correction import correction_constants
from outerlip.freeprod import MarkedGraph, identity_marking
from outerlip.scene import parse_scene
from outerlip.spectral import (ReducibleMatrixWarning, check_expansion_bound, eigenmetric, iterate_distance,
                               pf_factor, rose_word_images, transition_matrix)

PHI = 0.5 * (1 + math.sqrt(5))


def test_identity_matrix(fib):
    assert transition_matrix(fib.selfmap("ident")).tolist() == [[1, 0], [0, 1]]


def test_fibonacci_matrix(fib):
    assert transition_matrix(fib.selfmap("phi")).tolist() == [[1, 1], [1, 0]]
    assert transition_matrix(fib.selfmap("phi_inv")).tolist() == [[0, 1], [1, 1]]


def test_marker_added_map():
    sc = parse_scene("""
group 1 Z/3
vertex v1 factor=1
edge a v1 v1 length=1
selfmap m edge a = a, [g1]
""")
    assert transition_matrix(sc.selfmap("m")).tolist() == [[1]]


@pytest.mark.parametrize("M, value", [([[1, 1], [1, 0]], PHI), ([[2]], 2.0), ([[1]], 1.0)])
def test_pf_factor(M, value):
    assert abs(pf_factor(M) - value) <= 1e-8


def test_pf_reducible_warns():
    with pytest.warns(ReducibleMatrixWarning):
        assert pf_factor(np.eye(2)) == pytest.approx(1.0)


def test_pf_negative_rejected():
    with pytest.raises(ValueError):
        pf_factor([[1, -1], [1, 0]])


def test_expansion_fibonacci(fib):
    rep = check_expansion_bound(fib.selfmap("phi"), fib.selfmap("phi_inv"), correction_constants(fib.graph))
    assert rep.passed and rep.lam == pytest.approx(PHI, abs=1e-9) and rep.mu == pytest.approx(PHI, abs=1e-9)


def test_expansion_identity(fib):
    unit = fib.scene("unit")
    rep = check_expansion_bound(unit.selfmap("ident"), unit.selfmap("ident"), correction_constants(unit.graph))
    assert rep.passed and rep.lam == rep.mu == 1.0


def test_expansion_negative_control(fib):
    unit = fib.scene("unit")
    rep = check_expansion_bound(unit.selfmap("ident"), unit.selfmap("double"), correction_constants(unit.graph))
    assert rep.passed is False and rep.mu == 2.0


def test_expansion_withheld_when_reducible(fib):
    rep = check_expansion_bound(fib.selfmap("ident"), fib.selfmap("ident"), correction_constants(fib.graph))
    assert rep.passed is None and "reducible" in rep.note


def test_word_images(fib):
    assert rose_word_images(fib.selfmap("phi")) == (((0, 1), (0, 2)), ((0, 1),))
    assert rose_word_images(fib.selfmap("phi_inv")) == (((0, 2),), ((0, -2), (0, 1)))


def test_iterate_distances(fib):
    phi, inv = fib.selfmap("phi"), fib.selfmap("phi_inv")
    ell = tuple(eigenmetric(transition_matrix(phi).T))
    T = MarkedGraph(fib.graph, ell, fib.groups, identity_marking(fib.graph))
    for k in (1, 2, 3):
        d = iterate_distance(T, rose_word_images(phi), rose_word_images(inv), k)
        assert d == pytest.approx(k * math.log(PHI), abs=1e-9)
