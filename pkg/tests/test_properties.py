import numpy as np
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from outerlip.correction import corrected_norm, correction_constants, psi, psi_invariance
from outerlip.freeprod import (free, inverse_word, reduce_word, translation_length)
from outerlip.graph import MarkedLoop, is_reduced, tighten_loop
from outerlip.groups import GroupSpec
from outerlip.lipschitz import lip_norm, metric_distance
from outerlip.scene import test_graphs as _graphs

GRAPHS = _graphs()
NAMES = sorted(k for k, v in GRAPHS.items() if v.graph.n_orbits >= 2)
Z3 = GroupSpec.uniform(3)

settings.register_profile("outerlip", max_examples=60, deadline=None)
settings.load_profile("outerlip")


def letters(r=3, n=2):
    free_l = st.builds(free, st.sampled_from([j for j in range(-n, n + 1) if j]))
    vert = st.builds(lambda i, k: (i, (k,)), st.integers(1, r), st.integers(1, 2))
    return st.one_of(free_l, vert)


words = st.lists(letters(), max_size=12)


@st.composite
def point(draw, name=None):
    name = name or draw(st.sampled_from(NAMES))
    g = GRAPHS[name].graph
    raw = np.array(draw(st.lists(st.floats(0.02, 1.0), min_size=g.n_orbits, max_size=g.n_orbits)))
    ell = raw / raw.sum()
    t = np.array(draw(st.lists(st.floats(-3, 3), min_size=g.n_orbits, max_size=g.n_orbits)))
    return name, ell, t - t.mean()


@given(words)
def test_reduce_idempotent(w):
    r = reduce_word(w, Z3)
    assert reduce_word(r, Z3) == r


@given(words)
def test_word_times_inverse_is_trivial(w):
    assert reduce_word(list(w) + list(inverse_word(w, Z3)), Z3) == ()


@given(st.lists(st.sampled_from([0, 1, 2, 3]), min_size=1, max_size=10),
       st.lists(st.sampled_from([None, (1,), (2,)]), min_size=10, max_size=10))
def test_tighten_idempotent_and_shorter(edges, marks):
    g = GRAPHS["rose-n2"].graph
    loop = MarkedLoop(tuple(edges), tuple(marks[:len(edges)]))
    once = tighten_loop(g, loop, GroupSpec.uniform(1))
    assert len(once) <= len(loop)
    assert tighten_loop(g, once, GroupSpec.uniform(1)) == once
    assert once.is_empty or is_reduced(g, once)


@given(st.lists(letters(r=1, n=2), min_size=1, max_size=8), st.lists(letters(r=1, n=2), max_size=4))
def test_translation_length_conjugation_invariant(w, c):
    sc = GRAPHS["rose-n2"]
    M = sc.marked("std")
    conj = list(c) + list(w) + list(inverse_word(c, sc.groups))
    assert abs(translation_length(M, w)[0] - translation_length(M, conj)[0]) <= 1e-12


@given(st.sampled_from(NAMES), st.data(), st.floats(0.1, 10))
def test_norm_axioms(name, data, c):
    _, ell, t1 = data.draw(point(name))
    t2 = data.draw(point(name))[2]
    g = GRAPHS[name].graph
    n1, n2 = lip_norm(ell, t1, g)[0], lip_norm(ell, t2, g)[0]
    assert n1 >= 0 and (n1 > 0 or not np.any(np.abs(t1) > 1e-12))
    assert lip_norm(ell, t1 + t2, g)[0] <= n1 + n2 + 1e-9
    assert abs(lip_norm(ell, c * t1, g)[0] - c * n1) <= 1e-9 * max(1.0, c * n1)


@given(point())
def test_sandwich_and_reverse(p):
    name, ell, tau = p
    sc = GRAPHS[name]
    K = correction_constants(sc.graph).K
    fwd, back = lip_norm(ell, tau, sc.graph)[0], lip_norm(ell, -tau, sc.graph)[0]
    nn = corrected_norm(ell, tau, sc.graph, sc.groups)
    assert max(fwd, back) / (K + 1) - 1e-9 <= nn <= 2 * fwd + back + 1e-9
    assert nn <= 3 * (K + 1) * corrected_norm(ell, -tau, sc.graph, sc.groups) + 1e-9


@given(st.sampled_from(NAMES), st.data())
def test_triangle_inequality(name, data):
    g = GRAPHS[name].graph
    pts = [data.draw(point(name))[1] for _ in range(3)]
    a, b, c = pts
    ab, bc, ac = (metric_distance(g, x, y)[0] for x, y in ((a, b), (b, c), (a, c)))
    assert ab >= -1e-12
    assert ac <= ab + bc + 1e-9


@given(point())
def test_main_theorem_property(p):
    name, ell, tau = p
    sc = GRAPHS[name]
    other = np.abs(ell + 0.3 * tau)
    other /= other.sum()
    assume(other.min() > 1e-3)
    A = correction_constants(sc.graph).A
    d_ts = metric_distance(sc.graph, ell, other)[0]
    d_st = metric_distance(sc.graph, other, ell)[0]
    rhs = A * d_st + (A + 1) * (psi(ell, sc.graph, sc.groups) - psi(other, sc.graph, sc.groups))
    assert d_ts <= rhs + 1e-9


@given(st.lists(st.sampled_from([0, 1, 2, 3]), min_size=1, max_size=6),
       st.lists(st.booleans(), min_size=6, max_size=6), st.integers(0, 5))
def test_canonical_form_rotation_reversal(edges, flags, k):
    loop = MarkedLoop(tuple(edges), tuple("*" if f else None for f in flags[:len(edges)]))
    assert loop.rotated(k % len(edges)).canonical() == loop.canonical()
    assert loop.reversed().canonical() == loop.canonical()


@given(st.floats(0.02, 0.98), st.permutations([1, 2, 3]))
def test_psi_invariant_under_factor_relabelling(x, perm):
    sc = GRAPHS["example2"]
    assert psi_invariance((x, 1 - x), sc.graph, sc.groups, factor_perm=tuple(perm))[2]


@given(st.floats(0.02, 0.98))
def test_psi_invariant_under_rose_swap(x):
    sc = GRAPHS["rose-n2"]
    assert psi_invariance((x, 1 - x), sc.graph, sc.groups, edge_perm=(2, 1))[2]


@given(st.lists(st.integers(1, 99), min_size=2, max_size=2))
def test_scene_numbers_round_trip(parts):
    from outerlip.scene import parse_scene, preset_text
    a, b = parts
    ell = (a / (a + b), b / (a + b))
    text = preset_text("rose-n2") + f"\nmetric extra a={ell[0]:.12f} b={ell[1]:.12f}\n"
    sc = parse_scene(text)
    assert np.allclose(sc.metric("extra"), ell, atol=1e-11)
