"""One test per acceptance criterion; each records a PASS/FAIL line shown in the terminal summary."""
import math
import time

import numpy as np
import pytest

from outerlip.cli import main
from outerlip.correction import (check_lifts_lemma, corrected_norm, correction_constants, double_covers,
                                 psi_invariance)
from outerlip.geodesy import PLPath, path_length_L, path_length_N
from outerlip.lipschitz import distance, enumerate_candidates, lip_norm
from outerlip.scene import example1_text, load_preset, parse_scene
from outerlip.spectral import pf_factor
from outerlip.suites import run_suite

from conftest import ACCEPTANCE_LINES, chain_graph

SEED = 20240611


def record(n: int, ok: bool, what: str) -> None:
    ACCEPTANCE_LINES.append(f"{'PASS' if ok else 'FAIL'} criterion {n}: {what}")


def suite_ok(name, cases, seed=SEED):
    rep = run_suite(name, seed, cases)
    return rep, rep.violations == 0


def test_criterion_01_example1():
    t0 = time.perf_counter()
    sc = parse_scene(example1_text(0.1))
    T, S = sc.marked("T.std"), sc.marked("S.std")
    d_ts, d_st = distance(T, S)[0], distance(S, T)[0]
    dt = time.perf_counter() - t0
    ok = abs(d_ts - math.log(1.9)) <= 1e-12 and abs(d_st - math.log(10)) <= 1e-12 and dt < 1
    record(1, ok, f"d(T,S)={d_ts:.15f} (log 1.9), d(S,T)={d_st:.15f} (log 10), {dt:.3f}s")
    assert ok


def test_criterion_02_example_chain_norms():
    t0 = time.perf_counter()
    g = chain_graph()
    fwd = lip_norm((0.25, 0.75), (1.0, -1.0), g)[0]
    back = lip_norm((0.25, 0.75), (-1.0, 1.0), g)[0]
    thin = lip_norm((0.01, 0.99), (1.0, -1.0), g)[0]
    dt = time.perf_counter() - t0
    ok = abs(fwd - 4.0) <= 1e-12 and abs(back - 4 / 3) <= 1e-12 and thin > 50 and dt < 1
    record(2, ok, f"|tau|L={fwd:.15g}, |-tau|L={back:.15g}, eps=0.01 norm={thin:.6g}, {dt:.3f}s")
    assert ok


def test_criterion_03_norm_axioms(graphs):
    small = [k for k, sc in graphs.items() if sc.graph.r + sc.graph.n <= 4]
    assert len(small) == len(graphs)
    rep, ok = suite_ok("norm-axioms", 1000 * len(graphs))
    record(3, ok, f"norm axioms: {len(rep.rows)} cases over {len(graphs)} graphs, violations={rep.violations}")
    assert ok


def test_criterion_04_relation():
    rep, ok = suite_ok("relation", 500)
    worst = max(abs(r.values[0] - r.values[1]) for r in rep.rows)
    record(4, ok, f"relation and derivative: 500 cases, violations={rep.violations}, max |dPsi - N/(K+1)|={worst:.2e}")
    assert ok


def test_criterion_05_sandwich_reverse(graphs):
    n = 1000 * len(graphs)
    rep_s, ok_s = suite_ok("sandwich", n)
    rep_r, ok_r = suite_ok("reverse", n)
    ok = ok_s and ok_r
    record(5, ok, f"sandwich and reverse: {n} cases each, violations={rep_s.violations}+{rep_r.violations}")
    assert ok


@pytest.mark.xfail(strict=True, reason="stated spot values 17/6 and 5/2 disagree with the exact class lengths")
def test_criterion_05_spot_values(ex2):
    fwd = corrected_norm((0.25, 0.75), (1.0, -1.0), ex2.graph, ex2.groups)
    back = corrected_norm((0.25, 0.75), (-1.0, 1.0), ex2.graph, ex2.groups)
    ok = abs(fwd - 17 / 6) <= 1e-9 and abs(back - 5 / 2) <= 1e-9
    record(5, ok, f"chain spot values |tau|N={fwd:.12f} (stated 17/6), |-tau|N={back:.12f} (stated 5/2);"
                  " exact values are 77/30 and 83/30")
    assert ok


def test_criterion_06_oracle(graphs):
    t0 = time.perf_counter()
    small = [k for k, sc in graphs.items() if sc.graph.n_orbits <= 3]
    cases = 2 * len(small) * 3
    rep, ok = suite_ok("oracle-agreement", cases)
    seen = {r.graph for r in rep.rows}
    ok &= len(seen) == 2 * len(small)
    dt = time.perf_counter() - t0
    ok &= dt < 120
    record(6, ok, f"oracle agreement: {len(seen)} graph/group pairs, {sum(r.values[0] for r in rep.rows)} classes,"
                  f" max diff={max(r.values[1] for r in rep.rows):.1e}, {dt:.2f}s")
    assert ok


def test_criterion_07_len_identity():
    rep, ok = suite_ok("len-identity", 200)
    record(7, ok, f"len1 identity and len2 bound: 200 paths, violations={rep.violations}")
    assert ok


def _chain_segment(ex2):
    return ex2.path("seg")


def test_criterion_07_spot_len_L(ex2):
    val = path_length_L(_chain_segment(ex2))
    ok = abs(val - 0.693147) <= 1e-6
    record(7, ok, f"chain segment len_L={val:.9f} (stated 0.693147)")
    assert ok


@pytest.mark.xfail(strict=True, reason="stated len_N spot value follows the incorrect class-{3} length")
def test_criterion_07_spot_len_N(ex2):
    val = path_length_N(_chain_segment(ex2))
    ok = abs(val - 0.534583) <= 1e-6
    record(7, ok, f"chain segment len_N={val:.9f} (stated 0.534583; exact 3 log2/8 + log7.5/8)")
    assert ok


def test_criterion_08_main_theorem():
    rep, ok = suite_ok("main-theorem", 10000)
    cross = rep.rows[-1]
    ok &= cross.graph == "example1-cross" and cross.passed
    margin = min(r.margin for r in rep.rows)
    record(8, ok, f"main theorem: {len(rep.rows)} pairs incl. Example-1 cross pair, violations={rep.violations},"
                  f" min margin={margin:.6g}")
    assert ok


def test_criterion_09_psi_invariance(ex2, rose, fib):
    rng = np.random.default_rng(SEED)
    checks = 0
    ok = True
    for _ in range(50):
        x = float(rng.uniform(0.02, 0.98))
        ell = (x, 1 - x)
        for fp in [(1, 3, 2), (2, 1, 3), (3, 2, 1), (2, 3, 1)]:
            ok &= psi_invariance(ell, ex2.graph, ex2.groups, factor_perm=fp)[2]
            checks += 1
        ok &= psi_invariance(ell, ex2.graph, ex2.groups, factor_perm=(3, 2, 1), edge_perm=(-2, -1))[2]
        ok &= psi_invariance(ell, rose, load_preset("rose-n2").groups, edge_perm=(2, 1))[2]
        ok &= psi_invariance(ell, fib.graph, fib.groups, edge_perm=(2, -1))[2]
        checks += 3
    record(9, ok, f"Psi invariance: {checks} relabelling/automorphism checks, multisets equal")
    assert ok


def test_criterion_10_covers(rose):
    covers = double_covers(rose)
    bettis = [c.graph.n_orbits - c.graph.n_vertices + 1 for c in covers]
    const = correction_constants(rose)
    lifts = [check_lifts_lemma(c, rose)[1] for c in enumerate_candidates(rose)]
    ok = len(covers) == 3 and bettis == [3, 3, 3] and (const.K, const.A) == (93, 282) and all(lifts)
    record(10, ok, f"rose covers={len(covers)}, betti={bettis}, K={const.K}, A={const.A},"
                   f" lifts lemma {sum(lifts)}/{len(lifts)} candidates")
    assert ok


def test_criterion_11_spectral(capsys):
    pf = pf_factor([[1, 1], [1, 0]])
    ok = abs(pf - 1.6180339887) <= 1e-8
    codes = [main(["expansion", "@fibonacci", "phi", "phi_inv", "--quiet"]),
             main(["expansion", "@fibonacci", "phi_inv", "phi", "--quiet"]),
             main(["expansion", "@fibonacci", "unit.ident", "unit.ident", "--quiet"])]
    neg = main(["expansion", "@fibonacci", "unit.ident", "unit.double", "--quiet"])
    rep, suite = suite_ok("expansion", 9)
    capsys.readouterr()
    ok &= codes == [0, 0, 0] and neg == 2 and suite
    record(11, ok, f"pf={pf:.10f}, preset exit codes={codes}, negative control exit={neg}")
    assert ok


def test_criterion_12_determinism(tmp_path, capsys):
    paths = []
    for k, workers in enumerate(("1", "1", "3")):
        p = tmp_path / f"r{k}.txt"
        main(["check", "main-theorem", "--seed", "11", "--cases", "300", "--scene", "@example2",
              "--workers", workers, "--report", str(p), "--quiet"])
        paths.append(p.read_bytes())
    for k, workers in enumerate(("1", "4")):
        p = tmp_path / f"s{k}.txt"
        main(["check", "sandwich", "--seed", "11", "--cases", "300", "--workers", workers, "--report", str(p),
              "--quiet"])
        paths.append(p.read_bytes())
    capsys.readouterr()
    ok = paths[0] == paths[1] == paths[2] and paths[3] == paths[4] and all(paths)
    record(12, ok, "byte-identical reports across two runs and across 1/3/4 workers")
    assert ok
