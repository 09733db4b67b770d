import random
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import dfas
from oracles import dfa_sets, mu, run_select, words
from normality_lab.automata import Dfa, accept_all_dfa, rotator_dfa, toggle_dfa
from normality_lab.measure import mu_set, prefix_free_reduce
from normality_lab.strategies import dfa_strategy, everything, suffix_strategy
from normality_lab.verify import (EnumerationCapError, SetSpec, _short_output_codes, chebyshev_bound,
                                  classify, enumerate_set, lemma3_strategy_catalog, measure_mask,
                                  verify_lemma1, verify_lemma2, verify_lemma3,
                                  verify_lemma3_catalog, verify_mainclaim, verify_partition)
from normality_lab.words import words_up_to

HALF, THIRD = F(1, 2), F(1, 3)


@settings(max_examples=40, deadline=None)
@given(dfas(max_states=3), st.sampled_from([HALF, THIRD]), st.integers(1, 8),
       st.sampled_from([F(1, 8), F(1, 4), F(1, 2)]), st.sampled_from([F(1, 8), F(1, 4), F(1, 2)]))
def test_sets_match_definitions(A, p, n, b, eps):
    D, E, G, E_q, G_q = dfa_sets(A.delta, A.accepting, p, n, b, eps)
    for kind, expected in (("D", D), ("E", E), ("G", G)):
        got, measure = enumerate_set(A, p, SetSpec(kind, n, b, eps))
        assert got == expected
        assert measure == sum((mu(p, w) for w in expected), F(0))
    for q in range(A.states):
        assert enumerate_set(A, p, SetSpec("E", n, b, eps, q=q))[0] == E_q[q]
        assert enumerate_set(A, p, SetSpec("G", n, b, eps, q=q))[0] == G_q[q]


def test_toggle_E_empty():
    words_, measure = enumerate_set(toggle_dfa(), HALF, SetSpec("E", 8, F(1, 4), F(1, 4)))
    assert words_ == frozenset() and measure == 0


def test_toggle_G_impossible_deviation():
    assert enumerate_set(toggle_dfa(), HALF, SetSpec("G", 8, F(1, 4), F(1)))[0] == frozenset()


def test_partition_n10():
    A = rotator_dfa(3)
    D, _ = enumerate_set(A, THIRD, SetSpec("D", 10, F(1, 4), F(1, 8)))
    E, _ = enumerate_set(A, THIRD, SetSpec("E", 10, F(1, 4), F(1, 8)))
    G, _ = enumerate_set(A, THIRD, SetSpec("G", 10, F(1, 4), F(1, 8)))
    assert D | E | G == set(words(10))
    assert not D & (E | G)
    assert verify_partition(A, THIRD, F(1, 4), F(1, 8), 10).ok


@settings(max_examples=30, deadline=None)
@given(dfas(max_states=4), st.integers(1, 12))
def test_union_bounds(A, n):
    cl = classify(A, THIRD, n, F(1, 4), F(1, 8))
    assert measure_mask(cl.G, n, THIRD) <= sum(measure_mask(m, n, THIRD) for m in cl.G_q)
    assert measure_mask(cl.E, n, THIRD) <= sum(measure_mask(m, n, THIRD) for m in cl.E_q)
    assert not (cl.D & (cl.E | cl.G)).any()
    assert (cl.D | cl.E | cl.G).all()


def test_cap():
    with pytest.raises(EnumerationCapError, match="cap of 22"):
        enumerate_set(toggle_dfa(), HALF, SetSpec("E", 23))
    with pytest.raises(EnumerationCapError, match="cap of 10"):
        classify(toggle_dfa(), HALF, 11, F(1, 4), F(1, 4), cap=10)


@pytest.mark.parametrize("kind", ["F", "R"])
@pytest.mark.parametrize("n", [3, 6, 8])
def test_F_and_R_sets(kind, n):
    b, eps, p = F(1, 4), F(1, 4), THIRD
    Fset = {y for l in range(1, n + 1) if l > b * n for y in words(l)
            if abs(p - F(y.count("1"), l)) >= eps}
    expected = Fset if kind == "F" else prefix_free_reduce(Fset)
    got, measure = enumerate_set(toggle_dfa(), p, SetSpec(kind, n, b, eps))
    assert got == expected
    assert measure == mu_set(p, expected)


# -- lemma 3 ----------------------------------------------------------------

def test_lemma3_examples():
    # S(w) has length 6, never "1"
    r = verify_lemma3(everything(), {"1"}, 6, THIRD)
    assert (r.mu_M, r.mu_R, r.holds) == (0, THIRD, True)
    r = verify_lemma3(everything(), {"1"}, 1, THIRD)
    assert r.mu_M == THIRD == r.mu_R and r.holds
    r = verify_lemma3(dfa_strategy(toggle_dfa()), {"11"}, 8, HALF)
    assert r.holds and r.mu_M <= F(1, 4)
    # toggle picks 4 symbols from 8, never exactly 2
    assert r.mu_M == 0
    r = verify_lemma3(dfa_strategy(toggle_dfa()), {"11"}, 4, HALF)
    assert r.mu_M == F(1, 4) == r.mu_R
    r = verify_lemma3(everything(), set(), 5, HALF)
    assert (r.mu_M, r.mu_R, r.holds) == (0, 0, True)


def _brute_lemma3(S, F_, n, p):
    R = prefix_free_reduce(F_)
    mu_M = sum((mu(p, w) for w in words(n) if run_select(S.delta, S.accepting, S.start, w) in F_), F(0))
    return mu_M, sum((mu(p, w) for w in R), F(0))


def test_lemma3_matches_brute_force():
    rng = random.Random(3)
    universe = words_up_to(3)
    cat = lemma3_strategy_catalog(random_count=5)
    for _ in range(60):
        _, A = rng.choice(cat)
        F_ = set(rng.sample(universe, rng.randint(0, 4)))
        n = rng.randint(1, 8)
        p = rng.choice([HALF, THIRD])
        r = verify_lemma3(dfa_strategy(A), F_, n, p)
        assert (r.mu_M, r.mu_R) == _brute_lemma3(A, F_, n, p)
        assert r.holds


@pytest.mark.parametrize("idx", range(0, 178, 17))
def test_short_output_codes(idx):
    _, A = lemma3_strategy_catalog()[idx]
    universe = words_up_to(3)
    for n in (1, 5, 9):
        codes = _short_output_codes(A, n, 3)
        for i, w in enumerate(words(n)):
            y = run_select(A.delta, A.accepting, A.start, w)
            assert codes[i] == (universe.index(y) if len(y) <= 3 else -1)


def test_lemma3_catalog_small():
    res = verify_lemma3_catalog(lemma3_strategy_catalog(random_count=3)[::9], n_max=6)
    assert res.ok and res.checks > 0


# -- lemma 2 ----------------------------------------------------------------

def test_lemma2_eps_at_least_one():
    r = verify_lemma2(dfa_strategy(toggle_dfa()), HALF, F(1, 4), F(1), "1", [4, 8, 12])
    assert all(m == 0 for m in r.column("measure"))
    assert r.passed


def test_lemma2_b_equal_one():
    r = verify_lemma2(dfa_strategy(toggle_dfa()), THIRD, F(1), F(1, 8), "0", [4, 8])
    assert all(m == 0 for m in r.column("measure"))


def test_lemma2_toggle_values():
    r = verify_lemma2(dfa_strategy(toggle_dfa()), HALF, F(1, 4), F(1, 4), "1", [8, 12, 16])
    # odd positions carry k ones out of n/2; deviation >= 1/4 by direct count
    assert r.column("measure") == [F(10, 16), F(14, 64), F(74, 256)]
    assert r.column("bound") == [F(2), F(4, 3), F(1)]
    assert r.passed


@pytest.mark.parametrize("n", [6, 9])
def test_lemma2_general_strategy_matches_dfa_route(n):
    S = suffix_strategy("1")
    from normality_lab.automata import sliding_window_dfa
    r1 = verify_lemma2(S, THIRD, F(1, 4), F(1, 4), "1", [n])
    r2 = verify_lemma2(dfa_strategy(sliding_window_dfa("1")), THIRD, F(1, 4), F(1, 4), "1", [n])
    assert r1.column("measure") == r2.column("measure")


def test_chebyshev_bound_values():
    assert chebyshev_bound(HALF, "1", F(1, 4), F(1, 4), 16) == 1
    assert chebyshev_bound(HALF, "1", F(1, 4), F(1, 4), 3) is None


# -- lemma 1 and main claim ------------------------------------------------

def test_lemma1_toggle():
    r = verify_lemma1(toggle_dfa(), HALF, F(1, 4), range(1, 17))
    assert r.params["c"] == HALF and r.params["b"] == F(1, 8) and r.params["d"] == 2
    # from q1 a single symbol is never selected, so E_1 is everything
    assert r.column("measure")[0] == 1
    assert all(m == 0 for m in r.column("measure")[1:])
    assert r.passed


def test_lemma1_single_state():
    r = verify_lemma1(accept_all_dfa(), THIRD, F(1, 2), range(1, 9))
    assert r.params["b"] < 1
    assert all(m == 0 for m in r.column("measure"))


def test_lemma1_rotator_trend():
    A = rotator_dfa(3)
    r = verify_lemma1(A, HALF, F(1, 6), range(1, 17))
    b = r.params["b"]
    for n in (3, 7, 16):
        _, E, _, _, _ = dfa_sets(A.delta, A.accepting, HALF, n, b, F(1)) if n <= 7 else (0, None, 0, 0, 0)
        if E is not None:
            assert r.rows[n - 1]["measure"] == sum((mu(HALF, w) for w in E), F(0))
    assert r.column("measure")[-1] == 0
    assert r.passed


def test_lemma1_rejects_large_eps():
    with pytest.raises(ValueError, match="exceeds stationary accepting mass"):
        verify_lemma1(toggle_dfa(), HALF, F(3, 4), [4])


def test_mainclaim_toggle_cover():
    r = verify_mainclaim(toggle_dfa(), HALF, F(1, 4), [16])
    row = r.rows[0]
    assert 1 - row["mu_D"] <= row["mu_E"] + row["mu_G"]


def test_mainclaim_vacuous():
    r = verify_mainclaim(toggle_dfa(), HALF, F(1), range(4, 9), b=F(1, 4))
    assert all(d == 1 for d in r.column("mu_D"))


def test_mainclaim_rotator_increasing():
    A = rotator_dfa(3)
    r = verify_mainclaim(A, THIRD, F(1, 4), [8, 12, 16])
    b = r.params["b"]
    assert b == F(1, 36)
    for row in r.rows[:2]:
        D, _, _, _, _ = dfa_sets(A.delta, A.accepting, THIRD, row["n"], b, F(1, 4))
        assert row["mu_D"] == sum((mu(THIRD, w) for w in D), F(0))
    ds = r.column("mu_D")
    assert ds[0] < ds[1] < ds[2]
    assert r.passed


def test_trend_report_serialization():
    r = verify_mainclaim(toggle_dfa(), HALF, F(1, 4), [4, 6])
    text = r.to_csv().splitlines()
    assert text[0] == "n,mu_D,mu_E,mu_G,mu_G_per_state_sum,cover_ok,union_bound_ok,verdict"
    assert text[1].startswith("4,")
    import json
    payload = json.loads(r.to_json())
    assert payload["rows"][0]["n"] == 4 and "/" in payload["rows"][0]["mu_D"]
