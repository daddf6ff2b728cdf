from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from rackcodes.errors import ParameterError
from rackcodes.params import (CodeParams, Mode, build_flowgraph, cutset_bound, derive, flowgraph_mincut,
                              general_cutset_bound, lrc_dmin_bound, valid_params)


def test_worked_grid_values():
    # reference value: the 6x5 grid: nbar=6, kbar=4, u0_tilde=3, B=19
    p = CodeParams(30, 5, 24, 3, 2)
    d = derive(p, Mode.MSRR)
    assert (d.nbar, d.kbar, d.u0, d.u0_tilde, d.alpha, d.beta, d.B) == (6, 4, 4, 3, 1, 1, 19)
    assert p.k_hat == 23


def test_intro_scenario_overheads():
    # reference value: n=150, u=5, k=144, l=3, dbar=8: overhead about 1.46 (MSRR) or 1.56 (MBRR)
    p = CodeParams(150, 5, 144, 3, 8)
    s, b = derive(p, "msrr"), derive(p, "mbrr")
    assert s.B == 103 and s.overhead(p.n) == Fraction(150, 103)
    assert b.B == 768 and b.alpha == 8 and b.overhead(p.n) == Fraction(1200, 768) == Fraction(25, 16)
    assert round(float(s.overhead(p.n)), 2) == 1.46 and round(float(b.overhead(p.n)), 2) == 1.56
    assert s.repair_bandwidth(p.dbar) == b.repair_bandwidth(p.dbar) == 8


def test_4x4_grid_values():
    # reference value: B=11 (MSRR) and B=20 (MBRR) at n=16, u=4, k=13, l=2, dbar=2
    p = CodeParams(16, 4, 13, 2, 2)
    assert derive(p, "msrr").B == 11
    assert derive(p, "mbrr").B == 20
    assert (p.nbar, p.kbar, p.u0_tilde, p.k_hat) == (4, 3, 1, 13)


@pytest.mark.parametrize("args,constraint", [
    ((31, 5, 24, 3, 2), "n = nbar*u"),
    ((5, 5, 4, 1, 0), "nbar >= 2"),
    ((30, 5, 4, 3, 0), "u <= k < n"),
    ((30, 5, 30, 3, 0), "u <= k < n"),
    ((30, 5, 24, 5, 2), "0 <= l < u"),
    ((30, 5, 24, 3, 4), "dbar < kbar"),
    ((30, 5, 24, 3, -1), "dbar < kbar"),
])
def test_named_constraints(args, constraint):
    with pytest.raises(ParameterError) as exc:
        CodeParams(*args)
    assert exc.value.constraint == constraint


def test_mode_specific_rejections():
    with pytest.raises(ParameterError) as exc:
        derive(CodeParams(16, 4, 13, 2, 0), "mbrr")
    assert exc.value.constraint == "dbar >= 1"
    with pytest.raises(ParameterError) as exc:
        derive(CodeParams(16, 4, 8, 0, 0), "msrr")
    assert exc.value.constraint == "B >= 1"
    assert derive(CodeParams(16, 4, 8, 0, 1), "msrr").B == 4


def test_msrr_beta_zero_without_helpers():
    d = derive(CodeParams(8, 4, 5, 2, 0), "msrr")
    assert d.beta == 0 and d.B == 3


SMALL = list(valid_params(range(2, 6), range(1, 5)))


@settings(max_examples=200, deadline=None)
@given(st.sampled_from(SMALL))
def test_constructions_meet_the_bound(p):
    for mode in Mode:
        try:
            d = derive(p, mode)
        except ParameterError:
            continue
        assert cutset_bound(p, d.alpha, max(d.beta, 1)) == d.B


@settings(max_examples=200, deadline=None)
@given(st.sampled_from(SMALL), st.integers(1, 4), st.integers(1, 4))
def test_bound_monotone_in_alpha_and_beta(p, alpha, beta):
    b = cutset_bound(p, alpha, beta)
    assert cutset_bound(p, alpha + 1, beta) >= b
    assert cutset_bound(p, alpha, beta + 1) >= b


def test_general_bound_allows_large_dbar():
    # with dbar >= kbar only min(dbar, kbar) helper terms count
    # kbar=2, u0=0: 2*2*3 from full racks + 3*(min(5,3) + min(4,3)) from helpers
    assert general_cutset_bound(20, 5, 10, 2, 5, 3, 1) == 12 + 18


def test_flowgraph_small_instance():
    # derived: hand count: 2 racks' original nodes (2) + 2 replacement nodes fed beta=1 from the helper
    p = CodeParams(9, 3, 6, 1, 1)
    assert flowgraph_mincut(p, 1, 1) == cutset_bound(p, 1, 1) == 4


def test_flowgraph_worked_grid():
    p = CodeParams(30, 5, 24, 3, 2)
    assert flowgraph_mincut(p, 1, 1) == 19
    assert flowgraph_mincut(p, 2, 1) == cutset_bound(p, 2, 1)


def test_flowgraph_size_limit():
    with pytest.raises(ParameterError):
        build_flowgraph(CodeParams(150, 5, 144, 3, 8), 1, 1)


@settings(max_examples=80, deadline=None)
@given(st.sampled_from([p for p in SMALL if p.u >= 2]), st.integers(1, 3), st.integers(1, 3))
def test_flowgraph_agrees_with_formula(p, alpha, beta):
    assert flowgraph_mincut(p, alpha, beta) == cutset_bound(p, alpha, beta)


def test_lrc_bound_values():
    assert lrc_dmin_bound(8, 3, 2, 3) == 4
    assert lrc_dmin_bound(8, 2, 2, 3) == 7
    with pytest.raises(ValueError):
        lrc_dmin_bound(8, 9, 2, 3)


def test_valid_params_are_valid_and_complete():
    got = list(valid_params(range(2, 4), range(2, 3)))
    assert all(isinstance(p, CodeParams) for p in got)
    # nbar=2,u=2: k in {2,3}, kbar=1 -> dbar=0, l in {0,1}: 4; nbar=3,u=2: k in 2..5 ...
    brute = []
    for nbar in range(2, 4):
        n = nbar * 2
        for k in range(2, n):
            for l in range(2):
                for dbar in range(n):
                    try:
                        brute.append(CodeParams(n, 2, k, l, dbar))
                    except ParameterError:
                        pass
    assert sorted(got, key=repr) == sorted(brute, key=repr)
