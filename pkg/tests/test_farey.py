import math
from collections import Counter
from fractions import Fraction

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from geolam.farey import (
    BASE_TRIANGLE, DegenerateStartError, ExactGeodesic, FareyTriangle, NotHyperbolicError, Surd, Termination,
    closed_geodesic_from_matrix, dyadic_refine, exact_pair, locate_start, mat_apply, mat_inverse, mat_mul,
    periodic_trace, random_closing_word, random_geodesic, random_uniform_word, trace, word_matrix,
)
from geolam.hypcore import Geodesic, GeometryError
from geolam.sampling import RandomStream
from geolam.triangle import IdealTriangle, oracle_chord_length

GOLDEN_LENGTH = 2 * math.log((3 + math.sqrt(5)) / 2)


def _pair(x, y):
    return exact_pair(x), exact_pair(y)


# -- exact numbers ---------------------------------------------------------------

def test_surd_arithmetic_and_sign():
    r5 = Surd(0, 1, 5)
    assert (r5 * r5) == 5
    assert (Surd(1, 1, 5) - Surd(1, 0, 5)) == r5
    assert Surd(-2, 1, 5).sign() == 1
    assert Surd(-3, 1, 5).sign() == -1
    assert Surd(0, 0, 5).sign() == 0
    # large cancelling parts still convert to the nearest double
    x = Surd(-10 ** 20, 44721359549995793928, 5)
    with mp.workdps(80):
        ref = float(mp.mpf(-10 ** 20) + 44721359549995793928 * mp.sqrt(5))
    assert float(x) == pytest.approx(ref, rel=1e-15)


def test_exact_pair_forms():
    assert exact_pair(0.5) == (1, 2)
    assert exact_pair("3/4") == (3, 4)
    assert exact_pair(math.inf) == (1, 0)
    assert exact_pair(Fraction(-2, 6)) == (-1, 3)


def test_farey_triangle_validation():
    FareyTriangle((0, 1), (1, 2), (1, 1))
    with pytest.raises(ValueError):
        FareyTriangle((0, 1), (2, 3), (1, 1))
    G = (2, 1, 1, 1)
    t = FareyTriangle.from_frame(G)
    assert FareyTriangle.from_frame(t.frame()) == t
    assert str(BASE_TRIANGLE) == "(0/1, 1/1, 1/0)"


# -- locate_start ----------------------------------------------------------------

def test_locate_start_examples():
    assert locate_start(Geodesic(-0.5, math.sqrt(2))) == BASE_TRIANGLE
    t = locate_start(Geodesic(0.2, 0.3))
    assert str(t) == "(0/1, 1/4, 1/3)"
    for p, q in t.vertices:
        assert q != 0 and 0 <= p / q <= 1
    spec = closed_geodesic_from_matrix(2, 1, 1, 1)
    assert locate_start(spec.exact_axis) == BASE_TRIANGLE


def test_degenerate_starts():
    with pytest.raises(DegenerateStartError):
        trace(_pair(0, 1), 10.0)
    with pytest.raises(DegenerateStartError):
        trace(_pair(0, 2), 10.0)
    assert issubclass(DegenerateStartError, GeometryError)


# -- trace -----------------------------------------------------------------------

def test_cusp_exit_on_rational_end():
    r = trace(_pair(-0.5, Fraction(1, 2)), 100.0)
    assert r.terminated_reason is Termination.CUSP_EXIT
    assert len(r) >= 1 and np.all(np.isfinite(r.lengths))
    assert r.total_param_length == pytest.approx(r.length_sum, rel=1e-12)


def test_step_budget_and_bad_budget():
    g = _pair(-0.5, math.sqrt(2))
    r = trace(g, 1e9, step_budget=50)
    assert r.terminated_reason is Termination.STEP_BUDGET and len(r) == 50
    with pytest.raises(ValueError):
        trace(g, 0.0)


def test_segments_match_intersection_oracle():
    r = trace(_pair(-0.5, math.sqrt(2)), 8.0)
    for seg, tri in r.segments[:12]:
        verts = [p / q if q else math.inf for p, q in tri.vertices]
        ref = oracle_chord_length(Geodesic(-0.5, math.sqrt(2)), IdealTriangle(*verts))
        assert seg == pytest.approx(ref, rel=1e-9)


def test_golden_axis_ten_periods():
    spec = closed_geodesic_from_matrix(2, 1, 1, 1)
    per = periodic_trace(spec)
    r = trace(spec.exact_axis, 10 * spec.length * (1 - 1e-12))
    n = len(per.lengths)
    assert len(r) == 10 * n
    blocks = r.lengths.reshape(10, n)
    assert np.allclose(blocks, blocks[0], rtol=1e-9, atol=0)
    assert r.total_param_length == pytest.approx(10 * spec.length, rel=1e-9)
    assert r.length_sum == pytest.approx(r.total_param_length, rel=1e-9)


def test_check_exact_mode():
    r = trace(random_geodesic(RandomStream(5), 200.0), 200.0, check_exact=True)
    for t in r.triangles:
        (p, q), (r_, s) = t.vertices[0], t.vertices[1]
        assert abs(p * s - q * r_) == 1


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2 ** 32), st.floats(5.0, 400.0))
def test_additivity_random(seed, budget):
    g = random_geodesic(RandomStream(seed), budget)
    r = trace(g, budget, keep_triangles=False)
    assert r.terminated_reason is Termination.LENGTH_BUDGET
    assert r.length_sum == pytest.approx(r.total_param_length, rel=1e-9)


def test_additivity_long_budget():
    g = random_geodesic(RandomStream(11), 1e4)
    r = trace(g, 1e4, keep_triangles=False)
    assert r.length_sum == pytest.approx(r.total_param_length, rel=1e-9)
    assert r.total_param_length >= 1e4


def _random_sl2z(s, letters=12):
    m = (1, 0, 0, 1)
    gens = [(1, 1, 0, 1), (1, -1, 0, 1), (0, -1, 1, 0)]
    for k in s.uniform(letters):
        m = mat_mul(m, gens[int(k * 3)])
    return m


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2 ** 32))
def test_trace_equivariance(seed):
    s = RandomStream(seed)
    g = random_geodesic(s, 60.0)
    m = _random_sl2z(s)
    start = locate_start(g)
    r1 = trace(g, 60.0)
    mg = ExactGeodesic(mat_apply(m, g.u), mat_apply(m, g.v))
    r2 = trace(mg, 60.0, start=FareyTriangle.from_frame(mat_mul(m, start.frame())))
    assert len(r1) == len(r2)
    assert np.allclose(r1.lengths, r2.lengths, rtol=1e-9, atol=0)
    assert r1.word == r2.word


def test_random_geodesic_deterministic():
    a = random_geodesic(RandomStream(3), 50.0)
    b = random_geodesic(RandomStream(3), 50.0)
    assert a == b
    assert dyadic_refine(0.5, 8, RandomStream(1)) - Fraction(1, 2) < Fraction(1, 2 ** 53)


# -- closed geodesics ------------------------------------------------------------

def test_golden_matrix_axis_and_length():
    spec = closed_geodesic_from_matrix(2, 1, 1, 1)
    assert spec.length == pytest.approx(2 * math.acosh(1.5), rel=1e-15)
    assert spec.length == pytest.approx(1.924847, abs=1e-6)
    assert spec.length == pytest.approx(GOLDEN_LENGTH, rel=1e-15)
    assert spec.axis.q == pytest.approx((1 + math.sqrt(5)) / 2, rel=1e-15)
    assert spec.axis.p == pytest.approx((1 - math.sqrt(5)) / 2, rel=1e-15)


def test_closed_geodesic_errors():
    with pytest.raises(NotHyperbolicError):
        closed_geodesic_from_matrix(1, 1, 0, 1)
    with pytest.raises(NotHyperbolicError):
        closed_geodesic_from_matrix(0, -1, 1, 0)
    with pytest.raises(ValueError):
        closed_geodesic_from_matrix(2, 1, 1, 2)
    with pytest.raises(ValueError):
        word_matrix("LRX")


def test_periodic_trace_properties():
    spec = closed_geodesic_from_matrix(*word_matrix("LLRLRRRL"))
    d = periodic_trace(spec)
    assert math.fsum(d.lengths) == pytest.approx(spec.length, rel=1e-9)
    assert d.total_mass == pytest.approx(len(d.lengths) / spec.length)
    assert np.allclose(d.weights, 1 / spec.length)


def test_golden_shift_invariance():
    spec = closed_geodesic_from_matrix(2, 1, 1, 1)
    r = trace(spec.exact_axis, 3 * spec.length)
    d0 = periodic_trace(spec)
    d1 = periodic_trace(spec, start=r.triangles[1])
    assert sorted(d0.lengths) == pytest.approx(sorted(d1.lengths), rel=1e-9)
    assert d1.word == d0.word[1:] + d0.word[:1]


@pytest.mark.parametrize("word", ["RL", "RRL", "LLRLRRRL", "RLLLRRRRLLR"])
def test_conjugates_same_length_and_multiset(word):
    m = word_matrix(word)
    spec = closed_geodesic_from_matrix(*m)
    g = (2, 1, 1, 1)
    conj = mat_mul(mat_mul(g, m), mat_inverse(g))
    spec2 = closed_geodesic_from_matrix(*conj)
    assert spec2.length == pytest.approx(spec.length, rel=1e-14)
    a, b = periodic_trace(spec), periodic_trace(spec2)
    assert sorted(a.lengths) == pytest.approx(sorted(b.lengths), rel=1e-9)
    assert Counter(a.word) == Counter(b.word)


def test_words():
    w = random_closing_word(RandomStream(9), 30)
    assert len(w) == 30 and set(w) == {"L", "R"}
    assert w == random_closing_word(RandomStream(9), 30)
    u = random_uniform_word(RandomStream(9), 30)
    assert len(u) == 30 and set(u) == {"L", "R"}
    spec = closed_geodesic_from_matrix(*word_matrix(w))
    assert math.fsum(periodic_trace(spec).lengths) == pytest.approx(spec.length, rel=1e-9)
