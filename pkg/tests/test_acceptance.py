"""Acceptance criteria 1-9, each at its stated tolerance and time limit.

Every test prints one CRITERION line; the terminal summary repeats them.
"""

import math
import time

import numpy as np

from geolam import closedform as cf
from geolam.experiments import ExperimentConfig, richardson_derivative, run_experiment
from geolam.farey import ExactGeodesic, FareyTriangle, locate_start, mat_apply, mat_mul, random_geodesic, trace
from geolam.hypcore import Geodesic, apply_mobius, liouville_box_mass, random_mobius
from geolam.quadrature import quad_oracle
from geolam.sampling import RandomStream, sample_chords, sample_window
from geolam.triangle import SELF_MAPS, Sector, chord_length_standard, oracle_chord_length

SIX = [Sector(i, j) for i in (1, 2, 3) for j in (1, 2, 3) if i != j]
INTERVAL_ANGLES = {1: (-math.pi, 0.0), 2: (0.0, math.pi / 2), 3: (math.pi / 2, math.pi)}


def _in_interval(k, rng, n=None):
    lo, hi = INTERVAL_ANGLES[k]
    return np.tan(0.5 * rng.uniform(lo, hi, n))


def _criteria_line(rep):
    return "; ".join(f"{c.name}={c.value:.4g} (thr {c.threshold:.3g})" for c in rep.criteria)


def test_c1_moment_identities(record_criterion):
    t0 = time.perf_counter()
    worst = 0.0
    for n in range(2, 11):
        q = quad_oracle(lambda x, n=n: x ** n / np.sinh(x) ** 2, 0.0).value
        exact = math.factorial(n) / 2 ** (n - 1) * cf.zeta_int(n)
        worst = max(worst, abs(q - exact) / exact)
    m1 = cf.moment_P(1)
    m1_ok = abs(m1 - 9 * cf.zeta_int(3) / math.pi ** 2) <= 1e-15 * m1 and abs(m1 - 1.09614) < 5e-6
    m0_ok = cf.moment_P(0) == 1.0
    dt = time.perf_counter() - t0
    ok = worst < 1e-10 and m1_ok and m0_ok and dt < 5
    record_criterion(1, "moment identities", ok,
                     f"max rel err {worst:.2e} (< 1e-10), moment_P(1)={m1:.10f}, moment_P(0)={cf.moment_P(0)!r}, "
                     f"{dt:.2f}s (< 5s)")
    assert ok


def test_c2_antiderivative(record_criterion):
    t0 = time.perf_counter()
    xs = np.linspace(0.05, 20.0, 50)
    worst_d = worst_t = 0.0
    for n in range(2, 6):
        d = richardson_derivative(lambda t: cf.antiderivative_F(n, t), xs, 0.02)
        exact = xs ** n / np.sinh(xs) ** 2
        worst_d = max(worst_d, float(np.max(np.abs(d - exact) / exact)))
        # evaluate F itself at both ends; the integral over (0, 1e-12) is below 1e-12
        total = float(cf.antiderivative_F(n, 1e6)) - float(cf.antiderivative_F(n, 1e-12))
        target = math.factorial(n) / 2 ** (n - 1) * cf.zeta_int(n)
        worst_t = max(worst_t, abs(total - target) / target)
    dt = time.perf_counter() - t0
    ok = worst_d < 1e-8 and worst_t < 1e-10 and dt < 2
    record_criterion(2, "antiderivative property", ok,
                     f"derivative rel err {worst_d:.2e} (< 1e-8), total rel err {worst_t:.2e} (< 1e-10), "
                     f"{dt:.2f}s (< 2s)")
    assert ok


def test_c3_chord_formula_oracle(record_criterion):
    t0 = time.perf_counter()
    worst = 0.0
    for k, s in enumerate(SIX):
        rng = np.random.default_rng(1000 + k)
        u, v = _in_interval(s.i, rng, 10 ** 4), _in_interval(s.j, rng, 10 ** 4)
        for a, b in zip(u.tolist(), v.tolist()):
            g = Geodesic(a, b)
            exact = oracle_chord_length(g)
            worst = max(worst, abs(chord_length_standard(g) - exact) / exact)
    dt = time.perf_counter() - t0
    ok = worst < 1e-12 and dt < 5
    record_criterion(3, "chord formula vs intersection oracle", ok,
                     f"6 x 1e4 geodesics, max rel err {worst:.2e} (< 1e-12), {dt:.2f}s (< 5s)")
    assert ok


def test_c4_tangent_experiment(record_criterion):
    rep = run_experiment(ExperimentConfig("E1", samples=10 ** 6, seed=42), write=False)
    ok = rep.passed and rep.runtime < 60
    record_criterion(4, "ideal-triangle tangent experiment (E1)", ok,
                     f"{_criteria_line(rep)}; {rep.runtime:.1f}s (< 60s)")
    assert ok


def test_c5_liouville_window(record_criterion):
    rep = run_experiment(ExperimentConfig("E4", samples=10 ** 5, window=(0.5, 2.0), seed=42), write=False)
    ok = rep.passed and rep.runtime < 120
    record_criterion(5, "Liouville window experiment (E4)", ok,
                     f"{_criteria_line(rep)}; {rep.runtime:.1f}s (< 120s)")
    assert ok


def test_c6_farey_flow(record_criterion):
    rep = run_experiment(ExperimentConfig("E2", samples=1, length_budget=1e5, window=(0.2, 6.0),
                                          window_p=(0.05, 6.0), seed=42), write=False)
    ok = rep.passed and rep.runtime < 600
    record_criterion(6, "Farey flow experiment (E2)", ok,
                     f"{_criteria_line(rep)}; {rep.info['segments']} segments; {rep.runtime:.1f}s (< 600s)")
    assert ok


def test_c7_discrete_currents(record_criterion):
    rep = run_experiment(ExperimentConfig("E5", samples=100, word_length=30, window=(0.2, 4.0), seed=42),
                         write=False)
    ok = rep.passed and rep.runtime < 600
    record_criterion(7, "discrete-current convergence (E5)", ok,
                     f"{_criteria_line(rep)}; {rep.runtime:.1f}s (< 600s)")
    assert ok


def _suite_mobius_action(rng, n):
    bad = 0
    for _ in range(n):
        m1, m2 = random_mobius(rng), random_mobius(rng)
        p = float(rng.normal(0, 3))
        lhs = apply_mobius(m2, apply_mobius(m1, p))
        rhs = apply_mobius(m2 @ m1, p)
        back = apply_mobius(m1.inverse(), apply_mobius(m1, p))
        if abs(lhs) < 1e6 and not math.isclose(lhs, rhs, rel_tol=1e-9, abs_tol=1e-9):
            bad += 1
        if not math.isclose(back, p, rel_tol=1e-9, abs_tol=1e-9):
            bad += 1
    return bad


def _suite_box_invariance(rng, n):
    bad = 0
    done = 0
    while done < n:
        a, b, c, d = np.sort(rng.uniform(-20, 20, 4)).tolist()
        if min(b - a, c - b, d - c) < 1e-2:
            continue
        done += 1
        m = random_mobius(rng)
        base = liouville_box_mass(a, b, c, d)
        img = liouville_box_mass(*(apply_mobius(m, t) for t in (a, b, c, d)))
        if not math.isclose(img, base, rel_tol=1e-9, abs_tol=1e-12):
            bad += 1
    return bad


def _suite_six_sector(rng, n):
    bad = 0
    for _ in range(n):
        s = SIX[rng.integers(6)]
        g = Geodesic(float(_in_interval(s.i, rng)), float(_in_interval(s.j, rng)))
        base = chord_length_standard(g)
        for f in SELF_MAPS.values():
            if not math.isclose(chord_length_standard(Geodesic(f(g.p), f(g.q))), base, rel_tol=1e-10):
                bad += 1
    return bad


_GENS = [(1, 1, 0, 1), (1, -1, 0, 1), (0, -1, 1, 0)]


def _suite_trace_equivariance(n):
    bad = 0
    for k in range(n):
        s = RandomStream(7, k)
        g = random_geodesic(s, 20.0)
        m = (1, 0, 0, 1)
        for x in s.uniform(10):
            m = mat_mul(m, _GENS[int(x * 3)])
        start = locate_start(g)
        r1 = trace(g, 20.0, keep_triangles=False)
        mg = ExactGeodesic(mat_apply(m, g.u), mat_apply(m, g.v))
        r2 = trace(mg, 20.0, start=FareyTriangle.from_frame(mat_mul(m, start.frame())), keep_triangles=False)
        if len(r1) != len(r2) or not np.allclose(r1.lengths, r2.lengths, rtol=1e-9, atol=0):
            bad += 1
    return bad


def _suite_sampler_determinism(n):
    bad = 0
    for seed in range(n):
        a = sample_chords(RandomStream(seed), 16).chords
        b = sample_chords(RandomStream(seed), 16).chords
        w1 = sample_window(0.5, 2.0, SIX[seed % 6], RandomStream(seed, 3), 4).chord
        w2 = sample_window(0.5, 2.0, SIX[seed % 6], RandomStream(seed, 3), 4).chord
        if not (np.array_equal(a, b) and np.array_equal(w1, w2)):
            bad += 1
    return bad


def test_c8_invariance_suites(record_criterion):
    n = 1000
    t0 = time.perf_counter()
    rng = np.random.default_rng(8)
    fails = {
        "mobius_action": _suite_mobius_action(rng, n),
        "liouville_box": _suite_box_invariance(rng, n),
        "six_sector_L": _suite_six_sector(rng, n),
        "trace_equivariance": _suite_trace_equivariance(n),
        "sampler_determinism": _suite_sampler_determinism(n),
    }
    dt = time.perf_counter() - t0
    ok = not any(fails.values()) and dt < 60
    record_criterion(8, "invariance suites", ok,
                     f"{n} cases each, failures {fails}, {dt:.1f}s (< 60s)")
    assert ok


def test_c9_proximity(record_criterion):
    m1 = cf.moment_P(1)
    gap = math.log(3) - m1
    ok = m1 < math.log(3) and 0.002 < gap < 0.003
    record_criterion(9, "proximity to ln 3", ok, f"ln 3 - moment_P(1) = {gap:.6f} in (0.002, 0.003)")
    assert ok
