"""Geodesics traced through the Farey tessellation.

The walk is kept in a local frame: an integer matrix G (det 1) carries
the standard triangle {0, 1, INF} onto the current Farey triangle, with
G(0), G(1), G(INF) its vertices.  In local coordinates the geodesic
always enters across the edge (0, INF), so its backward end u lies in
I1 and the forward end v decides the exit:

    v in (0, 1)   -> exit across (0, 1):   G <- G L,  v <- v / (1 - v)
    v in (1, inf) -> exit across (1, INF): G <- G R,  v <- v - 1

with L = [[1,0],[1,1]], R = [[1,1],[0,1]].  The forward end is kept as
an exact projective pair (numerator, denominator) of Python ints, or of
elements of Z[sqrt D] for quadratic irrationals, so every exit decision
is an exact sign test.  The backward end only enters the chord lengths
and is contracted by the walk; it is carried as a float.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Tuple

import numpy as np

from .hypcore import Geodesic, GeometryError, is_inf

INF_PAIR = (1, 0)


class DegenerateStartError(GeometryError):
    """The geodesic runs along a tessellation edge or starts at a vertex."""


class NotHyperbolicError(ValueError):
    pass


# -- exact numbers -----------------------------------------------------------

class Surd:
    """x + y sqrt(D) with integers x, y and a fixed non-square D > 0."""

    __slots__ = ("x", "y", "D")

    def __init__(self, x: int, y: int, D: int):
        self.x, self.y, self.D = x, y, D

    def _coerce(self, other):
        if isinstance(other, Surd):
            return other
        return Surd(other, 0, self.D)

    def __add__(self, other):
        o = self._coerce(other)
        return Surd(self.x + o.x, self.y + o.y, self.D)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return Surd(self.x - o.x, self.y - o.y, self.D)

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __neg__(self):
        return Surd(-self.x, -self.y, self.D)

    def __mul__(self, other):
        o = self._coerce(other)
        return Surd(self.x * o.x + self.y * o.y * self.D, self.x * o.y + self.y * o.x, self.D)

    __rmul__ = __mul__

    def __eq__(self, other):
        o = self._coerce(other)
        return self.x == o.x and self.y == o.y

    def __hash__(self):
        return hash((self.x, self.y, self.D))

    def sign(self) -> int:
        sx = (self.x > 0) - (self.x < 0)
        sy = (self.y > 0) - (self.y < 0)
        if sy == 0 or sx == sy:
            return sx or sy
        if sx == 0:
            return sy
        # opposite signs: the larger square wins
        return sx if self.x * self.x > self.y * self.y * self.D else sy

    def __float__(self):
        r = math.sqrt(self.D)
        if self.x == 0 or self.y == 0 or (self.x > 0) == (self.y > 0):
            return float(self.x) + float(self.y) * r
        # cancellation: multiply through by the conjugate
        return (self.x * self.x - self.y * self.y * self.D) / (float(self.x) - float(self.y) * r)

    def __repr__(self):
        return f"Surd({self.x}, {self.y}, {self.D})"


def _sign(x) -> int:
    if isinstance(x, Surd):
        return x.sign()
    return (x > 0) - (x < 0)


def _ratio(a, b) -> float:
    """a / b as a float, correctly rounded for ints."""
    if isinstance(a, Surd) or isinstance(b, Surd):
        return float(a) / float(b)
    return a / b


def _log_abs(x) -> float:
    if isinstance(x, Surd):
        return math.log(abs(float(x)))
    return math.log(abs(x))


@dataclass(frozen=True)
class QuadraticIrrational:
    """(a + b sqrt D) / c with integers and D > 0 not a perfect square."""

    a: int
    b: int
    c: int
    D: int

    def __post_init__(self):
        if self.c == 0:
            raise ValueError("denominator must be nonzero")
        if self.D <= 0 or math.isqrt(self.D) ** 2 == self.D:
            raise ValueError("D must be a positive non-square")

    def pair(self):
        return (Surd(self.a, self.b, self.D), Surd(self.c, 0, self.D))

    def __float__(self):
        return float(Surd(self.a, self.b, self.D)) / self.c


def exact_pair(x):
    """Projective pair (num, den), den >= 0, for an exact boundary point.

    Accepts int, Fraction, float (taken at its exact binary value), str,
    ``QuadraticIrrational``, an existing pair, or INF.
    """
    if isinstance(x, tuple):
        n, d = x
    elif isinstance(x, QuadraticIrrational):
        n, d = x.pair()
    elif isinstance(x, float) and math.isinf(x):
        return INF_PAIR
    elif isinstance(x, str) and x.strip().lower() in ("inf", "infinity", "1/0"):
        return INF_PAIR
    else:
        f = Fraction(x)
        n, d = f.numerator, f.denominator
    if _sign(d) < 0:
        n, d = -n, -d
    if _sign(d) == 0:
        return INF_PAIR
    return (n, d)


def pair_to_float(p) -> float:
    n, d = p
    if _sign(d) == 0:
        return math.inf
    return _ratio(n, d)


def _interval(p) -> int:
    """Exact interval index of a projective pair: 1, 2, 3, or 0 at a vertex."""
    n, d = p
    sd = _sign(d)
    if sd == 0:
        return 0
    sn = _sign(n) * sd
    if sn == 0:
        return 0
    if sn < 0:
        return 1
    s1 = _sign(n - d) * sd
    if s1 == 0:
        return 0
    return 2 if s1 < 0 else 3


# -- frames and triangles ----------------------------------------------------

Matrix = Tuple[int, int, int, int]
IDENTITY: Matrix = (1, 0, 0, 1)
L_MAT: Matrix = (1, 0, 1, 1)
R_MAT: Matrix = (1, 1, 0, 1)
# rotation z -> 1/(1 - z): I1 -> I2 -> I3 -> I1
ROT: Matrix = (0, 1, -1, 1)


def mat_mul(m: Matrix, n: Matrix) -> Matrix:
    a, b, c, d = m
    e, f, g, h = n
    return (a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)


def mat_apply(m: Matrix, p):
    a, b, c, d = m
    n, q = p
    return (a * n + b * q, c * n + d * q)


def mat_inverse(m: Matrix) -> Matrix:
    a, b, c, d = m
    return (d, -b, -c, a)


def _norm_vertex(p, q) -> Tuple[int, int]:
    if q < 0 or (q == 0 and p < 0):
        p, q = -p, -q
    return (p, q)


@dataclass(frozen=True)
class FareyTriangle:
    """Farey triangle with exact vertices (p, q) meaning p/q; (1, 0) is INF.

    Vertices are stored in frame order: images of 0, 1, INF under a
    det-1 integer frame, so they run positively around the boundary.
    """

    v0: Tuple[int, int]
    v1: Tuple[int, int]
    vinf: Tuple[int, int]

    def __post_init__(self):
        verts = self.vertices
        for k in range(3):
            (p, q), (r, s) = verts[k], verts[(k + 1) % 3]
            if abs(p * s - q * r) != 1:
                raise GeometryError(f"{verts} is not a Farey triangle")

    @property
    def vertices(self):
        return (self.v0, self.v1, self.vinf)

    @classmethod
    def from_frame(cls, G: Matrix) -> "FareyTriangle":
        a, b, c, d = G
        return cls(_norm_vertex(b, d), _norm_vertex(a + b, c + d), _norm_vertex(a, c))

    def frame(self) -> Matrix:
        """A det-1 integer matrix with G(0), G(1), G(INF) = v0, v1, vinf."""
        (b, d), (a, c) = self.v0, self.vinf
        if a * d - b * c < 0:
            a, c = -a, -c
        p, q = self.v1
        if (a + b) * q != (c + d) * p:
            # v1 is the other common neighbour: flip the sign of one column
            raise GeometryError("vertices are not in positive frame order")
        return (a, b, c, d)

    @classmethod
    def from_vertices(cls, *verts) -> "FareyTriangle":
        """Any ordering of the three vertices; returns frame order."""
        pts = [_norm_vertex(*(exact_pair(v) if not isinstance(v, tuple) else v)) for v in verts]
        for k in range(3):
            b, d = pts[k]
            a, c = pts[(k + 2) % 3]
            if a * d - b * c < 0:
                a, c = -a, -c
            if _norm_vertex(a + b, c + d) == pts[(k + 1) % 3]:
                return cls.from_frame((a, b, c, d))
        for k in range(3):
            b, d = pts[(k + 1) % 3]
            a, c = pts[(k + 2) % 3]
            if a * d - b * c < 0:
                a, c = -a, -c
            if _norm_vertex(a + b, c + d) == pts[k]:
                return cls.from_frame((a, b, c, d))
        raise GeometryError(f"{verts} is not a Farey triangle")

    def as_fractions(self):
        return tuple(math.inf if q == 0 else Fraction(p, q) for p, q in self.vertices)

    def __str__(self):
        return "(" + ", ".join(f"{p}/{q}" for p, q in self.vertices) + ")"


BASE_TRIANGLE = FareyTriangle((0, 1), (1, 1), (1, 0))


# -- geodesic input ----------------------------------------------------------

@dataclass(frozen=True)
class ExactGeodesic:
    """Oriented geodesic with exact endpoints given as projective pairs."""

    u: tuple
    v: tuple

    @classmethod
    def of(cls, g) -> "ExactGeodesic":
        if isinstance(g, ExactGeodesic):
            return g
        if isinstance(g, Geodesic):
            return cls(exact_pair(g.p), exact_pair(g.q))
        u, v = g
        return cls(exact_pair(u), exact_pair(v))

    def to_geodesic(self) -> Geodesic:
        return Geodesic(pair_to_float(self.u), pair_to_float(self.v))


def _same(p, q) -> bool:
    return _sign(p[0] * q[1] - p[1] * q[0]) == 0


def _rotate_left(G, u, v):
    """Re-frame by z -> 1 - 1/z (I1 -> I3, I2 -> I1, I3 -> I2)."""
    # local' = ROT^-1 local, G' = G ROT
    inv = mat_inverse(ROT)
    return mat_mul(G, ROT), mat_apply(inv, u), mat_apply(inv, v)


_MAX_DESCENT = 1 << 20


def _descend(g: ExactGeodesic, G: Matrix = IDENTITY):
    """Walk from frame G toward g until the current triangle meets g.

    Returns (G, u_local, v_local).
    """
    Ginv = mat_inverse(G)
    u, v = mat_apply(Ginv, g.u), mat_apply(Ginv, g.v)
    for _ in range(_MAX_DESCENT):
        iu, iv = _interval(u), _interval(v)
        if iu == 0 and iv == 0:
            raise DegenerateStartError("geodesic runs along a Farey edge")
        if iu and iv and iu != iv:
            return G, u, v
        if not (iu and iv):
            # one end is a vertex w of this triangle; stop if g enters it
            w, k = (u, iv) if iu == 0 else (v, iu)
            opposite = 2 if _sign(w[1]) == 0 else (3 if _sign(w[0]) == 0 else 1)
            if k == opposite:
                return G, u, v
            target = k
        else:
            target = iu
        # turn interval `target` into I3, then step to the triangle (1, 2, INF)
        for _ in range(target % 3):
            G, u, v = _rotate_left(G, u, v)
        G = mat_mul(G, R_MAT)
        u = (u[0] - u[1], u[1])
        v = (v[0] - v[1], v[1])
    raise GeometryError("start-triangle search did not terminate")


def _normalize_pair(p):
    n, d = p
    if _sign(d) < 0:
        return (-n, -d)
    return p


def locate_start(g, start: Optional[FareyTriangle] = None) -> FareyTriangle:
    """First Farey triangle crossed by ``g``, searching from ``start``.

    The default search starts at the base triangle (0, 1, INF); a triangle
    that already meets g is returned unchanged.
    """
    eg = ExactGeodesic.of(g)
    G0 = IDENTITY if start is None else start.frame()
    G, u, v = _descend(eg, G0)
    return FareyTriangle.from_frame(G)


# -- tracing -------------------------------------------------------------------

class Termination(enum.Enum):
    LENGTH_BUDGET = "LENGTH_BUDGET"
    STEP_BUDGET = "STEP_BUDGET"
    CUSP_EXIT = "CUSP_EXIT"


@dataclass
class TraceResult:
    lengths: np.ndarray
    total_param_length: float
    terminated_reason: Termination
    word: str = ""
    triangles: Optional[List[FareyTriangle]] = None
    final_frame: Matrix = IDENTITY

    @property
    def segments(self):
        if self.triangles is None:
            raise ValueError("trace was run with keep_triangles=False")
        return list(zip(self.lengths.tolist(), self.triangles))

    @property
    def length_sum(self) -> float:
        return math.fsum(self.lengths)

    def __len__(self):
        return len(self.lengths)


def _start_frame(eg: ExactGeodesic, start: Optional[FareyTriangle]):
    """Frame of the start triangle, rotated so the backward end is in I1."""
    if start is None:
        G, u, v = _descend(eg)
    else:
        G = start.frame()
        Ginv = mat_inverse(G)
        u, v = mat_apply(Ginv, eg.u), mat_apply(Ginv, eg.v)
    iu = _interval(u)
    if iu == 0:
        raise DegenerateStartError("backward endpoint is a vertex of the start triangle")
    for _ in range(iu - 1):
        G, u, v = _rotate_left(G, u, v)
    u, v = _normalize_pair(u), _normalize_pair(v)
    iv = _interval(v)
    if iv == 1:
        raise GeometryError("geodesic does not cross the start triangle")
    if iv == 0 and not (_sign(v[0] - v[1]) == 0):
        raise DegenerateStartError("geodesic leaves along an edge of the start triangle")
    return G, u, v


def _crossing_time(G: Matrix, eg: ExactGeodesic):
    """Flow time (up to a constant) at which g crosses the edge G(0) G(INF).

    For an edge (r1, r2) the time is 1/2 log|A(r1) A(r2)| with
    A(r) = (r - u)/(r - v); the constant log|v_den/u_den| is dropped,
    it cancels in differences.
    """
    a, b, c, d = G
    verts = ((b, d), (a, c))
    (un, ud), (vn, vd) = eg.u, eg.v
    t = 0.0
    for p, q in verts:
        t += _log_abs(p * ud - un * q) - _log_abs(p * vd - vn * q)
    return 0.5 * t


def trace(g, length_budget: float, start: Optional[FareyTriangle] = None, *,
          step_budget: int = 10 ** 7, keep_triangles: bool = True, check_exact: bool = False) -> TraceResult:
    """Follow ``g`` forward through Farey triangles until ``length_budget``.

    ``g`` may be a ``Geodesic`` (float endpoints taken at their exact
    binary values), an ``ExactGeodesic`` or a pair of exact values.
    ``check_exact`` asserts det G = 1 after every step.
    """
    if not length_budget > 0:
        raise ValueError("length_budget must be positive")
    eg = ExactGeodesic.of(g)
    G, (un, ud), (vn, vd) = _start_frame(eg, start)
    a, b, c, d = G
    u = _ratio(un, ud)
    lengths: List[float] = []
    tris: Optional[List[FareyTriangle]] = [] if keep_triangles else None
    letters = []
    acc = 0.0
    reason = Termination.STEP_BUDGET
    log1p, log = math.log1p, math.log
    append = lengths.append
    entry = (a, b, c, d)
    while len(lengths) < step_budget:
        diff = vn - vd
        sd = _sign(diff)
        if sd == 0:
            reason = Termination.CUSP_EXIT
            break
        if tris is not None:
            tris.append(FareyTriangle.from_frame((a, b, c, d)))
        if sd < 0:
            # v in (0, 1): exit across (0, 1)
            seg = 0.5 * (log1p(-u) - log(_ratio(-diff, vd)))
            vd = -diff
            u = u / (1.0 - u)
            a, c = a + b, c + d
            letters.append("L")
        else:
            # v in (1, inf): exit across (1, INF)
            seg = 0.5 * (log1p(1.0 / _ratio(diff, vd)) + log1p(-1.0 / u))
            vn = diff
            u = u - 1.0
            b, d = a + b, c + d
            letters.append("R")
        append(seg)
        acc += seg
        if check_exact and a * d - b * c != 1:
            raise AssertionError("frame lost unimodularity")
        if acc >= length_budget:
            reason = Termination.LENGTH_BUDGET
            break
    G_end = (a, b, c, d)
    if a * d - b * c != 1:
        raise AssertionError("frame lost unimodularity")
    if reason is Termination.CUSP_EXIT:
        # the last triangle is entered but never left; its chord is infinite
        total = math.fsum(lengths)
    else:
        # the exit edge of the last triangle is the entry edge (0, INF)
        # of the final frame
        total = _crossing_time(G_end, eg) - _crossing_time(entry, eg)
    return TraceResult(np.asarray(lengths, dtype=float), total, reason, "".join(letters), tris, G_end)


# -- closed geodesics --------------------------------------------------------

@dataclass(frozen=True)
class ClosedGeodesicSpec:
    matrix: Matrix
    trace: int
    axis: Geodesic
    backward: QuadraticIrrational
    forward: QuadraticIrrational
    length: float

    @property
    def exact_axis(self) -> ExactGeodesic:
        return ExactGeodesic(self.backward.pair(), self.forward.pair())


def closed_geodesic_from_matrix(a: int, b: int, c: int, d: int) -> ClosedGeodesicSpec:
    """Axis and translation length of a hyperbolic element of SL(2, Z).

    The axis is oriented from the repelling to the attracting fixed point.
    """
    a, b, c, d = (int(t) for t in (a, b, c, d))
    if a * d - b * c != 1:
        raise ValueError(f"determinant must be 1, got {a * d - b * c}")
    t = a + d
    if abs(t) <= 2:
        raise NotHyperbolicError(f"|trace| = {abs(t)} <= 2: not hyperbolic")
    D = t * t - 4
    # for t > 0 the + root attracts, for t < 0 the - root
    sgn = 1 if t > 0 else -1
    fwd = QuadraticIrrational(a - d, sgn, 2 * c, D)
    back = QuadraticIrrational(a - d, -sgn, 2 * c, D)
    length = 2.0 * math.acosh(abs(t) / 2.0)
    return ClosedGeodesicSpec((a, b, c, d), t, Geodesic(float(back), float(fwd)), back, fwd, length)


def word_matrix(word: str) -> Matrix:
    """Product of L = [[1,0],[1,1]] and R = [[1,1],[0,1]] letters, left to right."""
    m = IDENTITY
    for ch in word.upper():
        if ch == "L":
            m = mat_mul(m, L_MAT)
        elif ch == "R":
            m = mat_mul(m, R_MAT)
        else:
            raise ValueError(f"word letters must be L or R, got {ch!r}")
    return m


@dataclass
class DiscreteCurrentDistribution:
    lengths: np.ndarray
    period_length: float
    word: str
    spec: Optional[ClosedGeodesicSpec] = None

    @property
    def weights(self) -> np.ndarray:
        return np.full(len(self.lengths), 1.0 / self.period_length)

    @property
    def total_mass(self) -> float:
        return len(self.lengths) / self.period_length


_PERIOD_RTOL = 1e-6


def periodic_trace(spec: ClosedGeodesicSpec, start: Optional[FareyTriangle] = None) -> DiscreteCurrentDistribution:
    """Segments of the closed geodesic over exactly one period.

    The walk starts at the first triangle found by ``locate_start`` (or at
    ``start``) and stops when the forward endpoint returns exactly to its
    starting local value after a length of ``spec.length``.
    """
    eg = spec.exact_axis
    G, (un, ud), v0 = _start_frame(eg, start)
    vn, vd = v0
    u = _ratio(un, ud)
    lengths, letters = [], []
    acc = 0.0
    max_steps = 64 + 8 * int(spec.length / 0.05)
    for _ in range(max_steps):
        diff = vn - vd
        if _sign(diff) < 0:
            seg = 0.5 * (math.log1p(-u) - math.log(_ratio(-diff, vd)))
            vd = -diff
            u = u / (1.0 - u)
            letters.append("L")
        else:
            seg = 0.5 * (math.log1p(1.0 / _ratio(diff, vd)) + math.log1p(-1.0 / u))
            vn = diff
            u = u - 1.0
            letters.append("R")
        lengths.append(seg)
        acc += seg
        if _same((vn, vd), v0) and abs(acc - spec.length) <= _PERIOD_RTOL * spec.length:
            return DiscreteCurrentDistribution(np.asarray(lengths), spec.length, "".join(letters), spec)
        if acc > spec.length * (1 + _PERIOD_RTOL):
            break
    raise AssertionError("axis did not close up after one period")


# -- random geodesics and words ----------------------------------------------

def dyadic_refine(x: float, bits: int, s) -> Fraction:
    """Exact dyadic rational agreeing with ``x`` to double precision, with
    ``bits`` random trailing bits appended below its last binary digit."""
    f = Fraction(x)
    m, e = math.frexp(x)
    scale = Fraction(1, 2 ** (bits + 53 - e))
    return f + scale * s.randbits(bits)


def random_geodesic(s, length_budget: float) -> ExactGeodesic:
    """Liouville-random geodesic through the base triangle with dyadic ends.

    A volume-random unit tangent in (0, 1, INF) fixes the endpoints to
    double precision; random low bits extend them far enough that the
    trace reaches ``length_budget`` before the endpoint's binary expansion
    runs out (each unit of length uses about 1/log 2 bits).
    """
    from .sampling import sample_tangent_in_triangle
    from .hypcore import geodesic_from_tangent
    bits = int(1.1 * length_budget / math.log(2)) + 256
    while True:
        g = geodesic_from_tangent(sample_tangent_in_triangle(s))
        if is_inf(g.p) or is_inf(g.q):
            continue
        return ExactGeodesic(exact_pair(dyadic_refine(g.p, bits, s)),
                             exact_pair(dyadic_refine(g.q, bits, s)))


def random_closing_word(s, length: int = 30, burn_in: int = 100) -> str:
    """Positive L/R word read off the cutting sequence of a random geodesic.

    The first ``burn_in`` letters are discarded; the next ``length``
    letters form the word.  Words using a single letter are redrawn.
    """
    while True:
        g = random_geodesic(s, 2.0 * (burn_in + length))
        res = trace(g, math.inf, step_budget=burn_in + length, keep_triangles=False)
        if len(res.word) < burn_in + length:
            continue
        w = res.word[burn_in:]
        if "L" in w and "R" in w:
            return w


def random_uniform_word(s, length: int = 30) -> str:
    """Word with i.i.d. uniform letters (redrawn if it uses one letter)."""
    while True:
        bits = s.uniform(length) < 0.5
        if bits.any() and not bits.all():
            return "".join("L" if b else "R" for b in bits)


__all__ = [
    "Surd", "QuadraticIrrational", "exact_pair", "pair_to_float", "FareyTriangle", "BASE_TRIANGLE",
    "ExactGeodesic", "locate_start", "trace", "TraceResult", "Termination", "DegenerateStartError",
    "NotHyperbolicError", "ClosedGeodesicSpec", "closed_geodesic_from_matrix", "word_matrix",
    "DiscreteCurrentDistribution", "periodic_trace", "random_geodesic", "random_closing_word",
    "random_uniform_word", "dyadic_refine", "mat_mul", "mat_apply", "mat_inverse",
]
