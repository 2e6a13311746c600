"""Seeded samplers for unit tangents in the standard ideal triangle and for
Liouville-distributed geodesics in a chord-length window.

Randomness comes from numpy's Philox-4x64 counter-based generator, keyed
by ``seed + 2**64 * stream_index``.  Its output stream is fixed by the
algorithm, so a (seed, stream) pair replays bit for bit anywhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .hypcore import GeometryError, Geodesic, PointH2, UnitTangent, VERTICAL_TOL, geodesic_from_tangent
from .triangle import Sector, chord_length_standard, chord_lengths_standard, self_map_for

SEED_BITS = 64


class RandomStream:
    """One independent, replayable stream of uniforms."""

    def __init__(self, seed: int, stream_index: int = 0):
        if not 0 <= seed < 2 ** SEED_BITS:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if stream_index < 0:
            raise ValueError("stream_index must be >= 0")
        self.seed = int(seed)
        self.stream_index = int(stream_index)
        self.rng = np.random.Generator(np.random.Philox(key=self.seed + (self.stream_index << SEED_BITS)))

    def substream(self, index: int) -> "RandomStream":
        # substreams of stream s live at s * 2**32 + index
        return RandomStream(self.seed, (self.stream_index << 32) + index + 1)

    def uniform(self, size=None):
        """Uniform on [0, 1)."""
        return self.rng.random(size)

    def uniform_open(self, size=None):
        """Uniform on (0, 1]."""
        return 1.0 - self.rng.random(size)

    def randbits(self, k: int) -> int:
        """A uniformly random non-negative integer below 2**k."""
        words = self.rng.integers(0, 2 ** 32, size=(k + 31) // 32, dtype=np.uint64)
        value = 0
        for w in words:
            value = (value << 32) | int(w)
        return value >> (32 * len(words) - k)

    def __repr__(self):
        return f"RandomStream(seed={self.seed}, stream_index={self.stream_index})"


# -- tangent vectors in the standard triangle --------------------------------

def inside_standard_triangle(x, y):
    return (0 < x) & (x < 1) & ((x - 0.5) ** 2 + y ** 2 > 0.25)


def sample_tangents(s: RandomStream, n: int):
    """``n`` unit tangents uniform for area x angle on the standard triangle.

    The hyperbolic area above the arc at abscissa x is 1/sqrt(x - x^2), so
    x follows the arcsine law and, given x, 1/y is uniform on (0, 1/c(x))
    with c(x) = sqrt(x - x^2).  Returns arrays ``(x, y, theta)``.
    """
    u = s.uniform((3, n))
    x = np.sin(0.5 * math.pi * u[0]) ** 2
    c = np.sqrt(x - x * x)
    y = c / (1.0 - u[1])
    theta = 2.0 * math.pi * u[2]
    return x, y, theta


def sample_tangent_in_triangle(s: RandomStream) -> UnitTangent:
    while True:
        x, y, theta = (float(t[0]) for t in sample_tangents(s, 1))
        if inside_standard_triangle(x, y) and y > 0:
            return UnitTangent(PointH2(x, y), theta)


def tangent_endpoints(x, y, theta):
    """Vectorized backward/forward endpoints of the geodesics through tangents."""
    x, y, theta = (np.asarray(t, dtype=float) for t in (x, y, theta))
    s, c = np.sin(theta), np.cos(theta)
    c = np.where(np.abs(c) <= VERTICAL_TOL, 0.0, c)
    with np.errstate(divide="ignore", invalid="ignore"):
        pos = s >= 0
        fwd = np.where(pos, x + y * (1 + s) / c, x + y * c / (1 - s))
        back = np.where(pos, x - y * c / (1 + s), x - y * (1 - s) / c)
    fwd = np.where(pos & (c == 0), np.inf, fwd)
    back = np.where(~pos & (c == 0), np.inf, back)
    return back, fwd


def chord_of_tangent(v: UnitTangent) -> float:
    """Length of the segment of the geodesic through ``v`` inside the triangle."""
    if not inside_standard_triangle(v.base.x, v.base.y):
        raise GeometryError("tangent base point is outside the standard triangle")
    return chord_length_standard(geodesic_from_tangent(v))


def chords_of_tangents(x, y, theta) -> np.ndarray:
    back, fwd = tangent_endpoints(x, y, theta)
    return chord_lengths_standard(back, fwd)


@dataclass
class ChordSample:
    chords: np.ndarray
    resampled: int = 0


def sample_chords(s: RandomStream, n: int) -> ChordSample:
    """Chord lengths of ``n`` random tangents; vertex hits are redrawn."""
    x, y, theta = sample_tangents(s, n)
    chords = chords_of_tangents(x, y, theta)
    redraws = 0
    bad = ~np.isfinite(chords) | (chords <= 0)
    while bad.any():
        k = int(bad.sum())
        redraws += k
        x2, y2, t2 = sample_tangents(s, k)
        chords[bad] = chords_of_tangents(x2, y2, t2)
        bad = ~np.isfinite(chords) | (chords <= 0)
    return ChordSample(chords, redraws)


# -- Liouville window sampler ----------------------------------------------

def corner_epsilon(a: float) -> float:
    """Half-width of the corner at 0 where L_12 < a: (e^2a - 1)/(e^2a + 1)."""
    return math.tanh(a)


def window_box(a: float, b: float):
    """Box in (u, v) containing every sector-(1,2) geodesic with L in [a, b]."""
    return (1.0 - math.exp(2 * b), 0.0), (0.0, -math.expm1(-2 * b))


def window_weight_bound(a: float) -> float:
    """Sup of 1/(u - v)^2 over the window region.

    On the region v - u >= max(v, (1 - v) e^2a - 1 + v), whose minimum
    over v in (0, 1) is 1 - e^-2a.
    """
    return 1.0 / (-math.expm1(-2 * a)) ** 2


def _check_window(a, b):
    if not (0 < a < b < math.inf):
        raise ValueError(f"window needs 0 < a < b < inf, got [{a}, {b}]")


@dataclass(frozen=True)
class LiouvilleWindowSample:
    geodesic: Geodesic
    sector: Sector
    chord: float


@dataclass
class WindowBatch:
    u: np.ndarray
    v: np.ndarray
    chord: np.ndarray
    sector: Sector
    proposals: int = 0
    vertex_rejects: int = 0
    diagnostics: dict = field(default_factory=dict)


_CHUNK = 1 << 16


def sample_window_12(a: float, b: float, s: RandomStream, n: int) -> WindowBatch:
    """Rejection sampler for the sector-(1,2) window.

    Proposals are uniform on ``window_box(a, b)``; a proposal is kept with
    probability (u - v)^-2 / ``window_weight_bound(a)`` when its chord
    lies in [a, b].
    """
    _check_window(a, b)
    (u0, u1), (v0, v1) = window_box(a, b)
    wmax = window_weight_bound(a)
    us, vs, ls = [], [], []
    got = proposals = vertex = 0
    while got < n:
        r = s.uniform((3, _CHUNK))
        u = u0 + (u1 - u0) * r[0]
        v = v0 + (v1 - v0) * r[1]
        proposals += _CHUNK
        on_vertex = (u == 0) | (v == 0)
        vertex += int(on_vertex.sum())
        with np.errstate(divide="ignore"):
            chord = 0.5 * (np.log1p(-u) - np.log1p(-v))
            w = 1.0 / (u - v) ** 2
        keep = ~on_vertex & (chord >= a) & (chord <= b) & (r[2] * wmax < w)
        idx = np.flatnonzero(keep)[: n - got]
        us.append(u[idx])
        vs.append(v[idx])
        ls.append(chord[idx])
        got += len(idx)
    return WindowBatch(np.concatenate(us), np.concatenate(vs), np.concatenate(ls),
                       Sector(1, 2), proposals, vertex)


def sample_window(a: float, b: float, sector: Sector, s: RandomStream, n: int) -> WindowBatch:
    """Window samples in any sector: sector-(1,2) output pushed through the
    self-map of the triangle carrying I1 x I2 onto ``sector``."""
    sector = Sector(*sector)
    base = sample_window_12(a, b, s, n)
    if sector == (1, 2):
        return base
    f = self_map_for(sector)
    u, v = f(base.u), f(base.v)
    return WindowBatch(u, v, chord_lengths_standard(u, v), sector, base.proposals, base.vertex_rejects)


def sample_liouville_window(a: float, b: float, sector: Sector, s: RandomStream) -> LiouvilleWindowSample:
    batch = sample_window(a, b, sector, s, 1)
    return LiouvilleWindowSample(Geodesic(float(batch.u[0]), float(batch.v[0])),
                                 Sector(*sector), float(batch.chord[0]))


# -- per-sector window masses ------------------------------------------------

def _angle(x):
    return 2.0 * np.arctan(x)


def sector_angle_box(a: float, b: float, sector: Sector):
    """Angular box (theta = 2 atan x) covering the window region of ``sector``.

    The (1,2) box is carried over by the self-map; each side is an arc of
    one interval I_k, and INF sits at -pi for I1 and +pi for I3.
    """
    f = self_map_for(Sector(*sector))
    (u0, u1), (v0, v1) = window_box(a, b)
    sides = []
    for (p, q), k in (((u0, u1), sector[0]), ((v0, v1), sector[1])):
        with np.errstate(divide="ignore"):
            ends = [f(np.float64(p)), f(np.float64(q))]
        angles = []
        for e in ends:
            if np.isinf(e):
                angles.append(-math.pi if k == 1 else math.pi)
            else:
                angles.append(float(_angle(e)))
        sides.append((min(angles), max(angles)))
    return tuple(sides)


def window_mass(a: float, b: float, sector: Sector, s: RandomStream, n: int):
    """Monte Carlo estimate of the Liouville mass of {g in sector: L(g) in [a,b]}.

    Each sector is integrated in its own coordinates: proposals uniform in
    the angular box, weight dmu = dtheta dphi / (4 sin^2((theta - phi)/2)).
    Returns ``(mass, standard_error)``.
    """
    _check_window(a, b)
    (t0, t1), (p0, p1) = sector_angle_box(a, b, sector)
    total = total2 = 0.0
    done = 0
    while done < n:
        m = min(_CHUNK, n - done)
        r = s.uniform((2, m))
        th = t0 + (t1 - t0) * r[0]
        ph = p0 + (p1 - p0) * r[1]
        u, v = np.tan(0.5 * th), np.tan(0.5 * ph)
        chord = chord_lengths_standard(u, v)
        w = np.where((chord >= a) & (chord <= b), 0.25 / np.sin(0.5 * (th - ph)) ** 2, 0.0)
        total += math.fsum(w)
        total2 += math.fsum(w * w)
        done += m
    area = (t1 - t0) * (p1 - p0)
    mean = total / n
    var = max(total2 / n - mean * mean, 0.0)
    return area * mean, area * math.sqrt(var / n)


__all__ = [
    "RandomStream", "sample_tangents", "sample_tangent_in_triangle", "tangent_endpoints",
    "chord_of_tangent", "chords_of_tangents", "sample_chords", "ChordSample", "corner_epsilon",
    "window_box", "window_weight_bound", "LiouvilleWindowSample", "WindowBatch",
    "sample_window_12", "sample_window", "sample_liouville_window", "sector_angle_box",
    "window_mass", "inside_standard_triangle",
]
