"""Chord lengths of geodesics through ideal triangles.

The standard triangle has vertices 0, 1, INF.  Its boundary splits into
I1 = (-inf, 0), I2 = (0, 1), I3 = (1, inf); a geodesic crosses the
triangle exactly when its endpoints lie in two different intervals.
Only the (1,2) and (1,3) sectors have explicit formulas; the rest are
reduced to them with the boundary self-maps of {0, 1, INF}.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .hypcore import (
    BOUNDARY_TOL, INF, Geodesic, GeometryError, boundary_point, is_inf, mobius_to_standard_triple, same_point,
)

#: tolerance for "endpoint equals a vertex"
VERTEX_TOL = BOUNDARY_TOL


@dataclass(frozen=True)
class IdealTriangle:
    v1: float
    v2: float
    v3: float

    def __post_init__(self):
        for name in ("v1", "v2", "v3"):
            object.__setattr__(self, name, boundary_point(getattr(self, name)))
        if (same_point(self.v1, self.v2, 0.0) or same_point(self.v2, self.v3, 0.0)
                or same_point(self.v1, self.v3, 0.0)):
            raise GeometryError("ideal triangle vertices must be distinct")

    @property
    def vertices(self):
        return (self.v1, self.v2, self.v3)


STANDARD = IdealTriangle(0.0, 1.0, INF)


class Sector(NamedTuple):
    i: int
    j: int


class ChordKind(enum.Enum):
    CROSSES = "crosses"
    MISSES = "misses"
    VERTEX_HIT = "vertex_hit"


@dataclass(frozen=True)
class ChordClassification:
    kind: ChordKind
    sector: Optional[Sector] = None
    #: for VERTEX_HIT only: does the geodesic pass through the interior
    enters: bool = False


def interval_index(x, tol: float = VERTEX_TOL) -> int:
    """1, 2 or 3 for the open interval containing ``x``; 0 at a vertex."""
    if is_inf(x):
        return 0
    if abs(x) <= tol or abs(x - 1.0) <= tol:
        return 0
    if x < 0:
        return 1
    return 2 if x < 1 else 3


# vertex -> the one interval not adjacent to it; a geodesic from that
# vertex into this interval runs through the interior of the triangle
_OPPOSITE = {0.0: 3, 1.0: 1, INF: 2}


def _nearest_vertex(x, tol):
    if is_inf(x):
        return INF
    return 0.0 if abs(x) <= tol else 1.0


def classify(g: Geodesic, tol: float = VERTEX_TOL) -> ChordClassification:
    i, j = interval_index(g.p, tol), interval_index(g.q, tol)
    if i and j:
        if i == j:
            return ChordClassification(ChordKind.MISSES)
        return ChordClassification(ChordKind.CROSSES, Sector(i, j))
    if not i and not j:
        # an edge of the triangle
        return ChordClassification(ChordKind.VERTEX_HIT, enters=False)
    w, other = (g.p, j) if not i else (g.q, i)
    return ChordClassification(ChordKind.VERTEX_HIT, enters=_OPPOSITE[_nearest_vertex(w, tol)] == other)


# The six boundary self-maps of {0, 1, INF}, keyed by how they permute
# (I1, I2, I3).  Scalar forms take INF-free arguments (endpoints of a
# crossing geodesic are finite).
SELF_MAPS = {
    (1, 2, 3): lambda z: z,
    (3, 2, 1): lambda z: 1.0 - z,
    (1, 3, 2): lambda z: 1.0 / z,
    (2, 3, 1): lambda z: 1.0 / (1.0 - z),
    (3, 1, 2): lambda z: (z - 1.0) / z,
    (2, 1, 3): lambda z: z / (z - 1.0),
}


def self_map_for(sector: Sector):
    """The self-map sending sector (1,2) onto ``sector``."""
    for perm, f in SELF_MAPS.items():
        if perm[0] == sector.i and perm[1] == sector.j:
            return f
    raise GeometryError(f"not a sector: {sector}")


def length_12(u, v):
    """Chord length on I1 x I2; log1p split keeps both halves positive."""
    return 0.5 * (math.log1p(-u) - math.log1p(-v))


def length_13(u, v):
    """Chord length on I1 x I3."""
    return 0.5 * (math.log1p(1.0 / (v - 1.0)) + math.log1p(-1.0 / u))


def length_23(u, v):
    """Chord length on I2 x I3.

    z -> 1 - z carries (u, v) to (1 - v, 1 - u) in I1 x I2, where the
    (1,2) formula reduces to log(v/u)/2.
    """
    return 0.5 * (math.log(v) - math.log(u))


def _crossing_length(u, v, i, j):
    if i > j:
        u, v, i, j = v, u, j, i
    if (i, j) == (1, 2):
        return length_12(u, v)
    if (i, j) == (1, 3):
        return length_13(u, v)
    return length_23(u, v)


def chord_length_standard(g: Geodesic, tol: float = VERTEX_TOL) -> float:
    """Length of ``g`` inside the triangle (0, 1, INF); may be INF."""
    cls = classify(g, tol)
    if cls.kind is ChordKind.MISSES:
        return 0.0
    if cls.kind is ChordKind.VERTEX_HIT:
        return INF if cls.enters else 0.0
    return _crossing_length(g.p, g.q, cls.sector.i, cls.sector.j)


def chord_length(g: Geodesic, tri: IdealTriangle, tol: float = VERTEX_TOL) -> float:
    m, _ = mobius_to_standard_triple(*tri.vertices)
    return chord_length_standard(m(g), tol)


def chord_lengths_standard(u, v) -> np.ndarray:
    """Vectorized ``chord_length_standard`` over endpoint arrays.

    Vertex hits are resolved exactly as in the scalar version.
    """
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    iu, iv = _interval_index_array(u), _interval_index_array(v)
    out = np.zeros(np.broadcast(u, v).shape)
    u, v = np.broadcast_arrays(u, v)
    iu, iv = np.broadcast_arrays(iu, iv)
    lo_is_u = iu <= iv
    a = np.where(lo_is_u, u, v)
    b = np.where(lo_is_u, v, u)
    ia = np.minimum(iu, iv)
    ib = np.maximum(iu, iv)
    with np.errstate(divide="ignore", invalid="ignore"):
        m12 = (ia == 1) & (ib == 2)
        out[m12] = 0.5 * (np.log1p(-a[m12]) - np.log1p(-b[m12]))
        m13 = (ia == 1) & (ib == 3)
        out[m13] = 0.5 * (np.log1p(1.0 / (b[m13] - 1.0)) + np.log1p(-1.0 / a[m13]))
        m23 = (ia == 2) & (ib == 3)
        out[m23] = 0.5 * (np.log(b[m23]) - np.log(a[m23]))
    hit = (ia == 0) & (ib > 0)
    if hit.any():
        w = np.where(iu == 0, u, v)
        other = np.where(iu == 0, iv, iu)
        opp = np.where(np.isinf(w), 2, np.where(np.abs(w) <= VERTEX_TOL, 3, 1))
        out[hit & (opp == other)] = np.inf
    return out


def _interval_index_array(x):
    idx = np.where(x < 0, 1, np.where(x < 1, 2, 3))
    vertex = np.isinf(x) | (np.abs(x) <= VERTEX_TOL) | (np.abs(x - 1.0) <= VERTEX_TOL)
    return np.where(vertex, 0, idx)


# -- geometric oracle ------------------------------------------------------

_LD = np.longdouble


def _edge_crossing(g, e):
    """Intersection point of two crossing geodesics, in long double.

    Both are given by boundary endpoints; a circle through e1, e2 is
    y^2 = (x - e1)(e2 - x), a vertical line is x = const.
    """
    (g1, g2), (e1, e2) = g, e
    if is_inf(g1) or is_inf(g2):
        x0 = _LD(g2 if is_inf(g1) else g1)
        return x0, np.sqrt((x0 - _LD(e1)) * (_LD(e2) - x0))
    if is_inf(e1) or is_inf(e2):
        x0 = _LD(e2 if is_inf(e1) else e1)
    else:
        g1, g2, e1, e2 = (_LD(t) for t in (g1, g2, e1, e2))
        x0 = (g1 * g2 - e1 * e2) / ((g1 + g2) - (e1 + e2))
    return x0, np.sqrt((x0 - _LD(g1)) * (_LD(g2) - x0))


def _separates(g, e):
    """Do the endpoints of ``g`` interleave with those of ``e`` on the circle?"""
    def ang(x):
        return math.pi if is_inf(x) else 2.0 * math.atan(x)
    a, b = sorted((ang(e[0]), ang(e[1])))
    inside = [a < ang(x) < b for x in g]
    return inside[0] != inside[1]


class OracleResult(NamedTuple):
    points: Optional[tuple]
    tangency: bool = False

    @property
    def length(self) -> float:
        if self.points is None:
            return 0.0
        (x1, y1), (x2, y2) = self.points
        dist = np.hypot(x1 - x2, y1 - y2)
        return float(2 * np.arcsinh(dist / (2 * np.sqrt(y1 * y2))))


def chord_endpoints_oracle(g: Geodesic, tri: IdealTriangle = STANDARD,
                           tol: float = VERTEX_TOL) -> OracleResult:
    """Points where ``g`` meets the boundary of ``tri``, by direct intersection.

    Independent of the closed forms above: circles and lines are
    intersected in long double and nothing is normalized first.
    """
    verts = tri.vertices
    ends = (g.p, g.q)
    if any(same_point(x, w, tol) for x in ends for w in verts):
        return OracleResult(None, tangency=True)
    pts = []
    for k in range(3):
        e = (verts[k], verts[(k + 1) % 3])
        if _separates(ends, e):
            pts.append(_edge_crossing(ends, e))
    if len(pts) != 2:
        return OracleResult(None)
    if pts[0][1] <= 0 or pts[1][1] <= 0:
        return OracleResult(None, tangency=True)
    return OracleResult(tuple(pts))


def oracle_chord_length(g: Geodesic, tri: IdealTriangle = STANDARD) -> float:
    return chord_endpoints_oracle(g, tri).length


__all__ = [
    "IdealTriangle", "STANDARD", "Sector", "ChordKind", "ChordClassification", "classify",
    "interval_index", "chord_length_standard", "chord_length", "chord_lengths_standard",
    "chord_endpoints_oracle", "oracle_chord_length", "OracleResult", "SELF_MAPS",
    "self_map_for", "length_12", "length_13", "length_23", "VERTEX_TOL",
]
