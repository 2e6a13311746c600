"""Upper half-plane primitives: boundary points, Mobius maps, geodesics.

Boundary points are plain floats.  The point at infinity is ``INF``
(``math.inf``); ``-inf`` is folded onto it, since the boundary circle
has a single point at infinity.  Every boundary formula below carries an
explicit branch for it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

INF = math.inf

#: absolute tolerance used when comparing derived boundary points
BOUNDARY_TOL = 1e-12


class GeometryError(ValueError):
    """Invalid geometric input (degenerate triple, overlapping box, ...)."""


def is_inf(p) -> bool:
    return isinstance(p, float) and math.isinf(p)


def boundary_point(value) -> float:
    """Coerce to a boundary coordinate, folding -inf onto INF."""
    p = float(value)
    if math.isnan(p):
        raise GeometryError("boundary point is NaN")
    return INF if math.isinf(p) else p


def same_point(p, q, tol: float = BOUNDARY_TOL) -> bool:
    """Equality on R u {inf}: exact on the infinite tag, ``tol`` otherwise."""
    if is_inf(p) or is_inf(q):
        return is_inf(p) and is_inf(q)
    return abs(p - q) <= tol


@dataclass(frozen=True)
class PointH2:
    x: float
    y: float

    def __post_init__(self):
        if not self.y > 0:
            raise GeometryError(f"point must lie in the upper half-plane, got y={self.y}")

    @property
    def z(self) -> complex:
        return complex(self.x, self.y)


@dataclass(frozen=True)
class UnitTangent:
    base: PointH2
    theta: float

    def __post_init__(self):
        object.__setattr__(self, "theta", math.fmod(self.theta, 2 * math.pi) % (2 * math.pi))


@dataclass(frozen=True)
class Geodesic:
    """Oriented geodesic from ``p`` (backward end) to ``q`` (forward end)."""

    p: float
    q: float

    def __post_init__(self):
        object.__setattr__(self, "p", boundary_point(self.p))
        object.__setattr__(self, "q", boundary_point(self.q))
        if same_point(self.p, self.q, 0.0):
            raise GeometryError("geodesic endpoints must be distinct")

    def reversed(self) -> "Geodesic":
        return Geodesic(self.q, self.p)


@dataclass(frozen=True)
class MobiusMap:
    """z -> (a z + b) / (c z + d), stored with determinant 1."""

    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        det = self.a * self.d - self.b * self.c
        if not det > 0:
            raise GeometryError(f"Mobius map needs ad - bc > 0, got {det}")
        s = math.sqrt(det)
        if s != 1.0:
            for name in "abcd":
                object.__setattr__(self, name, getattr(self, name) / s)

    @classmethod
    def identity(cls) -> "MobiusMap":
        return cls(1.0, 0.0, 0.0, 1.0)

    def __matmul__(self, other: "MobiusMap") -> "MobiusMap":
        """Composition: ``(self @ other)(z) == self(other(z))``."""
        return MobiusMap(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def inverse(self) -> "MobiusMap":
        return MobiusMap(self.d, -self.b, -self.c, self.a)

    def __call__(self, p):
        if isinstance(p, PointH2):
            return apply_interior(self, p)
        if isinstance(p, Geodesic):
            return Geodesic(apply_mobius(self, p.p), apply_mobius(self, p.q))
        return apply_mobius(self, p)


def apply_mobius(m: MobiusMap, p) -> float:
    """Action on a boundary point; the pole goes to INF, INF goes to a/c."""
    p = boundary_point(p)
    if is_inf(p):
        return INF if m.c == 0 else m.a / m.c
    den = m.c * p + m.d
    if den == 0:
        return INF
    return (m.a * p + m.b) / den


def apply_interior(m: MobiusMap, z: PointH2) -> PointH2:
    w = (m.a * z.z + m.b) / (m.c * z.z + m.d)
    return PointH2(w.real, w.imag)


def mobius_to_standard_triple(v1, v2, v3):
    """Map sending ``(v1, v2, v3)`` to ``(0, 1, INF)``.

    Returns ``(m, targets)`` where ``targets`` are the images of
    ``(v1, v2, v3)``.  A negatively oriented triple cannot be sent to
    ``(0, 1, INF)`` by a map of positive determinant, so in that case the
    first two targets are exchanged and ``targets == (1, 0, INF)``; the
    vertex set ``{0, 1, INF}`` is preserved either way.
    """
    v1, v2, v3 = (boundary_point(v) for v in (v1, v2, v3))
    for p, q in ((v1, v2), (v2, v3), (v1, v3)):
        if same_point(p, q, 0.0):
            raise GeometryError("degenerate triple: repeated vertex")
    coeffs = _cross_ratio_coeffs(v1, v2, v3)
    targets = (0.0, 1.0, INF)
    if coeffs[0] * coeffs[3] - coeffs[1] * coeffs[2] < 0:
        coeffs = _cross_ratio_coeffs(v2, v1, v3)
        targets = (1.0, 0.0, INF)
    return MobiusMap(*coeffs), targets


def _cross_ratio_coeffs(v1, v2, v3):
    # z -> (z - v1)(v2 - v3) / ((z - v3)(v2 - v1)), with the factor
    # containing an infinite vertex dropped
    if is_inf(v1):
        return (0.0, v2 - v3, 1.0, -v3)
    if is_inf(v2):
        return (1.0, -v1, 1.0, -v3)
    if is_inf(v3):
        return (1.0, -v1, 0.0, v2 - v1)
    return (v2 - v3, -v1 * (v2 - v3), v2 - v1, -v3 * (v2 - v1))


def _angle(p) -> float:
    """Boundary point -> angle in (-pi, pi], INF -> pi."""
    return math.pi if is_inf(p) else 2.0 * math.atan(p)


def _arc(a, b):
    """Counter-clockwise arc from a to b as (start, length) in angle space."""
    t0 = _angle(a)
    length = (_angle(b) - t0) % (2 * math.pi)
    return t0, length


def _in_arc(t, arc) -> bool:
    t0, length = arc
    return (t - t0) % (2 * math.pi) <= length


def liouville_box_mass(a, b, c, d) -> float:
    """Liouville mass of the box of geodesics with endpoints in [a,b] x [c,d].

    Intervals are arcs of the boundary circle traversed in the positive
    direction, so ``[3, -2]`` is the arc through INF.
    """
    a, b, c, d = (boundary_point(v) for v in (a, b, c, d))
    if same_point(a, b, 0.0) or same_point(c, d, 0.0):
        return 0.0
    first, second = _arc(a, b), _arc(c, d)
    if (_in_arc(_angle(c), first) or _in_arc(_angle(d), first)
            or _in_arc(_angle(a), second) or _in_arc(_angle(b), second)):
        raise GeometryError("box intervals overlap")
    num = [(a, c), (b, d)]
    den = [(a, d), (b, c)]
    # an infinite endpoint occurs once upstairs and once downstairs
    value = 1.0
    for p, q in num:
        if not (is_inf(p) or is_inf(q)):
            value *= p - q
    for p, q in den:
        if not (is_inf(p) or is_inf(q)):
            value /= p - q
    return abs(math.log(abs(value)))


def hyp_distance(p: PointH2, q: PointH2) -> float:
    # 2 asinh form of arccosh(1 + |p-q|^2 / (2 y_p y_q)); no cancellation near 0
    return 2.0 * math.asinh(abs(p.z - q.z) / (2.0 * math.sqrt(p.y * q.y)))


#: |cos theta| below this counts as a vertical direction (cos(pi/2) ~ 6e-17)
VERTICAL_TOL = 1e-15


def _tangent_endpoints(x0, y0, theta):
    s, c = math.sin(theta), math.cos(theta)
    if abs(c) <= VERTICAL_TOL:
        c = 0.0
    # forward end x0 + y0 (1 + s)/c, backward end x0 - y0 (1 - s)/c,
    # each written in whichever of two equivalent forms avoids cancellation
    if s >= 0:
        fwd = INF if c == 0 else x0 + y0 * (1 + s) / c
        back = x0 - y0 * c / (1 + s)
    else:
        fwd = x0 + y0 * c / (1 - s)
        back = INF if c == 0 else x0 - y0 * (1 - s) / c
    return back, fwd


def geodesic_from_tangent(v: UnitTangent) -> Geodesic:
    """Oriented geodesic through ``v.base`` in direction ``v.theta``."""
    back, fwd = _tangent_endpoints(v.base.x, v.base.y, v.theta)
    return Geodesic(back, fwd)


def tangent_angle(g: Geodesic, z: PointH2) -> float:
    """Direction angle of ``g`` at a point ``z`` lying on it, in [0, 2 pi)."""
    if is_inf(g.q):
        return math.pi / 2
    if is_inf(g.p):
        return 3 * math.pi / 2
    center = 0.5 * (g.p + g.q)
    # clockwise normal of the radius vector; reversed for right-to-left geodesics
    dx, dy = z.y, center - z.x
    if g.q < g.p:
        dx, dy = -dx, -dy
    return math.atan2(dy, dx) % (2 * math.pi)


def geodesic_center_radius(g: Geodesic):
    """Euclidean center and radius of a non-vertical geodesic."""
    if is_inf(g.p) or is_inf(g.q):
        raise GeometryError("vertical geodesic has no finite center")
    return 0.5 * (g.p + g.q), 0.5 * abs(g.q - g.p)


def random_mobius(rng, scale: float = 2.0) -> MobiusMap:
    """Random orientation-preserving map, for property tests."""
    while True:
        a, b, c, d = rng.normal(0.0, scale, size=4)
        if a * d - b * c > 0.1:
            return MobiusMap(float(a), float(b), float(c), float(d))


__all__ = [
    "INF", "BOUNDARY_TOL", "GeometryError", "PointH2", "UnitTangent", "Geodesic",
    "MobiusMap", "apply_mobius", "apply_interior", "mobius_to_standard_triple",
    "liouville_box_mass", "hyp_distance", "geodesic_from_tangent", "tangent_angle",
    "geodesic_center_radius", "boundary_point", "same_point", "is_inf", "random_mobius",
]
