"""Chord-length distributions of geodesics crossing ideal triangles.

Closed-form distributions (``closedform``), exact chord lengths in the
standard ideal triangle (``triangle``), seeded samplers (``sampling``),
Farey-tessellation traces (``farey``) and the experiment harness
(``experiments``, ``cli``).
"""

from .closedform import M, M_T, P, antiderivative_F, density, expected_chord, moment_P, polylog, survival, \
    zeta_int
from .farey import closed_geodesic_from_matrix, locate_start, periodic_trace, trace, word_matrix
from .hypcore import INF, Geodesic, MobiusMap, PointH2, UnitTangent, geodesic_from_tangent, hyp_distance
from .quadrature import quad_oracle
from .sampling import RandomStream, chord_of_tangent, sample_liouville_window, sample_tangent_in_triangle
from .triangle import IdealTriangle, Sector, chord_length, chord_length_standard, classify

__version__ = "0.1.0"
