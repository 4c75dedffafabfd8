"""Named example systems used by tests, scripts and the README."""
from __future__ import annotations

from .intlinalg import certify_expanding
from .system import AffineSystem, build_system

TRIADIC = ((3,),)
FIVEFOLD = ((1, -2), (2, 1))

FIG1_OSC_DIGITS = ((-1, -1), (-1, 0), (0, 0), (1, 0), (1, 1))
# same digits with the second coordinate negated
FIG1_OVERLAP_DIGITS = tuple((a, -b) for a, b in FIG1_OSC_DIGITS)


def f1() -> AffineSystem:
    """A = 3, digits 0, 1, 2: the interval [0, 3]."""
    return build_system(certify_expanding(TRIADIC), [(0,), (1,), (2,)])


def f2() -> AffineSystem:
    """A = 3, digits 0, 1, 3: overlaps at depth 2."""
    return build_system(certify_expanding(TRIADIC), [(0,), (1,), (3,)])


def fig1_osc() -> AffineSystem:
    return build_system(certify_expanding(FIVEFOLD), FIG1_OSC_DIGITS)


def fig1_overlap() -> AffineSystem:
    return build_system(certify_expanding(FIVEFOLD), FIG1_OVERLAP_DIGITS)


def all_zero(matrix=TRIADIC) -> AffineSystem:
    m = certify_expanding(matrix)
    return build_system(m, [(0,) * m.dim] * m.det_abs)


NAMED = {"f1": f1, "f2": f2, "fig1_osc": fig1_osc, "fig1_overlap": fig1_overlap}
