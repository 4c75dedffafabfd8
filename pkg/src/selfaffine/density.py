"""Constructive density: systems of either branch near any target tuple.

Targets are real vectors.  They are converted to exact rationals, so all
distances below are computed exactly and compared against ``epsilon`` exactly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Sequence

from .errors import Inconclusive, SearchExhausted, ValidationError
from .fourier import SingularityCertificate, v_w_membership
from .intlinalg import ExpandingMatrix, coset_label, mat_vec
from .overlap import OSCCertificate, bandt_criterion
from .system import AffineSystem, ScaledVector, build_system


@dataclass(frozen=True)
class TargetTuple:
    vectors: tuple[tuple[float, ...], ...]
    epsilon: float

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValidationError("epsilon must be positive")
        dims = {len(v) for v in self.vectors}
        if len(dims) != 1:
            raise ValidationError("target vectors must share one dimension")

    @property
    def dim(self) -> int:
        return len(self.vectors[0])

    def check(self, m: ExpandingMatrix) -> None:
        if len(self.vectors) != m.det_abs:
            raise ValidationError(f"need N = {m.det_abs} target vectors, got {len(self.vectors)}")
        if self.dim != m.dim:
            raise ValidationError(f"targets have dimension {self.dim}, matrix has {m.dim}")


def _exact(v: Sequence[float]) -> tuple[Fraction, ...]:
    return tuple(Fraction(x) for x in v)


def _frobenius_sq(rows) -> Fraction:
    return sum((x * x for row in rows for x in row), Fraction(0))


def _candidates(m: ExpandingMatrix, scale: int, target, radius: int):
    """Integer ``w`` near ``A^scale target``, sorted by (exact distance of
    ``A^{-scale} w`` to the target, then lexicographic ``w``)."""
    centre = mat_vec(m.power(scale), target)
    base = [math.floor(c) for c in centre]
    out = []
    for off in product(range(-radius, radius + 2), repeat=m.dim):
        w = tuple(b + o for b, o in zip(base, off))
        u = m.apply_inverse_power(scale, w)
        out.append((sum(((a - b) ** 2 for a, b in zip(u, target)), Fraction(0)), w))
    out.sort()
    return out


def _density_radius(m: ExpandingMatrix) -> int:
    """Half-width covering a Euclidean ball in which every coset of A Z^d has a point."""
    op = math.sqrt(float(_frobenius_sq(m.entries)))
    return math.ceil(op * math.sqrt(m.dim) / 2) + 1


def _system(m: ExpandingMatrix, scale: int, ws) -> AffineSystem:
    return build_system(m, [ScaledVector(scale, w) for w in ws])


def osc_near(
    m: ExpandingMatrix, target: TargetTuple
) -> tuple[AffineSystem, OSCCertificate, float]:
    """A Bandt-certified system within ``epsilon`` of the targets.

    Scales are tried from 0 upwards.  At each scale every target picks, in
    turn, its nearest lattice point whose coset is still unused.  The scan
    stops at the first scale within tolerance; it must stop by the scale where
    ``(||A|| sqrt(d)/2) ||A^{-s}|| < epsilon``.
    """
    target.check(m)
    eps_sq = Fraction(target.epsilon) ** 2
    vs = [_exact(v) for v in target.vectors]
    radius = _density_radius(m)
    reach_sq = Fraction(radius - 1) ** 2
    scale = 0
    while True:
        used, ws, worst = set(), [], Fraction(0)
        for v in vs:
            for dist, w in _candidates(m, scale, v, radius):
                lab = coset_label(w, m)
                if lab not in used:
                    used.add(lab)
                    ws.append(w)
                    worst = max(worst, dist)
                    break
        if len(ws) == len(vs) and worst <= eps_sq:
            sys = _system(m, scale, ws)
            cert = bandt_criterion(sys)
            if cert is None:
                raise AssertionError("greedy choice produced colliding cosets")
            return sys, cert, math.sqrt(worst)
        if reach_sq * _frobenius_sq(m.inv_power(scale)) < eps_sq:
            raise AssertionError("density bound reached without a certified system")
        scale += 1


def _nearest_scale(m: ExpandingMatrix, vs, bound_sq: Fraction):
    """Least scale where every target has a lattice point within the bound."""
    scale = 0
    while True:
        picks = [_candidates(m, scale, v, 1)[0] for v in vs]
        if all(d <= bound_sq for d, _ in picks):
            return scale, [w for _, w in picks], [d for d, _ in picks]
        scale += 1


def singular_near(
    m: ExpandingMatrix,
    target: TargetTuple,
    w: Sequence[int],
    budget: int = 5000,
    perturb_all: bool = False,
) -> tuple[AffineSystem, SingularityCertificate, float]:
    """A system with ``S_n(w) != 0`` for all ``n`` within ``epsilon`` of the targets.

    All digits are first approximated within ``epsilon/2`` at a common scale.
    Then the last digit alone is moved through lattice points within
    ``epsilon`` of its target, by increasing scale and then (distance,
    lexicographic) order, until the character-sum window check passes.  With
    ``perturb_all`` the other digits are tried the same way afterwards.
    """
    target.check(m)
    w = tuple(int(x) for x in w)
    if not any(w):
        raise ValueError("w must be nonzero")
    eps = Fraction(target.epsilon)
    vs = [_exact(v) for v in target.vectors]
    base_scale, base, errs = _nearest_scale(m, vs, (eps / 2) ** 2)
    order = [len(vs) - 1] + (list(range(len(vs) - 2, -1, -1)) if perturb_all else [])
    scanned = 0
    for j in order:
        others = max((d for i, d in enumerate(errs) if i != j), default=Fraction(0))
        for scale in range(base_scale, base_scale + 65):
            # fixed digits re-expressed at this scale
            fixed = [mat_vec(m.power(scale - base_scale), b) for b in base]
            reach = math.ceil(math.sqrt(float(_frobenius_sq(m.power(scale)))) * float(eps)) + 1
            for dist, cand in _candidates(m, scale, vs[j], reach):
                if dist > eps * eps:
                    break
                if scale > base_scale and m.divides(cand):
                    continue  # already tried at a coarser scale
                scanned += 1
                if scanned > budget:
                    raise SearchExhausted(
                        f"no certified system among {budget} candidates", scanned=budget
                    )
                ws = list(fixed)
                ws[j] = cand
                sys = _system(m, scale, ws)
                try:
                    res = v_w_membership(sys, w)
                except Inconclusive:
                    continue
                if isinstance(res, SingularityCertificate):
                    return sys, res, math.sqrt(max(others, dist))
    raise SearchExhausted(f"no certified system after {scanned} candidates", scanned=scanned)
