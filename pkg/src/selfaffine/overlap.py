"""Exact overlaps, the Bandt residue criterion, and the two-branch classification."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Union

from .errors import BudgetExceeded, StateBudgetExceeded
from .intlinalg import CosetLabel, coset_label, inverse_power_tail, mat_vec
from .system import (
    AffineMap,
    AffineSystem,
    Conjugacy,
    Word,
    compose_word,
    digit_sums,
    normalize,
)

DEFAULT_STATE_BUDGET = 2_000_000


@dataclass(frozen=True)
class OverlapCertificate:
    depth: int
    word_a: Word
    word_b: Word
    map: AffineMap

    kind = "overlap"

    def verify(self, sys: AffineSystem) -> bool:
        return (
            len(self.word_a) == len(self.word_b) == self.depth
            and self.word_a != self.word_b
            and compose_word(sys, self.word_a) == self.map
            and compose_word(sys, self.word_b) == self.map
        )


@dataclass(frozen=True)
class OSCCertificate:
    """``A^{m0} u_j`` are integral and lie in pairwise distinct cosets of ``A Z^d``."""

    m0: int
    labels: tuple[CosetLabel, ...]

    kind = "osc"

    def verify(self, sys: AffineSystem) -> bool:
        vecs = _scaled_to(sys, self.m0)
        if vecs is None:
            return False
        labels = tuple(coset_label(v, sys.matrix) for v in vecs)
        return labels == self.labels and len(set(labels)) == len(labels)


@dataclass(frozen=True)
class NoOverlapProof:
    """Every reachable difference state of max-norm at most ``state_bound``
    was explored without reaching 0."""

    state_bound: Fraction
    explored_states: int
    reached_zero: bool = False

    kind = "no_overlap"


Certificate = Union[OverlapCertificate, OSCCertificate, NoOverlapProof]


def _scaled_to(sys: AffineSystem, m0: int):
    """Integer vectors ``A^{m0} u_j``, or None if some is not integral."""
    m = sys.matrix
    out = []
    for u in sys.digits:
        k = m0 - u.scale
        if k >= 0:
            out.append(mat_vec(m.power(k), u.vec))
        else:
            v = u.vec
            for _ in range(-k):
                if not m.divides(v):
                    return None
                v = m.divide(v)
            out.append(v)
    return out


def _overlap_from_words(sys: AffineSystem, a: Word, b: Word) -> OverlapCertificate:
    f = compose_word(sys, a)
    cert = OverlapCertificate(len(a), a, b, f)
    if not cert.verify(sys):
        raise AssertionError(f"decoded words {a} and {b} do not compose to the same map")
    return cert


def find_overlap_up_to(
    sys: AffineSystem, n_max: int, budget: int = 10**7
) -> OverlapCertificate | None:
    """Depth-minimal overlap among depths ``<= n_max`` by brute-force digit sums.

    A repeated sum for sum-words ``p, q`` is an overlap for the reversed words.
    """
    for n in range(1, n_max + 1):
        hit = digit_sums(sys, n, budget).first_collision()
        if hit is not None:
            p, q = hit
            return _overlap_from_words(sys, p.reversed(), q.reversed())
    return None


def _norm(v) -> int:
    return max(abs(x) for x in v)


def decide_overlaps(
    sys: AffineSystem, state_budget: int = DEFAULT_STATE_BUDGET
) -> OverlapCertificate | NoOverlapProof:
    """Complete decision by search on the difference graph.

    States are integer vectors; starts are nonzero digit differences and the
    moves are ``z -> A z + e`` for ``e`` a digit difference or 0.  An overlap
    exists iff 0 is reachable.  Any state on a path to 0 has max-norm at most
    ``max|e| * tail(A, 1)``, so the search is finite.
    """
    if not sys.normalized:
        raise ValueError("decide_overlaps needs a normalized system")
    digits = sys.integer_digits()
    n = len(digits)
    if len(set(digits)) < n:
        return find_overlap_up_to(sys, 1)

    pairs: dict[tuple[int, ...], tuple[int, int]] = {}
    for j in range(n):
        for k in range(n):
            e = tuple(a - b for a, b in zip(digits[j], digits[k]))
            pairs.setdefault(e, (j + 1, k + 1))
    moves = sorted(pairs, key=lambda e: (_norm(e), e))
    bound = max(_norm(e) for e in moves) * inverse_power_tail(sys.matrix, 1)
    a = sys.matrix.entries

    # parent[z] = (previous state, move that produced z)
    parent: dict[tuple[int, ...], tuple] = {}
    frontier = [e for e in moves if any(e) and _norm(e) <= bound]
    for e in frontier:
        parent[e] = (None, e)

    def decode(z, last):
        path = [last]
        while z is not None:
            z, e = parent[z]
            path.append(e)
        path.reverse()
        wa = Word(tuple(pairs[e][0] for e in path))
        wb = Word(tuple(pairs[e][1] for e in path))
        return _overlap_from_words(sys, wa, wb)

    while frontier:
        nxt = []
        for z in frontier:
            az = mat_vec(a, z)
            for e in moves:
                y = tuple(p + q for p, q in zip(az, e))
                if not any(y):
                    return decode(z, e)
                if y not in parent and _norm(y) <= bound:
                    parent[y] = (z, e)
                    nxt.append(y)
            if len(parent) > state_budget:
                raise StateBudgetExceeded(
                    f"difference search exceeded {state_budget} states (bound {bound})",
                    state_bound=bound,
                    explored=len(parent),
                )
        frontier = sorted(nxt, key=lambda z: (_norm(z), z))
    return NoOverlapProof(bound, len(parent))


def bandt_criterion(sys: AffineSystem) -> OSCCertificate | None:
    """Pairwise-distinct cosets of ``A^{m0} u_j`` modulo ``A Z^d``.

    Only the least ``m0`` making every ``A^{m0} u_j`` integral can work: one
    step further puts every vector in ``A Z^d``.  For canonical digits that is
    the largest digit scale, or lower when all digits share a factor of A.
    """
    m = sys.matrix
    m0 = sys.max_scale
    vecs = _scaled_to(sys, m0)
    while m0 <= 0:
        if not any(any(v) for v in vecs) or not all(m.divides(v) for v in vecs):
            break
        vecs = [m.divide(v) for v in vecs]
        m0 -= 1
    labels = tuple(coset_label(v, m) for v in vecs)
    if len(set(labels)) != len(labels):
        return None
    return OSCCertificate(m0, labels)


@dataclass
class ClassificationReport:
    """Outcome of :func:`classify`.

    ``branch`` is ``"osc"`` (tile, open set condition) or ``"overlap"``
    (exact overlaps, singular measure), or None when a budget ran out.
    """

    system: AffineSystem
    normalized: AffineSystem
    conjugacy: Conjugacy
    branch: str | None
    certificates: list = field(default_factory=list)
    estimates: dict = field(default_factory=dict)
    error: str | None = None

    @property
    def status(self) -> str:
        return "inconclusive" if self.branch is None else "definitive"


def classify(sys: AffineSystem, state_budget: int = DEFAULT_STATE_BUDGET) -> ClassificationReport:
    norm, conj = normalize(sys)
    cert = bandt_criterion(sys)
    if cert is not None:
        return ClassificationReport(sys, norm, conj, "osc", [cert])
    try:
        result = decide_overlaps(norm, state_budget)
    except BudgetExceeded as exc:
        return ClassificationReport(sys, norm, conj, None, [], error=f"{exc.code}: {exc}")
    branch = "overlap" if isinstance(result, OverlapCertificate) else "osc"
    return ClassificationReport(sys, norm, conj, branch, [result])
