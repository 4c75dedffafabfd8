"""Homogeneous affine systems ``T_j x = A^{-1} x + u_j`` and their digit sums."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import BudgetExceeded, WrongDigitCount
from .intlinalg import ExpandingMatrix, IntVector, RatMatrix, mat_vec

DEFAULT_SUM_BUDGET = 10**7

RatVector = tuple[Fraction, ...]


@dataclass(frozen=True, order=True)
class ScaledVector:
    """The point ``A^{-scale} vec``.  Use :func:`canonical` to build one."""

    scale: int
    vec: IntVector

    def value(self, m: ExpandingMatrix) -> RatVector:
        return m.apply_inverse_power(self.scale, self.vec)


def canonical(m: ExpandingMatrix, vec: Sequence[int], scale: int = 0) -> ScaledVector:
    """Minimal-scale form: divide by ``A`` while the result stays integral."""
    if scale < 0:
        raise ValueError("scale must be nonnegative")
    v = tuple(int(x) for x in vec)
    if len(v) != m.dim:
        raise ValueError(f"vector {v} has wrong dimension for d={m.dim}")
    while scale > 0 and m.divides(v):
        v = m.divide(v)
        scale -= 1
    if not any(v):
        scale = 0
    return ScaledVector(scale, v)


@dataclass(frozen=True)
class AffineMap:
    """``x -> linear @ x + translation`` with exact rational data."""

    linear: RatMatrix
    translation: RatVector

    def __call__(self, x: Sequence) -> RatVector:
        return tuple(a + b for a, b in zip(mat_vec(self.linear, x), self.translation))


@dataclass(frozen=True)
class AffineSystem:
    matrix: ExpandingMatrix
    digits: tuple[ScaledVector, ...]

    @property
    def n_maps(self) -> int:
        return len(self.digits)

    @property
    def dim(self) -> int:
        return self.matrix.dim

    @property
    def max_scale(self) -> int:
        return max(u.scale for u in self.digits)

    @property
    def normalized(self) -> bool:
        return all(u.scale == 0 for u in self.digits) and not any(self.digits[0].vec)

    def digit_values(self) -> list[RatVector]:
        return [u.value(self.matrix) for u in self.digits]

    def integer_digits(self) -> list[IntVector]:
        if any(u.scale for u in self.digits):
            raise ValueError("system has non-integer digits; normalize it first")
        return [u.vec for u in self.digits]

    def map(self, j: int) -> AffineMap:
        """``T_j`` with 1-based ``j``."""
        return compose_word(self, Word((j,)))


def build_system(
    matrix: ExpandingMatrix, digits: Iterable[ScaledVector | Sequence[int]]
) -> AffineSystem:
    """Validate and canonicalize.  Duplicate digits are legal."""
    canon = []
    for u in digits:
        if isinstance(u, ScaledVector):
            canon.append(canonical(matrix, u.vec, u.scale))
        else:
            canon.append(canonical(matrix, u))
    if len(canon) != matrix.det_abs:
        raise WrongDigitCount(
            f"expected N = |det A| = {matrix.det_abs} digits, got {len(canon)}"
        )
    return AffineSystem(matrix, tuple(canon))


@dataclass(frozen=True)
class Word:
    """Letters in ``1..N``, applied left to right as ``T_{j1} ... T_{jn}``."""

    letters: tuple[int, ...]

    def __post_init__(self):
        if not self.letters:
            raise ValueError("words are nonempty")

    def __len__(self) -> int:
        return len(self.letters)

    def reversed(self) -> "Word":
        return Word(self.letters[::-1])

    def check(self, n_maps: int) -> None:
        if not all(1 <= j <= n_maps for j in self.letters):
            raise ValueError(f"letters of {self.letters} must lie in 1..{n_maps}")


def compose_word(sys: AffineSystem, word: Word | Sequence[int]) -> AffineMap:
    """``T_{j1}...T_{jn} x = A^{-n} x + sum_r A^{1-r} u_{jr}``."""
    if not isinstance(word, Word):
        word = Word(tuple(word))
    word.check(sys.n_maps)
    m = sys.matrix
    total = [Fraction(0)] * sys.dim
    for r, j in enumerate(word.letters):
        u = sys.digits[j - 1]
        for i, x in enumerate(m.apply_inverse_power(r + u.scale, u.vec)):
            total[i] += x
    return AffineMap(m.inv_power(len(word)), tuple(total))


@dataclass(frozen=True)
class Conjugacy:
    """The coordinate change ``x -> A^power x + shift``.

    Conjugating each map of the original system by it gives the matching map
    of the normalized system.
    """

    power: int
    shift: RatVector

    def __call__(self, m: ExpandingMatrix, x: Sequence) -> RatVector:
        return tuple(a + b for a, b in zip(mat_vec(m.power(self.power), x), self.shift))

    def transport(self, m: ExpandingMatrix, f: AffineMap) -> AffineMap:
        """``phi o f o phi^{-1}`` for a map ``f`` whose linear part is a power of A^{-1}."""
        moved = mat_vec(m.power(self.power), f.translation)
        drift = mat_vec(f.linear, self.shift)
        return AffineMap(
            f.linear, tuple(a + s - b for a, s, b in zip(moved, self.shift, drift))
        )


def _solve(a: Sequence[Sequence], b: Sequence) -> RatVector:
    """Gauss-Jordan over the rationals for a nonsingular square system."""
    n = len(a)
    rows = [[Fraction(x) for x in row] + [Fraction(y)] for row, y in zip(a, b)]
    for c in range(n):
        p = next(i for i in range(c, n) if rows[i][c] != 0)
        rows[c], rows[p] = rows[p], rows[c]
        piv = rows[c][c]
        rows[c] = [x / piv for x in rows[c]]
        for i in range(n):
            if i != c and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[c])]
    return tuple(row[n] for row in rows)


def normalize(sys: AffineSystem) -> tuple[AffineSystem, Conjugacy]:
    """Conjugate to integer digits with ``u_1 = 0``.

    Scale by ``A^m`` (``m`` the largest digit scale), then translate so the
    fixed point of the first map moves to the origin.
    """
    m = sys.matrix
    power = sys.max_scale
    scaled = [
        mat_vec(m.power(power - u.scale), u.vec) for u in sys.digits
    ]
    base = scaled[0]
    digits = [tuple(x - y for x, y in zip(v, base)) for v in scaled]
    if any(base):
        # (I - A^{-1}) shift = -A^power u_1, multiplied through by A
        a_minus_i = [
            [x - (i == j) for j, x in enumerate(row)] for i, row in enumerate(m.entries)
        ]
        shift = _solve(a_minus_i, mat_vec(m.entries, tuple(-x for x in base)))
    else:
        shift = tuple(Fraction(0) for _ in base)
    out = AffineSystem(m, tuple(ScaledVector(0, v) for v in digits))
    return out, Conjugacy(power, shift)


@dataclass
class DigitSumSet:
    """All ``N^n`` sums ``sum_t A^t u_{j_{t+1}}`` in lexicographic word order.

    Row ``i`` of ``sums`` belongs to the word whose base-N expansion of ``i``
    (most significant letter first) gives ``j_1 ... j_n`` minus one.
    """

    depth: int
    n_maps: int
    sums: np.ndarray
    first_index: np.ndarray
    inverse: np.ndarray

    @property
    def distinct_count(self) -> int:
        return len(self.first_index)

    def word(self, index: int) -> Word:
        letters = []
        for _ in range(self.depth):
            index, r = divmod(index, self.n_maps)
            letters.append(r + 1)
        return Word(tuple(letters[::-1]))

    def distinct(self) -> set[tuple[int, ...]]:
        return {tuple(int(x) for x in row) for row in self.sums[self.first_index]}

    def witness(self, value: Sequence[int]) -> Word | None:
        """First word (lexicographically) whose sum equals ``value``."""
        hits = np.nonzero((self.sums == np.asarray(value, dtype=self.sums.dtype)).all(axis=1))[0]
        return self.word(int(hits[0])) if len(hits) else None

    def first_collision(self) -> tuple[Word, Word] | None:
        """``(first witness, colliding word)`` for the earliest repeated sum."""
        repeats = np.nonzero(self.first_index[self.inverse] != np.arange(len(self.inverse)))[0]
        if not len(repeats):
            return None
        i = int(repeats[0])
        return self.word(int(self.first_index[self.inverse[i]])), self.word(i)


def _needs_bigint(digits: list[IntVector], m: ExpandingMatrix, n: int) -> bool:
    bound = max((max(map(abs, v)) for v in digits), default=0)
    row = max(sum(abs(x) for x in r) for r in m.entries)
    return n * bound * max(row, 1) ** n >= 2**62


def digit_sums(sys: AffineSystem, n: int, budget: int = DEFAULT_SUM_BUDGET) -> DigitSumSet:
    if n < 1:
        raise ValueError("depth must be at least 1")
    if not sys.normalized:
        raise ValueError("digit_sums needs a normalized system")
    big = sys.n_maps**n
    if big > budget:
        raise BudgetExceeded(f"N^n = {big} sums exceeds the budget {budget}")
    m = sys.matrix
    digits = sys.integer_digits()
    dtype = object if _needs_bigint(digits, m, n) else np.int64
    sums = np.zeros((1, sys.dim), dtype=dtype)
    for t in range(n):
        step = np.array([mat_vec(m.power(t), v) for v in digits], dtype=dtype)
        sums = (sums[:, None, :] + step[None, :, :]).reshape(-1, sys.dim)
    if dtype is object:
        seen: dict = {}
        inverse = np.empty(len(sums), dtype=np.int64)
        firsts = []
        for i, row in enumerate(map(tuple, sums)):
            if row not in seen:
                seen[row] = len(firsts)
                firsts.append(i)
            inverse[i] = seen[row]
        first_index = np.array(firsts, dtype=np.int64)
    else:
        _, first_index, inverse = np.unique(
            sums, axis=0, return_index=True, return_inverse=True
        )
        inverse = inverse.reshape(-1)
        # relabel unique ids in order of first appearance
        order = np.argsort(first_index, kind="stable")
        rank = np.empty_like(order)
        rank[order] = np.arange(len(order))
        first_index = first_index[order]
        inverse = rank[inverse]
    return DigitSumSet(n, sys.n_maps, sums, first_index, inverse)
