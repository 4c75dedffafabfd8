"""Exact integer and rational linear algebra for expanding integer matrices.

Matrices are tuples of row tuples.  Integer matrices hold ``int``; rational
ones hold :class:`fractions.Fraction`.  No floating point is used here.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Sequence

from .errors import DeterminantTooSmall, NotCertifiedExpanding, NotInvertible

IntMatrix = tuple[tuple[int, ...], ...]
RatMatrix = tuple[tuple[Fraction, ...], ...]
IntVector = tuple[int, ...]

HALF = Fraction(1, 2)


def as_int_matrix(rows: Sequence[Sequence[int]]) -> IntMatrix:
    out = tuple(tuple(int(x) for x in row) for row in rows)
    if not out or any(len(row) != len(out) for row in out):
        raise ValueError("matrix must be square and nonempty")
    return out


def identity(d: int) -> IntMatrix:
    return tuple(tuple(int(i == j) for j in range(d)) for i in range(d))


def mat_mul(a, b):
    cols = list(zip(*b))
    return tuple(tuple(sum(x * y for x, y in zip(row, col)) for col in cols) for row in a)


def mat_vec(a, v):
    return tuple(sum(x * y for x, y in zip(row, v)) for row in a)


def transpose(a):
    return tuple(zip(*a))


def max_norm(a) -> Fraction:
    """Entrywise max-norm."""
    return max(abs(x) for row in a for x in row)


def row_sum_norm(a) -> Fraction:
    """Operator norm induced by the sup norm on vectors (max absolute row sum)."""
    return max(sum(abs(x) for x in row) for row in a)


def determinant(a: IntMatrix) -> int:
    """Bareiss fraction-free elimination."""
    m = [list(row) for row in a]
    n = len(m)
    sign, prev = 1, 1
    for k in range(n - 1):
        if m[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if m[i][k] != 0), None)
            if swap is None:
                return 0
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def adjugate(a: IntMatrix) -> IntMatrix:
    """Integer adjugate, so that ``a @ adj == det * I``."""
    n = len(a)
    if n == 1:
        return ((1,),)
    cof = []
    for i in range(n):
        row = []
        for j in range(n):
            minor = tuple(
                tuple(a[r][c] for c in range(n) if c != j) for r in range(n) if r != i
            )
            row.append((-1) ** (i + j) * determinant(minor))
        cof.append(tuple(row))
    return transpose(tuple(cof))


def int_power(a: IntMatrix, k: int) -> IntMatrix:
    result = identity(len(a))
    base = a
    while k:
        if k & 1:
            result = mat_mul(result, base)
        base = mat_mul(base, base)
        k >>= 1
    return result


@dataclass(frozen=True)
class SmithData:
    """``U @ A @ V == S`` with ``S`` diagonal, positive, and ``s_i | s_{i+1}``."""

    U: IntMatrix
    S: IntMatrix
    V: IntMatrix

    @property
    def diagonal(self) -> IntVector:
        return tuple(self.S[i][i] for i in range(len(self.S)))


@dataclass(frozen=True)
class ExpandingMatrix:
    """An integer matrix certified expanding by decay of exact inverse powers.

    Build instances with :func:`certify_expanding`.  ``A^{-k}`` is held as
    ``adj^k / det^k`` so that rational powers stay integer pairs.
    """

    entries: IntMatrix
    det: int
    adj: IntMatrix
    expansion_index: int
    _cache: dict = field(default_factory=dict, repr=False, compare=False, hash=False)

    @property
    def dim(self) -> int:
        return len(self.entries)

    @property
    def det_abs(self) -> int:
        return abs(self.det)

    @property
    def inv(self) -> RatMatrix:
        return self.inv_power(1)

    def power(self, k: int) -> IntMatrix:
        """``A^k`` for ``k >= 0``."""
        key = ("pow", k)
        if key not in self._cache:
            self._cache[key] = int_power(self.entries, k)
        return self._cache[key]

    def adj_power(self, k: int) -> IntMatrix:
        key = ("adj", k)
        if key not in self._cache:
            self._cache[key] = int_power(self.adj, k)
        return self._cache[key]

    def inv_power(self, k: int) -> RatMatrix:
        """``A^{-k}`` as exact rationals."""
        key = ("inv", k)
        if key not in self._cache:
            den = self.det**k
            self._cache[key] = tuple(
                tuple(Fraction(x, den) for x in row) for row in self.adj_power(k)
            )
        return self._cache[key]

    def inv_norm(self, k: int) -> Fraction:
        """Row-sum norm of ``A^{-k}``; dominates the entrywise max-norm."""
        key = ("invnorm", k)
        if key not in self._cache:
            num = max(sum(abs(x) for x in row) for row in self.adj_power(k))
            self._cache[key] = Fraction(num, abs(self.det) ** k)
        return self._cache[key]

    def apply_inverse_power(self, k: int, v: Sequence[int]) -> tuple[Fraction, ...]:
        """``A^{-k} v`` for integer ``v``."""
        den = self.det**k
        return tuple(Fraction(x, den) for x in mat_vec(self.adj_power(k), v))

    def divides(self, v: Sequence[int]) -> bool:
        """Whether ``A^{-1} v`` is an integer vector."""
        return all(x % self.det == 0 for x in mat_vec(self.adj, v))

    def divide(self, v: Sequence[int]) -> IntVector:
        """``A^{-1} v``; caller guarantees integrality."""
        return tuple(x // self.det for x in mat_vec(self.adj, v))

    @property
    def smith(self) -> SmithData:
        if "smith" not in self._cache:
            self._cache["smith"] = smith_normal_form(self)
        return self._cache["smith"]

    @property
    def tail_block(self) -> int:
        """Least ``K`` with row-sum norm of ``A^{-K}`` at most 1/2."""
        if "tail_block" not in self._cache:
            k = self.expansion_index
            while self.inv_norm(k) > HALF:
                k += 1
            self._cache["tail_block"] = k
        return self._cache["tail_block"]


def certify_expanding(entries: Sequence[Sequence[int]], max_iter: int = 64) -> ExpandingMatrix:
    """Certify that ``entries`` is expanding with ``|det| >= 3``.

    Returns the matrix with the least ``k <= max_iter`` such that the
    max-norm of ``A^{-k}`` is below 1/2.  Failing to find one is reported as
    :class:`NotCertifiedExpanding`, which is inconclusive, not a proof of
    non-expansion.
    """
    a = as_int_matrix(entries)
    det = determinant(a)
    if det == 0:
        raise NotInvertible(f"matrix {a} is singular")
    if abs(det) <= 2:
        raise DeterminantTooSmall(f"|det A| = {abs(det)} must be at least 3")
    adj = adjugate(a)
    p = identity(len(a))
    for k in range(1, max_iter + 1):
        p = mat_mul(p, adj)
        if 2 * max(abs(x) for row in p for x in row) < abs(det) ** k:
            return ExpandingMatrix(entries=a, det=det, adj=adj, expansion_index=k)
    raise NotCertifiedExpanding(
        f"no k <= {max_iter} with max-norm of A^-k below 1/2 (inconclusive)"
    )


def smith_normal_form(m: ExpandingMatrix | Sequence[Sequence[int]]) -> SmithData:
    """Smith normal form with a fixed pivot rule.

    Pivot: smallest nonzero absolute value in the trailing block, ties broken
    by row-major position.
    """
    a = m.entries if isinstance(m, ExpandingMatrix) else as_int_matrix(m)
    n = len(a)
    s = [list(row) for row in a]
    u = [list(row) for row in identity(n)]
    v = [list(row) for row in identity(n)]

    def swap_rows(i, j):
        s[i], s[j] = s[j], s[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in s:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):
        # row_dst += q * row_src
        s[dst] = [x + q * y for x, y in zip(s[dst], s[src])]
        u[dst] = [x + q * y for x, y in zip(u[dst], u[src])]

    def add_col(dst, src, q):
        for row in s:
            row[dst] += q * row[src]
        for row in v:
            row[dst] += q * row[src]

    for t in range(n):
        while True:
            best = None
            for i in range(t, n):
                for j in range(t, n):
                    if s[i][j] != 0 and (best is None or abs(s[i][j]) < abs(s[best[0]][best[1]])):
                        best = (i, j)
            if best is None:
                raise NotInvertible("singular matrix has no Smith form of full rank")
            swap_rows(t, best[0])
            swap_cols(t, best[1])
            p = s[t][t]
            clean = True
            for i in range(t + 1, n):
                q = s[i][t] // p
                if q:
                    add_row(i, t, -q)
                clean &= s[i][t] == 0
            for j in range(t + 1, n):
                q = s[t][j] // p
                if q:
                    add_col(j, t, -q)
                clean &= s[t][j] == 0
            if not clean:
                continue
            bad = next(
                (i for i in range(t + 1, n) for j in range(t + 1, n) if s[i][j] % p),
                None,
            )
            if bad is None:
                break
            add_row(t, bad, 1)
        if s[t][t] < 0:
            s[t] = [-x for x in s[t]]
            u[t] = [-x for x in u[t]]

    return SmithData(
        U=tuple(map(tuple, u)), S=tuple(map(tuple, s)), V=tuple(map(tuple, v))
    )


@dataclass(frozen=True, order=True)
class CosetLabel:
    residues: IntVector


def coset_label(x: Sequence[int], m: ExpandingMatrix) -> CosetLabel:
    """Label of ``x + A Z^d``: ``U x`` reduced mod the Smith diagonal."""
    snf = m.smith
    ux = mat_vec(snf.U, x)
    return CosetLabel(tuple(int(c % s) for c, s in zip(ux, snf.diagonal)))


def all_coset_labels(m: ExpandingMatrix) -> list[CosetLabel]:
    """Every label, in lexicographic residue order."""
    labels = [()]
    for s in m.smith.diagonal:
        labels = [lab + (r,) for lab in labels for r in range(s)]
    return [CosetLabel(lab) for lab in labels]


def inverse_power_tail(m: ExpandingMatrix, from_n: int) -> Fraction:
    """Upper bound on the sum over ``n >= from_n`` of the norm of ``A^{-n}``.

    The norm is the row-sum norm, which dominates the entrywise max-norm and
    is submultiplicative.  With ``K = tail_block`` and ``q = ||A^{-K}|| <= 1/2``
    every ``n >= from_n`` is ``i + jK`` for some ``i`` in the first block, so
    the sum is at most ``(sum of the first block) / (1 - q)``.
    """
    if from_n < 0:
        raise ValueError("from_n must be nonnegative")
    k = m.tail_block
    q = m.inv_norm(k)
    block = sum((m.inv_norm(i) for i in range(from_n, from_n + k)), Fraction(0))
    return block / (1 - q)


def lcm(*values: int) -> int:
    out = 1
    for v in values:
        out = out * v // gcd(out, v)
    return out
