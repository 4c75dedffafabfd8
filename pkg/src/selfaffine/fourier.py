"""Character sums, the singularity certificate, and Fourier transform evaluators.

Conventions.  ``S_n(w) = sum_j exp(2 pi i <A^n u_j, w>)`` for ``n`` in Z.  The
bi-infinite product is ``prod_n (1/N) S_{-n}(w)``, so its factor of index
``n`` is ``S_{-n}/N``; code below iterates over the power ``k = -n`` of
``S_k`` directly.  The transform is ``nu^(xi) = E[exp(i <x, xi>)]`` with no
2 pi in the kernel.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import mpmath
import numpy as np

from .errors import DenominatorOverflow, Inconclusive
from .intlinalg import inverse_power_tail, lcm, mat_vec
from .system import AffineSystem

DEFAULT_Q_MAX = 10**4
NUMERIC_MARGIN = 1e-9
# rational upper bound for pi
PI_UP = Fraction(355, 113)


def _phase(sys: AffineSystem, j: int, w: Sequence[int], n: int) -> Fraction:
    """Exact ``<A^n u_j, w>`` for 0-based ``j``."""
    m = sys.matrix
    u = sys.digits[j]
    k = n - u.scale
    if k >= 0:
        return Fraction(sum(a * b for a, b in zip(mat_vec(m.power(k), u.vec), w)))
    num = sum(a * b for a, b in zip(mat_vec(m.adj_power(-k), u.vec), w))
    return Fraction(num, m.det ** (-k))


def _prime_factors(q: int, hints: Sequence[int] = ()) -> list[int]:
    primes = []
    for p in list(hints) + [2]:
        if p > 1 and q % p == 0:
            primes.append(p)
            while q % p == 0:
                q //= p
    p = 3
    while q > 1 and p * p <= q:
        if q % p == 0:
            primes.append(p)
            while q % p == 0:
                q //= p
        p += 2
    if q > 1:
        primes.append(q)
    return sorted(set(primes))


def _divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


def _mobius(n: int) -> int:
    primes = _prime_factors(n)
    for p in primes:
        if n % (p * p) == 0:
            return 0
    return -1 if len(primes) % 2 else 1


@lru_cache(maxsize=256)
def cyclotomic(r: int) -> tuple[int, ...]:
    """Coefficients of the r-th cyclotomic polynomial, constant term first.

    Uses ``Phi_r = prod_{d | r} (x^d - 1)^{mu(r/d)}``.
    """
    poly = [1]
    divisions = []
    for d in _divisors(r):
        mu = _mobius(r // d)
        if mu == 1:
            out = [0] * (len(poly) + d)
            for i, c in enumerate(poly):
                out[i + d] += c
                out[i] -= c
            poly = out
        elif mu == -1:
            divisions.append(d)
    for d in divisions:
        # p = q (x^d - 1)  =>  q_k = q_{k-d} - p_k
        deg = len(poly) - 1 - d
        q = [0] * (deg + 1)
        for k in range(deg + 1):
            q[k] = (q[k - d] if k >= d else 0) - poly[k]
        poly = q
    while len(poly) > 1 and poly[-1] == 0:
        poly.pop()
    return tuple(poly)


def _reduce_mod(poly: list[int], phi: tuple[int, ...]) -> tuple[int, ...]:
    """Remainder of ``poly`` modulo the monic ``phi``."""
    rem = list(poly)
    deg = len(phi) - 1
    for i in range(len(rem) - 1, deg - 1, -1):
        c = rem[i]
        if c:
            base = i - deg
            for k, p in enumerate(phi):
                rem[base + k] -= c * p
    out = rem[:deg] + [0] * max(0, deg - len(rem))
    return tuple(out)


@dataclass(frozen=True)
class CharacterSum:
    """``S_n(w)`` with an exact zero test when possible.

    ``exact`` maps each residue ``c`` (mod ``q / rad(q)``) to the remainder
    modulo the ``rad(q)``-th cyclotomic polynomial of the grouped exponents;
    the sum is ``sum_c sum_k coeff * exp(2 pi i (c + k q/rad(q)) / q)``.
    ``is_zero`` is ``"yes"``, ``"no"``, or ``"numeric-only"``.
    """

    n: int
    w: tuple[int, ...]
    phases: tuple[Fraction, ...]
    q: int
    value: complex
    exact: dict | None
    is_zero: str

    def exact_value(self) -> complex:
        if self.exact is None:
            raise ValueError("no exact value for this sum")
        r = _radical(self.q, ())
        step = self.q // r
        total = 0j
        for c, coeffs in self.exact.items():
            for k, a in enumerate(coeffs):
                if a:
                    total += a * cmath.exp(2j * math.pi * float(Fraction((c + k * step) % self.q, self.q)))
        return total


def _radical(q: int, hints) -> int:
    out = 1
    for p in _prime_factors(q, hints):
        out *= p
    return out


def _unit(x: Fraction) -> complex:
    return cmath.exp(2j * math.pi * float(x % 1))


def character_sum(
    sys: AffineSystem, w: Sequence[int], n: int, q_max: int = DEFAULT_Q_MAX
) -> CharacterSum:
    """``S_n(w)``.

    Zero test: with ``q`` the common denominator of the phases and ``r`` its
    radical, ``Phi_q(x) = Phi_r(x^{q/r})``, so the sum vanishes iff every
    residue class of exponents modulo ``q/r`` gives a polynomial of degree
    ``< r`` divisible by ``Phi_r``.  ``q_max`` bounds ``r``.
    """
    w = tuple(int(x) for x in w)
    if not any(w):
        raise ValueError("w must be nonzero")
    phases = tuple(_phase(sys, j, w, n) % 1 for j in range(sys.n_maps))
    q = lcm(*(p.denominator for p in phases))
    numeric = sum(_unit(p) for p in phases)
    r = _radical(q, _prime_factors(sys.matrix.det_abs))
    if r > q_max:
        if abs(numeric) < NUMERIC_MARGIN:
            raise DenominatorOverflow(
                f"S_{n}: radical of denominator {r} > {q_max} and |S| = {abs(numeric):.3g}"
            )
        return CharacterSum(n, w, phases, q, numeric, None, "numeric-only")
    step = q // r
    groups: dict[int, list[int]] = {}
    for p in phases:
        e = p.numerator * (q // p.denominator)
        c, b = e % step, e // step
        groups.setdefault(c, [0] * r)[b] += 1
    phi = cyclotomic(r)
    exact = {c: _reduce_mod(poly, phi) for c, poly in sorted(groups.items())}
    zero = all(not any(rem) for rem in exact.values())
    return CharacterSum(n, w, phases, q, numeric, exact, "yes" if zero else "no")


@dataclass(frozen=True)
class FailingPower:
    n: int
    sum: CharacterSum


@dataclass(frozen=True)
class SingularityCertificate:
    """``S_n(w) != 0`` for every integer ``n``.

    Powers in ``window`` were checked exactly.  Above the window every
    ``A^n u_j`` is integral, so ``S_n = N``.  Below it the phases are small
    enough that ``|S_n - N| < N``.  ``product_lower_bound`` bounds the modulus
    of the whole bi-infinite product from below; ``truncation_error`` bounds
    the distance from 1 of the part below the window.
    """

    w: tuple[int, ...]
    window: tuple[int, int]
    sums: tuple[CharacterSum, ...]
    product_lower_bound: Fraction
    truncation_error: Fraction
    outside_window_reason: str = (
        "above: integer phases give S_n = N; below: perturbation bound |S_n - N| < N"
    )

    kind = "singularity"


def _perturbation(sys: AffineSystem, w: Sequence[int], k: int) -> Fraction:
    """Upper bound on ``sum_{n <= -k} 2 pi sum_j |<A^n u_j, w>|``.

    It also bounds each single term of that sum.
    """
    m = sys.matrix
    w1 = sum(abs(x) for x in w)
    total = Fraction(0)
    for u in sys.digits:
        if any(u.vec):
            total += max(map(abs, u.vec)) * inverse_power_tail(m, k + u.scale)
    return 2 * PI_UP * w1 * total


def lower_window(sys: AffineSystem, w: Sequence[int], threshold: Fraction) -> int:
    """Least ``k >= 1`` whose perturbation bound is below ``threshold``."""
    k = 1
    while _perturbation(sys, w, k) >= threshold:
        k += 1
    return k


def _modulus_lower_bound(s: CharacterSum) -> Fraction:
    with mpmath.workdps(60):
        total = mpmath.fsum(
            mpmath.expjpi(2 * mpmath.mpf(p.numerator) / p.denominator) for p in s.phases
        )
        approx = Fraction(mpmath.nstr(abs(total), 30))
    return max(approx - Fraction(1, 10**25), Fraction(0))


def _round_down(x: Fraction, digits: int = 12) -> Fraction:
    """A nearby smaller positive rational with a power-of-ten denominator."""
    scale = 10 ** (digits + max(0, -math.floor(math.log10(x))))
    return Fraction(math.floor(x * scale), scale)


def v_w_membership(
    sys: AffineSystem, w: Sequence[int], q_max: int = DEFAULT_Q_MAX
) -> SingularityCertificate | FailingPower:
    """Check ``S_n(w) != 0`` for all ``n`` via a finite window of exact tests."""
    w = tuple(int(x) for x in w)
    if not any(w):
        raise ValueError("w must be nonzero")
    big_n = sys.n_maps
    n_plus = sys.max_scale
    k = lower_window(sys, w, Fraction(big_n))
    n_minus = 1 - k
    sums = []
    for n in range(n_plus, n_minus - 1, -1):
        s = character_sum(sys, w, n, q_max)
        if s.is_zero == "yes":
            return FailingPower(n, s)
        if s.is_zero == "numeric-only":
            raise DenominatorOverflow(f"S_{n}({w}) could only be checked numerically")
        sums.append(s)
    tau = _perturbation(sys, w, k) / big_n
    bound = 1 - tau
    for s in sums:
        bound *= _modulus_lower_bound(s) / big_n
    if bound <= 0:
        raise Inconclusive(f"could not bound the product for w={w} away from zero")
    bound = _round_down(bound)
    return SingularityCertificate(
        w, (n_minus, n_plus), tuple(sums[::-1]), bound, tau + tau * tau
    )


def find_singularity_certificate(
    sys: AffineSystem, w_max: int = 5, q_max: int = DEFAULT_Q_MAX
) -> SingularityCertificate | None:
    """Scan nonzero ``w`` with max-norm ``<= w_max`` by (max-norm, lexicographic)."""
    d = sys.dim
    grid = [()]
    for _ in range(d):
        grid = [g + (x,) for g in grid for x in range(-w_max, w_max + 1)]
    for w in sorted((g for g in grid if any(g)), key=lambda g: (max(map(abs, g)), g)):
        res = v_w_membership(sys, w, q_max)
        if isinstance(res, SingularityCertificate):
            return res
    return None


@dataclass(frozen=True)
class ProductValue:
    value: complex
    error: float
    powers: tuple[int, int]


def fourier_product_limit(
    sys: AffineSystem,
    w: Sequence[int],
    precision: float = 1e-6,
    upto: int | None = None,
) -> ProductValue:
    """``prod_n (1/N) S_{-n}(w)`` over all ``n``, or over ``n >= -upto``.

    The restricted product equals ``nu^(2 pi (A^T)^upto w)``.  Factors with
    ``S_k`` for ``k`` above the largest digit scale are exactly 1; the factors
    far below are truncated once their combined distance from 1 is below
    ``precision``.
    """
    w = tuple(int(x) for x in w)
    big_n = sys.n_maps
    top = sys.max_scale if upto is None else min(upto, sys.max_scale)
    k = lower_window(sys, w, Fraction(big_n))
    while True:
        tau = _perturbation(sys, w, k) / big_n
        if tau <= 1 and tau + tau * tau <= Fraction(precision):
            break
        k += 1
    value = 1 + 0j
    lo = 1 - k
    for n in range(lo, top + 1):
        s = sum(_unit(_phase(sys, j, w, n)) for j in range(big_n))
        value *= s / big_n
    err = float(tau + tau * tau) + 1e-13 * (top - lo + 1)
    return ProductValue(value, err, (lo, top))


@dataclass(frozen=True)
class TransformValue:
    xi: tuple[float, ...]
    depth: int
    value: complex
    tail_bound: float


def _float_digit(sys: AffineSystem, j: int, k: int) -> np.ndarray:
    """``A^{-k} u_j`` as floats."""
    u = sys.digits[j]
    return np.array([float(x) for x in sys.matrix.apply_inverse_power(k + u.scale, u.vec)])


def transform_truncated(sys: AffineSystem, xi: Sequence[float], m: int) -> TransformValue:
    """First ``m`` factors of the self-similarity product for ``nu^(xi)``.

    The omitted factor ``nu^((A^T)^{-m} xi)`` is within ``tail_bound`` of 1.
    """
    from .geometry import attractor_radius

    if m < 1:
        raise ValueError("depth must be at least 1")
    xi_arr = np.asarray(xi, dtype=float).reshape(sys.dim)
    big_n = sys.n_maps
    value = 1 + 0j
    for n in range(m):
        phases = [float(_float_digit(sys, j, n) @ xi_arr) for j in range(big_n)]
        value *= sum(cmath.exp(1j * p) for p in phases) / big_n
    inv_t = np.array([[float(x) for x in row] for row in sys.matrix.inv_power(m)]).T
    eta = inv_t @ xi_arr
    tail = float(attractor_radius(sys)) * float(np.abs(eta).sum())
    return TransformValue(tuple(float(x) for x in xi_arr), m, value, min(tail, 2.0))


@dataclass(frozen=True)
class EmpiricalTransform:
    value: complex
    stderr: float
    samples: int
    seed: int


def transform_empirical(
    sys: AffineSystem, xi: Sequence[float], samples: int = 10**5, seed: int = 0
) -> EmpiricalTransform:
    """Monte Carlo mean of ``exp(i <x, xi>)`` over chaos-game samples of ``nu``."""
    from .geometry import sample_measure

    if samples < 1000:
        raise ValueError("need at least 1000 samples")
    pts = sample_measure(sys, samples, seed)
    z = np.exp(1j * (pts @ np.asarray(xi, dtype=float).reshape(sys.dim)))
    mean = complex(z.mean())
    se = float(np.sqrt(np.mean(np.abs(z - mean) ** 2) / (samples - 1)))
    return EmpiricalTransform(mean, se, samples, seed)
