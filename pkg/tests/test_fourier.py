import cmath
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from selfaffine.errors import DenominatorOverflow
from selfaffine.fourier import (
    PI_UP,
    FailingPower,
    SingularityCertificate,
    _phase,
    character_sum,
    cyclotomic,
    find_singularity_certificate,
    fourier_product_limit,
    transform_empirical,
    transform_truncated,
    v_w_membership,
)
from selfaffine.intlinalg import certify_expanding
from selfaffine.system import ScaledVector, build_system

TWO_PI = 2 * math.pi


def poly_mul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def test_cyclotomic_small():
    assert cyclotomic(1) == (-1, 1)
    assert cyclotomic(2) == (1, 1)
    assert cyclotomic(3) == (1, 1, 1)
    assert cyclotomic(4) == (1, 0, 1)
    assert cyclotomic(6) == (1, -1, 1)
    assert cyclotomic(12) == (1, 0, -1, 0, 1)
    # first cyclotomic polynomial with a coefficient outside {-1, 0, 1}
    assert cyclotomic(105)[7] == -2


@pytest.mark.parametrize("n", [1, 2, 6, 10, 12, 15, 30, 36, 45, 60, 105])
def test_cyclotomic_product_identity(n):
    # prod_{d | n} Phi_d = x^n - 1
    prod_ = [1]
    for d in range(1, n + 1):
        if n % d == 0:
            prod_ = poly_mul(prod_, list(cyclotomic(d)))
    assert prod_ == [-1] + [0] * (n - 1) + [1]


def test_f1_sum_vanishes_at_minus_one(F1):
    s = character_sum(F1, (1,), -1)
    assert s.is_zero == "yes"
    assert abs(s.value) < 1e-12
    assert s.q == 3


def test_f2_sum_at_minus_one(F2):
    s = character_sum(F2, (1,), -1)
    assert s.is_zero == "no"
    # phases 0, 1/3, 1 -> 2 + zeta_3
    assert s.exact == {0: (2, 1)}
    z3 = cmath.exp(2j * math.pi / 3)
    assert abs(s.value - (2 + z3)) < 1e-12
    assert abs(abs(s.value) ** 2 - 3) < 1e-12


def test_integer_phases_give_n(F2):
    for n in range(0, 4):
        s = character_sum(F2, (1,), n)
        assert s.q == 1 and abs(s.value - 3) < 1e-12 and s.is_zero == "no"


def test_q_max_limits(F1, F2):
    s = character_sum(F2, (1,), -3, q_max=2)
    assert s.is_zero == "numeric-only" and s.exact is None
    with pytest.raises(DenominatorOverflow):
        character_sum(F1, (1,), -1, q_max=2)


def test_zero_w_rejected(F2):
    with pytest.raises(ValueError):
        character_sum(F2, (0,), 0)
    with pytest.raises(ValueError):
        v_w_membership(F2, (0,))


def _random_system(data, matrices=([[3]], [[5]], [[1, -2], [2, 1]], [[1, 1], [-1, 2]])):
    m = certify_expanding(data.draw(st.sampled_from(list(matrices))))
    vec = st.tuples(*[st.integers(-4, 4)] * m.dim)
    digits = [ScaledVector(data.draw(st.integers(0, 2)), data.draw(vec)) for _ in range(m.det_abs)]
    return build_system(m, digits)


@settings(max_examples=80, deadline=None)
@given(st.data())
def test_exact_and_numeric_agree(data):
    sys = _random_system(data)
    w = data.draw(st.tuples(*[st.integers(-3, 3)] * sys.dim).filter(any))
    n = data.draw(st.integers(-4, 3))
    s = character_sum(sys, w, n)
    assert s.exact is not None
    assert abs(s.exact_value() - s.value) <= 1e-12
    # exact zero test and numerics agree for these small denominators
    assert (s.is_zero == "yes") == (abs(s.value) < 1e-9)
    # q divides a power of N times the digit denominators
    big = sys.n_maps ** (abs(n) + 3)
    assert big % s.q == 0


def _check_window(sys, cert):
    lo, hi = cert.window
    w = cert.w
    n_maps = sys.n_maps
    # brute-force recheck with two extra powers each side
    for n in range(lo - 2, hi + 3):
        assert character_sum(sys, w, n).is_zero == "no"
    # above the window every phase is an integer
    for n in range(hi + 1, hi + 6):
        assert all(_phase(sys, j, w, n).denominator == 1 for j in range(n_maps))
    # below it the summed phases are small
    for n in range(lo - 1, lo - 25, -1):
        total = sum(abs(_phase(sys, j, w, n)) for j in range(n_maps))
        assert 2 * PI_UP * total < n_maps
    assert cert.product_lower_bound > 0
    assert [s.n for s in cert.sums] == list(range(lo, hi + 1))


def test_f2_certificate(F2):
    cert = v_w_membership(F2, (1,))
    assert isinstance(cert, SingularityCertificate)
    lo, hi = cert.window
    assert lo <= -1 <= hi == 0
    s = next(s for s in cert.sums if s.n == -1)
    assert s.exact == {0: (2, 1)}
    _check_window(F2, cert)


def test_f1_fails_at_minus_one(F1):
    res = v_w_membership(F1, (1,))
    assert isinstance(res, FailingPower)
    assert res.n == -1 and res.sum.is_zero == "yes"


def test_find_certificate_order(F2, F1):
    cert = find_singularity_certificate(F2, 2)
    assert cert.w == (-1,)
    # F1: every w has a vanishing sum somewhere, at least up to |w| <= 2
    assert find_singularity_certificate(F1, 2) is None


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_window_soundness_random(data):
    sys = _random_system(data, ([[3]], [[5]], [[1, -2], [2, 1]]))
    w = data.draw(st.tuples(*[st.integers(-2, 2)] * sys.dim).filter(any))
    res = v_w_membership(sys, w)
    if isinstance(res, SingularityCertificate):
        _check_window(sys, res)
        prod_ = fourier_product_limit(sys, w)
        assert abs(prod_.value) + prod_.error >= float(res.product_lower_bound)
    else:
        assert character_sum(sys, w, res.n).is_zero == "yes"


def test_product_limit_f2(F2):
    cert = v_w_membership(F2, (1,))
    p = fourier_product_limit(F2, (1,))
    assert p.error <= 1e-6
    assert abs(p.value) > 0.3
    assert abs(p.value) >= float(cert.product_lower_bound)
    # tightening the precision moves the value by less than the stated error
    q = fourier_product_limit(F2, (1,), precision=1e-9)
    assert abs(p.value - q.value) <= p.error + q.error


def test_product_limit_f1_has_zero_factor(F1):
    p = fourier_product_limit(F1, (1,))
    assert abs(p.value) < 1e-12


@pytest.mark.parametrize("r", [2, 3, 4])
def test_truncated_matches_product(F2, r):
    t = transform_truncated(F2, [TWO_PI * 3**r], 30)
    p = fourier_product_limit(F2, (1,), upto=r)
    assert abs(t.value - p.value) <= 1e-3
    assert t.tail_bound < 1e-6


def test_truncated_at_zero(F2):
    t = transform_truncated(F2, [0.0], 5)
    assert t.value == 1 and t.tail_bound == 0


def test_f1_closed_form(F1):
    # uniform measure on [0, 3]: (e^{3 i xi} - 1) / (3 i xi)
    for xi in (0.3, 1.0, 2.5, TWO_PI):
        exact = (cmath.exp(3j * xi) - 1) / (3j * xi)
        t = transform_truncated(F1, [xi], 40)
        assert abs(t.value - exact) <= t.tail_bound + 1e-12


xi_1d = st.floats(-60, 60, allow_nan=False)


@settings(max_examples=50, deadline=None)
@given(st.data())
def test_self_similarity_recursion(data):
    sys = _random_system(data)
    xi = np.array([data.draw(xi_1d) for _ in range(sys.dim)])
    m = 25
    inv_t = np.array([[float(x) for x in row] for row in sys.matrix.inv]).T
    digits = np.array([[float(x) for x in v] for v in sys.digit_values()])
    lhs = transform_truncated(sys, xi, m)
    inner = transform_truncated(sys, inv_t @ xi, m)
    rhs = np.mean(np.exp(1j * digits @ xi)) * inner.value
    assert abs(lhs.value - rhs) <= lhs.tail_bound + inner.tail_bound + 1e-9


@settings(max_examples=30, deadline=None)
@given(st.data())
def test_conjugate_symmetry_and_modulus(data):
    sys = _random_system(data)
    xi = np.array([data.draw(xi_1d) for _ in range(sys.dim)])
    a = transform_truncated(sys, xi, 20)
    b = transform_truncated(sys, -xi, 20)
    assert abs(a.value - b.value.conjugate()) < 1e-12
    assert abs(a.value) <= 1 + 1e-12


def test_empirical_symmetry_and_modulus(F2, fig1_overlap):
    for sys, xi in ((F2, [7.0]), (fig1_overlap, [3.0, -1.5])):
        a = transform_empirical(sys, xi, 20_000, seed=3)
        b = transform_empirical(sys, [-x for x in xi], 20_000, seed=3)
        assert abs(a.value - b.value.conjugate()) < 1e-12
        assert abs(a.value) <= 1


def test_empirical_deterministic(F2):
    a = transform_empirical(F2, [5.0], 10_000, seed=7)
    b = transform_empirical(F2, [5.0], 10_000, seed=7)
    assert a == b


def test_empirical_at_zero(F2):
    e = transform_empirical(F2, [0.0], 10_000)
    assert e.value == 1 and e.stderr == 0


def test_empirical_f1(F1):
    e = transform_empirical(F1, [TWO_PI], 100_000, seed=1)
    assert abs(e.value) <= 3 * e.stderr


def test_empirical_f2_matches_truncated(F2):
    xi = [TWO_PI * 9]
    e = transform_empirical(F2, xi, 200_000, seed=2)
    t = transform_truncated(F2, xi, 30)
    assert abs(e.value - t.value) <= 3 * e.stderr
