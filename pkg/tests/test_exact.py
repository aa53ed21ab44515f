import math
import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings, strategies as st
from scipy.special import beta

from conftest import random_homogeneous_polynomial, random_polynomial, random_rational_simplex
from simplexvol import (
    DivergentIntegralError,
    ExactModeError,
    FormalSeries,
    IntegrandOverflowError,
    LinPow,
    Polynomial,
    Simplex,
    decompose_monomial,
    h_complete,
    integrate_affine_power,
    integrate_exp_affine,
    integrate_monomial_standard,
    integrate_one_norm_power,
    integrate_polynomial,
    integrate_qhomogeneous,
    interval,
    pole_structure,
    scaled_simplex,
    simplex_volume,
    standard_simplex,
)
from simplexvol.exact import exp_tail_ratio

METHODS = ("pullback", "taylor_expansion", "linform_decomp")


def sympy_integral_2d(J: Simplex, p: Polynomial) -> Fraction:
    """Iterated integration over a triangle after splitting at the middle x-vertex."""
    x, y = sympy.symbols("x y")
    expr = sum(sympy.Rational(c.numerator, c.denominator) * x ** e[0] * y ** e[1] for e, c in p.terms.items())
    pts = sorted((sympy.Rational(v[0].numerator, v[0].denominator), sympy.Rational(v[1].numerator, v[1].denominator)) for v in J.vertices)
    (x0, y0), (x1, y1), (x2, y2) = pts

    def line(xa, ya, xb, yb):
        return ya + (yb - ya) * (x - xa) / (xb - xa)

    long_edge = line(x0, y0, x2, y2)
    # integrate from the lower edge to the upper one
    sign = 1 if y1 > long_edge.subs(x, x1) else -1
    total = sympy.Integer(0)
    for (xa, ya), (xb, yb) in (((x0, y0), (x1, y1)), ((x1, y1), (x2, y2))):
        if xa == xb:
            continue
        short = line(xa, ya, xb, yb)
        inner = sympy.integrate(expr, (y, long_edge, short)) * sign
        total += sympy.integrate(inner, (x, xa, xb))
    total = sympy.nsimplify(total)
    return Fraction(int(total.p), int(total.q))


def test_monomial_examples():
    assert integrate_monomial_standard([1, 1, 0]) == Fraction(1, 24)
    assert integrate_monomial_standard([0, 0, 0]) == Fraction(1, 2)
    assert integrate_monomial_standard([0.5, 0]) == pytest.approx(2 / 3, abs=1e-12)
    with pytest.raises(DivergentIntegralError):
        integrate_monomial_standard([-1, 0])


def test_monomial_includes_last_barycentric_exponent():
    # int_0^1 x (1-x)^2 dx = 1/12
    assert integrate_monomial_standard([1, 2]) == Fraction(1, 12)
    assert integrate_monomial_standard([0.3, 1.7]) == pytest.approx(beta(1.3, 2.7), rel=1e-12)


@pytest.mark.parametrize("method", METHODS)
def test_polynomial_examples(method):
    D2 = standard_simplex(2)
    assert integrate_polynomial(D2, Polynomial({(1, 1): 1}), method) == Fraction(1, 24)
    assert integrate_polynomial(Simplex([[1, 1], [3, 1], [1, 4]]), Polynomial.constant(5, 2), method) == 15
    assert integrate_polynomial(D2, Polynomial.linear([1, 1]), method) == Fraction(1, 3)


def test_polynomial_against_sympy_oracle():
    rng = random.Random(21)
    for _ in range(8):
        J = random_rational_simplex(rng, 2)
        p = random_polynomial(rng, 2, 4)
        expected = sympy_integral_2d(J, p)
        for method in METHODS:
            assert integrate_polynomial(J, p, method) == expected


def test_default_method_choice():
    J = standard_simplex(5)
    p = Polynomial({(1, 0, 0, 0, 1): 1})
    assert integrate_polynomial(J, p) == integrate_polynomial(J, p, "pullback")


def test_exact_mode_required():
    with pytest.raises(ExactModeError):
        integrate_polynomial(standard_simplex(2).to_numeric(), Polynomial({(1, 0): 1}))
    with pytest.raises(ExactModeError):
        integrate_polynomial(standard_simplex(2), Polynomial({(1, 0): 0.5}))


def test_decompose_examples():
    terms = {form: c for c, form in decompose_monomial((1, 1))}
    assert terms == {(1, 1): Fraction(1, 2), (1, 0): Fraction(-1, 2), (0, 1): Fraction(-1, 2)}
    assert decompose_monomial((2, 0)) == [(Fraction(1), (1, 0))]
    with pytest.raises(ValueError):
        decompose_monomial((0, 0))


@given(st.lists(st.integers(0, 3), min_size=1, max_size=4).filter(lambda a: 0 < sum(a) <= 6))
@settings(max_examples=60, deadline=None)
def test_decompose_recomposes(alpha):
    n = sum(alpha)
    d = len(alpha)
    parts = decompose_monomial(alpha)
    assert len(parts) <= math.prod(a + 1 for a in alpha)
    total = Polynomial({}, d)
    for c, form in parts:
        total = total + Polynomial.linear(form) ** n * c
    assert total == Polynomial.monomial(alpha)


def test_affine_power_examples():
    for n in range(5):
        expect = Fraction(5 ** (n + 1) - 2 ** (n + 1), n + 1)
        assert integrate_affine_power(interval(2, 5), [1], 0, n) == expect
    assert integrate_affine_power(standard_simplex(2), [1, 1], 0, 2) == Fraction(1, 4)
    J = Simplex([[1, 1], [3, 1], [1, 4]])
    assert integrate_affine_power(J, [0, 0], 1, 5) == simplex_volume(J)
    assert pole_structure([1, 1, 1]).multiplicities == (3,)


def test_affine_power_methods_agree_on_repeated_poles():
    J = standard_simplex(3)
    for method in ("residue", "series"):
        assert integrate_affine_power(J, [1, 1, 1], 0, 3, method) == integrate_one_norm_power(3, 3)
    with pytest.raises(Exception):
        integrate_affine_power(J, [1, 1, 1], 0, 3, "brion")


def test_pole_clustering_tolerance():
    ps = pole_structure([1.0, 1.0 + 1e-12, 2.0])
    assert ps.multiplicities == (2, 1)
    assert pole_structure([1.0, 1.0 + 1e-6, 2.0]).generic


def test_formal_series_inverse():
    s = FormalSeries([Fraction(2), Fraction(3), Fraction(-1)], 4)
    one = s * s.inverse()
    assert one.coeffs == [1, 0, 0, 0]


def test_one_norm_power_examples():
    assert integrate_one_norm_power(1, Fraction(1, 2)) == Fraction(2, 3)
    assert integrate_one_norm_power(2, 0) == Fraction(1, 2)
    assert integrate_one_norm_power(3, 2) == Fraction(1, 10)
    assert integrate_one_norm_power(2, 0.5) == pytest.approx(1 / 2.5)
    with pytest.raises(DivergentIntegralError):
        integrate_one_norm_power(2, -1)


@pytest.mark.parametrize("d", range(1, 6))
@pytest.mark.parametrize("n", range(0, 7))
def test_one_norm_power_matches_affine_power(d, n):
    assert integrate_one_norm_power(d, n) == integrate_affine_power(standard_simplex(d), [1] * d, 0, n)


def test_qhomogeneous_examples():
    D2 = standard_simplex(2)
    assert integrate_qhomogeneous(D2, lambda x: x[0] ** 2, 2) == Fraction(1, 12)
    assert integrate_qhomogeneous(D2, LinPow((1, 1), 0, 2)) == Fraction(1, 4)
    J = Simplex([[1, 1], [3, 1], [1, 4]])
    lin = lambda x: 2 * x[0] - x[1]
    assert integrate_qhomogeneous(J, lin, 1) == simplex_volume(J) * sum(lin(v) for v in J.vertices) / 3
    with pytest.raises(Exception):
        integrate_qhomogeneous(D2, lin, 0)


def test_polarization_matches_polynomial():
    rng = random.Random(8)
    for _ in range(25):
        d = rng.randint(1, 3)
        q = rng.randint(1, 5)
        J = random_rational_simplex(rng, d)
        p = random_homogeneous_polynomial(rng, d, q)
        assert integrate_qhomogeneous(J, p, q) == integrate_polynomial(J, p)


def test_exp_examples():
    val, method = integrate_exp_affine(interval(0.5, 2.0), [1.5], 0, return_method=True)
    assert method == "brion"
    assert val == pytest.approx((math.exp(3.0) - math.exp(0.75)) / 1.5, rel=1e-14)
    for d in range(1, 6):
        for u in (0.5, 3.0, 12.0):
            J = standard_simplex(d)
            expect = math.exp(-u) / u**d * (math.exp(u) - sum(u**k / math.factorial(k) for k in range(d)))
            assert integrate_exp_affine(J, [-u] * d, 0) == pytest.approx(expect, rel=1e-12)
    assert integrate_exp_affine(Simplex([[1, 1], [3, 1], [1, 4]]), [0, 0], 0) == pytest.approx(3.0, rel=1e-15)


def test_exp_matches_polynomial_taylor_sum():
    # e^{c.x} = sum_n (c.x)^n / n!, each term integrated exactly
    J = Simplex([[Fraction(1, 2), 0], [1, Fraction(1, 3)], [0, 1]])
    c = [Fraction(3, 5), Fraction(-1, 4)]
    series = sum(float(integrate_affine_power(J, c, 0, n)) / math.factorial(n) for n in range(30))
    assert integrate_exp_affine(J, c, 0) == pytest.approx(series, rel=1e-13)
    assert integrate_exp_affine(J, c, 0.7) == pytest.approx(math.exp(0.7) * series, rel=1e-13)


@given(st.integers(1, 5), st.floats(-20, 20).filter(lambda u: abs(u) > 1e-3))
@settings(max_examples=80, deadline=None)
def test_equal_difference_matches_series(d, u):
    J = standard_simplex(d)
    closed = integrate_exp_affine(J, [-u] * d, 0, method="equal_difference")
    series = integrate_exp_affine(J, [-u] * d, 0, method="series")
    assert closed == pytest.approx(series, rel=1e-12)


def test_exp_near_coincident_poles_use_stable_route():
    J = standard_simplex(3)
    c = [1.0, 1.0 + 1e-11, 2.5]
    val, method = integrate_exp_affine(J, c, 0, return_method=True)
    assert method != "brion"
    ref = integrate_exp_affine(J, [1.0, 1.0, 2.5], 0, method="divided_difference")
    assert val == pytest.approx(ref, rel=1e-10)


def test_exp_overflow_reports_exponent():
    with pytest.raises(IntegrandOverflowError) as info:
        integrate_exp_affine(scaled_simplex(2, 10), [80.0, 1.0], 5.0)
    assert info.value.exponent == pytest.approx(805.0)


def test_exp_tail_ratio_small_and_large():
    assert exp_tail_ratio(0.0, 3) == pytest.approx(1 / 6)
    assert exp_tail_ratio(1e-8, 2) == pytest.approx(0.5, rel=1e-7)
    for u in (-30.0, -2.0, 0.3, 5.0, 40.0):
        direct = (math.exp(u) - sum(u**j / math.factorial(j) for j in range(3))) / u**3
        assert exp_tail_ratio(u, 3) == pytest.approx(direct, rel=1e-9)


def test_h_complete_examples():
    assert h_complete(6, [1, 1, -2]) == 31
    assert h_complete(2, [1, 2, 3]) == 25
    assert h_complete(0, [5, 7]) == 1
    assert h_complete(3, []) == 0


@given(st.integers(0, 6), st.lists(st.fractions(-3, 3, max_denominator=4), min_size=1, max_size=4))
@settings(max_examples=60, deadline=None)
def test_h_complete_matches_monomial_sum(q, xs):
    import itertools

    brute = sum(
        (math.prod(xs[i] for i in combo) for combo in itertools.combinations_with_replacement(range(len(xs)), q)),
        Fraction(0),
    )
    assert h_complete(q, xs) == brute
