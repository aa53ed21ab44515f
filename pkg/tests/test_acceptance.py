"""Acceptance criteria, one test per criterion.

Each test carries a ``criterion`` marker; the terminal summary prints one
PASS/FAIL line per criterion.
"""

import itertools
import math
import random
import time
from fractions import Fraction

import numpy as np
import pytest
from scipy.integrate import dblquad, quad

from conftest import random_polynomial, random_rational_simplex
from simplexvol import (
    ConeRegion,
    ExpAffine,
    ExpFamilyParams,
    LinPow,
    LogSumExp,
    Polynomial,
    Simplex,
    apply_rule,
    cone_product_rule,
    conical_product_rule,
    cutoff_report,
    exp_family_case_a,
    exp_family_case_b,
    exp_family_volumes,
    gauss_jacobi_rule,
    grundmann_moller_rule,
    h_complete,
    hunter_bound_check,
    integrate_affine_power,
    integrate_monomial_standard,
    integrate_one_norm_power,
    integrate_polynomial,
    interval,
    lagrange_zero_sum,
    logsumexp_sweep,
    max_integral_standard,
    monte_carlo_integrate,
    naive_volume,
    normalized_logsumexp_integral,
    perspective_volume,
    pole_structure,
    radial_rule,
    ratio_lower_bound_power,
    secant_mean,
    standard_simplex,
)
from simplexvol.functions import BlackBox

criterion = pytest.mark.criterion


def vertex_values(J, c, b=0):
    return [sum(ci * vi for ci, vi in zip(c, v)) + b for v in J.vertices]


@criterion(1, "exact polynomial integration: three methods agree")
def test_c01_cross_method_agreement():
    rng = random.Random(2024)
    start = time.perf_counter()
    checked = 0
    for _ in range(20):
        d = rng.randint(1, 4)
        J = random_rational_simplex(rng, d)
        for _ in range(5):
            p = random_polynomial(rng, d, rng.randint(0, 6))
            values = {m: integrate_polynomial(J, p, m) for m in ("pullback", "taylor_expansion", "linform_decomp")}
            assert len(set(values.values())) == 1, values
            assert all(isinstance(v, Fraction) for v in values.values())
            checked += 1
    assert checked == 100
    assert time.perf_counter() - start < 60


def _random_c(rng, d):
    return [Fraction(rng.randint(-5, 5), rng.randint(1, 4)) for _ in range(d)]


@criterion(2, "affine powers: Brion, residue and series agree")
def test_c02_brion_residue_series():
    rng = random.Random(77)
    generic = 0
    while generic < 50:
        d = rng.randint(1, 4)
        J = random_rational_simplex(rng, d)
        c = _random_c(rng, d)
        b = Fraction(rng.randint(-3, 3), rng.randint(1, 3))
        n = rng.randint(0, 6)
        if not pole_structure(vertex_values(J, c, b), exact=True).generic:
            continue
        brion = integrate_affine_power(J, c, b, n, "brion")
        assert brion == integrate_affine_power(J, c, b, n, "series")
        assert brion == integrate_affine_power(J, c, b, n, "residue")
        generic += 1

    repeated = 0
    while repeated < 20:
        d = rng.randint(2, 4)
        J = random_rational_simplex(rng, d)
        kind = repeated % 4
        if kind == 0:
            c = [Fraction(0)] * d
        else:
            # project c off one or two edges so their endpoints share c.v
            c = _random_c(rng, d)
            edges = [[a - b for a, b in zip(J.vertices[k], J.vertices[0])] for k in range(1, 1 + min(kind, d - 1))]
            basis = []
            for e in edges:
                for g in basis:
                    e = [ei - sum(x * y for x, y in zip(e, g)) / sum(y * y for y in g) * gi for ei, gi in zip(e, g)]
                basis.append(e)
            for g in basis:
                c = [ci - sum(x * y for x, y in zip(c, g)) / sum(y * y for y in g) * gi for ci, gi in zip(c, g)]
        b = Fraction(rng.randint(-3, 3))
        n = rng.randint(0, 6)
        poles = pole_structure(vertex_values(J, c, b), exact=True)
        assert not poles.generic
        assert integrate_affine_power(J, c, b, n, "residue") == integrate_affine_power(J, c, b, n, "series")
        repeated += 1


@criterion(3, "monomial formula spot values")
def test_c03_monomial_spot_values():
    exact = integrate_monomial_standard([1, 1, 0])
    assert exact == Fraction(1, 24)
    iterated, _ = dblquad(lambda y, x: x * y, 0, 1, 0, lambda x: 1 - x)
    assert float(exact) == pytest.approx(iterated, abs=1e-12)
    assert integrate_polynomial(standard_simplex(2), Polynomial({(1, 1): 1})) == Fraction(1, 24)

    root = integrate_monomial_standard([0.5, 0])
    oracle, _ = quad(math.sqrt, 0, 1)
    assert abs(root - 2 / 3) <= 1e-12
    assert abs(root - oracle) <= 1e-12
    assert abs(float(integrate_one_norm_power(1, Fraction(1, 2))) - 2 / 3) <= 1e-12


@criterion(4, "cubature degree exactness, point counts, conical weights")
def test_c04_cubature_degree_exactness():
    for d in range(1, 5):
        D = standard_simplex(d)
        for s in range(4):
            gm = grundmann_moller_rule(d, s)
            cp = conical_product_rule(d, s)
            assert gm.size == math.comb(s + d + 1, s)
            assert cp.size == (s + 1) ** d
            assert all(w > 0 for w in cp.weights)
            assert abs(math.fsum(cp.weights) - 1 / math.factorial(d)) <= 1e-14
            q = 2 * s + 1
            assert gm.degree == cp.degree == q
            for e in itertools.product(range(q + 1), repeat=d):
                if sum(e) > q:
                    continue
                p = Polynomial.monomial(e)
                exact = float(integrate_polynomial(D, p))
                for rule in (gm, cp):
                    assert abs(apply_rule(rule, p) - exact) <= 1e-12 * abs(exact)


@criterion(5, "Gauss-Jacobi node and weight values")
def test_c05_gauss_jacobi_values():
    r = gauss_jacobi_rule(1, 1, 0).mapped(0, 1)
    root6 = math.sqrt(6)
    assert r.nodes[0] == pytest.approx((4 - root6) / 10, abs=1e-12)
    assert r.nodes[1] == pytest.approx((4 + root6) / 10, abs=1e-12)
    assert r.weights[0] == pytest.approx((9 + root6) / 36, abs=1e-12)
    assert r.weights[1] == pytest.approx((9 - root6) / 36, abs=1e-12)


@criterion(6, "univariate relaxation of x^2 on [1,2]")
def test_c06_univariate_relaxation():
    f = LinPow((1,), 0, 2)
    report = cutoff_report(interval(1, 2), f)
    assert report.cutoff_amount == Fraction(7, 36)
    assert report.naive_volume - report.perspective_volume == Fraction(7, 36)
    assert report.cutoff_ratio >= Fraction(1, 3)
    assert ratio_lower_bound_power(2, 1) == pytest.approx(1 / 3, rel=1e-15)
    # the bound 2/(q+4) is approached as l/u -> 0
    tight = cutoff_report(interval(Fraction(1, 1000), 1), f).cutoff_ratio
    assert abs(float(tight) - 1 / 3) <= 0.02 / 3
    assert float(tight) >= 1 / 3


@criterion(7, "q-homogeneous cut-off identity")
def test_c07_qhomogeneous_identity():
    rng = random.Random(5)
    for _ in range(30):
        d = rng.randint(1, 3)
        q = rng.randint(1, 5)
        J = random_rational_simplex(rng, d, hi=4, nonneg=True)
        c = [Fraction(rng.randint(0, 4), rng.randint(1, 3)) for _ in range(d)]
        if not any(c):
            c[0] = Fraction(1)
        f = LinPow(c, 0, q)
        persp = perspective_volume(J, f)
        naive = naive_volume(J, f)
        integral = integrate_affine_power(J, c, 0, q)
        assert naive - persp == Fraction(q - 1, (q + d + 1) * (d + 2)) * integral
        # naive volume through the cone product rule, which never uses homogeneity
        cone = cone_product_rule(conical_product_rule(d, 3).transplant(J), radial_rule(d, 3))
        double = apply_rule(cone, lambda p: float(sum(ci * xi for ci, xi in zip(c, p[:-1]))) ** q)
        via_cubature = float(secant_mean(f, J)) / (d + 2) - double
        assert via_cubature == pytest.approx(float(naive), rel=1e-10, abs=1e-12)


@criterion(8, "even-power bounds on h_q")
def test_c08_even_power_bounds():
    rng = random.Random(99)
    improved_seen = 0
    for _ in range(1000):
        q = rng.choice([2, 4, 6, 8])
        d = rng.randint(1, 5)
        x = [rng.uniform(-1, 1) for _ in range(d)]
        chk = hunter_bound_check(q, x)
        brute = math.fsum(math.prod(x[i] for i in combo) for combo in itertools.combinations_with_replacement(range(d), q))
        assert chk.h == pytest.approx(brute, rel=1e-9, abs=1e-12)
        power_sum = math.fsum(v**q for v in x)
        assert brute >= power_sum / (2 ** (q // 2) * math.factorial(q // 2)) - 1e-12
        if q == 2 or d == 2 or (d == 3 and q == 4):
            assert chk.improved
            assert brute >= power_sum / 2 - 1e-12
            improved_seen += 1
    assert improved_seen > 100

    assert Fraction(h_complete(6, [1, 1, -2]), sum(v**6 for v in (1, 1, -2))) == Fraction(31, 66)
    x = [0.3577, 0.3577, 0.3577, -0.9875]
    ratio = h_complete(4, x) / math.fsum(v**4 for v in x)
    assert abs(ratio - 0.4598) <= 5e-4
    assert ratio < 0.5


@criterion(9, "exponential family asymptotics")
def test_c09_exp_asymptotics():
    us = (10.0, 20.0, 40.0)
    a = [u**2 * float(exp_family_volumes(exp_family_case_a(2, u, 1.0)).cutoff_ratio) for u in us]
    dist_a = [abs(x - 6) for x in a]
    assert dist_a[0] > dist_a[1] > dist_a[2]
    assert a[0] < a[1] < a[2] < 6

    b = [u * float(exp_family_volumes(exp_family_case_b(2, u, (1.0, 1.0))).cutoff_ratio) for u in us]
    dist_b = [abs(x - 3) for x in b]
    assert dist_b[0] > dist_b[1] > dist_b[2]
    assert b[0] < b[1] < b[2] < 3


def _exp_test_simplex(d, u):
    # c = 1 and c.v0 - c.vj = u for every j, all vertices in the orthant
    top = max(u, 0) + 1
    v0 = [float(top)] * d
    verts = [v0] + [[v0[i] - (u if i == j else 0.0) for i in range(d)] for j in range(d)]
    return Simplex(verts)


@criterion(10, "exponential closed form against cubature and Monte Carlo")
def test_c10_exp_closed_form_vs_cubature():
    for d in (2, 3):
        for u in (1.0, -1.0, 4.0, -4.0):
            J = _exp_test_simplex(d, u)
            c = (1.0,) * d
            params = ExpFamilyParams.from_simplex(J, c)
            assert params.u == pytest.approx(u)
            report = exp_family_volumes(params)
            assert report.methods["naive"] == "closed_form", report.notes

            f = ExpAffine(c, 0, True)
            first = float(secant_mean(f, J)) / (d + 2)
            cone = cone_product_rule(conical_product_rule(d, 12).transplant(J), radial_rule(d, 12))
            g = BlackBox(lambda p: math.expm1(sum(p[:-1])), batch=lambda X: np.expm1(X[:, :-1].sum(axis=1)))
            double = apply_rule(cone, g)
            assert abs((first - double) - report.naive_volume) <= 1e-6 * abs(report.naive_volume)

            est, err = monte_carlo_integrate(ConeRegion(J), g, 10**6, seed=d * 100 + int(u) + 10)
            closed_double = first - report.naive_volume
            assert abs(est - closed_double) <= 3 * err


@criterion(11, "log-sum-exp cut-off sweep and limit")
def test_c11_logsumexp():
    reports = logsumexp_sweep(3, list(range(2, 31)), s=2)
    ratios = {u: float(r.cutoff_ratio) for u, r in zip(range(2, 31), reports)}
    assert all(r > 0 for r in ratios.values())
    assert ratios[30] < ratios[5]
    assert all("degree=5" in r.methods["naive"] for r in reports)

    target = float(max_integral_standard(3))
    assert target == pytest.approx(11 / 144)
    value = normalized_logsumexp_integral(3, 100.0)
    assert abs(value - target) <= 0.05 * target
    f = LogSumExp(3)
    est, err = monte_carlo_integrate(standard_simplex(3).to_numeric().scaled(100.0), f, 10**5, seed=11)
    # change of variables x -> 100 x multiplies the integral by 100^3
    assert abs(est / 100.0**4 - value) <= 3 * err / 100.0**4 + 1e-9


@criterion(12, "zero-sum Lagrange identity")
def test_c12_lagrange_zero_sum():
    rng = random.Random(12)
    checked = 0
    while checked < 100:
        d = rng.randint(2, 5)
        J = Simplex([[rng.uniform(-3, 3) for _ in range(d)] for _ in range(d + 1)])
        c = [rng.uniform(-2, 2) for _ in range(d)]
        a = vertex_values(J, c)
        if not pole_structure(a).generic:
            continue
        n = rng.randint(0, d - 1)
        scale = max(abs(aj**n / math.prod(aj - ak for k, ak in enumerate(a) if k != j)) for j, aj in enumerate(a))
        assert abs(lagrange_zero_sum(a, n)) <= 1e-10 * max(1.0, scale)
        # one degree higher the sum is h_0 = 1, so the check is not vacuous
        assert lagrange_zero_sum(a, d) == pytest.approx(1.0, rel=1e-8)
        exact = [Fraction(x).limit_denominator(10**6) for x in a]
        if len(set(exact)) == len(exact):
            assert lagrange_zero_sum(exact, n) == 0
        checked += 1
