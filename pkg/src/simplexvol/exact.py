"""Closed-form integration over simplices.

Everything on the polynomial side is exact over ``Fraction``.  The
exponential and fractional-exponent routines work in double precision.

Conventions: ``J`` is a :class:`~simplexvol.geometry.Simplex`; ``|det B|``
equals ``d! vol(J)``; the "pole values" of an affine form ``c.x + b`` on J are
its values ``c.v_j + b`` at the vertices.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Sequence

import numpy as np

from .errors import (
    DivergentIntegralError,
    ExactModeError,
    IntegrandOverflowError,
    NumericalFailure,
    PreconditionError,
)
from .geometry import Simplex, simplex_volume, to_standard
from .polynomial import Polynomial

__all__ = [
    "integrate_monomial_standard",
    "integrate_polynomial",
    "decompose_monomial",
    "integrate_affine_power",
    "integrate_exp_affine",
    "integrate_qhomogeneous",
    "integrate_one_norm_power",
    "h_complete",
    "pole_structure",
    "PoleStructure",
    "FormalSeries",
    "lagrange_zero_sum",
]

POLE_CLUSTER_TOL = 1e-9
EXP_SERIES_TOL = 1e-16
EXP_SERIES_MAX_TERMS = 500
EQUAL_DIFFERENCE_TOL = 1e-10
_EXP_MAX = 709.78


def _is_rational(x) -> bool:
    return isinstance(x, Rational) and not isinstance(x, bool)


def _require_exact(J: Simplex, *vectors):
    if not J.exact:
        raise ExactModeError("exact integration needs rational vertices")
    for vec in vectors:
        for x in vec:
            if not _is_rational(x):
                raise ExactModeError(f"non-rational input {x!r} in exact mode")


# ---------------------------------------------------------------------------
# monomials over the standard simplex
# ---------------------------------------------------------------------------

def integrate_monomial_standard(exponents: Sequence) -> object:
    """Integral over the standard simplex of ``x_1^a_1 ... x_d^a_d (1 - sum x)^a_{d+1}``.

    ``exponents`` has d+1 entries, the last one belonging to ``1 - sum x``.
    Nonnegative integer exponents give an exact Fraction
    ``prod a_j! / (sum a_j + d)!``; anything else falls back to log-gamma.
    """
    alphas = list(exponents)
    if len(alphas) < 2:
        raise ValueError("need d+1 >= 2 exponents")
    for a in alphas:
        if a <= -1:
            raise DivergentIntegralError(f"exponent {a} <= -1 makes the integral diverge")
    d = len(alphas) - 1
    if all(_is_rational(a) and Fraction(a).denominator == 1 for a in alphas):
        ints = [int(a) for a in alphas]
        num = 1
        for a in ints:
            num *= math.factorial(a)
        return Fraction(num, math.factorial(sum(ints) + d))
    fl = [float(a) for a in alphas]
    log_val = math.fsum(math.lgamma(a + 1) for a in fl) - math.lgamma(math.fsum(fl) + d + 1)
    return math.exp(log_val)


def integrate_one_norm_power(d: int, alpha):
    """Integral of ``(x_1 + ... + x_d)^alpha`` over the standard d-simplex."""
    if d < 1:
        raise ValueError("dimension must be positive")
    if alpha <= -1:
        raise DivergentIntegralError(f"exponent {alpha} <= -1 makes the integral diverge")
    if _is_rational(alpha):
        return Fraction(1) / ((Fraction(alpha) + d) * math.factorial(d - 1))
    return 1.0 / ((float(alpha) + d) * math.factorial(d - 1))


# ---------------------------------------------------------------------------
# complete homogeneous symmetric polynomials
# ---------------------------------------------------------------------------

def h_complete(q: int, values: Sequence):
    """Sum of all degree-q monomials in ``values``.

    Uses the prefix recurrence ``h_k(x_1..x_j) = h_k(x_1..x_{j-1}) + x_j h_{k-1}(x_1..x_j)``;
    exact when the values are rational.
    """
    if q < 0 or int(q) != q:
        raise ValueError("q must be a nonnegative integer")
    q = int(q)
    vals = list(values)
    zero = Fraction(0) if all(_is_rational(v) for v in vals) else 0.0
    h = [zero + 1] + [zero] * q
    for x in vals:
        for k in range(1, q + 1):
            h[k] = h[k] + x * h[k - 1]
    return h[q]


def lagrange_zero_sum(values: Sequence, n: int):
    """``sum_j a_j^n / prod_{k != j}(a_j - a_k)``; vanishes for ``n < len(values) - 1``."""
    total = 0
    for j, aj in enumerate(values):
        den = 1
        for k, ak in enumerate(values):
            if k != j:
                den = den * (aj - ak)
        total = total + aj ** n / den
    return total


# ---------------------------------------------------------------------------
# truncated power series and pole bookkeeping
# ---------------------------------------------------------------------------

class FormalSeries:
    """Power series in one variable truncated to ``order`` coefficients."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence, order: int | None = None):
        coeffs = list(coeffs)
        if order is not None:
            coeffs = (coeffs + [0] * order)[:order]
        self.coeffs = coeffs

    @property
    def order(self) -> int:
        return len(self.coeffs)

    @classmethod
    def shifted_linear(cls, a, order: int) -> "FormalSeries":
        """The series of ``a + eps``."""
        return cls([a, 1], order)

    def __mul__(self, other: "FormalSeries") -> "FormalSeries":
        n = min(self.order, other.order)
        out = [0] * n
        for i in range(n):
            ai = self.coeffs[i]
            if ai:
                for j in range(n - i):
                    out[i + j] += ai * other.coeffs[j]
        return FormalSeries(out)

    def inverse(self) -> "FormalSeries":
        c = self.coeffs
        if c[0] == 0:
            raise ZeroDivisionError("series with zero constant term is not invertible")
        n = self.order
        inv = [0] * n
        inv[0] = 1 / c[0] if not _is_rational(c[0]) else Fraction(1) / c[0]
        for k in range(1, n):
            acc = 0
            for i in range(1, k + 1):
                acc += c[i] * inv[k - i]
            inv[k] = -acc * inv[0]
        return FormalSeries(inv)

    def __pow__(self, n: int) -> "FormalSeries":
        result = FormalSeries([1], self.order)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __getitem__(self, k):
        return self.coeffs[k]


@dataclass(frozen=True)
class PoleStructure:
    """Distinct pole values with their multiplicities (summing to d+1)."""

    values: tuple
    multiplicities: tuple
    members: tuple  # vertex indices belonging to each pole

    @property
    def generic(self) -> bool:
        return all(m == 1 for m in self.multiplicities)


def pole_structure(values: Sequence, exact: bool | None = None) -> PoleStructure:
    """Cluster vertex values: rational equality, or ``|a-b| <= 1e-9 max(1,|a|,|b|)``."""
    vals = list(values)
    if exact is None:
        exact = all(_is_rational(v) for v in vals)
    reps: list = []
    members: list[list[int]] = []
    for i, v in enumerate(vals):
        for r, rep in enumerate(reps):
            if exact:
                same = v == rep
            else:
                same = abs(v - rep) <= POLE_CLUSTER_TOL * max(1.0, abs(v), abs(rep))
            if same:
                members[r].append(i)
                break
        else:
            reps.append(v)
            members.append([i])
    return PoleStructure(tuple(reps), tuple(len(m) for m in members), tuple(tuple(m) for m in members))


# ---------------------------------------------------------------------------
# powers of affine forms
# ---------------------------------------------------------------------------

def _pole_values(J: Simplex, c, b):
    return [sum((ci * vi for ci, vi in zip(c, v)), b * 0) + b for v in J.vertices]


def _affine_power_brion(values, n: int, d: int):
    total = 0
    for j, pj in enumerate(values):
        den = 1
        for k, pk in enumerate(values):
            if k != j:
                den *= pj - pk
        total += Fraction(pj) ** (n + d) / den
    return total


def _affine_power_residue(poles: PoleStructure, n: int, d: int):
    total = Fraction(0)
    for k, (ak, mk) in enumerate(zip(poles.values, poles.multiplicities)):
        num = FormalSeries.shifted_linear(Fraction(ak), mk) ** (n + d)
        den = FormalSeries([Fraction(1)], mk)
        for j, (aj, mj) in enumerate(zip(poles.values, poles.multiplicities)):
            if j != k:
                den = den * FormalSeries.shifted_linear(Fraction(ak - aj), mk) ** mj
        total += (num * den.inverse())[mk - 1]
    return total


def _affine_power_series(values, n: int):
    return h_complete(n, values)


def integrate_affine_power(J: Simplex, c: Sequence, b=0, n: int = 1, method: str = "auto"):
    """Exact integral of ``(c . x + b)^n`` over J.

    ``method`` is ``"auto"`` (Brion when the vertex values are pairwise
    distinct, residues otherwise), ``"brion"``, ``"residue"`` or
    ``"series"`` (the complete-homogeneous sum, kept as a check path).
    """
    if n < 0 or int(n) != n:
        raise ValueError("n must be a nonnegative integer")
    n = int(n)
    _require_exact(J, c, [b])
    d = J.dimension
    b = Fraction(b)
    values = _pole_values(J, [Fraction(ci) for ci in c], b)
    scale = to_standard(J).abs_det * Fraction(math.factorial(n), math.factorial(n + d))
    if method == "series":
        return scale * _affine_power_series(values, n)
    poles = pole_structure(values, exact=True)
    if method == "auto":
        method = "brion" if poles.generic else "residue"
    if method == "brion":
        if not poles.generic:
            raise PreconditionError("Brion's formula needs pairwise distinct vertex values")
        return scale * _affine_power_brion(values, n, d)
    if method == "residue":
        return scale * _affine_power_residue(poles, n, d)
    raise ValueError(f"unknown method {method!r}")


def decompose_monomial(alpha: Sequence[int]) -> list[tuple[Fraction, tuple]]:
    """Write ``x^alpha`` as ``sum coeff * (beta . x)^|alpha|``.

    Uses ``(1/|a|!) sum_{0<=beta<=alpha} (-1)^{|a|-|beta|} prod C(a_i, b_i) (beta.x)^|a|``.
    Proportional forms are merged (each beta is reduced by its gcd) and the
    beta = 0 form, which contributes nothing, is dropped.
    """
    alpha = tuple(int(a) for a in alpha)
    if any(a < 0 for a in alpha):
        raise ValueError("exponents must be nonnegative")
    total = sum(alpha)
    if total == 0:
        raise ValueError("the constant monomial has no linear-form decomposition")
    merged: dict[tuple, Fraction] = {}
    for beta in itertools.product(*(range(a + 1) for a in alpha)):
        g = math.gcd(*beta)
        if g == 0:
            continue
        coeff = Fraction((-1) ** (total - sum(beta)), math.factorial(total))
        for a, bb in zip(alpha, beta):
            coeff *= math.comb(a, bb)
        prim = tuple(bb // g for bb in beta)
        merged[prim] = merged.get(prim, 0) + coeff * g ** total
    return [(c, beta) for beta, c in merged.items() if c != 0]


# ---------------------------------------------------------------------------
# polynomials
# ---------------------------------------------------------------------------

def _integrate_pullback(J: Simplex, p: Polynomial) -> Fraction:
    amap = to_standard(J)
    pulled = p.compose_affine(amap.matrix, amap.offset)
    total = Fraction(0)
    for e, coeff in pulled.terms.items():
        total += coeff * integrate_monomial_standard(list(e) + [0])
    return amap.abs_det * total


def _truncated_product_series(J: Simplex, caps: tuple, max_deg: int) -> dict:
    """Coefficients of ``1 / prod_j (1 - t.v_j)`` up to total degree ``max_deg``.

    Terms exceeding the per-coordinate ``caps`` are dropped as well.
    """
    d = J.dimension

    def within(e):
        return all(a <= c for a, c in zip(e, caps)) and sum(e) <= max_deg

    def mul(a: dict, b: dict) -> dict:
        out: dict = {}
        for e1, c1 in a.items():
            for e2, c2 in b.items():
                e = tuple(x + y for x, y in zip(e1, e2))
                if within(e):
                    out[e] = out.get(e, 0) + c1 * c2
        return out

    unit = {(0,) * d: Fraction(1)}
    product = unit
    for v in J.vertices:
        form = {}
        for i in range(d):
            if v[i] != 0:
                e = [0] * d
                e[i] = 1
                form[tuple(e)] = v[i]
        geometric = dict(unit)
        power = unit
        for _ in range(max_deg):
            power = mul(power, form)
            if not power:
                break
            for e, c in power.items():
                geometric[e] = geometric.get(e, 0) + c
        product = mul(product, geometric)
    return product


def _integrate_taylor(J: Simplex, p: Polynomial) -> Fraction:
    d = J.dimension
    if not p.terms:
        return Fraction(0)
    caps = tuple(max(e[i] for e in p.terms) for i in range(d))
    series = _truncated_product_series(J, caps, p.degree)
    abs_det = to_standard(J).abs_det
    total = Fraction(0)
    for e, coeff in p.terms.items():
        fact = 1
        for a in e:
            fact *= math.factorial(a)
        total += coeff * series.get(e, 0) * Fraction(fact, math.factorial(sum(e) + d))
    return abs_det * total


def _integrate_linform(J: Simplex, p: Polynomial) -> Fraction:
    vol = simplex_volume(J)
    total = Fraction(0)
    for e, coeff in p.terms.items():
        if sum(e) == 0:
            total += coeff * vol
            continue
        for w, beta in decompose_monomial(e):
            total += coeff * w * integrate_affine_power(J, beta, 0, sum(e))
    return total


_POLY_METHODS = {
    "pullback": _integrate_pullback,
    "taylor_expansion": _integrate_taylor,
    "linform_decomp": _integrate_linform,
}


def integrate_polynomial(J: Simplex, p: Polynomial, method: str | None = None) -> Fraction:
    """Exact rational integral of ``p`` over ``J``.

    Methods: ``"pullback"`` (substitute x = Bt + v0, then the monomial
    formula), ``"taylor_expansion"`` (coefficients of the generating function
    ``1/prod(1 - t.v_j)``) and ``"linform_decomp"`` (monomials as sums of
    powers of linear forms).  The default is linform_decomp for d >= 5 and
    pullback otherwise.
    """
    if p.nvars != J.dimension:
        raise ValueError(f"polynomial has {p.nvars} variables, simplex dimension is {J.dimension}")
    _require_exact(J, p.terms.values())
    if method is None:
        method = "linform_decomp" if J.dimension >= 5 else "pullback"
    try:
        fn = _POLY_METHODS[method]
    except KeyError:
        raise ValueError(f"unknown method {method!r}; choose from {sorted(_POLY_METHODS)}") from None
    return fn(J, p)


# ---------------------------------------------------------------------------
# exponentials of affine forms
# ---------------------------------------------------------------------------

def _exp_tail(u: float, d: int) -> float:
    """``e^u - sum_{j<d} u^j/j!``, summing the tail series when subtraction would cancel."""
    if u < 0 and abs(u) > d:
        return math.exp(u) - math.fsum(u ** j / math.factorial(j) for j in range(d))
    term = u ** d / math.factorial(d)
    parts = [term]
    k = d
    while k < d + 2000:
        k += 1
        term = term * u / k
        parts.append(term)
        if k > abs(u) and abs(term) <= 1e-17 * abs(math.fsum(parts)):
            break
    return math.fsum(parts)


def exp_tail_ratio(u: float, d: int) -> float:
    """``(e^u - sum_{j<d} u^j/j!) / u^d``; equals 1/d! at u = 0."""
    if u == 0:
        return 1.0 / math.factorial(d)
    if abs(u) < 1.0:
        term = 1.0 / math.factorial(d)
        parts = [term]
        k = d
        while abs(term) > 1e-18 * abs(parts[0]):
            k += 1
            term = term * u / k
            parts.append(term)
        return math.fsum(parts)
    return _exp_tail(u, d) / u ** d


def _find_equal_difference(p: list[float]):
    """Return ``(apex, u)`` if ``p[apex] - p[j] = u`` for all other j, else None."""
    d = len(p) - 1
    for apex in range(d + 1):
        diffs = [p[apex] - p[j] for j in range(d + 1) if j != apex]
        u = diffs[0]
        scale = max(1.0, max(abs(x) for x in p))
        if abs(u) <= EQUAL_DIFFERENCE_TOL * scale:
            continue
        if all(abs(x - u) <= EQUAL_DIFFERENCE_TOL * max(abs(u), abs(x)) for x in diffs):
            return apex, u
    return None


def _exp_series(p: list[float], d: int) -> float | None:
    """``sum_k h_k(p) / (k+d)!``, stopped by the a-priori bound ``M^k C(k+d,d)/(k+d)!``.

    Returns None if the bound is not met within the term cap.
    """
    m = max(abs(x) for x in p)
    # h[j] holds h_k(p_0..p_j) for the current k
    h = [1.0] * (d + 1)
    fact = float(math.factorial(d))
    parts = [1.0 / fact]
    mk = 1.0
    for k in range(1, EXP_SERIES_MAX_TERMS):
        acc = 0.0
        for j, x in enumerate(p):
            acc = acc + x * h[j]
            h[j] = acc
        fact *= k + d
        parts.append(h[-1] / fact)
        mk *= m
        bound = mk * m * math.comb(k + 1 + d, d) / (fact * (k + 1 + d))
        if bound < EXP_SERIES_TOL * abs(math.fsum(parts)):
            return math.fsum(parts)
    return None


def _exp_divided_difference(p: list[float]) -> float:
    """Divided difference of exp at the nodes via the bidiagonal matrix exponential."""
    from scipy.linalg import expm

    n = len(p)
    A = np.diag(np.asarray(p, dtype=float)) + np.diag(np.ones(n - 1), 1)
    return float(expm(A)[0, -1])


def integrate_exp_affine(J: Simplex, c: Sequence, b=0.0, method: str = "auto", return_method: bool = False):
    """Integral of ``exp(c . x + b)`` over J in double precision.

    ``auto`` picks Brion's sum for well-separated vertex values, the
    equal-difference closed form when one vertex value exceeds all others by
    the same nonzero amount, and otherwise the series of complete homogeneous
    polynomials (shifted to the midpoint of the values).
    """
    d = J.dimension
    vfl = J.as_array()
    cf = np.array([float(ci) for ci in c])
    p = [float(x) for x in vfl @ cf]
    b = float(b)
    top = max(p) + b
    if top > _EXP_MAX:
        raise IntegrandOverflowError(top)
    abs_det = float(to_standard(J).abs_det)
    poles = pole_structure(p, exact=False)
    if method == "auto":
        if poles.generic:
            method = "brion"
        elif _find_equal_difference(p) is not None:
            method = "equal_difference"
        else:
            method = "series"
    if method == "brion":
        if not poles.generic:
            raise PreconditionError("Brion's formula needs pairwise distinct vertex values")
        pmax = max(p)
        parts = []
        for j, pj in enumerate(p):
            den = 1.0
            for k, pk in enumerate(p):
                if k != j:
                    den *= pj - pk
            parts.append(math.exp(pj - pmax) / den)
        value = abs_det * math.exp(pmax + b) * math.fsum(parts)
    elif method == "equal_difference":
        found = _find_equal_difference(p)
        if found is None:
            raise PreconditionError("vertex values do not have a common nonzero difference")
        apex, u = found
        value = abs_det * math.exp(p[apex] - u + b) * exp_tail_ratio(u, d)
    elif method == "series":
        shift = 0.5 * (max(p) + min(p))
        q = [x - shift for x in p]
        s = _exp_series(q, d)
        if s is None:
            method = "divided_difference"
            s = _exp_divided_difference(q)
        value = abs_det * math.exp(shift + b) * s
    elif method == "divided_difference":
        shift = 0.5 * (max(p) + min(p))
        value = abs_det * math.exp(shift + b) * _exp_divided_difference([x - shift for x in p])
    else:
        raise ValueError(f"unknown method {method!r}")
    if not math.isfinite(value):
        raise NumericalFailure(f"non-finite exponential integral ({method})")
    return (value, method) if return_method else value


# ---------------------------------------------------------------------------
# q-homogeneous functions by polarization
# ---------------------------------------------------------------------------

def integrate_qhomogeneous(J: Simplex, f, q: int | None = None):
    """Integral of a q-homogeneous polynomial-type function via polarization.

    ``vol(J) / (2^q q! C(q+d, q)) * sum_{i_1<=...<=i_q} sum_eps eps_1..eps_q f(sum eps_j v_{i_j})``;
    exact when f returns Fractions at rational points.
    """
    if q is None:
        q = getattr(f, "homogeneous_degree", None)
    if q is None or int(q) != q or q <= 0:
        raise PreconditionError(f"polarization needs a positive integer degree, got {q!r}")
    q = int(q)
    d = J.dimension
    verts = J.vertices
    total = 0
    for combo in itertools.combinations_with_replacement(range(d + 1), q):
        for eps in itertools.product((1, -1), repeat=q):
            point = [sum(e * verts[i][k] for e, i in zip(eps, combo)) for k in range(d)]
            val = f(point)
            total = total + (val if math.prod(eps) > 0 else -val)
    denom = 2 ** q * math.factorial(q) * math.comb(q + d, q)
    vol = simplex_volume(J)
    if J.exact and _is_rational(total):
        return vol * Fraction(total) / denom
    return float(vol) * float(total) / denom
