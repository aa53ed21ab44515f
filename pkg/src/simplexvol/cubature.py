"""Quadrature and cubature on intervals, simplices and cones, plus a Monte-Carlo oracle."""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from .errors import NumericalFailure, PreconditionError
from .geometry import ConeRegion, Simplex, sample_uniform, simplex_volume, to_standard

__all__ = [
    "Jacobi1DRule",
    "CubatureRule",
    "gauss_jacobi_rule",
    "grundmann_moller_rule",
    "conical_product_rule",
    "radial_rule",
    "cone_product_rule",
    "apply_rule",
    "monte_carlo_integrate",
    "rule_to_json",
]

_NEWTON_MAX_ITER = 200


# ---------------------------------------------------------------------------
# one-dimensional Gauss-Jacobi
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Jacobi1DRule:
    """Gauss rule for ``int_a^b (b-x)^alpha (x-a)^beta f(x) dx``.

    Built on [-1, 1] and optionally mapped to [a, b] by :meth:`mapped`.
    """

    nodes: tuple
    weights: tuple
    alpha: float
    beta: float
    interval: tuple = (-1.0, 1.0)

    @property
    def degree(self) -> int:
        return 2 * len(self.nodes) - 1

    def mapped(self, a: float, b: float) -> "Jacobi1DRule":
        half = (b - a) / 2
        scale = half ** (self.alpha + self.beta + 1)
        nodes = tuple(half * t + (a + b) / 2 for t in self.nodes)
        return Jacobi1DRule(nodes, tuple(scale * w for w in self.weights), self.alpha, self.beta, (a, b))

    def __call__(self, f: Callable[[float], float]) -> float:
        return math.fsum(w * f(x) for x, w in zip(self.nodes, self.weights))


def _jacobi_and_derivative(n: int, alpha: float, beta: float, x: float) -> tuple[float, float]:
    """``P_n^{(alpha,beta)}(x)`` and its derivative by the three-term recurrence."""

    def value(n, a, b):
        if n == 0:
            return 1.0
        p_prev, p = 1.0, (a + 1) + (a + b + 2) * (x - 1) / 2
        for k in range(2, n + 1):
            c = 2 * k + a + b
            lhs = 2 * k * (k + a + b) * (c - 2)
            rhs1 = (c - 1) * (c * (c - 2) * x + a * a - b * b)
            rhs2 = 2 * (k + a - 1) * (k + b - 1) * c
            p_prev, p = p, (rhs1 * p - rhs2 * p_prev) / lhs
        return p

    p = value(n, alpha, beta)
    dp = 0.0 if n == 0 else (n + alpha + beta + 1) / 2 * value(n - 1, alpha + 1, beta + 1)
    return p, dp


def _jacobi_matrix(n: int, alpha: float, beta: float) -> tuple[np.ndarray, np.ndarray]:
    ab = alpha + beta
    diag = np.empty(n)
    off = np.empty(max(n - 1, 0))
    for k in range(n):
        c = 2 * k + ab
        diag[k] = (beta - alpha) / (ab + 2) if k == 0 else (beta**2 - alpha**2) / (c * (c + 2))
    for k in range(1, n):
        c = 2 * k + ab
        if k == 1:
            sq = 4 * (1 + alpha) * (1 + beta) / ((2 + ab) ** 2 * (3 + ab))
        else:
            sq = 4 * k * (k + alpha) * (k + beta) * (k + ab) / (c * c * (c + 1) * (c - 1))
        off[k - 1] = math.sqrt(sq)
    return diag, off


def gauss_jacobi_rule(s: int, alpha: float = 0.0, beta: float = 0.0) -> Jacobi1DRule:
    """(s+1)-point Gauss-Jacobi rule on [-1, 1] for weight ``(1-x)^alpha (1+x)^beta``.

    Nodes are eigenvalues of the symmetric tridiagonal Jacobi matrix, polished
    by a Newton step on the recurrence.  Weights use the closed form
    ``G(n+a+1)G(n+b+1) / (G(n+a+b+1) n!) * 2^(a+b+1) / ((1-x^2) P_n'(x)^2)``.
    Exact for polynomials of degree 2s+1.
    """
    if s < 0 or int(s) != s:
        raise ValueError("s must be a nonnegative integer")
    if alpha <= -1 or beta <= -1:
        raise PreconditionError("Jacobi exponents must exceed -1")
    n = int(s) + 1
    alpha, beta = float(alpha), float(beta)
    diag, off = _jacobi_matrix(n, alpha, beta)
    if n == 1:
        nodes = diag.copy()
    else:
        from scipy.linalg import eigh_tridiagonal

        nodes = eigh_tridiagonal(diag, off, eigvals_only=True)
    polished = []
    for x0 in nodes:
        x = float(x0)
        for _ in range(_NEWTON_MAX_ITER):
            p, dp = _jacobi_and_derivative(n, alpha, beta, x)
            step = p / dp
            x -= step
            if abs(step) <= 4e-16 * max(1.0, abs(x)):
                break
        else:
            raise NumericalFailure(f"Newton refinement of a Jacobi node did not converge (n={n})")
        polished.append(x)
    log_const = (
        math.lgamma(n + alpha + 1) + math.lgamma(n + beta + 1)
        - math.lgamma(n + alpha + beta + 1) - math.lgamma(n + 1)
        + (alpha + beta + 1) * math.log(2)
    )
    const = math.exp(log_const)
    weights = []
    for x in polished:
        _, dp = _jacobi_and_derivative(n, alpha, beta, x)
        weights.append(const / ((1 - x * x) * dp * dp))
    order = np.argsort(polished)
    return Jacobi1DRule(
        tuple(polished[i] for i in order), tuple(weights[i] for i in order), alpha, beta
    )


def radial_rule(d: int, s: int) -> Jacobi1DRule:
    """Gauss rule for ``int_0^1 z^d f(z) dz`` with s+1 nodes."""
    if d < 0:
        raise ValueError("d must be nonnegative")
    return gauss_jacobi_rule(s, 0.0, float(d)).mapped(0.0, 1.0)


# ---------------------------------------------------------------------------
# cubature on simplices and cones
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CubatureRule:
    """Weighted point set with a declared degree of exactness.

    ``region`` is ``"standard_simplex"``, ``"simplex"`` (transplanted onto
    ``base``) or ``"cone"`` (points are ``(x, z)``).  Points on a simplex are
    given in the d free coordinates.
    """

    region: str
    dimension: int
    degree: int
    points: tuple
    weights: tuple
    name: str = ""
    base: Simplex | None = field(default=None, repr=False)

    @property
    def size(self) -> int:
        return len(self.weights)

    @property
    def negative_weight_count(self) -> int:
        return sum(1 for w in self.weights if w < 0)

    @property
    def has_negative_weights(self) -> bool:
        return self.negative_weight_count > 0

    @property
    def exact(self) -> bool:
        return all(isinstance(w, Fraction) for w in self.weights) and all(
            isinstance(x, Fraction) for p in self.points for x in p
        )

    def transplant(self, J: Simplex) -> "CubatureRule":
        """Move a standard-simplex rule onto J through ``x = B t + v0``."""
        if self.region != "standard_simplex":
            raise PreconditionError(f"only standard-simplex rules can be transplanted, not {self.region!r}")
        if J.dimension != self.dimension:
            raise PreconditionError("rule and simplex dimensions differ")
        amap = to_standard(J)
        if self.exact and J.exact:
            points = tuple(amap(p) for p in self.points)
            weights = tuple(w * amap.abs_det for w in self.weights)
        else:
            B, v0 = amap.as_arrays()
            P = np.array(self.points, dtype=float) @ B.T + v0
            points = tuple(tuple(map(float, row)) for row in P)
            weights = tuple(float(w) * float(amap.abs_det) for w in self.weights)
        return CubatureRule("simplex", self.dimension, self.degree, points, weights, self.name, J)

    def float_points(self) -> np.ndarray:
        return np.array(self.points, dtype=float).reshape(len(self.points), self.dimension)


def grundmann_moller_rule(d: int, s: int) -> CubatureRule:
    """Grundmann-Möller rule of degree 2s+1 on the standard d-simplex.

    Weights and points are exact rationals; C(s+d+1, s) points, none merged.
    """
    if d < 1:
        raise ValueError("d must be >= 1")
    if s < 0:
        raise ValueError("s must be nonnegative")
    q = 2 * s + 1
    points: list[tuple] = []
    weights: list[Fraction] = []
    for j in range(s + 1):
        w = Fraction((-1) ** j * (q + d - 2 * j) ** q, 2 ** (2 * s) * math.factorial(j) * math.factorial(q + d - j))
        den = q + d - 2 * j
        for k in _compositions(s - j, d + 1):
            # k[0] is the implicit barycentric coordinate
            points.append(tuple(Fraction(2 * ki + 1, den) for ki in k[1:]))
            weights.append(w)
    return CubatureRule("standard_simplex", d, q, tuple(points), tuple(weights), f"grundmann_moller(s={s})")


def _compositions(total: int, parts: int):
    """All k in Z_{>=0}^parts with sum(k) == total, in lexicographic order."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def conical_product_rule(d: int, s: int) -> CubatureRule:
    """Stroud's conical product rule of degree 2s+1 with (s+1)^d positive weights.

    Coordinate k uses the Gauss-Jacobi rule for ``(1-y)^(d-k)`` on [0, 1];
    points are ``x_k = y_k * prod_{i<k}(1 - y_i)``.
    """
    if d < 1:
        raise ValueError("d must be >= 1")
    factors = [gauss_jacobi_rule(s, float(d - k), 0.0).mapped(0.0, 1.0) for k in range(1, d + 1)]
    points = []
    weights = []
    for combo in itertools.product(*(range(s + 1) for _ in range(d))):
        ys = [factors[k].nodes[i] for k, i in enumerate(combo)]
        x = []
        remaining = 1.0
        for y in ys:
            x.append(y * remaining)
            remaining *= 1.0 - y
        points.append(tuple(x))
        weights.append(math.prod(factors[k].weights[i] for k, i in enumerate(combo)))
    return CubatureRule("standard_simplex", d, 2 * s + 1, tuple(points), tuple(weights), f"conical_product(s={s})")


def cone_product_rule(base: CubatureRule, radial: Jacobi1DRule) -> CubatureRule:
    """Rule on ``{(x, z): x in zJ, 0 <= z <= 1}`` from a rule on J and a z^d radial rule.

    Points ``(r_k w_j, r_k)`` with weights ``lambda_j nu_k``; the degree is the
    smaller of the two input degrees.
    """
    if base.region not in ("simplex", "standard_simplex"):
        raise PreconditionError(f"base rule must live on a simplex, not {base.region!r}")
    d = base.dimension
    if radial.interval != (0.0, 1.0) or radial.beta != d or radial.alpha != 0:
        raise PreconditionError(f"radial rule must integrate against z^{d} on [0, 1]")
    points = []
    weights = []
    for r, nu in zip(radial.nodes, radial.weights):
        for p, lam in zip(base.points, base.weights):
            points.append(tuple(r * float(x) for x in p) + (r,))
            weights.append(float(lam) * nu)
    return CubatureRule(
        "cone", d + 1, min(base.degree, radial.degree), tuple(points), tuple(weights),
        f"cone[{base.name}; radial {radial.degree}]", base.base,
    )


def _evaluate_points(f, rule: CubatureRule) -> np.ndarray:
    X = rule.float_points()
    batch = getattr(f, "evaluate_many", None)
    if batch is not None:
        try:
            vals = np.asarray(batch(X), dtype=float)
        except Exception:
            vals = None
        if vals is not None and vals.shape == (len(X),):
            return vals
    out = np.empty(len(X))
    for i, x in enumerate(X):
        try:
            out[i] = float(f(tuple(x)))
        except Exception as exc:
            raise type(exc)(f"{exc} (at rule point {tuple(float(v) for v in x)})") from exc
    return out


def apply_rule(rule: CubatureRule, f, exact: bool = False):
    """``sum_j lambda_j f(w_j)`` with compensated summation.

    With ``exact=True`` and a rational rule, f is called at rational points
    and the sum is returned as a Fraction.
    """
    if exact:
        if not rule.exact:
            raise PreconditionError("exact application needs rational points and weights")
        return sum((w * f(p) for p, w in zip(rule.points, rule.weights)), Fraction(0))
    vals = _evaluate_points(f, rule)
    return math.fsum(float(w) * v for w, v in zip(rule.weights, vals))


def monte_carlo_integrate(region, f, n: int, seed: int) -> tuple[float, float]:
    """Plain Monte-Carlo estimate ``vol * mean(f)`` and its standard error."""
    if n < 2:
        raise ValueError("Monte Carlo needs n >= 2")
    X = sample_uniform(region, n, seed)
    vol = float(region.volume() if isinstance(region, ConeRegion) else simplex_volume(region))
    batch = getattr(f, "evaluate_many", None)
    vals = np.asarray(batch(X), dtype=float) if batch is not None else np.array([float(f(tuple(x))) for x in X])
    if not np.all(np.isfinite(vals)):
        raise NumericalFailure("non-finite integrand value in Monte-Carlo sample")
    return vol * float(vals.mean()), vol * float(vals.std(ddof=1)) / math.sqrt(n)


def _scalar_text(x) -> str:
    if isinstance(x, Fraction):
        return str(x)
    return format(float(x), ".17g")


def rule_to_json(rule: CubatureRule) -> str:
    return json.dumps(
        {
            "region": rule.region,
            "dimension": rule.dimension,
            "degree": rule.degree,
            "points": [[_scalar_text(x) for x in p] for p in rule.points],
            "weights": [_scalar_text(w) for w in rule.weights],
        }
    )
