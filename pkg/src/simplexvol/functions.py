"""Integrand families, evaluation, and the secant hyperplane through f at the vertices."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Callable

import numpy as np

from .errors import DomainError, SpecParseError
from .geometry import Simplex, exact_solve, simplex_volume, to_standard
from .polynomial import Polynomial, format_polynomial

__all__ = [
    "FunctionSpec",
    "Poly",
    "LinPow",
    "ExpAffine",
    "LogSumExp",
    "QHomogeneous",
    "BlackBox",
    "SecantPlane",
    "evaluate",
    "secant_plane",
    "secant_mean",
    "parse_function_spec",
]


def _exact_point(x) -> bool:
    return all(isinstance(v, Rational) and not isinstance(v, bool) for v in x)


def _dot(c, x):
    total = 0
    for ci, xi in zip(c, x):
        total = total + ci * xi
    return total


class FunctionSpec:
    """Base class of the tagged integrand family.

    Subclasses provide ``dim``, ``__call__`` for a single point and
    ``evaluate_many`` for an ``(n, dim)`` array.
    """

    tag = "abstract"
    dim: int | None = None
    convex: bool = True

    def evaluate_many(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        return np.array([float(self(row)) for row in X])

    @property
    def homogeneous_degree(self):
        """Degree q with f(lambda x) = lambda^q f(x), or None."""
        return None

    def to_polynomial(self) -> Polynomial | None:
        return None

    def _check_dim(self, x):
        if self.dim is not None and len(x) != self.dim:
            raise DomainError(f"{self.tag} expects {self.dim} coordinates, got {len(x)}")


@dataclass(frozen=True, eq=False)
class Poly(FunctionSpec):
    poly: Polynomial
    convex: bool = True
    tag = "poly"

    @property
    def dim(self):
        return self.poly.nvars

    def __call__(self, x):
        self._check_dim(x)
        return self.poly(x)

    def evaluate_many(self, X):
        return self.poly.evaluate_many(X)

    @property
    def homogeneous_degree(self):
        return self.poly.homogeneous_degree()

    def to_polynomial(self):
        return self.poly

    def __str__(self):
        return f"poly:{format_polynomial(self.poly)}"


@dataclass(frozen=True, eq=False)
class LinPow(FunctionSpec):
    """``(c . x + b)^q``.  Non-integer q needs a nonnegative base."""

    c: tuple
    b: object = Fraction(0)
    q: object = 2
    tag = "linpow"

    def __post_init__(self):
        object.__setattr__(self, "c", tuple(self.c))
        q = self.q
        if isinstance(q, float) and q.is_integer():
            q = int(q)
        if isinstance(q, Fraction) and q.denominator == 1:
            q = int(q)
        object.__setattr__(self, "q", q)

    @property
    def dim(self):
        return len(self.c)

    @property
    def integer_exponent(self) -> bool:
        return isinstance(self.q, int) and self.q >= 0

    @property
    def convex(self):
        if self.integer_exponent and self.q % 2 == 0:
            return True
        return float(self.q) >= 1 or float(self.q) == 0

    def __call__(self, x):
        self._check_dim(x)
        base = _dot(self.c, x) + self.b
        if self.integer_exponent:
            return base ** self.q
        base = float(base)
        q = float(self.q)
        if base < 0:
            raise DomainError(f"negative base {base:g} with fractional exponent {self.q}")
        if base == 0:
            if q > 0:
                return 0.0
            raise DomainError(f"zero base with exponent {self.q} <= 0")
        return base ** q

    def evaluate_many(self, X):
        X = np.asarray(X, dtype=float)
        base = X @ np.array([float(ci) for ci in self.c]) + float(self.b)
        if self.integer_exponent:
            return base ** self.q
        if np.any(base < 0):
            raise DomainError("negative base with fractional exponent")
        return np.power(base, float(self.q))

    @property
    def homogeneous_degree(self):
        return self.q if self.b == 0 else None

    def to_polynomial(self):
        if not self.integer_exponent:
            return None
        return Polynomial.linear(self.c, self.b) ** self.q

    def __str__(self):
        return f"linpow:c={','.join(str(ci) for ci in self.c)};b={self.b};q={self.q}"


@dataclass(frozen=True, eq=False)
class ExpAffine(FunctionSpec):
    """``exp(c . x + b)``, minus one when ``subtract_one`` is set."""

    c: tuple
    b: object = 0
    subtract_one: bool = False
    tag = "exp"

    def __post_init__(self):
        object.__setattr__(self, "c", tuple(self.c))

    @property
    def dim(self):
        return len(self.c)

    def __call__(self, x):
        self._check_dim(x)
        t = float(_dot(self.c, x) + self.b)
        return math.expm1(t) if self.subtract_one else math.exp(t)

    def evaluate_many(self, X):
        X = np.asarray(X, dtype=float)
        t = X @ np.array([float(ci) for ci in self.c]) + float(self.b)
        return np.expm1(t) if self.subtract_one else np.exp(t)

    def __str__(self):
        tail = ";minus1" if self.subtract_one else ""
        return f"exp:c={','.join(str(ci) for ci in self.c)};b={self.b}{tail}"


@dataclass(frozen=True, eq=False)
class LogSumExp(FunctionSpec):
    """``log((1/d) sum_j exp(x_j))``; vanishes at the origin."""

    d: int
    tag = "logsumexp"

    @property
    def dim(self):
        return self.d

    def __call__(self, x):
        self._check_dim(x)
        xs = [float(v) for v in x]
        m = max(xs)
        return m + math.log(math.fsum(math.exp(v - m) for v in xs) / self.d)

    def evaluate_many(self, X):
        X = np.asarray(X, dtype=float)
        m = X.max(axis=1)
        return m + np.log(np.exp(X - m[:, None]).sum(axis=1) / self.d)

    def __str__(self):
        return f"logsumexp:d={self.d}"


@dataclass(frozen=True, eq=False)
class QHomogeneous(FunctionSpec):
    """Black-box evaluator asserted to satisfy f(lambda x) = lambda^q f(x)."""

    evaluator: Callable
    degree: object
    dim: int | None = None
    convex: bool = False
    batch: Callable | None = field(default=None, repr=False)
    tag = "qhomogeneous"

    def __call__(self, x):
        self._check_dim(x)
        return self.evaluator(x)

    def evaluate_many(self, X):
        if self.batch is not None:
            return np.asarray(self.batch(np.asarray(X, dtype=float)), dtype=float)
        return FunctionSpec.evaluate_many(self, X)

    @property
    def homogeneous_degree(self):
        return self.degree


@dataclass(frozen=True, eq=False)
class BlackBox(FunctionSpec):
    """Arbitrary evaluator; ``convex`` is a user assertion, never verified."""

    evaluator: Callable
    dim: int | None = None
    convex: bool = False
    batch: Callable | None = field(default=None, repr=False)
    tag = "blackbox"

    def __call__(self, x):
        self._check_dim(x)
        return self.evaluator(x)

    def evaluate_many(self, X):
        if self.batch is not None:
            return np.asarray(self.batch(np.asarray(X, dtype=float)), dtype=float)
        return FunctionSpec.evaluate_many(self, X)


def evaluate(spec, x):
    """Value of ``spec`` at ``x``; exact for polynomial specs at rational points."""
    return spec(x)


# ---------------------------------------------------------------------------
# secant hyperplane
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SecantPlane:
    """Affine function ``gradient . x + constant`` interpolating f at the vertices."""

    gradient: tuple
    constant: object

    def __call__(self, x):
        return _dot(self.gradient, x) + self.constant

    def as_polynomial(self) -> Polynomial:
        return Polynomial.linear(self.gradient, self.constant)


def secant_plane(spec, J: Simplex) -> SecantPlane:
    values = [evaluate(spec, v) for v in J.vertices]
    amap = to_standard(J)
    d = J.dimension
    w = [values[j + 1] - values[0] for j in range(d)]
    # gradient g solves B^T g = w
    bt = [[amap.matrix[k][i] for k in range(d)] for i in range(d)]
    if J.exact and all(isinstance(v, Rational) for v in values):
        g = exact_solve(bt, [Fraction(x) for x in w])
    else:
        g = [float(x) for x in np.linalg.solve(np.array(bt, dtype=float), np.array(w, dtype=float))]
        values = [float(v) for v in values]
    const = values[0] - _dot(g, J.vertices[0])
    if not J.exact:
        const = float(const)
    return SecantPlane(tuple(g), const)


def secant_mean(spec, J: Simplex):
    """Integral of the secant plane over J: ``vol(J)/(d+1) * sum_j f(v_j)``."""
    values = [evaluate(spec, v) for v in J.vertices]
    vol = simplex_volume(J)
    if J.exact and all(isinstance(v, Rational) for v in values):
        return vol * sum(values, Fraction(0)) / (J.dimension + 1)
    return float(vol) * math.fsum(float(v) for v in values) / (J.dimension + 1)


# ---------------------------------------------------------------------------
# spec-string parsing
# ---------------------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d*)?(?:[eE][+-]?\d+)?(?:/\d+)?|\.\d+)"
    r"|(?P<var>x(?P<idx>\d+))|(?P<op>[+\-*^]))"
)


def _parse_rational(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise SpecParseError("not a rational number", text.strip()) from None


def _tokenize(text: str):
    pos = 0
    tokens = []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise SpecParseError("unexpected token in polynomial", text[pos:].split()[0] if text[pos:].split() else text[pos:])
        if m.group("num"):
            tokens.append(("num", _parse_rational(m.group("num"))))
        elif m.group("var"):
            idx = int(m.group("idx"))
            if idx < 1:
                raise SpecParseError("variables are numbered from x1", m.group("var"))
            tokens.append(("var", idx - 1))
        else:
            tokens.append(("op", m.group("op")))
        pos = m.end()
    return tokens


def parse_polynomial(text: str, dim: int | None = None) -> Polynomial:
    """Parse ``3*x1^2*x2 - 1/2*x2^3`` style sums of products."""
    tokens = _tokenize(text)
    if not tokens:
        raise SpecParseError("empty polynomial", text)
    terms: list[tuple[Fraction, dict[int, int]]] = []
    i = 0
    sign = 1
    expect_term = True
    coeff, powers = Fraction(1), {}
    while i < len(tokens):
        kind, val = tokens[i]
        if expect_term:
            if kind == "op" and val in "+-":
                sign = -sign if val == "-" else sign
                i += 1
                continue
            coeff, powers = Fraction(sign), {}
            while True:
                kind, val = tokens[i]
                if kind == "num":
                    coeff *= val
                    i += 1
                elif kind == "var":
                    i += 1
                    k = 1
                    if i < len(tokens) and tokens[i] == ("op", "^"):
                        if i + 1 >= len(tokens) or tokens[i + 1][0] != "num" or tokens[i + 1][1].denominator != 1:
                            raise SpecParseError("exponent must be a nonnegative integer", text)
                        k = int(tokens[i + 1][1])
                        i += 2
                    powers[val] = powers.get(val, 0) + k
                else:
                    raise SpecParseError("expected a number or variable", val)
                if i < len(tokens) and tokens[i] == ("op", "*"):
                    i += 1
                    if i >= len(tokens):
                        raise SpecParseError("dangling '*'", text)
                    continue
                break
            terms.append((coeff, powers))
            expect_term = False
            sign = 1
        else:
            if kind == "op" and val in "+-":
                sign = -1 if val == "-" else 1
                expect_term = True
                i += 1
            else:
                raise SpecParseError("expected '+' or '-'", str(val))
    if expect_term:
        raise SpecParseError("polynomial ends with an operator", text)
    nvars = max((max(p, default=-1) + 1 for _, p in terms), default=0)
    if dim is not None:
        if nvars > dim:
            raise SpecParseError(f"variable index exceeds dimension {dim}", f"x{nvars}")
        nvars = dim
    nvars = max(nvars, 1)
    out = {}
    for c, p in terms:
        e = tuple(p.get(j, 0) for j in range(nvars))
        out[e] = out.get(e, 0) + c
    return Polynomial(out, nvars)


def _parse_fields(body: str, text: str) -> dict[str, str]:
    fields = {}
    for part in body.split(";"):
        part = part.strip()
        if not part:
            continue
        key, eq, val = part.partition("=")
        fields[key.strip()] = val.strip() if eq else None
    return fields


def _parse_vector(val: str | None, key: str) -> tuple:
    if not val:
        raise SpecParseError(f"missing value for {key}")
    return tuple(_parse_rational(v) for v in val.split(","))


def parse_function_spec(text: str, dim: int | None = None) -> FunctionSpec:
    """Parse a tagged function-spec string.

    Accepted forms: ``poly:<expr>``, ``linpow:c=..;b=..;q=..``,
    ``exp:c=..;b=..[;minus1]`` and ``logsumexp:d=..``.
    """
    tag, colon, body = text.partition(":")
    tag = tag.strip().lower()
    if not colon:
        raise SpecParseError("function spec needs a 'tag:' prefix", text)
    if tag == "poly":
        return Poly(parse_polynomial(body, dim))
    fields = _parse_fields(body, text)
    if tag == "linpow":
        unknown = set(fields) - {"c", "b", "q"}
        if unknown:
            raise SpecParseError("unknown linpow field", sorted(unknown)[0])
        c = _parse_vector(fields.get("c"), "c")
        b = _parse_rational(fields.get("b") or "0")
        if "q" not in fields or not fields["q"]:
            raise SpecParseError("linpow needs q", text)
        q = _parse_rational(fields["q"])
        return LinPow(c, b, q)
    if tag == "exp":
        unknown = set(fields) - {"c", "b", "minus1"}
        if unknown:
            raise SpecParseError("unknown exp field", sorted(unknown)[0])
        c = _parse_vector(fields.get("c"), "c")
        b = _parse_rational(fields.get("b") or "0")
        return ExpAffine(c, b, "minus1" in fields)
    if tag == "logsumexp":
        unknown = set(fields) - {"d"}
        if unknown or "d" not in fields:
            raise SpecParseError("logsumexp needs exactly d=<int>", text)
        try:
            d = int(fields["d"])
        except (TypeError, ValueError):
            raise SpecParseError("logsumexp dimension must be an integer", fields["d"]) from None
        if d < 1:
            raise SpecParseError("logsumexp dimension must be positive", fields["d"])
        return LogSumExp(d)
    raise SpecParseError("unknown function tag", tag)
