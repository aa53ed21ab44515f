"""Sparse multivariate polynomials with exact rational coefficients."""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping


class Polynomial:
    """Polynomial in ``nvars`` variables stored as ``{exponent tuple: coefficient}``.

    Zero coefficients are never stored.  Coefficients are Fractions unless a
    float enters through arithmetic, in which case they stay floats.
    """

    __slots__ = ("nvars", "terms")

    def __init__(self, terms: Mapping[tuple, object] | None = None, nvars: int | None = None):
        clean: dict[tuple, object] = {}
        for exps, c in (terms or {}).items():
            exps = tuple(int(e) for e in exps)
            if any(e < 0 for e in exps):
                raise ValueError(f"negative exponent in {exps}")
            if isinstance(c, int):
                c = Fraction(c)
            if c != 0:
                clean[exps] = clean.get(exps, 0) + c
                if clean[exps] == 0:
                    del clean[exps]
        if nvars is None:
            lengths = {len(e) for e in clean}
            if len(lengths) > 1:
                raise ValueError("exponent tuples of different lengths")
            nvars = lengths.pop() if lengths else 0
        for e in clean:
            if len(e) != nvars:
                raise ValueError(f"exponent {e} does not have {nvars} entries")
        self.nvars = nvars
        self.terms = clean

    # -- constructors -----------------------------------------------------
    @classmethod
    def constant(cls, c, nvars: int) -> "Polynomial":
        return cls({(0,) * nvars: c}, nvars)

    @classmethod
    def variable(cls, i: int, nvars: int) -> "Polynomial":
        e = [0] * nvars
        e[i] = 1
        return cls({tuple(e): Fraction(1)}, nvars)

    @classmethod
    def monomial(cls, exps: Iterable[int], coeff=1) -> "Polynomial":
        exps = tuple(exps)
        return cls({exps: coeff}, len(exps))

    @classmethod
    def linear(cls, c: Iterable, b=0) -> "Polynomial":
        """The affine form ``c . x + b``."""
        c = list(c)
        n = len(c)
        terms = {(0,) * n: b}
        for i, ci in enumerate(c):
            e = [0] * n
            e[i] = 1
            terms[tuple(e)] = ci
        return cls(terms, n)

    # -- inspection -------------------------------------------------------
    @property
    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def is_zero(self) -> bool:
        return not self.terms

    def is_exact(self) -> bool:
        return all(isinstance(c, Fraction) for c in self.terms.values())

    def homogeneous_parts(self) -> dict[int, "Polynomial"]:
        parts: dict[int, dict] = {}
        for e, c in self.terms.items():
            parts.setdefault(sum(e), {})[e] = c
        return {q: Polynomial(t, self.nvars) for q, t in sorted(parts.items())}

    def homogeneous_degree(self) -> int | None:
        """Common total degree of all terms, or None if not homogeneous."""
        degs = {sum(e) for e in self.terms}
        return degs.pop() if len(degs) == 1 else None

    def __call__(self, x):
        if len(x) != self.nvars:
            raise ValueError(f"expected a point with {self.nvars} coordinates, got {len(x)}")
        total = 0
        for e, c in self.terms.items():
            term = c
            for xi, k in zip(x, e):
                if k:
                    term = term * xi ** k
            total = total + term
        return total if self.terms else Fraction(0)

    def evaluate_many(self, X):
        import numpy as np

        X = np.asarray(X, dtype=float)
        out = np.zeros(X.shape[0])
        for e, c in self.terms.items():
            term = np.full(X.shape[0], float(c))
            for i, k in enumerate(e):
                if k:
                    term *= X[:, i] ** k
            out += term
        return out

    # -- arithmetic -------------------------------------------------------
    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if other.nvars != self.nvars:
                raise ValueError("polynomials live in different numbers of variables")
            return other
        return Polynomial.constant(other, self.nvars)

    def __add__(self, other):
        other = self._coerce(other)
        terms = dict(self.terms)
        for e, c in other.terms.items():
            terms[e] = terms.get(e, 0) + c
        return Polynomial(terms, self.nvars)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial({e: -c for e, c in self.terms.items()}, self.nvars)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            return Polynomial({e: c * other for e, c in self.terms.items()}, self.nvars)
        other = self._coerce(other)
        terms: dict[tuple, object] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                terms[e] = terms.get(e, 0) + c1 * c2
        return Polynomial(terms, self.nvars)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("polynomial powers need a nonnegative integer exponent")
        result = Polynomial.constant(Fraction(1), self.nvars)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.nvars == other.nvars and self.terms == other.terms
        return self == self._coerce(other)

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    def compose_affine(self, matrix, offset) -> "Polynomial":
        """Substitute ``x = matrix @ t + offset``; result is a polynomial in t.

        ``matrix`` is row-major (``x_i = sum_k matrix[i][k] t_k + offset[i]``).
        """
        n_out = len(matrix[0]) if matrix else 0
        forms = [Polynomial.linear(row, off) for row, off in zip(matrix, offset)]
        cache: dict[tuple[int, int], Polynomial] = {}

        def power(i: int, k: int) -> Polynomial:
            if (i, k) not in cache:
                if k == 0:
                    cache[i, k] = Polynomial.constant(Fraction(1), n_out)
                else:
                    cache[i, k] = power(i, k - 1) * forms[i]
            return cache[i, k]

        result = Polynomial({}, n_out)
        for e, c in self.terms.items():
            term = Polynomial.constant(c, n_out)
            for i, k in enumerate(e):
                if k:
                    term = term * power(i, k)
            result = result + term
        return result

    def __repr__(self) -> str:
        return f"Polynomial({format_polynomial(self)!r})"


def format_polynomial(p: Polynomial) -> str:
    if not p.terms:
        return "0"
    pieces = []
    for e in sorted(p.terms, key=lambda e: (-sum(e), tuple(-k for k in e))):
        c = p.terms[e]
        factors = [f"x{i + 1}" + (f"^{k}" if k > 1 else "") for i, k in enumerate(e) if k]
        if not factors:
            pieces.append(str(c))
        elif c == 1:
            pieces.append("*".join(factors))
        elif c == -1:
            pieces.append("-" + "*".join(factors))
        else:
            pieces.append(f"{c}*" + "*".join(factors))
    out = pieces[0]
    for piece in pieces[1:]:
        out += " - " + piece[1:] if piece.startswith("-") else " + " + piece
    return out

