"""Simplices, affine normalization to the standard simplex, and sampling.

A simplex is stored either exactly (``fractions.Fraction`` coordinates) or
numerically (``float`` coordinates).  Exact mode is chosen automatically
whenever every coordinate is an ``int`` or ``Fraction``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Sequence

import numpy as np

from .errors import DegenerateSimplexError, SpecParseError

__all__ = [
    "Simplex",
    "AffineMap",
    "ConeRegion",
    "simplex_volume",
    "to_standard",
    "sample_uniform",
    "standard_simplex",
    "scaled_simplex",
    "shifted_simplex",
    "interval",
    "load_simplex_json",
    "dump_simplex_json",
]

NUMERIC_DEGENERACY_TOL = 1e-12


def _is_rational(v) -> bool:
    return isinstance(v, Rational) and not isinstance(v, bool)


def coerce_vector(values, exact: bool | None = None) -> tuple:
    """Return ``values`` as a tuple of Fractions (exact) or floats."""
    values = list(values)
    if exact is None:
        exact = all(_is_rational(v) for v in values)
    if exact:
        return tuple(Fraction(v) for v in values)
    return tuple(float(v) for v in values)


# ---------------------------------------------------------------------------
# small dense linear algebra over Fractions
# ---------------------------------------------------------------------------

def exact_det(rows: Sequence[Sequence[Fraction]]) -> Fraction:
    """Determinant by fraction-exact Gaussian elimination."""
    a = [list(r) for r in rows]
    n = len(a)
    det = Fraction(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            a[col], a[pivot] = a[pivot], a[col]
            det = -det
        p = a[col][col]
        det *= p
        for r in range(col + 1, n):
            factor = a[r][col] / p
            if factor:
                for c in range(col, n):
                    a[r][c] -= factor * a[col][c]
    return det


def exact_solve(rows: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction]) -> list[Fraction]:
    """Solve ``A x = rhs`` exactly; ``A`` must be nonsingular."""
    n = len(rows)
    a = [list(r) + [rhs[i]] for i, r in enumerate(rows)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col] != 0), None)
        if pivot is None:
            raise DegenerateSimplexError("singular matrix in exact solve")
        a[col], a[pivot] = a[pivot], a[col]
        p = a[col][col]
        for r in range(n):
            if r != col and a[r][col]:
                factor = a[r][col] / p
                for c in range(col, n + 1):
                    a[r][c] -= factor * a[col][c]
    return [a[i][n] / a[i][i] for i in range(n)]


# ---------------------------------------------------------------------------
# types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Simplex:
    """A d-simplex given by its d+1 vertices in R^d.

    Construction validates the vertex count, coordinate lengths and affine
    independence.  ``exact`` is True when all coordinates are rational.
    """

    vertices: tuple

    def __init__(self, vertices, exact: bool | None = None):
        rows = [list(v) for v in vertices]
        if not rows:
            raise DegenerateSimplexError("a simplex needs at least two vertices")
        if exact is None:
            exact = all(_is_rational(x) for r in rows for x in r)
        verts = tuple(coerce_vector(r, exact) for r in rows)
        d = len(verts) - 1
        if d < 1:
            raise DegenerateSimplexError("a simplex needs at least two vertices")
        for v in verts:
            if len(v) != d:
                raise DegenerateSimplexError(
                    f"{d + 1} vertices require coordinates of length {d}, got {len(v)}"
                )
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "_exact", bool(exact))
        # validates nondegeneracy once; cached for later use
        object.__setattr__(self, "_map", _build_affine_map(self))

    @property
    def dimension(self) -> int:
        return len(self.vertices) - 1

    @property
    def exact(self) -> bool:
        return self._exact

    def to_numeric(self) -> "Simplex":
        return self if not self.exact else Simplex(self.vertices, exact=False)

    def as_array(self) -> np.ndarray:
        return np.array([[float(x) for x in v] for v in self.vertices])

    def centroid(self) -> tuple:
        d = self.dimension
        if self.exact:
            return tuple(sum(v[i] for v in self.vertices) / (d + 1) for i in range(d))
        return tuple(float(x) for x in self.as_array().mean(axis=0))

    def scaled(self, factor) -> "Simplex":
        return Simplex([[factor * x for x in v] for v in self.vertices])

    def __repr__(self) -> str:
        def fmt(x):
            return str(x) if isinstance(x, Fraction) else repr(x)
        body = ", ".join("(" + ", ".join(fmt(x) for x in v) + ")" for v in self.vertices)
        return f"Simplex([{body}])"


@dataclass(frozen=True)
class AffineMap:
    """``x = B t + offset``, mapping the standard simplex onto a simplex J.

    ``matrix`` is stored row-major as a tuple of rows; column j is
    ``v_{j+1} - v_0``.
    """

    matrix: tuple
    offset: tuple
    abs_det: object
    exact: bool

    @property
    def dimension(self) -> int:
        return len(self.offset)

    def __call__(self, t):
        d = self.dimension
        return tuple(
            sum((self.matrix[i][k] * t[k] for k in range(d)), self.offset[i]) for i in range(d)
        )

    def inverse(self, x):
        """Return ``t = B^{-1}(x - offset)``."""
        d = self.dimension
        if self.exact and all(_is_rational(xi) for xi in x):
            rhs = [Fraction(x[i]) - self.offset[i] for i in range(d)]
            return tuple(exact_solve(self.matrix, rhs))
        B = np.array(self.matrix, dtype=float)
        rhs = np.asarray(x, dtype=float) - np.array(self.offset, dtype=float)
        return tuple(np.linalg.solve(B, rhs))

    def as_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        return np.array(self.matrix, dtype=float), np.array(self.offset, dtype=float)


@dataclass(frozen=True)
class ConeRegion:
    """The region {(x, z) : x in z*J, 0 <= z <= 1} over a base simplex J."""

    base: Simplex

    @property
    def dimension(self) -> int:
        return self.base.dimension + 1

    def volume(self):
        return simplex_volume(self.base) / (self.base.dimension + 1)


def _build_affine_map(J: Simplex) -> AffineMap:
    v0 = J.vertices[0]
    d = J.dimension
    cols = [[v[i] - v0[i] for i in range(d)] for v in J.vertices[1:]]
    rows = tuple(tuple(cols[k][i] for k in range(d)) for i in range(d))
    if J.exact:
        det = exact_det(rows)
        if det == 0:
            raise DegenerateSimplexError(f"vertices are affinely dependent: {J.vertices!r}")
        return AffineMap(rows, v0, abs(det), True)
    B = np.array(rows, dtype=float)
    if not np.all(np.isfinite(B)):
        raise DegenerateSimplexError("non-finite vertex coordinates")
    det = abs(float(np.linalg.det(B)))
    scale = float(np.max(np.linalg.norm(B, axis=0))) if d else 1.0
    if det <= NUMERIC_DEGENERACY_TOL * scale ** d:
        raise DegenerateSimplexError(
            f"|det B| = {det:.3g} is below {NUMERIC_DEGENERACY_TOL:g} * (max column norm)^d"
        )
    return AffineMap(rows, v0, det, False)


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------

def simplex_volume(J: Simplex):
    """Volume ``|det[v1-v0, ..., vd-v0]| / d!``; a Fraction in exact mode."""
    return J._map.abs_det / math.factorial(J.dimension)


def to_standard(J: Simplex) -> AffineMap:
    """Affine map sending the standard simplex onto ``J`` (e_j -> v_j, 0 -> v_0)."""
    return J._map


def sample_uniform(region, count: int, seed: int) -> np.ndarray:
    """Draw ``count`` uniform points from a simplex or a cone region.

    Simplex samples use normalized exponential spacings (uniform barycentric
    coordinates) pushed through the affine map.  Cone samples draw ``z`` with
    density ``(d+1) z^d`` on [0, 1] and scale a simplex sample by it; the
    returned rows are ``(x_1, ..., x_d, z)``.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    rng = np.random.default_rng(np.random.PCG64(seed))
    if isinstance(region, ConeRegion):
        d = region.base.dimension
        x = _sample_simplex(region.base, count, rng)
        z = rng.random(count) ** (1.0 / (d + 1))
        return np.column_stack([x * z[:, None], z])
    if isinstance(region, Simplex):
        return _sample_simplex(region, count, rng)
    raise TypeError(f"cannot sample from {type(region).__name__}")


def _sample_simplex(J: Simplex, count: int, rng: np.random.Generator) -> np.ndarray:
    d = J.dimension
    e = rng.standard_exponential((count, d + 1))
    bary = e / e.sum(axis=1, keepdims=True)
    B, v0 = to_standard(J).as_arrays()
    return bary[:, 1:] @ B.T + v0


# ---------------------------------------------------------------------------
# constructors and file I/O
# ---------------------------------------------------------------------------

def standard_simplex(d: int) -> Simplex:
    verts = [[0] * d] + [[1 if i == j else 0 for i in range(d)] for j in range(d)]
    return Simplex(verts)


def scaled_simplex(d: int, u) -> Simplex:
    """``u * Delta_d``."""
    return shifted_simplex(d, u, [0] * d)


def shifted_simplex(d: int, u, v0) -> Simplex:
    """``v0 + u * Delta_d``."""
    v0 = list(v0)
    if len(v0) != d:
        raise DegenerateSimplexError(f"offset has length {len(v0)}, expected {d}")
    verts = [list(v0)] + [[v0[i] + (u if i == j else 0) for i in range(d)] for j in range(d)]
    return Simplex(verts)


def interval(lo, hi) -> Simplex:
    return Simplex([[lo], [hi]])


def load_simplex_json(text: str) -> Simplex:
    """Parse ``{"vertices": [[...], ...]}``.

    Entries are JSON numbers (numeric mode) or ``"p/q"`` strings (exact mode);
    mixing the two is rejected.
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecParseError(f"invalid simplex JSON ({exc.msg})") from None
    if not isinstance(data, dict) or "vertices" not in data:
        raise SpecParseError("simplex JSON must be an object with a 'vertices' key")
    rows = data["vertices"]
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise SpecParseError("'vertices' must be a list of coordinate lists")
    flat = [x for r in rows for x in r]
    kinds = {"str" if isinstance(x, str) else "num" if isinstance(x, (int, float)) and not isinstance(x, bool) else "bad" for x in flat}
    if "bad" in kinds:
        bad = next(x for x in flat if not isinstance(x, (str, int, float)) or isinstance(x, bool))
        raise SpecParseError("unsupported vertex entry", bad)
    if kinds == {"str", "num"}:
        raise SpecParseError("vertex entries mix numbers and rational strings")
    if kinds == {"str"}:
        parsed = []
        for r in rows:
            row = []
            for x in r:
                try:
                    row.append(Fraction(x))
                except (ValueError, ZeroDivisionError):
                    raise SpecParseError("bad rational vertex entry", x) from None
            parsed.append(row)
        return Simplex(parsed, exact=True)
    return Simplex([[float(x) for x in r] for r in rows], exact=False)


def dump_simplex_json(J: Simplex) -> str:
    if J.exact:
        rows = [[str(x) for x in v] for v in J.vertices]
    else:
        rows = [list(v) for v in J.vertices]
    return json.dumps({"vertices": rows})
