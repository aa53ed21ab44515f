import json
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from simplexvol import (
    ConeRegion,
    DegenerateSimplexError,
    Simplex,
    SpecParseError,
    dump_simplex_json,
    load_simplex_json,
    sample_uniform,
    scaled_simplex,
    shifted_simplex,
    simplex_volume,
    standard_simplex,
    to_standard,
)
from simplexvol.geometry import exact_det


def test_volume_examples():
    assert simplex_volume(standard_simplex(2)) == Fraction(1, 2)
    assert simplex_volume(scaled_simplex(3, 2)) == Fraction(4, 3)
    assert simplex_volume(Simplex([[1, 1], [3, 1], [1, 4]])) == 3


def test_to_standard_examples():
    amap = to_standard(standard_simplex(3))
    assert amap.matrix == ((1, 0, 0), (0, 1, 0), (0, 0, 1))
    assert amap.offset == (0, 0, 0)
    assert amap.abs_det == 1

    amap = to_standard(shifted_simplex(2, 3, [1, 2]))
    assert amap.matrix == ((3, 0), (0, 3))
    assert amap.offset == (1, 2)
    assert amap.abs_det == 9

    amap = to_standard(Simplex([[1, 1], [3, 1], [1, 4]]))
    assert amap.matrix == ((2, 0), (0, 3))
    assert amap.offset == (1, 1)
    assert amap.abs_det == 6


def test_exact_mode_detection():
    assert standard_simplex(2).exact
    assert not Simplex([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]).exact
    assert isinstance(simplex_volume(standard_simplex(2)), Fraction)


@pytest.mark.parametrize(
    "vertices",
    [
        [[0, 0], [1, 1], [2, 2]],
        [[0, 0], [1, 0], [2, 0]],
        [[0.0, 0.0], [1.0, 1.0], [2.0, 2.0 + 1e-15]],
    ],
)
def test_degenerate_simplex_rejected(vertices):
    with pytest.raises(DegenerateSimplexError):
        Simplex(vertices)


def test_shape_errors():
    with pytest.raises(DegenerateSimplexError):
        Simplex([[0, 0], [1, 0]])
    with pytest.raises(DegenerateSimplexError):
        Simplex([[0]])


def test_sample_mean_first_moment():
    pts = sample_uniform(standard_simplex(2), 10**5, seed=1)
    mean = pts[:, 0].mean()
    stderr = pts[:, 0].std(ddof=1) / math.sqrt(len(pts))
    assert abs(mean - 1 / 3) < 3 * stderr


def test_sampling_is_deterministic():
    a = sample_uniform(standard_simplex(1), 4, seed=7)
    b = sample_uniform(standard_simplex(1), 4, seed=7)
    assert np.array_equal(a, b)


def test_cone_sample_z_marginal():
    pts = sample_uniform(ConeRegion(standard_simplex(2)), 10**5, seed=2)
    frac = (pts[:, -1] > 0.5).mean()
    p = 1 - 0.5**3
    stderr = math.sqrt(p * (1 - p) / len(pts))
    assert abs(frac - p) < 3 * stderr
    # every sample satisfies x in z * Delta_2
    x, z = pts[:, :-1], pts[:, -1]
    assert np.all(x >= 0) and np.all(x.sum(axis=1) <= z + 1e-12)


def test_bounding_box_monte_carlo_volume():
    J = Simplex([[1.0, 1.0], [3.0, 1.0], [1.0, 4.0]])
    rng = np.random.default_rng(11)
    n = 10**5
    pts = rng.uniform([1, 1], [3, 4], size=(n, 2))
    amap = to_standard(J)
    B, v0 = amap.as_arrays()
    t = np.linalg.solve(B, (pts - v0).T).T
    inside = np.all(t >= 0, axis=1) & (t.sum(axis=1) <= 1)
    box = 6.0
    est = box * inside.mean()
    stderr = box * inside.std(ddof=1) / math.sqrt(n)
    assert abs(est - float(simplex_volume(J))) < 3 * stderr


def test_json_round_trip():
    J = Simplex([[Fraction(1, 3), 0], [1, 0], [0, 1]])
    assert load_simplex_json(dump_simplex_json(J)).vertices == J.vertices
    Jf = load_simplex_json(json.dumps({"vertices": [[0.5, 0], [1, 0], [0, 1]]}))
    assert not Jf.exact


@pytest.mark.parametrize(
    "text",
    [
        '{"vertices": [["1/2", 0], [1, 0], [0, 1]]}',
        '{"verts": []}',
        "not json",
        '{"vertices": [["a", "0"], ["1", "0"], ["0", "1"]]}',
    ],
)
def test_bad_json(text):
    with pytest.raises(SpecParseError):
        load_simplex_json(text)


rational = st.fractions(min_value=-5, max_value=5, max_denominator=6)


@st.composite
def rational_simplices(draw, max_d=4):
    d = draw(st.integers(1, max_d))
    rows = draw(st.lists(st.lists(rational, min_size=d, max_size=d), min_size=d + 1, max_size=d + 1))
    base = [[r[i] - rows[0][i] for i in range(d)] for r in rows[1:]]
    if exact_det(base) == 0:
        rows = [[0] * d] + [[1 if i == j else 0 for i in range(d)] for j in range(d)]
    return Simplex(rows)


@given(rational_simplices())
@settings(max_examples=60, deadline=None)
def test_volume_equals_det_over_factorial(J):
    d = J.dimension
    assert simplex_volume(J) == to_standard(J).abs_det / math.factorial(d)
    assert simplex_volume(J) > 0


@given(rational_simplices())
@settings(max_examples=60, deadline=None)
def test_affine_map_round_trip_exact(J):
    amap = to_standard(J)
    d = J.dimension
    assert amap([0] * d) == J.vertices[0]
    for j in range(d):
        e = [1 if i == j else 0 for i in range(d)]
        assert amap(e) == J.vertices[j + 1]
        assert amap.inverse(J.vertices[j + 1]) == tuple(Fraction(x) for x in e)


@given(rational_simplices())
@settings(max_examples=40, deadline=None)
def test_affine_map_round_trip_numeric(J):
    Jn = J.to_numeric()
    amap = to_standard(Jn)
    for v in Jn.vertices:
        back = amap(amap.inverse(v))
        scale = max(1.0, max(abs(x) for x in v))
        assert all(abs(a - b) <= 1e-12 * scale for a, b in zip(back, v))
