import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from s3sr import core
from s3sr.core import I1, I2, I3, IDENTITY
from s3sr.errors import EmptyInput, NonHorizontalPath, NonUnitInput

from conftest import random_points

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)
vec4 = arrays(np.float64, 4, elements=finite).filter(lambda v: np.linalg.norm(v) > 1e-3)
unit4 = vec4.map(lambda v: v / np.linalg.norm(v))


def test_identity_and_units():
    e = IDENTITY
    for basis, expect in [((0, 1, 0, 0), (-1, 0, 0, 0)), ((0, 0, 1, 0), (-1, 0, 0, 0))]:
        assert np.allclose(core.quat_mul(basis, basis), expect)
    # i j = k
    assert np.allclose(core.quat_mul([0, 1, 0, 0], [0, 0, 1, 0]), [0, 0, 0, 1])
    assert np.allclose(core.quat_mul(e, [0, 0, 0, 1]), [0, 0, 0, 1])


def test_non_unit_rejected():
    with pytest.raises(NonUnitInput):
        core.quat_mul([1, 1, 0, 0], IDENTITY)
    with pytest.raises(NonUnitInput):
        core.frame_at([1, 2, 3])
    # NonUnitInput is still a ValueError for plain callers
    with pytest.raises(ValueError):
        core.as_point([2.0, 0, 0, 0])


@settings(max_examples=60, deadline=None)
@given(unit4, unit4, unit4)
def test_group_axioms(x, y, w):
    m = core.quat_mul
    assert np.allclose(m(m(x, y), w), m(x, m(y, w)), atol=1e-12)
    assert abs(np.linalg.norm(m(x, y)) - 1) < 1e-12
    assert np.allclose(m(x, core.quat_inv(x)), IDENTITY, atol=1e-12)
    assert np.allclose(m(core.quat_inv(x), x), IDENTITY, atol=1e-12)


@settings(max_examples=60, deadline=None)
@given(unit4)
def test_pushforward_is_orthogonal_with_frame_columns(x):
    P = core.left_pushforward(x)
    assert np.allclose(P.T @ P, np.eye(4), atol=1e-12)
    f = core.frame_at(x)
    assert np.allclose(P[:, 0], f.N)
    assert np.allclose(P[:, 1], f.Z)
    assert np.allclose(P[:, 2], f.X)
    assert np.allclose(P[:, 3], f.Y)
    # columns are the translates of 1, i, j, k
    for col, unit in zip(P.T, np.eye(4)):
        assert np.allclose(col, core.quat_mul(x, unit), atol=1e-12)


def test_frame_matrices_square_to_minus_one():
    for M in (I1, I2, I3):
        assert np.allclose(M @ M, -np.eye(4))
        assert np.allclose(M.T, -M)


def test_brackets_and_contact_form(rng):
    x = random_points(rng, 200)
    f = core.frame_at(x)
    br = core.linear_field_bracket
    assert np.allclose(br(I1, I2, x), 2 * f.Z, atol=1e-12)
    assert np.allclose(br(I3, I1, x), 2 * f.Y, atol=1e-12)
    assert np.allclose(br(I2, I3, x), 2 * f.X, atol=1e-12)
    # antisymmetry
    assert np.allclose(br(I2, I1, x), -2 * f.Z, atol=1e-12)
    om = core.contact_form
    assert np.allclose(om(x, f.Z), 1, atol=1e-12)
    for v in (f.X, f.Y, f.N):
        assert np.allclose(om(x, v), 0, atol=1e-12)


def test_frame_coeffs_roundtrip(rng):
    x = random_points(rng, 50)
    a, b, c, n = rng.normal(size=(4, 50))
    v = core.from_coeffs(x, a, b, c, n)
    got = core.frame_coeffs(x, v)
    assert np.allclose(got.a, a) and np.allclose(got.b, b)
    assert np.allclose(got.c, c) and np.allclose(got.n, n)


@settings(max_examples=40, deadline=None)
@given(unit4, unit4, arrays(np.float64, 4, elements=finite))
def test_left_invariance_of_coefficients(g, x, v):
    v = v - x * (x @ v)
    moved = core.left_pushforward(g) @ v
    c0 = np.array(core.frame_coeffs(x, v))
    c1 = np.array(core.frame_coeffs(core.quat_mul(g, x), moved))
    assert np.allclose(c0, c1, atol=1e-10 * max(1, np.abs(v).max()))


def test_horizontal_length_of_great_circle():
    s = np.linspace(0, np.pi, 201)
    x = np.column_stack([np.cos(s), 0 * s, np.sin(s), 0 * s])
    v = np.column_stack([-np.sin(s), 0 * s, np.cos(s), 0 * s])
    ok, cmax = core.is_horizontal(x, v)
    assert ok and cmax < 1e-15
    assert core.horizontal_length(s, x, v) == pytest.approx(np.pi, abs=1e-12)
    assert core.horizontal_length(s[:1], x[:1], v[:1]) == 0.0


def test_horizontal_length_errors():
    s = np.linspace(0, 1, 5)
    x = np.column_stack([np.cos(s), np.sin(s), 0 * s, 0 * s])
    v = np.column_stack([-np.sin(s), np.cos(s), 0 * s, 0 * s])  # along Z
    with pytest.raises(NonHorizontalPath):
        core.horizontal_length(s, x, v)
    with pytest.raises(EmptyInput):
        core.horizontal_length([], np.empty((0, 4)), np.empty((0, 4)))
