import io

import numpy as np
import pytest

from s3sr import geodesics, hopf
from s3sr.core import IDENTITY
from s3sr.errors import (BasePointMismatch, DomainError, EmptyInput, InputError, NonUnitInput,
                         ResolutionTooCoarse)


def _pi_loop(n=1001):
    s = np.linspace(0, np.pi, n)
    x = geodesics.const_geodesic(IDENTITY, 0.0, s)
    u = hopf.hopf_map(x)
    u[-1] = u[0]
    return x, hopf.LoopOnS2(s / np.pi, u)


def test_hopf_map_examples():
    assert np.allclose(hopf.hopf_map(IDENTITY), [1, 0, 0])
    assert np.allclose(hopf.hopf_map([0, 0, 1, 0]), [-1, 0, 0])
    r = 1 / np.sqrt(2)
    assert np.allclose(hopf.hopf_map([r, 0, 0, r]), [0, 1, 0])
    assert np.allclose(hopf.hopf_map([r, 0, -r, 0]), [0, 0, 1])


def test_circle_action_shifts_both_chart_angles(rng):
    x = rng.normal(size=(20, 4))
    x /= np.linalg.norm(x, axis=1)[:, None]
    t = 0.37
    h0 = geodesics.to_hyper(x)
    h1 = geodesics.to_hyper(hopf.circle_action(x, t))
    wrap = lambda a: (a + np.pi) % (2 * np.pi) - np.pi  # noqa: E731
    assert np.abs(wrap(h1.xi1 - h0.xi1 - t)).max() < 1e-12
    assert np.abs(wrap(h1.xi2 - h0.xi2 + t)).max() < 1e-12
    assert np.allclose(h1.eta, h0.eta)


def test_bundle_metric():
    assert np.allclose(hopf.bundle_metric_matrix(0.0), np.diag([1, 1, 0]))
    assert np.allclose(hopf.bundle_metric_matrix(np.pi / 2), np.diag([1, 0, 1]))
    with pytest.raises(DomainError):
        hopf.bundle_metric_matrix(2.0)


def test_constant_curve_lifts_to_a_point():
    u = np.tile([1.0, 0, 0], (5, 1))
    lift = hopf.horizontal_lift(hopf.LoopOnS2.from_points(u), IDENTITY)
    assert np.abs(lift.x - IDENTITY).max() < 1e-14
    hol = hopf.holonomy(hopf.LoopOnS2.from_points(u), IDENTITY)
    assert hol.angle == 0.0 and hol.length == 0.0
    single = hopf.horizontal_lift(hopf.LoopOnS2([0.0], [[1.0, 0, 0]]), IDENTITY)
    assert single.x.shape == (1, 4)


def test_pi_loop_holonomy_and_lift():
    x, loop = _pi_loop()
    hol = hopf.holonomy(loop, IDENTITY)
    assert abs(hol.angle - np.pi) < 1e-8
    assert np.abs(hol.lift.x - x).max() < 1e-6
    assert hol.length == pytest.approx(2 * np.pi, abs=1e-6)
    doc = hol.to_dict()
    assert set(doc) == {"angle", "lift_residual", "length"}


def test_lift_errors():
    x, loop = _pi_loop()
    with pytest.raises(BasePointMismatch):
        hopf.horizontal_lift(loop, [0, 0, 1, 0])
    coarse = hopf.LoopOnS2.from_points(loop.u[::100])
    with pytest.raises(ResolutionTooCoarse):
        hopf.horizontal_lift(coarse, IDENTITY, refine=False)
    open_arc = hopf.LoopOnS2.from_points(loop.u[:500])
    with pytest.raises(InputError):
        hopf.holonomy(open_arc, IDENTITY)


def test_loop_validation():
    with pytest.raises(NonUnitInput):
        hopf.LoopOnS2.from_points([[1.0, 1.0, 0.0], [1.0, 0, 0]])
    with pytest.raises(InputError):
        hopf.LoopOnS2([0.0, 0.5, 0.4, 1.0], np.tile([1.0, 0, 0], (4, 1)))
    with pytest.raises(InputError):
        hopf.LoopOnS2([0.1, 1.0], np.tile([1.0, 0, 0], (2, 1)))


def test_read_loop_csv_roundtrip():
    _, loop = _pi_loop(51)
    back = hopf.read_loop_csv(loop.to_csv())
    assert np.array_equal(back.t, loop.t)
    assert np.abs(back.u - loop.u).max() < 1e-15
    assert hopf.read_loop_csv(io.StringIO("0,1,0,0\n1,1,0,0\n")).closed
    with pytest.raises(EmptyInput):
        hopf.read_loop_csv("t,u1,u2,u3\n")
    with pytest.raises(InputError):
        hopf.read_loop_csv("0,1,0\n")


def test_holonomy_element_group():
    a, b = hopf.HolonomyElement(5.0), hopf.HolonomyElement(2.0)
    assert (a * b).angle == pytest.approx(7.0 - 2 * np.pi)
    assert (a * b).element == pytest.approx(a.element * b.element)
    assert hopf.HolonomyElement(-1.0).angle == pytest.approx(2 * np.pi - 1.0)


def test_fiber_angle():
    g = hopf.circle_action([0.5, 0.5, 0.5, 0.5], 2.5)
    ang, off = hopf.fiber_angle([0.5, 0.5, 0.5, 0.5], g)
    assert ang == pytest.approx(2.5) and off < 1e-15


def test_shortest_loop():
    om = 1.0
    sl = hopf.shortest_loop_with_holonomy(om, samples=1001)
    assert sl.n == 1
    assert sl.s_arc == pytest.approx(np.sqrt(om * (2 * np.pi - om)))
    assert abs(sl.holonomy.angle - om) < 1e-8
    assert sl.holonomy.length == pytest.approx(2 * sl.s_arc, abs=1e-6)
