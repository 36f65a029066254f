"""Acceptance criteria 1-8, each at its stated tolerance.

Every test records one PASS/FAIL line (shown in the pytest summary, or
printed when run as a script) and then asserts.
"""
import time

import numpy as np
import pytest

from s3sr import connect, core, geodesics, hamiltonian, hopf
from s3sr.core import I1, I2, I3, IDENTITY

from conftest import ACCEPTANCE_LINES, random_points


def record(num, title, checks, t0):
    """``checks`` is a list of (label, value, tol); passes iff every value <= tol."""
    ok = all(np.isfinite(v) and v <= tol for _, v, tol in checks)
    detail = "; ".join(f"{lab} {v:.2e}<={tol:.0e}" for lab, v, tol in checks)
    line = f"{'PASS' if ok else 'FAIL'} [{num}] {title} ({time.perf_counter() - t0:.1f}s): {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def test_1_conservation():
    t0 = time.perf_counter()
    rng = np.random.default_rng(1)
    n = 100
    x0 = random_points(rng, n)
    f = core.frame_at(x0)
    phi = rng.uniform(-np.pi, np.pi, n)[:, None]
    # unit speed: p = <X, xi>, q = <Y, xi> on the unit circle; Z and N parts free
    xi0 = (np.cos(phi) * f.X + np.sin(phi) * f.Y + rng.normal(size=(n, 1)) * f.Z
           + rng.normal(size=(n, 1)) * f.N)
    trajs = hamiltonian.integrate(x0, xi0, 4 * np.pi, check=False)
    m = {k: max(t.max_monitors()[k] for t in trajs) for k in ("norm_drift", "H_drift", "c")}
    assert record(1, "conservation, 100 covectors to s=4pi",
                  [("| |x|-1 |", m["norm_drift"], 1e-8), ("|H-H0|", m["H_drift"], 1e-8),
                   ("|c|", m["c"], 1e-8)], t0)


def test_2_closed_form_oracle():
    t0 = time.perf_counter()
    rng = np.random.default_rng(2)
    s = np.linspace(0, 2 * np.pi, 629)
    n = 50
    Bs, ths, As = rng.uniform(-5, 5, n), rng.uniform(-np.pi, np.pi, n), rng.normal(size=n)
    xi0 = np.column_stack([As, Bs, np.cos(ths), np.sin(ths)])
    trajs = hamiltonian.integrate(np.tile(IDENTITY, (n, 1)), xi0, 2 * np.pi, s_eval=s)
    err = max(np.abs(tr.x - geodesics.geodesic_bc(geodesics.GeodesicParam(B, th), s)).max()
              for tr, B, th in zip(trajs, Bs, ths))
    b0 = 0.0
    for th in rng.uniform(-np.pi, np.pi, 10):
        p = geodesics.GeodesicParam(0.0, th)
        z, w = geodesics.geodesic_zw(0.0, th, s)
        v0 = geodesics.geodesic_velocity(p, 0.0)
        b0 = max(b0, np.abs(z - np.cos(s)).max(),
                 np.abs(w - (v0[2] + 1j * v0[3]) * np.sin(s)).max())
    assert record(2, "integrator vs closed forms, 50 (B, theta)",
                  [("sup err", err, 1e-6), ("B=0 reduction", b0, 1e-12)], t0)


def test_3_fiber_enumeration():
    t0 = time.perf_counter()
    arith, resid, odd_missing = 0.0, 0.0, 0
    for om in (0.1, np.pi / 2, 3.0):
        sols = connect.enumerate_to_fiber(om, 6)
        for n in range(1, 7):
            at_n = [g for g in sols if g.branch_index == n]
            if n % 2 == 0:
                fam = [g for g in at_n if g.winding == n // 2]
                assert len(fam) == 1
                arith = max(arith, abs(fam[0].s_arc - np.sqrt(np.pi ** 2 * n ** 2 - om ** 2)))
                arith = max(arith, abs(fam[0].B + om / fam[0].s_arc))
            elif not at_n:
                odd_missing += 1
        resid = max(resid, max(g.residual for g in sols))
        # independent forward check of every returned solution
        tgt = np.array([np.cos(om), np.sin(om), 0, 0])
        for g in sols:
            resid = max(resid, np.abs(geodesics.geodesic_bc(g.param, g.s_arc) - tgt).max())
    assert record(3, "fiber family for omega in {0.1, pi/2, 3.0}",
                  [("even-n arithmetic", arith, 1e-12), ("endpoint residual", resid, 1e-9),
                   ("odd n missing", odd_missing, 0)], t0)


def test_4_round_trip_and_count():
    t0 = time.perf_counter()
    rng = np.random.default_rng(4)
    rec, cnt_diff, bound_viol = 0.0, 0, 0.0
    for _ in range(20):
        B, th, s = rng.uniform(0.2, 2), rng.uniform(-np.pi, np.pi), rng.uniform(0.5, 2)
        tgt = connect.TargetPoint.from_point(
            geodesics.geodesic_bc(geodesics.GeodesicParam(B, th), s))
        sols = connect.enumerate_between(tgt, s_max=2 * np.pi)
        rec = max(rec, min(max(abs(g.B - B), abs(g.s_arc - s)) for g in sols))
        n_or, _ = connect.brute_force_count(tgt, 1e-3, 2 * np.pi)
        cnt_diff += abs(n_or - len(sols))
        b = connect.paper_root_bound(tgt.alpha, tgt.rho)
        # the bound's argument uses the principal arcsin, i.e. sheet 0 of branch 0
        for g in sols:
            if g.branch_index == 0 and g.sheet == 0 and g.B > 0:
                bound_viol = max(bound_viol, b - g.B)
    assert record(4, "20 forward-map targets",
                  [("recovery", rec, 1e-8), ("count mismatch", cnt_diff, 0),
                   ("bound violation", bound_viol, 0.0)], t0)


def test_5_chart_agreement():
    t0 = time.perf_counter()
    rng = np.random.default_rng(5)
    s = np.linspace(0, 2 * np.pi, 1001)
    agree, xi2 = 0.0, 0.0
    for _ in range(20):
        B, th, speed = rng.uniform(-5, 5), rng.uniform(-np.pi, np.pi), rng.uniform(0.5, 2)
        hp = geodesics.HyperGeodesicParam.from_cartesian(B, th, speed)
        hc = geodesics.geodesic_hyper(hp, s)
        cart = geodesics.geodesic_bc(geodesics.GeodesicParam(B, th), speed * s)
        agree = max(agree, np.abs(geodesics.from_hyper(hc) - cart).max())
        xi2 = max(xi2, np.abs(hc.xi2 - hp.xi2_0 - hp.psi1 * s).max())
    assert record(5, "chart closed forms vs Cartesian, 20 sets",
                  [("point agreement", agree, 1e-8), ("xi2 - psi1 s", xi2, 1e-12)], t0)


def test_6_hopf_suite():
    t0 = time.perf_counter()
    rng = np.random.default_rng(6)
    s = np.linspace(0, 2 * np.pi, 501)
    sp = 0.0
    for _ in range(10):
        p = geodesics.GeodesicParam(rng.uniform(-5, 5), rng.uniform(-np.pi, np.pi))
        dh = hopf.hopf_differential(geodesics.geodesic_bc(p, s), geodesics.geodesic_velocity(p, s))
        sp = max(sp, np.abs(np.linalg.norm(dh, axis=1) - 2).max())
    s = np.linspace(0, np.pi, 2001)
    x = geodesics.const_geodesic(IDENTITY, 0.0, s)
    u = hopf.hopf_map(x)
    u[-1] = u[0]
    loop = hopf.LoopOnS2(s / np.pi, u)
    hol = hopf.holonomy(loop, IDENTITY)
    ptl = np.abs(hol.lift.x - x).max()
    # project-then-lift on a generic open geodesic arc too
    p = geodesics.GeodesicParam(1.3, 0.4)
    s2 = np.linspace(0, 3, 1501)
    x2 = geodesics.geodesic_bc(p, s2)
    lift2 = hopf.horizontal_lift(hopf.LoopOnS2(s2 / 3, hopf.hopf_map(x2)), IDENTITY)
    ptl = max(ptl, np.abs(lift2.x - x2).max())
    inv = 0.0
    for t in rng.uniform(-np.pi, np.pi, 3):
        inv = max(inv, abs(hopf.holonomy(loop, hopf.circle_action(IDENTITY, t)).angle - hol.angle))
    assert record(6, "Hopf suite",
                  [("| |dh|-2 |", sp, 1e-8), ("holonomy - pi", abs(hol.angle - np.pi), 1e-8),
                   ("project-then-lift", ptl, 1e-6), ("circle-action invariance", inv, 1e-8)], t0)


def test_7_algebra_suite():
    t0 = time.perf_counter()
    rng = np.random.default_rng(7)
    x = random_points(rng, 1000)
    f = core.frame_at(x)
    br = core.linear_field_bracket
    comm = max(np.abs(br(I1, I2, x) - 2 * f.Z).max(), np.abs(br(I3, I1, x) - 2 * f.Y).max(),
               np.abs(br(I2, I3, x) - 2 * f.X).max())
    om = core.contact_form
    cf = max(np.abs(om(x, f.X)).max(), np.abs(om(x, f.Y)).max(), np.abs(om(x, f.N)).max(),
             np.abs(om(x, f.Z) - 1).max())
    g = random_points(rng, 1000)
    v = rng.normal(size=(1000, 4))
    v -= x * np.sum(x * v, axis=1, keepdims=True)
    moved = np.einsum("nij,nj->ni", core.left_pushforward(g), v)
    li = np.abs(np.stack(core.frame_coeffs(x, v))
                - np.stack(core.frame_coeffs(core.quat_mul(g, x), moved))).max()
    assert record(7, "algebra suite, 1000 points",
                  [("commutators", comm, 1e-12), ("contact form", cf, 1e-12),
                   ("left invariance", li, 1e-10)], t0)


def test_8_second_derivative():
    t0 = time.perf_counter()
    rng = np.random.default_rng(8)
    h = 1e-4
    s = np.linspace(0, 2 * np.pi, 200)
    err = 0.0
    for x0, psi in zip(random_points(rng, 20), rng.uniform(-np.pi, np.pi, 20)):
        g = lambda t: geodesics.const_geodesic(x0, psi, t)  # noqa: E731
        acc = (g(s + h) - 2 * g(s) + g(s - h)) / h ** 2
        err = max(err, np.abs(acc + g(s)).max())
    assert record(8, "x'' = -x by central differences, h=1e-4", [("max err", err, 1e-6)], t0)


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
