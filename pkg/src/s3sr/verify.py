"""Invariant suite run by ``s3sr verify``.

Each check evaluates one property on seeded random data and compares the
worst deviation against its tolerance.
"""
from dataclasses import dataclass

import numpy as np

from . import connect, core, geodesics, hamiltonian, hopf
from .core import I1, I2, I3, IDENTITY


@dataclass
class Check:
    module: str
    name: str
    value: float
    tol: float

    @property
    def passed(self):
        return bool(np.isfinite(self.value) and self.value <= self.tol)

    def line(self):
        tag = "PASS" if self.passed else "FAIL"
        return f"{tag}  {self.module:<11} {self.name:<44} {self.value:.3e} <= {self.tol:.0e}"


def random_points(rng, n):
    x = rng.normal(size=(n, 4))
    return x / np.linalg.norm(x, axis=-1, keepdims=True)


def _core_checks(rng):
    x, y, w = random_points(rng, 1000), random_points(rng, 1000), random_points(rng, 1000)
    m = core.quat_mul
    yield "closure |x o y| = 1", np.abs(np.linalg.norm(m(x, y), axis=1) - 1).max(), 1e-12
    yield "associativity", np.abs(m(m(x, y), w) - m(x, m(y, w))).max(), 1e-12
    yield "inverse x o x^-1 = 1", np.abs(m(x, core.quat_inv(x)) - IDENTITY).max(), 1e-12
    f = core.frame_at(x)
    br = core.linear_field_bracket
    yield "[X, Y] = 2Z", np.abs(br(I1, I2, x) - 2 * f.Z).max(), 1e-12
    yield "[Z, X] = 2Y", np.abs(br(I3, I1, x) - 2 * f.Y).max(), 1e-12
    yield "[Y, Z] = 2X", np.abs(br(I2, I3, x) - 2 * f.X).max(), 1e-12
    om = core.contact_form
    dev = max(np.abs(om(x, f.X)).max(), np.abs(om(x, f.Y)).max(),
              np.abs(om(x, f.N)).max(), np.abs(om(x, f.Z) - 1).max())
    yield "contact form on N, X, Y, Z", dev, 1e-12
    P = core.left_pushforward(x)
    yield "pushforward orthogonal", np.abs(np.swapaxes(P, 1, 2) @ P - np.eye(4)).max(), 1e-12
    v = rng.normal(size=(1000, 4))
    v -= x * np.sum(x * v, axis=1, keepdims=True)
    moved = np.einsum("nij,nj->ni", core.left_pushforward(y), v)
    c0 = np.stack(core.frame_coeffs(x, v))
    c1 = np.stack(core.frame_coeffs(m(y, x), moved))
    yield "left-invariance of frame coefficients", np.abs(c0 - c1).max(), 1e-10


def _hamiltonian_checks(rng):
    n = 10
    ang = rng.uniform(-np.pi, np.pi, n)
    xi0 = np.column_stack([rng.normal(size=n), rng.normal(size=n), np.cos(ang), np.sin(ang)])
    trajs = hamiltonian.integrate(np.tile(IDENTITY, (n, 1)), xi0, 4 * np.pi)
    mons = [t.max_monitors() for t in trajs]
    for key in ("norm_drift", "H_drift", "c"):
        yield f"conservation {key} to s = 4 pi", max(mo[key] for mo in mons), 1e-8
    s = np.linspace(0, 2 * np.pi, 201)
    err = 0.0
    for B in rng.uniform(-5, 5, 3):
        th = rng.uniform(-np.pi, np.pi)
        p = geodesics.GeodesicParam(B, th)
        tr = hamiltonian.integrate(IDENTITY, p.initial_covector(), 2 * np.pi, s_eval=s)
        err = max(err, np.abs(tr.x - geodesics.geodesic_bc(p, s)).max())
    yield "integrator vs closed form", err, 1e-6
    th = rng.uniform(-np.pi, np.pi)
    x = geodesics.geodesic_bc(geodesics.GeodesicParam(0.0, th), s)
    ref = np.column_stack([np.cos(s), 0 * s, np.cos(th) * np.sin(s), np.sin(th) * np.sin(s)])
    yield "B = 0 reduces to a great circle", np.abs(x - ref).max(), 1e-12
    h = 1e-4
    x0 = random_points(rng, 1)[0]
    ss = np.linspace(0.1, 3, 30)
    g = lambda t: geodesics.const_geodesic(x0, 0.7, t)  # noqa: E731
    acc = (g(ss + h) - 2 * g(ss) + g(ss - h)) / h ** 2
    yield "x'' = -x on constant-coefficient geodesics", np.abs(acc + g(ss)).max(), 1e-6


def _geodesic_checks(rng):
    s = np.linspace(0, 2 * np.pi, 301)
    sp, cc, h0 = 0.0, 0.0, 0.0
    for _ in range(5):
        p = geodesics.GeodesicParam(rng.uniform(-5, 5), rng.uniform(-np.pi, np.pi))
        x, v = geodesics.geodesic_bc(p, s), geodesics.geodesic_velocity(p, s)
        sp = max(sp, np.abs(np.linalg.norm(v, axis=1) - 1).max())
        cc = max(cc, np.abs(core.frame_coeffs(x, v).c).max())
        xi = geodesics.geodesic_covector(p, s, A=rng.normal())
        h0 = max(h0, np.abs(hamiltonian.hamiltonian_value(x, xi) - 0.5).max())
    yield "unit speed of closed forms", sp, 1e-12
    yield "closed forms are horizontal", cc, 1e-12
    yield "covector along closed form keeps H = 1/2", h0, 1e-12
    chart, xi2 = 0.0, 0.0
    for _ in range(5):
        B, th = rng.uniform(-5, 5), rng.uniform(-np.pi, np.pi)
        hp = geodesics.HyperGeodesicParam.from_cartesian(B, th)
        hc = geodesics.geodesic_hyper(hp, s)
        chart = max(chart, np.abs(geodesics.from_hyper(hc)
                                  - geodesics.geodesic_bc(geodesics.GeodesicParam(B, th), s)).max())
        xi2 = max(xi2, np.abs(hc.xi2 - (th + hp.psi1 * s)).max())
    yield "chart closed forms match Cartesian", chart, 1e-8
    yield "xi2 = psi1 s", xi2, 1e-12


def _connect_checks(rng, verify_tol):
    om = np.pi / 2
    sols = connect.enumerate_to_fiber(om, 4)
    even = [g for g in sols if g.branch_index % 2 == 0 and g.winding == g.branch_index // 2]
    yield "fiber family s = sqrt(pi^2 n^2 - w^2)", max(
        abs(g.s_arc - np.sqrt((np.pi * g.branch_index) ** 2 - om ** 2)) for g in even), 1e-12
    yield "fiber endpoint residuals", max(g.residual for g in sols), verify_tol
    rec, cnt, bnd = 0.0, 0.0, 0.0
    for _ in range(2):
        B, th, s = rng.uniform(0.2, 2), rng.uniform(-np.pi, np.pi), rng.uniform(0.5, 2)
        tgt = connect.TargetPoint.from_point(geodesics.geodesic_bc(geodesics.GeodesicParam(B, th), s))
        sols = connect.enumerate_between(tgt, verify_tol=verify_tol, s_max=2 * np.pi)
        rec = max(rec, min(max(abs(g.B - B), abs(g.s_arc - s)) for g in sols))
        n_or, _ = connect.brute_force_count(tgt, s_max=2 * np.pi)
        cnt = max(cnt, abs(n_or - len(sols)))
        b = connect.paper_root_bound(tgt.alpha, tgt.rho)
        first = [g.B for g in sols if g.branch_index == 0 and g.sheet == 0 and g.B > 0]
        bnd = max([bnd] + [b - B_ for B_ in first])
    yield "round trip recovers (B, s)", rec, 1e-8
    yield "solution count equals brute force", cnt, 0.0
    yield "first-branch roots respect lower bound", bnd, 0.0


def _hopf_checks(rng):
    q = random_points(rng, 500)
    qi = core._mul(core._mul(q, np.array([0.0, 1.0, 0.0, 0.0])), core.quat_conj(q))
    yield "h agrees with q i q*", np.abs(hopf.hopf_map(q) - qi[:, 1:]).max(), 1e-12
    t = rng.uniform(-np.pi, np.pi, 500)
    yield "fiber invariance", np.abs(hopf.hopf_map(hopf.circle_action(q, t))
                                     - hopf.hopf_map(q)).max(), 1e-12
    s = np.linspace(0, np.pi, 201)
    sp = 0.0
    for _ in range(3):
        p = geodesics.GeodesicParam(rng.uniform(-3, 3), rng.uniform(-np.pi, np.pi))
        dh = hopf.hopf_differential(geodesics.geodesic_bc(p, s), geodesics.geodesic_velocity(p, s))
        sp = max(sp, np.abs(np.linalg.norm(dh, axis=1) - 2).max())
    yield "projection doubles horizontal speed", sp, 1e-8
    x0 = random_points(rng, 1)[0]
    vert = np.abs(hopf.hopf_map(geodesics.vertical_line(x0, s)) - hopf.hopf_map(x0)).max()
    yield "vertical lines project to a point", vert, 1e-10
    moving = np.abs(hopf.hopf_map(geodesics.const_geodesic(x0, 0.3, s)) - hopf.hopf_map(x0)).max()
    yield "horizontal geodesics do not", 1e-10 / max(moving, 1e-300), 1.0
    s = np.linspace(0, np.pi, 1001)
    x = geodesics.const_geodesic(IDENTITY, 0.0, s)
    u = hopf.hopf_map(x)
    u[-1] = u[0]
    loop = hopf.LoopOnS2(s / np.pi, u)
    hol = hopf.holonomy(loop, IDENTITY)
    yield "holonomy of the pi-loop", abs(hol.angle - np.pi), 1e-8
    yield "project-then-lift", np.abs(hol.lift.x - x).max(), 1e-6
    yield "lift stays horizontal", hol.lift.max_c, 1e-8
    g = hopf.circle_action(IDENTITY, 1.1)
    hol2 = hopf.holonomy(loop, g)
    yield "holonomy invariant under circle action", abs(hol2.angle - hol.angle), 1e-8
    yield "lift equivariance", np.abs(hol2.lift.x - hopf.circle_action(hol.lift.x, 1.1)).max(), 1e-8
    yield "projected length = 2 s", abs(hol.length - 2 * np.pi), 1e-6
    eta = rng.uniform(0, np.pi / 2)
    yield "bundle metric at pi/4", np.abs(hopf.bundle_metric_matrix(np.pi / 4)
                                          - np.diag([1, .5, .5])).max(), 1e-15
    yield "bundle metric diagonal in [0, 1]", float(np.any(np.diag(
        hopf.bundle_metric_matrix(eta)) > 1)), 0.0


def run(seed=0, verify_tol=connect.DEFAULT_VERIFY_TOL, modules=None):
    """Run the suite; returns the list of :class:`Check` results."""
    rng = np.random.default_rng(seed)
    groups = {
        "core": lambda: _core_checks(rng),
        "hamiltonian": lambda: _hamiltonian_checks(rng),
        "geodesics": lambda: _geodesic_checks(rng),
        "connect": lambda: _connect_checks(rng, verify_tol),
        "hopf": lambda: _hopf_checks(rng),
    }
    out = []
    for mod, gen in groups.items():
        if modules is not None and mod not in modules:
            continue
        for name, value, tol in gen():
            out.append(Check(mod, name, float(value), float(tol)))
    return out
