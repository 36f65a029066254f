import io

import numpy as np
import pytest

from s3sr import geodesics, hamiltonian, integrator
from s3sr.core import IDENTITY
from s3sr.errors import ChartSingularity, InputError, MonitorBreach, StepSizeUnderflow


def test_dopri_on_harmonic_oscillator():
    f = lambda t, y: np.array([y[1], -y[0]])  # noqa: E731
    sol = integrator.solve(f, 0.0, [1.0, 0.0], 10.0, rtol=1e-10, atol=1e-12)
    assert abs(sol.y[-1, 0] - np.cos(10)) < 1e-8
    te = np.linspace(0, 10, 37)
    sol = integrator.solve(f, 0.0, [1.0, 0.0], 10.0, t_eval=te)
    assert np.abs(sol.y[:, 0] - np.cos(te)).max() < 1e-8
    assert sol.n_steps > 0


def test_dopri_batch_matches_single():
    f = lambda t, y: -y * np.array([1.0, 2.0])[..., :]  # noqa: E731
    y0 = np.array([[1.0, 1.0], [2.0, -1.0]])
    sol = integrator.solve(f, 0, y0, 1.0)
    assert np.allclose(sol.y[-1], y0 * np.exp(-np.array([1.0, 2.0])), atol=1e-9)


def test_step_underflow():
    f = lambda t, y: np.array([1.0 / (1.0 - t) ** 2])  # noqa: E731
    with pytest.raises(StepSizeUnderflow):
        integrator.solve(f, 0.0, [0.0], 2.0)


def test_zero_length_integration_gives_one_row():
    tr = hamiltonian.integrate(IDENTITY, [0, 0, 1, 0], 0.0)
    assert len(tr) == 1
    assert np.array_equal(tr.x[0], IDENTITY)
    assert tr.H[0] == 0.5
    text = tr.to_csv()
    lines = text.strip().splitlines()
    assert lines[0].split(",") == list(hamiltonian.CSV_COLUMNS)
    assert len(lines) == 2


def test_negative_s_end_rejected():
    with pytest.raises(InputError):
        hamiltonian.integrate(IDENTITY, [0, 0, 1, 0], -1.0)


def test_rhs_at_identity_matches_frame():
    xd, xid = hamiltonian.ham_rhs(IDENTITY, [0.3, 0.7, 0.6, 0.8])
    # p = 0.6, q = 0.8; X(e) = (0,0,1,0), Y(e) = (0,0,0,1)
    assert np.allclose(xd, [0, 0, 0.6, 0.8])
    assert hamiltonian.hamiltonian_value(IDENTITY, [0.3, 0.7, 0.6, 0.8]) == pytest.approx(0.5)


def test_integrate_matches_closed_form_and_is_deterministic():
    p = geodesics.GeodesicParam(1.7, -0.4)
    s = np.linspace(0, 2 * np.pi, 50)
    tr = hamiltonian.integrate(IDENTITY, p.initial_covector(0.3), 2 * np.pi, s_eval=s)
    assert np.abs(tr.x - geodesics.geodesic_bc(p, s)).max() < 1e-8
    # the first integrals give back the momentum too
    assert np.abs(tr.xi - geodesics.geodesic_covector(p, s, 0.3)).max() < 1e-8
    again = hamiltonian.integrate(IDENTITY, p.initial_covector(0.3), 2 * np.pi, s_eval=s)
    assert tr.to_csv() == again.to_csv()


def test_csv_to_handle():
    tr = hamiltonian.integrate(IDENTITY, [0, 0, 1, 0], 1.0)
    buf = io.StringIO()
    assert tr.to_csv(buf) is None
    assert buf.getvalue() == tr.to_csv()


def test_monitor_breach_on_drifting_states():
    tr = hamiltonian.integrate(IDENTITY, [0, 0.5, 1, 0], 2.0)
    y = np.hstack([tr.x, tr.xi])
    y[-1, :4] *= 1 + 1e-6  # knock the last point off the sphere
    bad = hamiltonian.Trajectory.from_states(tr.s, y)
    with pytest.raises(MonitorBreach):
        hamiltonian._check_monitors(bad, 1e-10, 1e-12)
    hamiltonian._check_monitors(tr, 1e-10, 1e-12)


def test_hyper_chart_flow_matches_closed_form():
    hp = geodesics.HyperGeodesicParam(psi1=0.8, eta_dot0=1.0)
    s0 = 0.3
    init = geodesics.hyper_phase_state(hp, s0)
    s = np.linspace(s0, 1.2, 30)
    tr = hamiltonian.integrate_hyper(init, 1.2, s_eval=s, s0=s0)
    ref = geodesics.geodesic_hyper(hp, s)
    assert np.abs(tr.eta - ref.eta).max() < 1e-8
    assert np.abs(tr.xi2 - ref.xi2).max() < 1e-8
    assert np.abs(tr.xi1 - ref.xi1).max() < 1e-8
    H = [hamiltonian.hamiltonian_hyper(st) for st in tr.states]
    assert np.ptp(H) < 1e-8
    assert H[0] == pytest.approx(0.5 * hp.eta_dot0 ** 2, rel=1e-8)


def test_hyper_chart_edges():
    with pytest.raises(ChartSingularity):
        hamiltonian.integrate_hyper([0, 0, 1e-9, 0.5, 0, 1.0], 1.0)
    # runs into eta = pi/2 (w-axis torus) and stops
    with pytest.raises(ChartSingularity):
        hamiltonian.integrate_hyper([0, 0, 0.5, 0.0, 0.0, 1.0], 3.0)
