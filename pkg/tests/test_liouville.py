"""Tests for the dense Lindblad generator and transfer-time routes."""
import numpy as np
import pytest

from chaintransport.errors import SizeLimitError, ValidationError
from chaintransport.liouville import (
    build_liouvillian,
    lindblad_rhs,
    liouvillian_spectrum,
    propagate_populations,
    slowest_decay_rate,
    transfer_time_integrate,
    transfer_time_liouville,
    unvec,
    vec,
)
from chaintransport.model import (
    ChainParams,
    Gaussian,
    Localized,
    build_initial_state,
    embedded_operator_set,
)


def test_vec_unvec_roundtrip():
    rng = np.random.default_rng(0)
    m = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
    assert np.array_equal(unvec(vec(m)), m)
    # column-stacking convention: vec(A X B) = (B^T kron A) vec(X)
    a = rng.normal(size=(5, 5))
    b = rng.normal(size=(5, 5))
    assert np.allclose(np.kron(b.T, a) @ vec(m), vec(a @ m @ b))


def test_liouvillian_matches_term_by_term_rhs():
    p = ChainParams(n_sites=4, field_step=0.4, sink_rate=1.5, dephasing_rate=0.3)
    gen = build_liouvillian(p)
    ops = embedded_operator_set(p)
    rng = np.random.default_rng(1)
    x = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
    rho = x @ x.conj().T
    rho /= np.trace(rho).real
    assert np.allclose(unvec(gen @ vec(rho)), lindblad_rhs(rho, ops.hamiltonian, ops.jump_ops), atol=1e-13)


def test_liouvillian_preserves_trace():
    p = ChainParams(n_sites=5, field_step=0.2, sink_rate=2.0, dephasing_rate=0.5)
    gen = build_liouvillian(p)
    dim = 6
    # trace of L[rho] is <vec(I), L vec(rho)> = 0 for all rho
    tr_row = vec(np.eye(dim)).conj() @ gen
    assert np.max(np.abs(tr_row)) < 1e-13


def test_dimension_cap_enforced():
    p = ChainParams(n_sites=70, sink_rate=1.0)
    with pytest.raises(SizeLimitError):
        build_liouvillian(p)


def test_spectrum_zero_mode_is_sink():
    p = ChainParams(n_sites=6, sink_rate=2.0, dephasing_rate=0.1)
    spec = liouvillian_spectrum(p)
    z = spec.zero_mode_index
    steady = unvec(spec.modes[:, z])
    steady /= np.trace(steady)
    target = np.zeros((7, 7))
    target[0, 0] = 1.0
    assert np.allclose(steady, target, atol=1e-9)
    assert np.all(np.delete(spec.eigenvalues.real, z) < 0)
    assert slowest_decay_rate(spec) > 0


def test_transfer_time_routes_agree():
    p = ChainParams(n_sites=6, field_step=0.5, sink_rate=1.2, dephasing_rate=0.4)
    psi0 = build_initial_state(Gaussian(3, 1.0, 0.0), 6)
    tau_spec = transfer_time_liouville(p, psi0)
    res = transfer_time_integrate(p, psi0)
    assert res.converged
    assert tau_spec == pytest.approx(res.value, rel=1e-7)


def test_transfer_time_two_site_exact():
    # N=2, localized on site 1, gamma_out=2, no field/dephasing: tau = 1.5
    p = ChainParams(n_sites=2, sink_rate=2.0)
    psi0 = build_initial_state(Localized(1), 2)
    assert transfer_time_liouville(p, psi0) == pytest.approx(1.5, rel=1e-10)
    assert transfer_time_integrate(p, psi0).value == pytest.approx(1.5, rel=1e-9)


def test_transfer_time_requires_sink():
    p = ChainParams(n_sites=3, sink_rate=0.0)
    psi0 = build_initial_state(Localized(1), 3)
    with pytest.raises(ValidationError):
        transfer_time_liouville(p, psi0)
    with pytest.raises(ValidationError):
        transfer_time_integrate(p, psi0)


def test_propagate_populations_conserves_probability():
    p = ChainParams(n_sites=5, field_step=0.3, sink_rate=1.0, dephasing_rate=0.2)
    psi0 = build_initial_state(Localized(2), 5)
    times = np.linspace(0.0, 30.0, 7)
    traj = propagate_populations(p, psi0, times)
    totals = traj.populations.sum(axis=1)
    assert np.allclose(totals, 1.0, atol=1e-8)
    assert np.all(traj.populations > -1e-10)
    # sink population grows monotonically and approaches 1
    assert np.all(np.diff(traj.populations[:, 0]) > 0)
    assert traj.populations[-1, 0] > 0.95
    assert traj.transfer_time is not None and traj.transfer_time > 0


def test_trajectory_csv_shape():
    p = ChainParams(n_sites=3, sink_rate=1.0)
    psi0 = build_initial_state(Localized(1), 3)
    traj = propagate_populations(p, psi0, np.array([0.0, 1.0]))
    lines = traj.to_csv().strip().split("\n")
    assert lines[0] == "t,p0,p1,p2,p3"
    assert len(lines) == 3
    first = [float(x) for x in lines[1].split(",")]
    assert first[0] == 0.0
    assert first[2] == pytest.approx(1.0)


def test_propagate_rejects_bad_time_grid():
    p = ChainParams(n_sites=3, sink_rate=1.0)
    psi0 = build_initial_state(Localized(1), 3)
    with pytest.raises(ValidationError):
        propagate_populations(p, psi0, np.array([1.0, 0.5]))


def test_integrate_reports_unconverged_when_truncated():
    p = ChainParams(n_sites=8, sink_rate=2.0)
    psi0 = build_initial_state(Localized(1), 8)
    res = transfer_time_integrate(p, psi0, t_max=1.0)
    assert not res.converged
    assert res.final_time == pytest.approx(1.0)
    assert res.sink_population < 0.999
