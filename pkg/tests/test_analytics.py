"""Tests for closed-form and heuristic transfer-time expressions."""
import numpy as np
import pytest

from chaintransport.analytics import (
    critical_dephasing,
    critical_dephasing_coarse,
    critical_field,
    leegwater_rate,
    leegwater_rates,
    optimal_field_estimate,
    optimal_sink_rate_localized,
    tau_heuristic,
    tau_leegwater_star,
    tau_leegwater_star_expanded,
    tau_localized_closed_form,
    tau_perturbative_general,
)
from chaintransport.errors import ValidationError
from chaintransport.model import ChainParams, Gaussian, build_initial_state


def test_perturbative_reduces_to_localized_formula():
    n_sites, g = 7, 0.01
    for n in (1, 3, 7):
        rho0 = np.zeros((n_sites, n_sites))
        rho0[n - 1, n - 1] = 1.0
        assert tau_perturbative_general(rho0, n_sites, g) == pytest.approx(
            n * (n_sites - n + 1) / g, rel=1e-12
        )


def test_perturbative_rejects_bad_shapes():
    with pytest.raises(ValidationError):
        tau_perturbative_general(np.eye(3), 4, 1.0)
    with pytest.raises(ValidationError):
        tau_perturbative_general(np.eye(3), 3, 0.0)


def test_closed_form_small_gamma_limit():
    # closed form -> perturbative value as gamma_out -> 0
    assert tau_localized_closed_form(2, 5, 1e-6) == pytest.approx(
        2 * 4 / 1e-6, rel=1e-6
    )
    # minimized exactly at the stated optimal sink rate
    n, big_n = 2, 6
    g_opt = optimal_sink_rate_localized(n, big_n)
    eps = 1e-5
    t0 = tau_localized_closed_form(n, big_n, g_opt)
    assert t0 < tau_localized_closed_form(n, big_n, g_opt + eps)
    assert t0 < tau_localized_closed_form(n, big_n, g_opt - eps)


def test_leegwater_rates_values():
    g_f, g_l = leegwater_rates(1.0, 0.5, 2.0, 0.3)
    assert g_f == pytest.approx(2 * 0.5 / (0.25 + 0.09))
    assert g_l == pytest.approx(2 * 1.5 / (1.5**2 + 0.09))
    with pytest.raises(ValidationError):
        leegwater_rates(1.0, 0.0, 2.0, 0.0)
    # Leegwater rate stays finite at zero dephasing
    assert leegwater_rate(1.0, 0.0, 2.0, 0.0) == pytest.approx(2.0)


def test_leegwater_star_matches_expanded_form():
    args = dict(hopping=1.3, gamma_phi=0.7, gamma_out=2.1, field_step=0.4)
    for n in (1, 5, 9, 10):
        assert tau_leegwater_star(n, 10, **args) == pytest.approx(
            tau_leegwater_star_expanded(n, 10, **args), rel=1e-12
        )


def test_heuristic_adds_perturbative_term():
    args = dict(hopping=1.0, gamma_phi=0.9, gamma_out=2.0, field_step=0.0)
    expected = 3 * 8 / 2.0 + tau_leegwater_star(3, 10, **args)
    assert tau_heuristic(3, 10, **args) == pytest.approx(expected, rel=1e-12)


def test_critical_scales():
    assert critical_dephasing(3, 10) == pytest.approx(12.0 / 13.0)
    assert critical_dephasing_coarse(10) == pytest.approx(0.4)
    assert critical_field(10) == pytest.approx(4 * np.sqrt(2) / 10)


def test_optimal_field_estimate_flat_for_field_free_symmetric_case():
    # single-point grid at E0=0 gives a well-defined (non-flat) objective
    p = ChainParams(n_sites=6, sink_rate=2.0)
    psi0 = build_initial_state(Gaussian(3, 1.0, 0.0), 6)
    grid = np.linspace(-1.0, 1.0, 21)
    est = optimal_field_estimate(psi0, p, grid)
    assert not est.flat
    assert est.grid.shape == est.objective_right.shape == est.objective_left.shape
    assert est.e0_opt in grid
    # every objective value is negative (all widths positive)
    assert np.all(est.objective_right < 0)
    with pytest.raises(ValidationError):
        optimal_field_estimate(psi0, p, np.array([]))
