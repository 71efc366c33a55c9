"""Closed-form and heuristic transfer-time expressions.

Covers the small-sink perturbative time, the localized-state closed form,
Forster/Leegwater hopping rates with the field-corrected diffusive time,
the combined heuristic, the critical dephasing and field scales, and the
spectral optimal-field estimator.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .model import ChainParams
from .nonhermitian import effective_spectrum


def tau_perturbative_general(
    rho0: np.ndarray, n_sites: int, gamma_out: float
) -> float:
    """Lowest order in gamma_out of the transfer time for a general rho(0).

    Valid for field_step = 0, dephasing_rate = 0. Uses the open-chain
    sin-basis eigenvectors; reduces to n(N-n+1)/gamma_out for rho0 =
    |n><n|.
    """
    if gamma_out <= 0:
        raise ValidationError("perturbative time requires gamma_out > 0")
    rho0 = np.asarray(rho0, dtype=complex)
    n = n_sites
    if rho0.shape != (n, n):
        raise ValidationError(f"rho0 has shape {rho0.shape}, expected ({n}, {n})")
    alpha = np.arange(1, n + 1)[:, None]
    sites = np.arange(1, n + 1)[None, :]
    s = np.sin(np.pi * alpha * sites / (n + 1))  # s[a-1, j-1]
    weight = (s[:, :, None] * s[:, None, :]) / (s[:, -1] ** 2)[:, None, None]
    kernel = weight.sum(axis=0)  # sum over eigenstates
    val = np.sum(rho0 * kernel) / gamma_out
    return float(val.real)


def tau_localized_closed_form(
    n: int, n_sites: int, gamma_out: float, hopping: float = 1.0
) -> float:
    """Exact dephasing-free, field-free transfer time from site n."""
    if not 1 <= n <= n_sites:
        raise ValidationError(f"site {n} outside 1..{n_sites}")
    if gamma_out <= 0:
        raise ValidationError("closed form requires gamma_out > 0")
    big_n = n_sites
    return n * (big_n - n + 1) / gamma_out + gamma_out * n * (big_n - n) / (
        4.0 * hopping**2
    )


def optimal_sink_rate_localized(n: int, n_sites: int, hopping: float = 1.0) -> float:
    """gamma_out minimizing the localized closed form: 2*hopping*sqrt((N-n+1)/(N-n))."""
    if not 1 <= n < n_sites:
        raise ValidationError("optimum defined for 1 <= n < N")
    return 2.0 * hopping * np.sqrt((n_sites - n + 1) / (n_sites - n))


def leegwater_rates(
    hopping: float, gamma_phi: float, gamma_out: float, field_step: float
) -> tuple[float, float]:
    """Forster and Leegwater hopping rates (Gamma_F, Gamma_L)."""
    if gamma_phi <= 0:
        raise ValidationError("Forster rate has a pole at gamma_phi = 0")
    g_f = 2.0 * hopping**2 * gamma_phi / (gamma_phi**2 + field_step**2)
    g_l = leegwater_rate(hopping, gamma_phi, gamma_out, field_step)
    return g_f, g_l


def leegwater_rate(
    hopping: float, gamma_phi: float, gamma_out: float, field_step: float
) -> float:
    """Leegwater rate alone; finite at gamma_phi = 0 whenever gamma_out > 0."""
    half = gamma_phi + gamma_out / 2.0
    if half <= 0:
        raise ValidationError("Leegwater rate needs gamma_phi > 0 or gamma_out > 0")
    return 2.0 * hopping**2 * half / (half**2 + field_step**2)


def tau_leegwater_star(
    n: int,
    n_sites: int,
    hopping: float,
    gamma_phi: float,
    gamma_out: float,
    field_step: float,
) -> float:
    """Diffusive transfer time from site n: (N-n)(N-n-1)/(2 Gamma_F) + n(N-n)/Gamma_L."""
    if not 1 <= n <= n_sites:
        raise ValidationError(f"site {n} outside 1..{n_sites}")
    big_n = n_sites
    steps = (big_n - n) * (big_n - n - 1)
    second = n * (big_n - n) / leegwater_rate(hopping, gamma_phi, gamma_out, field_step)
    if steps == 0:
        return second
    g_f, _ = leegwater_rates(hopping, gamma_phi, gamma_out, field_step)
    return steps / (2.0 * g_f) + second


def tau_leegwater_star_expanded(
    n: int,
    n_sites: int,
    hopping: float,
    gamma_phi: float,
    gamma_out: float,
    field_step: float,
) -> float:
    """Expanded algebraic form of tau_leegwater_star (cross-check of the same formula)."""
    big_n = n_sites
    omega2 = hopping**2
    out = n * (big_n - n) * gamma_out / (4.0 * omega2)
    out += (big_n - n) * (big_n + n - 1) * gamma_phi / (4.0 * omega2)
    if field_step != 0.0:
        bracket = n / (2.0 * gamma_phi + gamma_out)
        if big_n - n - 1 > 0:
            if gamma_phi <= 0:
                raise ValidationError("Forster rate has a pole at gamma_phi = 0")
            bracket += (big_n - n - 1) / (4.0 * gamma_phi)
        out += field_step**2 * (big_n - n) / omega2 * bracket
    return out


def tau_heuristic(
    n: int,
    n_sites: int,
    hopping: float,
    gamma_phi: float,
    gamma_out: float,
    field_step: float,
) -> float:
    """Perturbative plus diffusive heuristic for a site-n excitation.

    Reliable beyond the critical dephasing or critical field; expected to
    overshoot near the coherent optimum.
    """
    tilde = n * (n_sites - n + 1) / gamma_out
    return tilde + tau_leegwater_star(
        n, n_sites, hopping, gamma_phi, gamma_out, field_step
    )


def critical_dephasing(n: int, n_sites: int, hopping: float = 1.0) -> float:
    """Dephasing scale 4*hopping*n/(N+n) beyond which transport is diffusive."""
    return 4.0 * hopping * n / (n_sites + n)


def critical_dephasing_coarse(n_sites: int, hopping: float = 1.0) -> float:
    """Mean-level-spacing variant, 4*hopping/N."""
    return 4.0 * hopping / n_sites


def critical_field(n_sites: int, hopping: float = 1.0) -> float:
    """Field step 4*sqrt(2)*hopping/N above which all eigenstates localize."""
    return 4.0 * np.sqrt(2.0) * hopping / n_sites


@dataclass(frozen=True)
class OptimalFieldEstimate:
    """Grid minimizer of sum_k Im(E_k) |<psi0|E_k>| over the field step.

    Both right- and left-eigenvector overlap conventions are evaluated;
    the right-vector objective picks e0_opt.
    """

    e0_opt: float
    grid: np.ndarray
    objective_right: np.ndarray
    objective_left: np.ndarray
    flat: bool = False


def optimal_field_estimate(
    psi0: np.ndarray, params: ChainParams, e0_grid: np.ndarray
) -> OptimalFieldEstimate:
    """Evaluate the width-weighted overlap objective on a field grid.

    Minimization (not maximization) because every Im(E_k) is negative;
    dephasing is ignored by construction.
    """
    e0_grid = np.asarray(e0_grid, dtype=float)
    if len(e0_grid) == 0:
        raise ValidationError("empty field grid")
    psi0 = np.asarray(psi0, dtype=complex)
    obj_r = np.empty(len(e0_grid))
    obj_l = np.empty(len(e0_grid))
    for i, e0 in enumerate(e0_grid):
        spec = effective_spectrum(params.with_(field_step=float(e0)))
        imag = spec.eigenvalues.imag
        obj_r[i] = float(np.sum(imag * np.abs(spec.right.conj().T @ psi0)))
        left_rows = spec.left / np.linalg.norm(spec.left, axis=1)[:, None]
        obj_l[i] = float(np.sum(imag * np.abs(left_rows @ psi0)))
    flat = bool(np.max(obj_r) - np.min(obj_r) < 1e-12)
    e0_opt = 0.0 if flat else float(e0_grid[int(np.argmin(obj_r))])
    return OptimalFieldEstimate(
        e0_opt=e0_opt,
        grid=e0_grid,
        objective_right=obj_r,
        objective_left=obj_l,
        flat=flat,
    )
