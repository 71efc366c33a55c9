"""Dense Lindblad solver on the (N+1)-site chain+sink space.

Vectorization uses the column-stacking convention throughout:
vec(A X B) = (B^T kron A) vec(X), realized with numpy order='F' reshapes.
The generator is

    L = -i (I kron H - H^T kron I)
        + sum_k gamma_k [ conj(L_k) kron L_k
                          - 1/2 (I kron L_k^dag L_k + (L_k^dag L_k)^T kron I) ].
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.integrate
import scipy.linalg

from .errors import (
    ConsistencyError,
    SizeLimitError,
    ValidationError,
)
from .model import ChainParams, embedded_operator_set

DEFAULT_DIMENSION_CAP = 4096
CONDITION_LIMIT = 1e12


def vec(rho: np.ndarray) -> np.ndarray:
    """Column-stack a matrix into a vector."""
    return rho.reshape(-1, order="F")


def unvec(v: np.ndarray) -> np.ndarray:
    d = int(round(np.sqrt(len(v))))
    return v.reshape((d, d), order="F")


def lindblad_rhs(
    rho: np.ndarray, hamiltonian: np.ndarray, jump_ops
) -> np.ndarray:
    """Right side of the master equation, term by term (no vectorization)."""
    out = -1j * (hamiltonian @ rho - rho @ hamiltonian)
    for rate, op in jump_ops:
        anticomm = op.conj().T @ op
        out += rate * (
            op @ rho @ op.conj().T
            - 0.5 * (anticomm @ rho + rho @ anticomm)
        )
    return out


def build_liouvillian(
    params: ChainParams,
    disorder_realization: np.ndarray | None = None,
    dimension_cap: int = DEFAULT_DIMENSION_CAP,
) -> np.ndarray:
    """Dense vectorized generator, (N+1)^2 x (N+1)^2."""
    dim = params.n_sites + 1
    if dim * dim > dimension_cap:
        raise SizeLimitError(
            f"superoperator dimension {dim * dim} exceeds cap {dimension_cap}"
        )
    ops = embedded_operator_set(params, disorder_realization)
    h = ops.hamiltonian
    eye = np.eye(dim)
    gen = -1j * (np.kron(eye, h) - np.kron(h.T, eye)).astype(complex)
    for rate, op in ops.jump_ops:
        anticomm = op.conj().T @ op
        gen += rate * (
            np.kron(op.conj(), op)
            - 0.5 * (np.kron(eye, anticomm) + np.kron(anticomm.T, eye))
        )
    return gen


@dataclass(frozen=True)
class LiouvillianSpectrum:
    """Similarity decomposition L = V diag(eigenvalues) V^-1."""

    eigenvalues: np.ndarray
    modes: np.ndarray
    modes_inv: np.ndarray
    zero_mode_index: int
    condition: float

    @property
    def dimension(self) -> int:
        return len(self.eigenvalues)


def liouvillian_spectrum(
    params: ChainParams,
    disorder_realization: np.ndarray | None = None,
    zero_tol: float = 1e-10,
) -> LiouvillianSpectrum:
    """Eigendecomposition of the generator with steady-state identification."""
    if params.sink_rate <= 0:
        raise ValidationError("unique steady state requires sink_rate > 0")
    gen = build_liouvillian(params, disorder_realization)
    vals, modes = scipy.linalg.eig(gen)
    zero = np.flatnonzero(np.abs(vals) < zero_tol)
    if len(zero) != 1:
        raise ConsistencyError(
            f"expected a unique steady state, found {len(zero)} eigenvalues "
            f"below {zero_tol:.1e}"
        )
    modes_inv = np.linalg.inv(modes)
    cond = float(np.linalg.cond(modes))
    return LiouvillianSpectrum(
        eigenvalues=vals,
        modes=modes,
        modes_inv=modes_inv,
        zero_mode_index=int(zero[0]),
        condition=cond,
    )


def slowest_decay_rate(spectrum: LiouvillianSpectrum) -> float:
    """Smallest |Re(E_n)| over the non-steady modes; controls integral tails."""
    rates = np.abs(np.delete(spectrum.eigenvalues.real, spectrum.zero_mode_index))
    return float(np.min(rates))


def _sink_element_index(n_sites: int) -> int:
    # column-stacked index of matrix element (N, N), sites at 1..N
    dim = n_sites + 1
    return n_sites * dim + n_sites


def transfer_time_liouville(
    params: ChainParams,
    psi0: np.ndarray,
    disorder_realization: np.ndarray | None = None,
    spectrum: LiouvillianSpectrum | None = None,
) -> float:
    """Average transfer time from the Liouvillian spectrum.

    tau = gamma_out * sum_{n != steady} c_n d_n / E_n^2 with
    d = V^-1 vec(rho0) and c the row of V selecting element (N, N).
    The steady-state term must carry zero weight; falls back to time
    integration when V is too ill-conditioned to invert reliably.
    """
    if params.sink_rate <= 0:
        raise ValidationError("transfer time requires sink_rate > 0")
    if spectrum is None:
        spectrum = liouvillian_spectrum(params, disorder_realization)
    if spectrum.condition > CONDITION_LIMIT:
        return transfer_time_integrate(params, psi0, disorder_realization).value
    n = params.n_sites
    psi0 = np.asarray(psi0, dtype=complex)
    rho0 = np.zeros((n + 1, n + 1), dtype=complex)
    rho0[1:, 1:] = np.outer(psi0, psi0.conj())
    d = spectrum.modes_inv @ vec(rho0)
    c = spectrum.modes[_sink_element_index(n), :]
    weights = c * d
    z = spectrum.zero_mode_index
    if abs(weights[z]) > 1e-10:
        raise ConsistencyError(
            f"steady-state coefficient {abs(weights[z]):.3e} should vanish "
            "(the sink projector has no population on site N)"
        )
    idx = np.arange(len(weights)) != z
    tau_c = params.sink_rate * np.sum(weights[idx] / spectrum.eigenvalues[idx] ** 2)
    tau = float(tau_c.real)
    if abs(tau_c.imag) > 1e-6 * max(abs(tau), 1e-300):
        raise ConsistencyError(
            f"imaginary residue {tau_c.imag:.3e} too large for tau = {tau:.6e}"
        )
    return tau


@dataclass(frozen=True)
class IntegratedTransferTime:
    value: float
    error_estimate: float
    converged: bool
    final_time: float
    sink_population: float


def transfer_time_integrate(
    params: ChainParams,
    psi0: np.ndarray,
    disorder_realization: np.ndarray | None = None,
    t_max: float | None = None,
    sink_target: float = 1e-12,
) -> IntegratedTransferTime:
    """Brute-force oracle: propagate the master equation and integrate t*flux.

    The generator is assembled column-by-column from the term-by-term
    `lindblad_rhs` (independent of the Kronecker construction) and augmented
    with two accumulators a' = gamma_out*rho_NN and b' = a, so that
    int_0^T t*flux dt = T*a(T) - b(T) exactly.  Propagation uses the exact
    matrix exponential over doubling time windows until the sink holds all
    but sink_target of the population (or t_max is hit).  Any cut-off tail
    is corrected assuming exponential flux decay at the rate measured from
    the flux log-derivative at the stopping time; the slowest Liouvillian
    eigenvalue is unreliable here because the slowest modes can be
    flux-free coherences.
    """
    if params.sink_rate <= 0:
        raise ValidationError("transfer time requires sink_rate > 0")
    n = params.n_sites
    dim = n + 1
    ops = embedded_operator_set(params, disorder_realization)
    psi0 = np.asarray(psi0, dtype=complex)
    rho0 = np.zeros((dim, dim), dtype=complex)
    rho0[1:, 1:] = np.outer(psi0, psi0.conj())

    size = dim * dim
    gen = np.zeros((size, size), dtype=complex)
    basis = np.zeros((dim, dim), dtype=complex)
    for col in range(size):
        basis.reshape(-1)[col] = 1.0
        gen[:, col] = lindblad_rhs(basis, ops.hamiltonian, ops.jump_ops).reshape(-1)
        basis.reshape(-1)[col] = 0.0
    aug = np.zeros((size + 2, size + 2), dtype=complex)
    aug[:size, :size] = gen
    aug[size, n * dim + n] = params.sink_rate
    aug[size + 1, size] = 1.0

    w = np.zeros(size + 2, dtype=complex)
    w[:size] = rho0.reshape(-1)
    t_end = 0.0
    window = 1.0 / max(params.hopping, params.sink_rate)
    converged = False
    for _ in range(64):
        if t_max is not None:
            window = min(window, t_max - t_end)
        w = scipy.linalg.expm(aug * window) @ w
        t_end += window
        sink_pop = float(w[0].real)
        if 1.0 - sink_pop <= sink_target:
            converged = True
            break
        if t_max is not None and t_end >= t_max:
            break
        window *= 2.0

    rho_end = w[:size].reshape((dim, dim))
    sink_pop = float(rho_end[0, 0].real)
    partial = t_end * float(w[size].real) - float(w[size + 1].real)
    flux_end = params.sink_rate * float(rho_end[n, n].real)
    dflux_end = params.sink_rate * float((gen @ w[:size])[n * dim + n].real)
    if flux_end > 0.0 and dflux_end < 0.0:
        rate = -dflux_end / flux_end
        tail = flux_end * (t_end / rate + 1.0 / rate**2)
    else:
        tail = 0.0
    converged = converged or sink_pop >= 0.999
    return IntegratedTransferTime(
        value=partial + tail,
        error_estimate=abs(tail) if tail else 1.0 - sink_pop,
        converged=converged,
        final_time=t_end,
        sink_population=sink_pop,
    )


@dataclass(frozen=True)
class TrajectorySample:
    """Site populations over a time grid; column 0 is the sink."""

    times: np.ndarray
    populations: np.ndarray
    transfer_time: float | None = None

    def to_csv(self) -> str:
        header = "t," + ",".join(f"p{j}" for j in range(self.populations.shape[1]))
        lines = [header]
        for t, row in zip(self.times, self.populations):
            lines.append(",".join(f"{x:.9g}" for x in np.concatenate([[t], row])))
        return "\n".join(lines) + "\n"


def propagate_populations(
    params: ChainParams,
    psi0: np.ndarray,
    times: np.ndarray,
    disorder_realization: np.ndarray | None = None,
) -> TrajectorySample:
    """Populations of sink and sites at the requested times.

    Uses spectral propagation exp(L t) when the mode matrix is
    well-conditioned, adaptive stepping otherwise.
    """
    times = np.asarray(times, dtype=float)
    if len(times) == 0 or np.any(np.diff(times) < 0) or times[0] < 0:
        raise ValidationError("time grid must be sorted and nonnegative")
    n = params.n_sites
    dim = n + 1
    psi0 = np.asarray(psi0, dtype=complex)
    rho0 = np.zeros((dim, dim), dtype=complex)
    rho0[1:, 1:] = np.outer(psi0, psi0.conj())

    tau = None
    if params.sink_rate > 0:
        spectrum = liouvillian_spectrum(params, disorder_realization)
        tau = transfer_time_liouville(
            params, psi0, disorder_realization, spectrum=spectrum
        )
    else:
        spectrum = None

    diag_idx = np.arange(dim) * dim + np.arange(dim)  # column-stacked (j, j)
    if spectrum is not None and spectrum.condition <= CONDITION_LIMIT:
        d = spectrum.modes_inv @ vec(rho0)
        pops = np.empty((len(times), dim))
        for i, t in enumerate(times):
            v = spectrum.modes @ (np.exp(spectrum.eigenvalues * t) * d)
            pops[i] = v[diag_idx].real
    else:
        ops = embedded_operator_set(params, disorder_realization)

        def rhs(_t, y):
            rho = y.reshape((dim, dim))
            return lindblad_rhs(rho, ops.hamiltonian, ops.jump_ops).reshape(-1)

        sol = scipy.integrate.solve_ivp(
            rhs,
            (0.0, float(times[-1]) if times[-1] > 0 else 1e-12),
            rho0.reshape(-1),
            t_eval=times,
            method="DOP853",
            rtol=1e-10,
            atol=1e-12,
        )
        pops = np.empty((len(times), dim))
        for i in range(len(times)):
            rho = sol.y[:, i].reshape((dim, dim))
            pops[i] = np.diag(rho).real
    return TrajectorySample(times=times, populations=pops, transfer_time=tau)
