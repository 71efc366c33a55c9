"""Chain model construction: Hamiltonian, jump operators, initial states, disorder.

Conventions: hbar = e = 1, energies and rates in units of the hopping
amplitude (default 1). The sink is an explicit extra basis state at index 0
of the (N+1)-dimensional chain+sink space; chain sites j = 1..N live at
indices 1..N.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import ValidationError

SINK_INDEX = 0


@dataclass(frozen=True)
class DisorderSpec:
    """Uniform on-site disorder of full width `width`, drawn from [-W/2, W/2]."""

    width: float
    seed: int = 0

    def __post_init__(self):
        if self.width < 0:
            raise ValidationError(f"disorder width must be >= 0, got {self.width}")


@dataclass(frozen=True)
class ChainParams:
    """All physical parameters of one chain instance.

    field_step is the per-site energy step E0 (signed, total potential
    N*E0); sink_rate and dephasing_rate are Lindblad rates gamma_out and
    gamma_phi in units of hopping.
    """

    n_sites: int
    hopping: float = 1.0
    field_step: float = 0.0
    sink_rate: float = 0.0
    dephasing_rate: float = 0.0
    disorder: DisorderSpec | None = None

    def __post_init__(self):
        if self.n_sites < 2:
            raise ValidationError(f"n_sites must be >= 2, got {self.n_sites}")
        if self.hopping <= 0:
            raise ValidationError(f"hopping must be > 0, got {self.hopping}")
        if self.sink_rate < 0:
            raise ValidationError(f"sink_rate must be >= 0, got {self.sink_rate}")
        if self.dephasing_rate < 0:
            raise ValidationError(
                f"dephasing_rate must be >= 0, got {self.dephasing_rate}"
            )

    def with_(self, **changes) -> "ChainParams":
        return replace(self, **changes)


@dataclass(frozen=True)
class Gaussian:
    """Gaussian wavepacket exp(-i*k0*n) * exp(-(n-center)^2 / (4*width^2)).

    Evaluated at integer sites n = 1..N and normalized afterwards;
    non-integer centers are allowed.
    """

    center: float
    width: float = 1.0
    momentum: float = 0.0

    def __post_init__(self):
        if self.width <= 0:
            raise ValidationError(f"Gaussian width must be > 0, got {self.width}")


@dataclass(frozen=True)
class Localized:
    """Excitation on a single site (1-based)."""

    site: int


@dataclass(frozen=True)
class Flat:
    """Equal amplitude 1/sqrt(N-1) on sites 1..N-1, zero on site N."""


InitialState = Gaussian | Localized | Flat


@dataclass(frozen=True)
class OperatorSet:
    """Hamiltonian plus (rate, jump operator) pairs on a common space."""

    hamiltonian: np.ndarray
    jump_ops: tuple[tuple[float, np.ndarray], ...] = ()


def build_hamiltonian(
    params: ChainParams, disorder_realization: np.ndarray | None = None
) -> OperatorSet:
    """Chain-only N x N Hamiltonian: diagonal j*E0 (+ eps_j), off-diagonal -hopping."""
    n = params.n_sites
    if disorder_realization is not None:
        disorder_realization = np.asarray(disorder_realization, dtype=float)
        if disorder_realization.shape != (n,):
            raise ValidationError(
                f"disorder vector has shape {disorder_realization.shape}, expected ({n},)"
            )
    h = np.zeros((n, n))
    sites = np.arange(1, n + 1)
    np.fill_diagonal(h, params.field_step * sites)
    if disorder_realization is not None:
        h[np.diag_indices(n)] += disorder_realization
    off = np.arange(n - 1)
    h[off, off + 1] = -params.hopping
    h[off + 1, off] = -params.hopping
    jumps = []
    if params.dephasing_rate > 0:
        for j in range(n):
            proj = np.zeros((n, n))
            proj[j, j] = 1.0
            jumps.append((params.dephasing_rate, proj))
    return OperatorSet(hamiltonian=h, jump_ops=tuple(jumps))


def embedded_operator_set(
    params: ChainParams, disorder_realization: np.ndarray | None = None
) -> OperatorSet:
    """(N+1) x (N+1) operators on the chain+sink space, sink at index 0.

    The Hamiltonian row/column of the sink is zero; jump operators are
    L_out = |0><N| at sink_rate and one projector per chain site at
    dephasing_rate.
    """
    n = params.n_sites
    chain = build_hamiltonian(params, disorder_realization).hamiltonian
    h = np.zeros((n + 1, n + 1))
    h[1:, 1:] = chain
    jumps = []
    if params.sink_rate > 0:
        l_out = np.zeros((n + 1, n + 1))
        l_out[SINK_INDEX, n] = 1.0
        jumps.append((params.sink_rate, l_out))
    if params.dephasing_rate > 0:
        for j in range(1, n + 1):
            proj = np.zeros((n + 1, n + 1))
            proj[j, j] = 1.0
            jumps.append((params.dephasing_rate, proj))
    return OperatorSet(hamiltonian=h, jump_ops=tuple(jumps))


def build_initial_state(spec: InitialState, n_sites: int) -> np.ndarray:
    """Realize an initial-state spec as a unit-norm complex vector over sites 1..N."""
    n = n_sites
    if isinstance(spec, Localized):
        if not 1 <= spec.site <= n:
            raise ValidationError(f"localized site {spec.site} outside 1..{n}")
        psi = np.zeros(n, dtype=complex)
        psi[spec.site - 1] = 1.0
        return psi
    if isinstance(spec, Flat):
        if n < 2:
            raise ValidationError("flat state needs at least 2 sites")
        psi = np.zeros(n, dtype=complex)
        psi[: n - 1] = 1.0 / np.sqrt(n - 1)
        return psi
    if isinstance(spec, Gaussian):
        sites = np.arange(1, n + 1, dtype=float)
        psi = np.exp(-1j * spec.momentum * sites) * np.exp(
            -((sites - spec.center) ** 2) / (4.0 * spec.width**2)
        )
        norm = np.linalg.norm(psi)
        if norm == 0:
            raise ValidationError("Gaussian amplitude vanishes on every site")
        return psi / norm
    raise ValidationError(f"unknown initial-state spec {spec!r}")


def sample_disorder(
    width: float, seed: int, realization_index: int, n_sites: int
) -> np.ndarray:
    """One reproducible disorder realization: N i.i.d. uniforms in [-W/2, W/2].

    Deterministic in (seed, realization_index) and independent of draw
    order, so ensembles can be evaluated in parallel.
    """
    if width < 0:
        raise ValidationError(f"disorder width must be >= 0, got {width}")
    if width == 0:
        return np.zeros(n_sites)
    rng = np.random.default_rng([seed, realization_index])
    return rng.uniform(-width / 2.0, width / 2.0, size=n_sites)
