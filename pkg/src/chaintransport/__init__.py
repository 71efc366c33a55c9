"""Quantum transport in tilted, dephased, sink-terminated tight-binding chains."""

__version__ = "0.1.0"

from .model import (  # noqa: F401
    ChainParams,
    DisorderSpec,
    Flat,
    Gaussian,
    InitialState,
    Localized,
    OperatorSet,
    build_hamiltonian,
    build_initial_state,
    embedded_operator_set,
    sample_disorder,
)
