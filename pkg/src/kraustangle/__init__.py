"""Entanglement dynamics of a qubit pair S'-S when S alone couples to an
environment qubit E, computed from the two Kraus operators of the channel."""

from .bipartite import EntanglementReport, InitialReduced
from .channels import KrausPair, TwoQubitPure, ad_channel, dephasing_channel, phase_flip_channel
from .classify import Classification, Family, Tier, entanglement_report
from .errors import ConsistencyError, ConvergenceError, DomainError, KrausError

__all__ = [
    "ConsistencyError", "ConvergenceError", "DomainError", "EntanglementReport", "Family",
    "InitialReduced", "KrausError", "KrausPair", "Tier", "TwoQubitPure", "ad_channel",
    "Classification", "dephasing_channel", "entanglement_report", "phase_flip_channel",
]
