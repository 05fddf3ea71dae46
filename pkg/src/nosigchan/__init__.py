"""Finite-dimensional bipartite quantum channels, directional no-signaling
verdicts, realization circuits, and the atomic no-signaling counterexample."""

from .tensor import (
    SystemLayout,
    TensorError,
    eigh,
    embed,
    gram_rank,
    kron,
    layout,
    permute_systems,
    ptrace,
    ptranspose,
)
from .channels import (
    Channel,
    ChannelError,
    Instrument,
    apply,
    channel_from_kraus,
    choi_from_map,
    compose_par,
    compose_seq,
    identity_channel,
    instrument_sum,
    kraus_from_choi,
    random_cptp,
    unitary_channel,
)
from .nosignal import (
    RealizationSpec,
    SignalingVerdict,
    build_localizable,
    build_realization_cc,
    build_semilocalizable,
    check_nosignaling_dir,
    check_nosignaling_subset,
    is_nosignaling,
    signaling_verdict,
    teleport_gadget,
    teleport_realization,
)
from .counterexample import (
    build_r_alpha_circuit,
    build_r_alpha_kraus,
    build_r_alpha_realization,
    kraus_operators,
)
from .analysis import AnalysisReport, analyze, chsh_value, extremality_rank, ppt_min_eig

__all__ = [
    "SystemLayout", "TensorError", "eigh", "embed", "gram_rank", "kron", "layout",
    "permute_systems", "ptrace", "ptranspose",
    "Channel", "ChannelError", "Instrument", "apply", "channel_from_kraus",
    "choi_from_map", "compose_par", "compose_seq", "identity_channel",
    "instrument_sum", "kraus_from_choi", "random_cptp", "unitary_channel",
    "RealizationSpec", "SignalingVerdict", "build_localizable",
    "build_realization_cc", "build_semilocalizable", "check_nosignaling_dir",
    "check_nosignaling_subset", "is_nosignaling", "signaling_verdict",
    "teleport_gadget", "teleport_realization",
    "build_r_alpha_circuit", "build_r_alpha_kraus", "build_r_alpha_realization",
    "kraus_operators",
    "AnalysisReport", "analyze", "chsh_value", "extremality_rank", "ppt_min_eig",
]
