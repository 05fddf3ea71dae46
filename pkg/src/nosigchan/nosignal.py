"""Directional no-signaling verdicts and constructive realization circuits.

A bipartite channel cannot signal from the sender side when tracing out the
sender's outputs leaves the Choi operator of the form I_sender_in (x) S, with
S the Choi of a channel on the receiver side alone.  The builders in this
module produce channels from local pieces plus a shared maximally entangled
ancilla pair, optionally with one round of classical communication.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from .tensor import (
    SystemLayout,
    TensorError,
    bra_sandwich,
    clock_op,
    embed,
    eigh,
    kron,
    max_entangled_vec,
    permute_to,
    ptrace,
    shift_op,
)
from .channels import (
    Channel,
    ChannelError,
    Instrument,
    IN_TAG,
    OUT_TAG,
    apply,
    choi_from_map,
    choi_layout,
    compose_par,
    compose_seq,
    identity_channel,
    tp_residual,
)

NOSIGNAL_TOL = 1e-9


@dataclass(frozen=True)
class SignalingVerdict:
    """Directional verdicts with the residuals that back them."""

    a_to_b: bool  # True: A cannot signal to B' (condition holds)
    b_to_a: bool
    residual_a: float
    residual_b: float
    tolerance: float


def _factorization_residual(
    c: Channel,
    in_subset: Sequence[str],
    out_subset: Sequence[str],
):
    """Residual of Tr_{out_subset}[choi] = I_{in_subset} (x) S.

    Returns (residual, S, S_layout) with S the unique factorization candidate
    Tr_{in_subset}[..]/dim(in_subset).
    """
    in_subset = list(in_subset)
    out_subset = list(out_subset)
    for l in in_subset:
        c.in_layout.index(l)
    for l in out_subset:
        c.out_layout.index(l)
    if len(set(in_subset)) != len(in_subset) or len(set(out_subset)) != len(out_subset):
        raise TensorError("repeated labels in subset")
    full = choi_layout(c.out_layout, c.in_layout)
    traced = [l + OUT_TAG for l in out_subset]
    m = ptrace(c.choi, full, traced)
    rem = full.drop(traced)
    sender_tags = [l + IN_TAG for l in in_subset]
    front = sender_tags + [l for l in rem.labels if l not in set(sender_tags)]
    mp, play = permute_to(m, rem, front)
    ds = play.select(sender_tags).total_dim
    s = ptrace(mp, play, sender_tags) / ds
    residual = float(np.max(np.abs(mp - kron(np.eye(ds), s))))
    return residual, s, play.drop(sender_tags)


def check_nosignaling_subset(
    c: Channel,
    in_subset: Sequence[str],
    out_subset: Sequence[str],
    tol: float = NOSIGNAL_TOL,
):
    """Generalized no-signaling condition for arbitrary input/output subsets."""
    residual, _, _ = _factorization_residual(c, in_subset, out_subset)
    return residual <= tol, residual


def check_nosignaling_dir(
    c: Channel,
    sender_in_labels: Sequence[str],
    sender_out_labels: Sequence[str],
    tol: float = NOSIGNAL_TOL,
):
    """Can the sender side signal to the rest?  Returns (no_signaling, residual).

    When the factorization holds, the marginal S is additionally verified to
    be a well-formed channel Choi on the receiver side.
    """
    residual, s, s_lay = _factorization_residual(c, sender_in_labels, sender_out_labels)
    ok = residual <= tol
    if ok:
        n_out = sum(1 for l in s_lay.labels if l.endswith(OUT_TAG))
        out_lay = SystemLayout(s_lay.subsystems[:n_out])
        in_lay = SystemLayout(s_lay.subsystems[n_out:])
        w, _ = eigh(s, tol=1e-7)
        marg = ptrace(s, s_lay, out_lay.labels)
        dev = np.max(np.abs(marg - np.eye(in_lay.total_dim)))
        if w[-1] < -1e-7 or dev > 1e-7:
            raise ChannelError(
                f"marginal passed the factorization test but is not a channel "
                f"(min eig {w[-1]:.3e}, TP residual {dev:.3e})"
            )
    return ok, residual


def signaling_verdict(
    c: Channel,
    a_in_labels: Sequence[str],
    a_out_labels: Sequence[str],
    b_in_labels: Sequence[str],
    b_out_labels: Sequence[str],
    tol: float = NOSIGNAL_TOL,
) -> SignalingVerdict:
    ok_a, res_a = check_nosignaling_dir(c, a_in_labels, a_out_labels, tol)
    ok_b, res_b = check_nosignaling_dir(c, b_in_labels, b_out_labels, tol)
    return SignalingVerdict(ok_a, ok_b, res_a, res_b, tol)


def is_nosignaling(c, a_in_labels, a_out_labels, b_in_labels, b_out_labels,
                   tol: float = NOSIGNAL_TOL) -> bool:
    v = signaling_verdict(c, a_in_labels, a_out_labels, b_in_labels, b_out_labels, tol)
    return v.a_to_b and v.b_to_a


# ---------------------------------------------------------------------------
# Realization builders.
#
# Local pieces follow one convention: a piece acting on one party's side takes
# (party systems ..., ancilla subsystem) as input, ancilla LAST, and maps to
# that party's outputs.


def _ancilla_dim(piece_in: SystemLayout) -> int:
    if len(piece_in) < 1:
        raise ChannelError("local piece needs at least the ancilla input")
    return piece_in.dims[-1]


def _joint_from_local(
    a_choi: np.ndarray,
    a_in: SystemLayout,
    a_out: SystemLayout,
    b_choi: np.ndarray,
    b_in: SystemLayout,
    b_out: SystemLayout,
    d: int,
) -> Channel:
    """Choi of (a_piece x b_piece) fed with the shared pair (1/sqrt d)|I>>.

    The joint input is (A systems ..., B systems ...) in the pieces' order;
    the ancilla subsystems (last input of each piece) are consumed.
    """
    if _ancilla_dim(a_in) != d or _ancilla_dim(b_in) != d:
        raise ChannelError(
            f"ancilla inputs must have dimension {d}, "
            f"got {_ancilla_dim(a_in)} and {_ancilla_dim(b_in)}"
        )
    ea = a_in.labels[-1]
    eb = b_in.labels[-1]
    sys_a = SystemLayout(a_in.subsystems[:-1])
    sys_b = SystemLayout(b_in.subsystems[:-1])
    joint_in = sys_a.concat(sys_b)
    joint_out = a_out.concat(b_out)
    gp = compose_par(Channel(a_choi, a_in, a_out), Channel(b_choi, b_in, b_out))
    phi_vec = max_entangled_vec(d, normalized=True)
    phi = np.outer(phi_vec, phi_vec.conj())
    state_lay = joint_in.concat(SystemLayout(((ea, d), (eb, d))))
    target = list(a_in.labels) + list(b_in.labels)

    def fn(rho):
        state = kron(rho, phi)
        state, _ = permute_to(state, state_lay, target)
        return apply(gp, state)

    return choi_from_map(fn, joint_in, joint_out)


def build_localizable(g_a: Channel, g_b: Channel, d: int) -> Channel:
    """Local operations on both sides sharing a maximally entangled pair.

    g_a: (A systems ..., E_A) -> A outputs, g_b likewise; ancillas have
    dimension d and sit last in each input layout.
    """
    return _joint_from_local(
        g_a.choi, g_a.in_layout, g_a.out_layout,
        g_b.choi, g_b.in_layout, g_b.out_layout,
        d,
    )


@dataclass(frozen=True)
class RealizationSpec:
    """One-round classical-communication realization of a channel.

    direction "A_to_B": the instrument sits on the A side and its outcome is
    sent to B, which applies the matching correction channel; "B_to_A" is the
    mirror image.  The instrument input is (sender systems ..., E_sender) and
    each correction input is (receiver systems ..., E_receiver), ancillas
    last, jointly fed with the pair (1/sqrt d)|I>>.
    """

    direction: str
    ancilla_dim: int
    instrument: Instrument
    corrections: Tuple[Channel, ...]

    def __post_init__(self):
        if self.direction not in ("A_to_B", "B_to_A"):
            raise ChannelError(f"unknown direction {self.direction!r}")
        if len(self.corrections) != len(self.instrument.branch_chois):
            raise ChannelError(
                f"{len(self.instrument.branch_chois)} instrument outcomes vs "
                f"{len(self.corrections)} corrections"
            )
        for corr in self.corrections:
            if corr.in_layout.labels != self.corrections[0].in_layout.labels:
                raise ChannelError("corrections must share one input layout")


def build_realization_cc(spec: RealizationSpec) -> Channel:
    """Sum over outcomes of (instrument branch (x) correction) on the shared pair."""
    d = spec.ancilla_dim
    ins = spec.instrument
    total = None
    for branch, corr in zip(ins.branch_chois, spec.corrections):
        if spec.direction == "A_to_B":
            part = _joint_from_local(
                branch, ins.in_layout, ins.out_layout,
                corr.choi, corr.in_layout, corr.out_layout,
                d,
            )
        else:
            part = _joint_from_local(
                corr.choi, corr.in_layout, corr.out_layout,
                branch, ins.in_layout, ins.out_layout,
                d,
            )
        total = part.choi if total is None else total + part.choi
    out = Channel(total, part.in_layout, part.out_layout)
    dev = tp_residual(out.choi, out.out_layout, out.in_layout)
    if dev > 1e-8:
        raise ChannelError(f"realization is not trace-preserving: residual {dev:.3e}")
    return out


def build_semilocalizable(v1: Channel, v2: Channel) -> Channel:
    """One-way quantum communication: v1 on A emits a relay system consumed by v2.

    v1: A -> (A outputs ..., relay), relay last; v2: (relay, B systems ...) -> B
    outputs, relay first.  The result cannot signal from B to the A outputs.
    """
    relay_dim = v1.out_layout.dims[-1]
    if v2.in_layout.dims[0] != relay_dim:
        raise ChannelError(
            f"relay dimension mismatch: {relay_dim} vs {v2.in_layout.dims[0]}"
        )
    b_in = SystemLayout(v2.in_layout.subsystems[1:])
    a_out = SystemLayout(v1.out_layout.subsystems[:-1])
    stage1 = compose_par(v1, identity_channel(b_in))
    stage2 = compose_par(identity_channel(a_out), v2)
    composed = compose_seq(stage1, stage2)
    return Channel(composed.choi, v1.in_layout.concat(b_in), a_out.concat(v2.out_layout))


def teleport_gadget(d: int):
    """Generalized Bell basis and the matching correction unitaries.

    Bell vectors |B_pq> = (1/sqrt d)(X^p Z^q (x) I)|I>> with X the cyclic
    shift and Z the clock operator; outcome index x = p*d + q.  The
    correction X^p Z^q undoes the (X^p Z^q)† picked up by the teleported
    system, so the full circuit is the identity channel.
    """
    if d < 2:
        raise TensorError(f"teleportation needs d >= 2, got {d}")
    x_op = shift_op(d)
    z_op = clock_op(d)
    phi = max_entangled_vec(d, normalized=True)
    bells = []
    corrections = []
    for p in range(d):
        xp = np.linalg.matrix_power(x_op, p)
        for q in range(d):
            w = xp @ np.linalg.matrix_power(z_op, q)
            bells.append(kron(w, np.eye(d)) @ phi)
            corrections.append(w)
    return bells, corrections


def teleport_realization(v1: Channel, v2: Channel) -> Channel:
    """Replace the relay wire of a one-way realization by teleportation.

    Builds the one-round classical-communication form: Bell-measure the relay
    against half of a shared pair on the A side, send the outcome, correct and
    run v2 on the B side.  Equals build_semilocalizable(v1, v2) exactly.
    """
    relay = v1.out_layout.labels[-1]
    e = v1.out_layout.dims[-1]
    bells, cors = teleport_gadget(e)

    sys_a = v1.in_layout
    ea_label = "_tp_EA"
    eb_label = "_tp_EB"
    ins_in = sys_a.concat(SystemLayout(((ea_label, e),)))
    ins_out = SystemLayout(v1.out_layout.subsystems[:-1])
    sender_lift = compose_par(v1, identity_channel(SystemLayout(((ea_label, e),))))
    lift_out = sender_lift.out_layout

    branch_chois = []
    for b in bells:
        def fn(rho, b=b):
            s = apply(sender_lift, rho)
            return bra_sandwich(s, lift_out, [relay, ea_label], b)

        branch_chois.append(choi_from_map(fn, ins_in, ins_out).choi)
    instrument = Instrument(tuple(branch_chois), ins_in, ins_out)

    b_sys = SystemLayout(v2.in_layout.subsystems[1:])
    corr_in = b_sys.concat(SystemLayout(((eb_label, e),)))
    corrections = []
    for u in cors:
        def fn(rho, u=u):
            big = embed(u, [eb_label], corr_in)
            s = big @ rho @ big.conj().T
            s, _ = permute_to(s, corr_in, [eb_label] + list(b_sys.labels))
            return apply(v2, s)

        corrections.append(choi_from_map(fn, corr_in, v2.out_layout))
    spec = RealizationSpec("A_to_B", e, instrument, tuple(corrections))
    return build_realization_cc(spec)
