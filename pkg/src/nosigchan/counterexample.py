"""The two-qubit-in, four-qubit-out counterexample channel family.

Six qubit wires: inputs A, B; a shared pair (1/sqrt 2)|I>> on X_A, X_B; a
pair sqrt(a)|00> + sqrt(1-a)|11> on W_A, W_B.  Both X wires are swapped
with the corresponding system wire conditionally on the W wires, measured,
and a sigma_x fires on one side iff both outcomes are 1.  Outputs are
grouped as A' = (A, W_A) and B' = (W_B, B).

The family is built two independent ways: closed-form Kraus vectors and a
density-matrix simulation of the measurement circuit.  A third route casts
it as a strict one-round classical-communication realization over a
maximally entangled dim-4 ancilla pair.
"""
from __future__ import annotations

import numpy as np

from .tensor import (
    SystemLayout,
    TensorError,
    bra_sandwich,
    controlled_swap,
    embed,
    kron,
    layout,
    max_entangled_vec,
    pauli,
    permute_to,
    permute_vector,
    vector_bra_contract,
)
from .channels import Channel, Instrument, choi_from_map, instrument_sum
from .nosignal import RealizationSpec, build_realization_cc

IN_LAYOUT = layout("A", "B")
OUT_LAYOUT = layout("A", "W_A", "W_B", "B")

VARIANT_SIGMA_ON_A = "sigma_on_A"
VARIANT_SIGMA_ON_B = "sigma_on_B"

_P0 = np.array([[1, 0], [0, 0]], dtype=complex)
_P1 = np.array([[0, 0], [0, 1]], dtype=complex)


def _check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    return alpha


def pair_state_vec(alpha: float) -> np.ndarray:
    """sqrt(a)|00> + sqrt(1-a)|11> on the W pair."""
    v = np.zeros(4, dtype=complex)
    v[0] = np.sqrt(alpha)
    v[3] = np.sqrt(1.0 - alpha)
    return v


def _controlled_sigma_x() -> np.ndarray:
    """|1><1|_W (x) sigma_x + |0><0|_W (x) I on ordering (W wire, system wire)."""
    return kron(_P1, pauli("x")) + kron(_P0, np.eye(2))


def kraus_operators(alpha: float):
    """The four closed-form Kraus operators (16 x 4), outcome order (m, n)."""
    alpha = _check_alpha(alpha)
    lay8 = layout("A", "B", "Ain", "Bin", "X_A", "X_B", "W_A", "W_B")
    vec_ab = np.eye(4, dtype=complex).reshape(-1)  # |I>> on (A,B | Ain,Bin)
    full = np.kron(
        np.kron(vec_ab, max_entangled_vec(2, normalized=True)),
        pair_state_vec(alpha),
    )
    cs = controlled_swap(2)
    e_op = embed(cs, ["W_A", "A", "X_A"], lay8) @ embed(cs, ["W_B", "B", "X_B"], lay8)
    phi = e_op @ full

    lay6 = lay8.drop(["X_A", "X_B"])
    sigma = embed(_controlled_sigma_x(), ["W_A", "A"], lay6)
    canonical = ["A", "W_A", "W_B", "B", "Ain", "Bin"]
    ks = []
    for m in range(2):
        for n in range(2):
            bra = np.zeros(4, dtype=complex)
            bra[2 * m + n] = 1
            kv = vector_bra_contract(phi, lay8, ["X_A", "X_B"], bra)
            if m == 1 and n == 1:
                kv = sigma @ kv
            kv, _ = permute_vector(kv, lay6, canonical)
            ks.append(kv.reshape(16, 4))
    return ks


def build_r_alpha_kraus(alpha: float) -> Channel:
    """Choi operator from the closed-form Kraus vectors."""
    ks = kraus_operators(alpha)
    choi = np.zeros((64, 64), dtype=complex)
    for k in ks:
        v = k.reshape(-1)
        choi += np.outer(v, v.conj())
    return Channel(choi, IN_LAYOUT, OUT_LAYOUT)


def circuit_instrument(alpha: float, variant: str = VARIANT_SIGMA_ON_A) -> Instrument:
    """The measurement circuit as a four-branch instrument, outcomes (m, n)."""
    alpha = _check_alpha(alpha)
    if variant not in (VARIANT_SIGMA_ON_A, VARIANT_SIGMA_ON_B):
        raise ValueError(f"unknown variant {variant!r}")
    lay6 = layout("A", "B", "X_A", "X_B", "W_A", "W_B")
    phi2 = max_entangled_vec(2, normalized=True)
    psi = pair_state_vec(alpha)
    ancillas = kron(np.outer(phi2, phi2.conj()), np.outer(psi, psi.conj()))
    cs = controlled_swap(2)
    e_op = embed(cs, ["W_A", "A", "X_A"], lay6) @ embed(cs, ["W_B", "B", "X_B"], lay6)
    lay4 = lay6.drop(["X_A", "X_B"])
    if variant == VARIANT_SIGMA_ON_A:
        sigma = embed(_controlled_sigma_x(), ["W_A", "A"], lay4)
    else:
        sigma = embed(_controlled_sigma_x(), ["W_B", "B"], lay4)

    branches = []
    outcomes = []
    for m in range(2):
        for n in range(2):
            bra = np.zeros(4, dtype=complex)
            bra[2 * m + n] = 1

            def fn(rho, bra=bra, fire=(m == 1 and n == 1)):
                s = kron(rho, ancillas)
                s = e_op @ s @ e_op.conj().T
                s = bra_sandwich(s, lay6, ["X_A", "X_B"], bra)
                if fire:
                    s = sigma @ s @ sigma.conj().T
                s, _ = permute_to(s, lay4, OUT_LAYOUT.labels)
                return s

            branches.append(choi_from_map(fn, IN_LAYOUT, OUT_LAYOUT).choi)
            outcomes.append((m, n))
    return Instrument(tuple(branches), IN_LAYOUT, OUT_LAYOUT, tuple(outcomes))


def build_r_alpha_circuit(alpha: float, variant: str = VARIANT_SIGMA_ON_A) -> Channel:
    """Choi operator by direct density-matrix simulation of the circuit."""
    return instrument_sum(circuit_instrument(alpha, variant))


def _nielsen_filters(alpha: float):
    """Two-outcome local filtering turning (1/sqrt 2)|I>> into the W pair.

    Measuring M_k on one half of the maximally entangled pair yields the
    target pair state, up to a sigma_x on the opposite half for outcome 1.
    """
    m0 = np.diag([np.sqrt(alpha), np.sqrt(1.0 - alpha)]).astype(complex)
    m1 = np.array(
        [[0.0, np.sqrt(alpha)], [np.sqrt(1.0 - alpha), 0.0]], dtype=complex
    )
    return m0, m1


def realization_spec(alpha: float, direction: str = "B_to_A") -> RealizationSpec:
    """Strict one-round classical-communication form over a (1/2)|I>> pair.

    The dim-4 ancilla halves are (X, W) qubit pairs.  The sender filters its
    W half so the shared W pair ends up in the circuit's non-maximally
    entangled state, then runs its half of the circuit; the receiver applies
    the filtering correction and its half, firing sigma_x iff both
    computational outcomes were 1.  Direction "B_to_A" puts the sigma_x on
    the A side (the original circuit); "A_to_B" is the mirrored variant.
    """
    alpha = _check_alpha(alpha)
    if direction not in ("A_to_B", "B_to_A"):
        raise ValueError(f"unknown direction {direction!r}")
    m_ops = _nielsen_filters(alpha)
    cs = controlled_swap(2)
    sigma = _controlled_sigma_x()

    if direction == "B_to_A":
        snd, rcv = "B", "A"
    else:
        snd, rcv = "A", "B"
    s_lay = layout(snd, "X_" + snd, "W_" + snd)
    r_lay = layout(rcv, "X_" + rcv, "W_" + rcv)
    cs_snd = embed(cs, ["W_" + snd, snd, "X_" + snd], s_lay)
    cs_rcv = embed(cs, ["W_" + rcv, rcv, "X_" + rcv], r_lay)
    # A' keeps (A, W_A) order; B' keeps (W_B, B) order.
    if snd == "B":
        s_out_labels, r_out_labels = ["W_B", "B"], ["A", "W_A"]
    else:
        s_out_labels, r_out_labels = ["A", "W_A"], ["W_B", "B"]
    s_out = s_lay.drop(["X_" + snd]).select(s_out_labels)
    r_out = r_lay.drop(["X_" + rcv]).select(r_out_labels)
    ins_in = SystemLayout(((snd, 2), ("E_" + snd, 4)))
    corr_in = SystemLayout(((rcv, 2), ("E_" + rcv, 4)))

    branch_chois = []
    outcomes = []
    corrections = []
    for meas in range(2):
        for k in range(2):
            filt = embed(m_ops[k], ["W_" + snd], s_lay)

            def s_fn(rho, filt=filt, meas=meas):
                s = filt @ rho @ filt.conj().T
                s = cs_snd @ s @ cs_snd.conj().T
                bra = np.zeros(2, dtype=complex)
                bra[meas] = 1
                s = bra_sandwich(s, s_lay, ["X_" + snd], bra)
                s, _ = permute_to(s, s_lay.drop(["X_" + snd]), s_out_labels)
                return s

            branch_chois.append(choi_from_map(s_fn, ins_in, s_out).choi)
            outcomes.append((meas, k))

            fix = embed(pauli("x"), ["W_" + rcv], r_lay) if k == 1 else np.eye(8)
            fire_gate = embed(sigma, ["W_" + rcv, rcv], r_lay.drop(["X_" + rcv]))

            def r_fn(rho, fix=fix, meas=meas, fire_gate=fire_gate):
                s = fix @ rho @ fix.conj().T
                s = cs_rcv @ s @ cs_rcv.conj().T
                out = None
                for other in range(2):
                    bra = np.zeros(2, dtype=complex)
                    bra[other] = 1
                    part = bra_sandwich(s, r_lay, ["X_" + rcv], bra)
                    if other == 1 and meas == 1:
                        part = fire_gate @ part @ fire_gate.conj().T
                    out = part if out is None else out + part
                out, _ = permute_to(out, r_lay.drop(["X_" + rcv]), r_out_labels)
                return out

            corrections.append(choi_from_map(r_fn, corr_in, r_out))

    instrument = Instrument(tuple(branch_chois), ins_in, s_out, tuple(outcomes))
    return RealizationSpec(direction, 4, instrument, tuple(corrections))


def build_r_alpha_realization(alpha: float, direction: str = "B_to_A") -> Channel:
    """The channel rebuilt through build_realization_cc; equals the other routes."""
    c = build_realization_cc(realization_spec(alpha, direction))
    if direction == "B_to_A":
        return c  # output already (A, W_A, W_B, B)
    # A_to_B ordering is (A, W_A) ++ (W_B, B) as well.
    return c
