"""The three verdicts on a bipartite channel.

Entanglement-breaking is witnessed by a negative eigenvalue of the partially
transposed Choi (outputs|inputs split); localizability is witnessed against
by a CHSH value above 2*sqrt(2); extremality is certified by linear
independence of the products of the extracted Kraus operators.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Optional, Sequence

import numpy as np

from .tensor import embed, eigh, gram_rank, pauli, ptranspose
from .channels import (
    Channel,
    IN_TAG,
    KRAUS_CUTOFF,
    OUT_TAG,
    choi_layout,
    kraus_from_choi,
)
from .nosignal import NOSIGNAL_TOL, SignalingVerdict, signaling_verdict
from . import counterexample

TSIRELSON = float(2.0 * np.sqrt(2.0))
PPT_TOL = 1e-6
CHSH_SLACK = 1e-6
EXTREMALITY_REL_TOL = 1e-10


@dataclass(frozen=True)
class AnalysisReport:
    """Structured verdicts plus every threshold that backed them."""

    nosignaling: SignalingVerdict
    ppt_min_eigenvalue: float
    ppt_violated: bool
    chsh_value: Optional[float]
    chsh_exceeds_tsirelson: Optional[bool]
    n_kraus: int
    extremality_rank: int
    extremality_full: bool
    tolerances: Dict[str, float]


def ppt_min_eig(c: Channel) -> float:
    """Minimum eigenvalue of the Choi partially transposed on the input side."""
    lay = choi_layout(c.out_layout, c.in_layout)
    in_labels = [l for l in lay.labels if l.endswith(IN_TAG)]
    pt = ptranspose(c.choi, lay, in_labels)
    w, _ = eigh(pt)
    return float(w[-1])


def _chsh_applicable(c: Channel) -> bool:
    return (
        c.in_layout.subsystems == counterexample.IN_LAYOUT.subsystems
        and c.out_layout.subsystems == counterexample.OUT_LAYOUT.subsystems
    )


def chsh_value(c: Channel) -> float:
    """CHSH combination of the four correlators read off the Choi operator.

    The settings are fixed: sigma_z on the A and B output wires, computational
    basis states on the two input wires, identity on the W pair.
    """
    if not _chsh_applicable(c):
        raise ValueError(
            "CHSH test needs the counterexample layout "
            f"{counterexample.OUT_LAYOUT.labels} | {counterexample.IN_LAYOUT.labels}"
        )
    lay = choi_layout(c.out_layout, c.in_layout)
    sz = pauli("z")
    zz = embed(sz, ["A" + OUT_TAG], lay) @ embed(sz, ["B" + OUT_TAG], lay)

    def corr(n: int, m: int) -> float:
        pn = np.zeros((2, 2), dtype=complex)
        pn[n, n] = 1
        pm = np.zeros((2, 2), dtype=complex)
        pm[m, m] = 1
        obs = zz @ embed(pn, ["A" + IN_TAG], lay) @ embed(pm, ["B" + IN_TAG], lay)
        return float(np.real(np.trace(obs @ c.choi)))

    return abs(corr(0, 0) + corr(0, 1) + corr(1, 0) - corr(1, 1))


def extremality_rank(
    c: Channel,
    cutoff: float = KRAUS_CUTOFF,
    rel_tol: float = EXTREMALITY_REL_TOL,
):
    """(number of Kraus, rank of {K_i† K_j}, full).  Full rank certifies extremality."""
    ks = kraus_from_choi(c, cutoff=cutoff)
    products = [a.conj().T @ b for a in ks for b in ks]
    rank = gram_rank(products, rel_tol=rel_tol)
    r = len(ks)
    return r, rank, rank == r * r


def analyze(
    c: Channel,
    a_in_labels: Sequence[str],
    a_out_labels: Sequence[str],
    b_in_labels: Sequence[str],
    b_out_labels: Sequence[str],
    nosignal_tol: float = NOSIGNAL_TOL,
    ppt_tol: float = PPT_TOL,
    chsh_slack: float = CHSH_SLACK,
    extremality_rel_tol: float = EXTREMALITY_REL_TOL,
) -> AnalysisReport:
    """Run every applicable verdict on a channel with the given bipartition."""
    verdict = signaling_verdict(
        c, a_in_labels, a_out_labels, b_in_labels, b_out_labels, tol=nosignal_tol
    )
    min_eig = ppt_min_eig(c)
    if _chsh_applicable(c):
        chsh = chsh_value(c)
        exceeds = bool(chsh > TSIRELSON + chsh_slack)
    else:
        chsh = None
        exceeds = None
    n_kraus, rank, full = extremality_rank(c, rel_tol=extremality_rel_tol)
    return AnalysisReport(
        nosignaling=verdict,
        ppt_min_eigenvalue=min_eig,
        ppt_violated=min_eig < -ppt_tol,
        chsh_value=chsh,
        chsh_exceeds_tsirelson=exceeds,
        n_kraus=n_kraus,
        extremality_rank=rank,
        extremality_full=full,
        tolerances={
            "nosignal_tol": nosignal_tol,
            "ppt_tol": ppt_tol,
            "chsh_slack": chsh_slack,
            "extremality_rel_tol": extremality_rel_tol,
        },
    )
