"""Channels and instruments as first-class values.

A channel is stored by its Choi operator in the unnormalized-|I>> convention:
R = (C x Id)(|I>><<I|), factor order (outputs, inputs), so Tr R = dim(in).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence, Tuple

import numpy as np

from .tensor import (
    SystemLayout,
    TensorError,
    as_matrix,
    eigh,
    kron,
    max_entangled_vec,
    permute_to,
    ptrace,
)

CP_TOL = 1e-9
TP_TOL = 1e-9
KRAUS_CUTOFF = 1e-12

IN_TAG = "#in"
OUT_TAG = "#out"


class ChannelError(ValueError):
    """Violated channel invariant or incompatible composition."""


def choi_layout(out_layout: SystemLayout, in_layout: SystemLayout) -> SystemLayout:
    """Layout of the Choi operator: tagged outputs followed by tagged inputs.

    Tags keep labels unique even when a wire keeps its name through the channel.
    """
    return out_layout.relabel(OUT_TAG).concat(in_layout.relabel(IN_TAG))


@dataclass(frozen=True)
class Channel:
    """A channel as (Choi matrix, input layout, output layout)."""

    choi: np.ndarray
    in_layout: SystemLayout
    out_layout: SystemLayout

    def __post_init__(self):
        c = as_matrix(self.choi)
        n = self.out_layout.total_dim * self.in_layout.total_dim
        if c.shape != (n, n):
            raise ChannelError(
                f"Choi shape {c.shape} does not match layouts (dim {n})"
            )
        object.__setattr__(self, "choi", c)

    @property
    def d_in(self) -> int:
        return self.in_layout.total_dim

    @property
    def d_out(self) -> int:
        return self.out_layout.total_dim

    def validate(self, cp_tol: float = CP_TOL, tp_tol: float = TP_TOL) -> "Channel":
        """Check complete positivity and trace preservation; returns self."""
        herm = np.max(np.abs(self.choi - self.choi.conj().T))
        if herm > cp_tol:
            raise ChannelError(f"Choi not Hermitian: deviation {herm:.3e}")
        w, _ = eigh(self.choi, tol=cp_tol * 10)
        if w[-1] < -cp_tol:
            raise ChannelError(f"Choi not PSD: min eigenvalue {w[-1]:.3e}")
        dev = tp_residual(self.choi, self.out_layout, self.in_layout)
        if dev > tp_tol:
            raise ChannelError(f"not trace-preserving: residual {dev:.3e}")
        return self


def tp_residual(choi, out_layout: SystemLayout, in_layout: SystemLayout) -> float:
    """max|Tr_out[choi] - I_in|."""
    lay = choi_layout(out_layout, in_layout)
    marg = ptrace(choi, lay, lay.labels[: len(out_layout)])
    return float(np.max(np.abs(marg - np.eye(in_layout.total_dim))))


def channel_from_kraus(
    kraus: Sequence[np.ndarray],
    in_layout: SystemLayout,
    out_layout: SystemLayout,
    tp_tol: float = TP_TOL,
) -> Channel:
    """Choi = sum_k |K_k>><<K_k| with |K>> the row-major flattening of K."""
    di, do = in_layout.total_dim, out_layout.total_dim
    if not kraus:
        raise ChannelError("empty Kraus set")
    comp = np.zeros((di, di), dtype=complex)
    choi = np.zeros((do * di, do * di), dtype=complex)
    for k in kraus:
        k = as_matrix(k)
        if k.shape != (do, di):
            raise ChannelError(f"Kraus shape {k.shape}, expected {(do, di)}")
        v = k.reshape(-1)
        choi += np.outer(v, v.conj())
        comp += k.conj().T @ k
    dev = np.max(np.abs(comp - np.eye(di)))
    if dev > tp_tol:
        raise ChannelError(f"Kraus completeness violated: sum K†K off by {dev:.3e}")
    return Channel(choi, in_layout, out_layout)


def kraus_from_choi(c: Channel, cutoff: float = KRAUS_CUTOFF):
    """Spectral Kraus extraction: vectors sqrt(l_i)|v_i> reshaped to matrices."""
    w, v = eigh(c.choi)
    if w[-1] < -CP_TOL:
        raise ChannelError(f"Choi not CP: eigenvalue {w[-1]:.3e}")
    ks = []
    for lam, col in zip(w, v.T):
        if lam > cutoff:
            ks.append(np.sqrt(lam) * col.reshape(c.d_out, c.d_in))
    return ks


def apply(c: Channel, rho) -> np.ndarray:
    """C(rho) = Tr_in[(I_out x rho^T) choi]."""
    rho = as_matrix(rho)
    if rho.shape != (c.d_in, c.d_in):
        raise ChannelError(f"state shape {rho.shape}, channel input dim {c.d_in}")
    r4 = c.choi.reshape(c.d_out, c.d_in, c.d_out, c.d_in)
    return np.einsum("ki,akbi->ab", rho, r4)


def choi_from_map(
    fn: Callable[[np.ndarray], np.ndarray],
    in_layout: SystemLayout,
    out_layout: SystemLayout,
) -> Channel:
    """Choi of a linear map given as a function on density matrices.

    Applies fn to every matrix unit |i><k| of the input space.
    """
    di, do = in_layout.total_dim, out_layout.total_dim
    choi = np.zeros((do * di, do * di), dtype=complex)
    unit = np.zeros((di, di), dtype=complex)
    for i in range(di):
        for k in range(di):
            unit[i, k] = 1
            choi += kron(fn(unit), unit)
            unit[i, k] = 0
    return Channel(choi, in_layout, out_layout)


def identity_channel(lay: SystemLayout) -> Channel:
    d = lay.total_dim
    v = max_entangled_vec(d)
    return Channel(np.outer(v, v.conj()), lay, lay)


def unitary_channel(u, in_layout: SystemLayout, out_layout: SystemLayout = None) -> Channel:
    if out_layout is None:
        out_layout = in_layout
    return channel_from_kraus([u], in_layout, out_layout)


def prepare_channel(sigma, out_layout: SystemLayout, in_layout: SystemLayout) -> Channel:
    """Discard the input and prepare the fixed state sigma."""
    sigma = as_matrix(sigma)
    return choi_from_map(lambda rho: np.trace(rho) * sigma, in_layout, out_layout)


def compose_seq(first: Channel, second: Channel) -> Channel:
    """Choi of (second o first), via Kraus products."""
    if first.d_out != second.d_in:
        raise ChannelError(
            f"cannot chain: first output dim {first.d_out} vs second input dim {second.d_in}"
        )
    k1 = kraus_from_choi(first)
    k2 = kraus_from_choi(second)
    prods = [b @ a for b in k2 for a in k1]
    di, do = first.d_in, second.d_out
    choi = np.zeros((do * di, do * di), dtype=complex)
    for k in prods:
        v = k.reshape(-1)
        choi += np.outer(v, v.conj())
    return Channel(choi, first.in_layout, second.out_layout)


def compose_par(a: Channel, b: Channel) -> Channel:
    """Choi of a (x) b, output layout a.out ++ b.out, input layout a.in ++ b.in."""
    out_layout = a.out_layout.concat(b.out_layout)
    in_layout = a.in_layout.concat(b.in_layout)
    naive = kron(a.choi, b.choi)
    lay = choi_layout(a.out_layout, a.in_layout).concat(
        choi_layout(b.out_layout, b.in_layout)
    )
    target = choi_layout(out_layout, in_layout)
    perm, _ = permute_to(naive, lay, target.labels)
    return Channel(perm, in_layout, out_layout)


@dataclass(frozen=True)
class Instrument:
    """Outcome-indexed family of CP maps summing to a channel.

    Each branch is stored as a Choi operator over the shared layouts.
    """

    branch_chois: Tuple[np.ndarray, ...]
    in_layout: SystemLayout
    out_layout: SystemLayout
    outcomes: Tuple = field(default=None)

    def __post_init__(self):
        if self.outcomes is None:
            object.__setattr__(self, "outcomes", tuple(range(len(self.branch_chois))))
        if len(self.outcomes) != len(self.branch_chois):
            raise ChannelError("outcome list must match branch count")
        object.__setattr__(
            self, "branch_chois", tuple(as_matrix(b) for b in self.branch_chois)
        )

    def validate(self, cp_tol: float = CP_TOL, tp_tol: float = TP_TOL) -> "Instrument":
        for x, b in zip(self.outcomes, self.branch_chois):
            w, _ = eigh(b, tol=cp_tol * 10)
            if w[-1] < -cp_tol:
                raise ChannelError(f"branch {x!r} not CP: eigenvalue {w[-1]:.3e}")
        instrument_sum(self, tp_tol=tp_tol)
        return self


def instrument_sum(ins: Instrument, tp_tol: float = TP_TOL) -> Channel:
    """Sum of branch Chois as a valid channel (fixed left-to-right order)."""
    total = np.zeros_like(ins.branch_chois[0])
    for b in ins.branch_chois:
        total = total + b
    c = Channel(total, ins.in_layout, ins.out_layout)
    dev = tp_residual(c.choi, c.out_layout, c.in_layout)
    if dev > tp_tol:
        raise ChannelError(f"instrument branches do not sum to TP: residual {dev:.3e}")
    return c


def random_cptp(
    rng: np.random.Generator,
    in_layout: SystemLayout,
    out_layout: SystemLayout,
    n_kraus: int = None,
) -> Channel:
    """Random CPTP channel from a Haar-ish isometry (QR of a Gaussian block)."""
    di, do = in_layout.total_dim, out_layout.total_dim
    if n_kraus is None:
        n_kraus = max(2, di)
    g = rng.standard_normal((do * n_kraus, di)) + 1j * rng.standard_normal((do * n_kraus, di))
    q, _ = np.linalg.qr(g)  # isometry: q† q = I_di
    ks = [q[i * do : (i + 1) * do, :] for i in range(n_kraus)]
    return channel_from_kraus(ks, in_layout, out_layout)


def random_instrument(
    rng: np.random.Generator,
    in_layout: SystemLayout,
    out_layout: SystemLayout,
    n_outcomes: int = 2,
) -> Instrument:
    """Random instrument: partition the Kraus set of a random channel."""
    di, do = in_layout.total_dim, out_layout.total_dim
    n_kraus = max(n_outcomes, di)
    g = rng.standard_normal((do * n_kraus, di)) + 1j * rng.standard_normal((do * n_kraus, di))
    q, _ = np.linalg.qr(g)
    ks = [q[i * do : (i + 1) * do, :] for i in range(n_kraus)]
    groups = [[] for _ in range(n_outcomes)]
    for i, k in enumerate(ks):
        groups[i % n_outcomes].append(k)
    branches = []
    for grp in groups:
        b = np.zeros((do * di, do * di), dtype=complex)
        for k in grp:
            v = k.reshape(-1)
            b += np.outer(v, v.conj())
        branches.append(b)
    return Instrument(tuple(branches), in_layout, out_layout)
