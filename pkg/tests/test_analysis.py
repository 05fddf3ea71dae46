"""Verdicts: PPT entanglement witness, CHSH against the Tsirelson bound, and
the Kraus-product extremality certificate."""
import numpy as np
import pytest

from nosigchan.tensor import kron, layout, pauli, ptranspose
from nosigchan.channels import (
    Channel,
    channel_from_kraus,
    choi_layout,
    identity_channel,
    prepare_channel,
    random_cptp,
    unitary_channel,
)
from nosigchan.nosignal import build_localizable
from nosigchan.counterexample import (
    IN_LAYOUT,
    OUT_LAYOUT,
    build_r_alpha_kraus,
)
from nosigchan.analysis import (
    TSIRELSON,
    analyze,
    chsh_value,
    extremality_rank,
    ppt_min_eig,
)
from conftest import random_density


# ---------------------------------------------------------------------------
# PPT witness


def test_identity_channel_choi_is_entangled():
    c = identity_channel(layout("S"))
    # Choi of the qubit identity is the (unnormalized) maximally entangled
    # projector; its partial transpose has minimum eigenvalue -1
    assert ppt_min_eig(c) == pytest.approx(-1.0, abs=1e-12)


def test_measure_and_reprepare_choi_is_ppt(rng):
    # a constant channel has Choi sigma (x) I: separable, PPT holds
    sigma = random_density(rng, 2)
    c = prepare_channel(sigma, layout("O"), layout("I"))
    assert ppt_min_eig(c) >= -1e-12


def test_ppt_min_eig_same_for_either_transposed_side():
    c = build_r_alpha_kraus(1.0 / 6.0)
    lay = choi_layout(c.out_layout, c.in_layout)
    out_labels = [l for l in lay.labels if l.endswith("#out")]
    w_out = np.linalg.eigvalsh(ptranspose(c.choi, lay, out_labels))
    assert ppt_min_eig(c) == pytest.approx(float(w_out.min()), abs=1e-12)


def test_r_one_sixth_violates_ppt():
    # independently verified by direct eigensolve of the partially
    # transposed 64 x 64 Choi: the minimum eigenvalue is about -0.36
    val = ppt_min_eig(build_r_alpha_kraus(1.0 / 6.0))
    assert val < -1e-6
    assert val == pytest.approx(-0.3596, abs=5e-4)


# ---------------------------------------------------------------------------
# CHSH


def test_chsh_requires_counterexample_layout(rng):
    c = random_cptp(rng, layout("A"), layout("Ap"))
    with pytest.raises(ValueError):
        chsh_value(c)


def test_chsh_closed_form_on_alpha_grid():
    for alpha in np.linspace(0.0, 1.0, 11):
        c = build_r_alpha_kraus(float(alpha))
        assert abs(chsh_value(c) - abs(4 - 6 * alpha)) <= 1e-9


def test_chsh_alpha_one_sixth_beats_tsirelson():
    val = chsh_value(build_r_alpha_kraus(1.0 / 6.0))
    assert val == pytest.approx(3.0, abs=1e-9)
    assert val > TSIRELSON


def test_localizable_channels_respect_tsirelson(rng):
    for _ in range(5):
        d = int(rng.integers(2, 4))
        ga = random_cptp(rng, layout("A", ("EA", d)), layout("A", "W_A"))
        gb = random_cptp(rng, layout("B", ("EB", d)), layout("W_B", "B"))
        c = build_localizable(ga, gb, d)
        assert chsh_value(c) <= TSIRELSON + 1e-6


# ---------------------------------------------------------------------------
# extremality


def test_unitary_channel_is_extremal(rng):
    g = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    u, _ = np.linalg.qr(g)
    c = unitary_channel(u, layout("S"))
    r, rank, full = extremality_rank(c)
    assert (r, rank, full) == (1, 1, True)


def test_depolarizing_channel_is_not_extremal():
    # the constant map to the maximally mixed state is the uniform Pauli
    # mixture; its Kraus products collapse onto matrix units with matching
    # outer index, leaving rank 4 out of 16
    ks = [np.zeros((2, 2), dtype=complex) for _ in range(4)]
    for i in range(2):
        for j in range(2):
            ks[2 * i + j][i, j] = 1 / np.sqrt(2)
    c = channel_from_kraus(ks, layout("I"), layout("O"))
    r, rank, full = extremality_rank(c)
    assert (r, rank, full) == (4, 4, False)


def test_extremality_rank_stable_under_reextraction():
    c = build_r_alpha_kraus(1.0 / 6.0)
    first = extremality_rank(c)
    from nosigchan.channels import kraus_from_choi

    rebuilt = channel_from_kraus(kraus_from_choi(c), c.in_layout, c.out_layout)
    assert extremality_rank(rebuilt) == first


def test_r_alpha_kraus_products_span_ten_dimensions():
    # The fire-branch Kraus operator has range orthogonal to both
    # single-swap branches (their output wires carry orthogonal shared-pair
    # states), so four products vanish identically and two more collapse
    # onto the identity; 10 of the 16 products are independent, at every
    # alpha.  A rank below 16 means the channel is a nontrivial mixture.
    for alpha in (1.0 / 6.0, 0.37):
        r, rank, full = extremality_rank(build_r_alpha_kraus(alpha))
        assert (r, rank, full) == (4, 10, False)


def test_r_alpha_admits_explicit_decomposition():
    # Constructive witness for the rank deficiency: perturbing the Choi
    # along the vanished product direction stays CPTP both ways, exhibiting
    # the channel as the midpoint of two distinct channels.
    c = build_r_alpha_kraus(1.0 / 6.0)
    from nosigchan.counterexample import kraus_operators

    ks = kraus_operators(1.0 / 6.0)
    v01 = ks[1].reshape(-1)
    v11 = ks[3].reshape(-1)
    m = np.outer(v11, v01.conj()) + np.outer(v01, v11.conj())
    for sign in (1.0, -1.0):
        Channel(c.choi + sign * 0.05 * m, c.in_layout, c.out_layout).validate()


# ---------------------------------------------------------------------------
# aggregate report


def test_analyze_r_one_sixth():
    c = build_r_alpha_kraus(1.0 / 6.0)
    rep = analyze(c, ["A"], ["A", "W_A"], ["B"], ["W_B", "B"])
    assert rep.nosignaling.a_to_b and rep.nosignaling.b_to_a
    assert rep.ppt_violated and rep.ppt_min_eigenvalue < -1e-6
    assert rep.chsh_value == pytest.approx(3.0, abs=1e-9)
    assert rep.chsh_exceeds_tsirelson
    assert rep.n_kraus == 4
    assert rep.extremality_rank == 10 and not rep.extremality_full
    assert set(rep.tolerances) == {
        "nosignal_tol", "ppt_tol", "chsh_slack", "extremality_rel_tol",
    }


def test_analyze_skips_chsh_on_other_layouts(rng):
    c = random_cptp(rng, layout("A", "B"), layout("Ap", "Bp"))
    rep = analyze(c, ["A"], ["Ap"], ["B"], ["Bp"])
    assert rep.chsh_value is None
    assert rep.chsh_exceeds_tsirelson is None
