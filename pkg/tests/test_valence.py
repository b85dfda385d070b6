import numpy as np
import pytest

from photospin import spin, valence as vb
from photospin.spin import CHECKERBOARD6, SQUARE4, ladder_boundary
from photospin.valence import PHI_EQ, PHI_PAR, PHI_X, DimerCovering

import oracles


def test_covering_counts():
    assert [len(vb.enumerate_coverings(n)) for n in (2, 4, 6, 8)] == [1, 3, 15, 105]
    with pytest.raises(ValueError):
        vb.enumerate_coverings(5)


def test_covering_validation():
    with pytest.raises(ValueError):
        DimerCovering(((1, 2), (2, 3)))
    assert DimerCovering(((4, 3), (2, 1))).pairs == ((1, 2), (3, 4))


@pytest.mark.parametrize("n, order", [(4, None), (6, None), (6, CHECKERBOARD6.boundary)])
def test_covering_states_match_oracle(n, order):
    ring = ladder_boundary(n) if order is None else order
    for c in vb.enumerate_coverings(n):
        assert np.allclose(vb.covering_state(c, order), oracles.singlet_cover(n, c.pairs, ring), atol=1e-14)


def test_square_identity_and_overlap():
    eq, par, x = (vb.covering_state(c) for c in (PHI_EQ, PHI_PAR, PHI_X))
    assert np.max(np.abs(x - (eq - par))) == 0.0
    assert np.isclose(np.vdot(eq, par), 0.5)


def test_phi_eq_energy():
    eq = vb.covering_state(PHI_EQ)
    system = spin.square4(J1=1.3, J2=0.2, J3=0.9)
    # J2 and J3 bonds join different singlets and average to zero
    assert np.isclose(vb.hamiltonian_expectation(system, eq), -1.5 * 1.3)


def test_gram_rank():
    assert vb.gram_rank(vb.enumerate_coverings(4))[1] == 2
    assert vb.gram_rank(vb.enumerate_coverings(6))[1] == 5
    assert vb.gram_rank([PHI_EQ])[1] == 1


@pytest.mark.parametrize("n", [4, 6])
def test_gram_magnitudes_follow_loop_count(n):
    coverings = vb.enumerate_coverings(n)
    G, _ = vb.gram_rank(coverings)
    for a, ca in enumerate(coverings):
        for b, cb in enumerate(coverings):
            adj = {}
            for i, j in ca.pairs + cb.pairs:
                adj.setdefault(i, []).append(j)
                adj.setdefault(j, []).append(i)
            seen, loops = set(), 0
            for s in adj:
                if s in seen:
                    continue
                loops += 1
                stack = [s]
                while stack:
                    v = stack.pop()
                    if v not in seen:
                        seen.add(v)
                        stack.extend(adj[v])
            assert np.isclose(abs(G[a, b]), 2.0 ** (loops - n / 2))


def test_decompose_examples():
    basis = [PHI_EQ, PHI_PAR]
    d = vb.decompose(vb.covering_state(PHI_EQ), basis)
    assert np.allclose(d.coefficients, [1, 0]) and d.residual < 1e-12
    x = vb.covering_state(PHI_X)
    d = vb.decompose(x / np.linalg.norm(x), basis)
    assert np.allclose(d.coefficients, [1, -1])
    with pytest.raises(ValueError):
        vb.decompose(x, [])


def test_decompose_residual_is_out_of_span_norm(rng):
    # random state: residual equals the norm of its component outside the singlet sector
    psi = rng.normal(size=16) + 1j * rng.normal(size=16)
    psi /= np.linalg.norm(psi)
    d = vb.decompose(psi, [PHI_EQ, PHI_PAR])
    S2 = oracles.total_spin_squared_op(4)
    w, v = np.linalg.eigh(S2)
    singlet_space = v[:, np.abs(w) < 1e-9]
    outside = psi - singlet_space @ (singlet_space.conj().T @ psi)
    assert np.isclose(d.residual, np.linalg.norm(outside))


def test_triplet_state_has_full_residual():
    up_down = np.zeros(16)
    up_down[0b0101] = up_down[0b1010] = 1 / np.sqrt(2)
    triplet = np.zeros(16)
    triplet[0] = 1.0
    assert np.isclose(vb.decompose(triplet, [PHI_EQ, PHI_PAR]).residual, 1.0)


def test_symmetry_filter():
    cover6 = vb.enumerate_coverings(6)
    allowed = vb.symmetry_allowed_coverings(cover6, CHECKERBOARD6.symmetry, CHECKERBOARD6.bonds, independent=True, order=CHECKERBOARD6.boundary)
    assert len(allowed) == 4
    assert vb.symmetry_allowed_coverings(cover6, None) == cover6
    assert vb.symmetry_allowed_coverings(cover6, (1, 2, 3, 4, 5, 6)) == cover6
    square = vb.symmetry_allowed_coverings(vb.enumerate_coverings(4), SQUARE4.symmetry, SQUARE4.bonds, independent=True, order=SQUARE4.boundary)
    assert square == [PHI_EQ, PHI_PAR]


def test_symmetry_must_be_automorphism():
    with pytest.raises(ValueError):
        vb.symmetry_allowed_coverings(vb.enumerate_coverings(6), (2, 1, 3, 4, 5, 6), CHECKERBOARD6.bonds)


@pytest.mark.parametrize(
    "j2, j3, expected",
    [(0.0, 0.0, (1, 0)), (1.0, 2.0, (1, -1)), (0.5, 1.0, (2, -1)), (1.5, 1.0, (0, 1))],
)
def test_four_site_points(j2, j3, expected):
    p = vb.four_site_point(j2, j3)
    got = np.array([p.alpha, p.beta])
    want = np.array(expected, dtype=float)
    assert not p.degenerate and p.residual < 1e-10
    # same direction up to a positive factor
    assert np.isclose(abs(np.vdot(want, got)), np.linalg.norm(want) * np.linalg.norm(got))


def test_four_site_degenerate_point_flagged():
    p = vb.four_site_point(1.0, 1.0)
    assert p.degenerate and np.isnan(p.alpha)


def test_phase_diagram_shape_and_sign():
    pts = vb.four_site_phase_diagram([0.0, 0.5], [0.0, 0.5, 1.5])
    assert len(pts) == 6
    with pytest.raises(ValueError):
        vb.four_site_phase_diagram([-0.1], [0.0])


def test_half_norm():
    a, b = vb.half_norm_rescale(1.0, -1.0)
    assert np.isclose(2 * (abs(a) ** 2 + abs(b) ** 2 + abs(a + b) ** 2), 1.0)
    # with that rescaling the state norm is one half
    state = a * vb.covering_state(PHI_EQ) + b * vb.covering_state(PHI_PAR)
    assert np.isclose(np.linalg.norm(state), 0.5)


def test_checkerboard_basis_and_signature():
    basis = vb.checkerboard_basis()
    assert [str(c) for c in basis.coverings] == ["(14)(25)(36)", "(12)(36)(45)", "(14)(23)(56)", "(16)(25)(34)"]
    for c in basis.coverings:
        assert c.permuted(CHECKERBOARD6.symmetry[0]) == c


def test_checkerboard_ratio_one():
    (row,) = vb.checkerboard_coefficients([1.0])
    c = row.coefficients
    assert abs(c[1]) < 1e-10 and abs(c[3]) < 1e-10 and abs(c[0] - c[2]) < 1e-10
    assert row.residual < 1e-10


def test_checkerboard_plaquette_on_uncrossed_square():
    psi = vb.checkerboard_ground_state(1.0)
    ring = vb.plaquette_singlet()  # ring order 2-3-6-5
    dimer = np.array([0, 1, -1, 0]) / np.sqrt(2)
    f = vb.product_fidelity(psi, 6, [((1, 4), dimer), ((2, 3, 6, 5), ring)])
    assert f > 1 - 1e-10


def test_checkerboard_ratio_two():
    (row,) = vb.checkerboard_coefficients([2.0])
    m = np.abs(row.coefficients)
    assert abs(m[0] - m[1]) / max(m[0], m[1]) < 0.10
    assert np.argmin(m) == 3


def test_covering_energy_bounded_by_ground():
    system = CHECKERBOARD6.at_ratio(1.2)
    E0, _ = spin.system_ground_space(system)
    for c in vb.enumerate_coverings(6):
        assert vb.hamiltonian_expectation(system, vb.covering_state(c, CHECKERBOARD6.boundary)) >= E0 - 1e-12


def test_coverings_are_singlets():
    for c in vb.enumerate_coverings(6):
        assert abs(spin.total_spin_squared(vb.covering_state(c))) < 1e-12


def test_checkerboard_degenerate_ground_is_an_error():
    lattice = spin.Lattice(4, ((1, 2, "J1"), (2, 3, "J1"), (3, 4, "J1"), (1, 4, "J1"), (1, 3, "J2"), (2, 4, "J2")), boundary=(1, 2, 3, 4))
    with pytest.raises(ArithmeticError):
        vb.checkerboard_coefficients([1.0], lattice, basis=vb.CheckerboardBasis((PHI_EQ,), lattice.boundary))
