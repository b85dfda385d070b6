"""Dimer coverings, singlet-product states and valence-bond decompositions.

Each covering state is the product of ``(|HV> - |VH>)/sqrt(2)`` over its pairs
``(i < j)`` times ``(-1)**c``, where ``c`` counts pairs of bonds that cross when
the sites sit on a circle in the lattice's boundary order. With the ladder
order this gives ``Phi_x = Phi_= - Phi_||`` on the square.
"""

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from . import kernels
from .spin import CHECKERBOARD6, SQUARE4, SpinSystem, build_hamiltonian, ladder_boundary, system_ground_space


@dataclass(frozen=True, order=True)
class DimerCovering:
    pairs: tuple

    def __post_init__(self):
        pairs = tuple(sorted((min(int(i), int(j)), max(int(i), int(j))) for i, j in self.pairs))
        sites = [s for p in pairs for s in p]
        n = len(sites)
        if n == 0 or n % 2:
            raise ValueError("a covering needs an even, nonzero number of sites")
        if sorted(sites) != list(range(1, n + 1)):
            raise ValueError(f"pairs {pairs} do not cover sites 1..{n} exactly once")
        object.__setattr__(self, "pairs", pairs)

    @property
    def n_sites(self):
        return 2 * len(self.pairs)

    def permuted(self, perm):
        """Image under a site permutation given as 1-based images of 1..n."""
        return DimerCovering(tuple((perm[i - 1], perm[j - 1]) for i, j in self.pairs))

    def crossings(self, order=None):
        order = ladder_boundary(self.n_sites) if order is None else tuple(order)
        pos = {s: k for k, s in enumerate(order)}
        chords = [tuple(sorted((pos[i], pos[j]))) for i, j in self.pairs]
        return sum(
            1 for (a, b), (c, d) in combinations(chords, 2) if a < c < b < d or c < a < d < b
        )

    def __str__(self):
        return "".join(f"({i}{j})" if self.n_sites < 10 else f"({i},{j})" for i, j in self.pairs)


def _matchings(items):
    if not items:
        yield ()
        return
    first = items[0]
    for k in range(1, len(items)):
        for rest in _matchings(items[1:k] + items[k + 1 :]):
            yield ((first, items[k]),) + rest


def enumerate_coverings(n_sites):
    """All perfect matchings of ``1..n``; there are ``(n-1)!!`` of them."""
    if n_sites <= 0 or n_sites % 2:
        raise ValueError("number of sites must be even and positive")
    if n_sites > 12:
        raise ValueError("enumeration limited to 12 sites")
    return sorted(DimerCovering(m) for m in _matchings(tuple(range(1, n_sites + 1))))


def covering_state(covering, order=None):
    n = covering.n_sites
    first = [n - i for i, _ in covering.pairs]
    second = [n - j for _, j in covering.pairs]
    sign = -1.0 if covering.crossings(order) % 2 else 1.0
    return kernels.singlet_product(n, first, second, sign)


def gram_rank(coverings, tol=1e-10, order=None):
    if not coverings:
        raise ValueError("no coverings")
    B = np.column_stack([covering_state(c, order) for c in coverings])
    G = B.conj().T @ B
    s = np.linalg.svd(G, compute_uv=False)
    return G, int(np.sum(s > tol))


@dataclass(frozen=True)
class VbDecomposition:
    basis: tuple
    coefficients: np.ndarray
    residual: float


def decompose(state, basis, order=None, rcond=1e-10):
    """Minimal-norm least-squares expansion of ``state`` over covering states."""
    if not basis:
        raise ValueError("empty basis")
    state = np.asarray(state)
    if abs(np.linalg.norm(state) - 1.0) > 1e-8:
        raise ValueError("state is not normalised")
    B = np.column_stack([covering_state(c, order) for c in basis])
    coeffs = np.linalg.pinv(B, rcond=rcond) @ state
    residual = float(np.linalg.norm(state - B @ coeffs))
    return VbDecomposition(tuple(basis), coeffs, residual)


def _fix_gauge(coeffs):
    """Global phase: the largest-magnitude coefficient (first on ties) is real positive."""
    mags = np.abs(coeffs)
    k = int(np.argmax(mags > mags.max() - 1e-9))
    return coeffs * (np.abs(coeffs[k]) / coeffs[k]) if mags[k] > 0 else coeffs


# ------------------------------------------------------------ symmetry filter


def _generators(symmetry):
    if symmetry is None:
        return ()
    symmetry = tuple(symmetry)
    if symmetry and isinstance(symmetry[0], int):
        return (symmetry,)
    return tuple(tuple(g) for g in symmetry)


def check_automorphism(bonds, perm):
    labelled = {(min(i, j), max(i, j), name) for i, j, name in bonds}
    for i, j, name in labelled:
        a, b = perm[i - 1], perm[j - 1]
        if (min(a, b), max(a, b), name) not in labelled:
            raise ValueError(f"symmetry {perm} maps bond ({i},{j},{name}) off the coupling graph")


def symmetry_allowed_coverings(coverings, symmetry, bonds=None, independent=False, order=None, prefer=None):
    """Coverings mapped onto themselves by every symmetry generator.

    With ``independent`` the survivors are thinned greedily to a linearly
    independent set spanning the same space, trying coverings built only from
    coupling-graph bonds first and then the rest in ``prefer`` order (default:
    canonical order).
    """
    gens = _generators(symmetry)
    if bonds is not None:
        for g in gens:
            check_automorphism(bonds, g)
    kept = [c for c in coverings if all(c.permuted(g) == c for g in gens)]
    if not independent:
        return kept
    on_graph = set() if bonds is None else {(min(i, j), max(i, j)) for i, j, _ in bonds}
    primary = [c for c in kept if on_graph and all(p in on_graph for p in c.pairs)]
    rest = [c for c in kept if c not in primary]
    if prefer is not None:
        rest = sorted(rest, key=prefer)
    chosen, vecs = [], []
    for c in primary + rest:
        trial = np.column_stack(vecs + [covering_state(c, order)])
        if np.linalg.matrix_rank(trial, tol=1e-10) == trial.shape[1]:
            chosen.append(c)
            vecs.append(covering_state(c, order))
    return chosen


# ------------------------------------------------------------- four sites

PHI_EQ = DimerCovering(((1, 2), (3, 4)))
PHI_PAR = DimerCovering(((1, 3), (2, 4)))
PHI_X = DimerCovering(((1, 4), (2, 3)))


def half_norm_rescale(alpha, beta):
    """Rescale so that ``2(|a|^2 + |b|^2 + |a+b|^2) = 1``."""
    norm = 2 * (abs(alpha) ** 2 + abs(beta) ** 2 + abs(alpha + beta) ** 2)
    f = 1.0 / np.sqrt(norm)
    return alpha * f, beta * f


@dataclass(frozen=True)
class PhasePoint:
    j2: float
    j3: float
    alpha: complex
    beta: complex
    degenerate: bool
    residual: float

    @property
    def abs_sum(self):
        return abs(self.alpha) + abs(self.beta)


def four_site_point(j2, j3, j1=1.0):
    system = SQUARE4.system(J1=j1, J2=j2, J3=j3)
    _, space = system_ground_space(system)
    if space.shape[1] > 1:
        return PhasePoint(j2, j3, np.nan, np.nan, True, np.nan)
    dec = decompose(space[:, 0], [PHI_EQ, PHI_PAR], order=SQUARE4.boundary)
    alpha, beta = _fix_gauge(dec.coefficients)
    return PhasePoint(j2, j3, complex(alpha), complex(beta), False, dec.residual)


def four_site_phase_diagram(j2_grid, j3_grid, j1=1.0):
    if min(np.min(j2_grid), np.min(j3_grid), j1) < 0:
        raise ValueError("couplings must be non-negative")
    return [four_site_point(float(a), float(b), j1) for a in j2_grid for b in j3_grid]


# ------------------------------------------------------------ checkerboard

_REFERENCE_RATIOS = np.linspace(0.0, 4.0, 17)


@dataclass(frozen=True)
class CheckerboardBasis:
    """Four symmetric coverings labelled psi1..psi4 by their coefficient signatures."""

    coverings: tuple
    order: tuple


def _ground(lattice, ratio):
    _, space = system_ground_space(lattice.at_ratio(ratio))
    if space.shape[1] != 1:
        raise ArithmeticError(f"degenerate ground state at J2/J1={ratio}")
    return space[:, 0]


def checkerboard_basis(lattice=CHECKERBOARD6):
    """Select and label the symmetry-allowed coverings for the checkerboard.

    Lattice-bond coverings fill the basis first; any remaining slot goes to the
    symmetric covering with the smallest mean weight in the ground state over a
    reference scan. Labels: psi1/psi3 carry equal weight at J2/J1 = 1, psi2/psi4
    vanish there, and psi2 is the one that tracks psi1 at large J2/J1.
    """
    order = lattice.boundary
    grounds = [_ground(lattice, r) for r in _REFERENCE_RATIOS]
    on_graph = {(min(i, j), max(i, j)) for i, j, _ in lattice.bonds}
    invariant = symmetry_allowed_coverings(
        enumerate_coverings(lattice.n_sites), lattice.symmetry, lattice.bonds
    )
    core = symmetry_allowed_coverings(
        [c for c in invariant if all(p in on_graph for p in c.pairs)], None, independent=True, order=order
    )

    def weight(candidate):
        trial = core + [candidate]
        if gram_rank(trial, order=order)[1] < len(trial):
            return (np.inf, candidate)
        shares = [np.abs(decompose(g, trial, order).coefficients) for g in grounds]
        return (round(float(np.mean([c[-1] / c.max() for c in shares])), 12), candidate)

    basis = symmetry_allowed_coverings(
        invariant, lattice.symmetry, lattice.bonds, independent=True, order=order, prefer=weight
    )
    if len(basis) != 4:
        raise ValueError(f"expected four symmetry-allowed coverings, found {len(basis)}")

    at_one = np.abs(decompose(_ground(lattice, 1.0), basis, order).coefficients)
    big = np.abs(decompose(grounds[-1], basis, order).coefficients)
    live = [k for k in range(4) if at_one[k] > 1e-8 * at_one.max()]
    dead = [k for k in range(4) if k not in live]
    if len(live) != 2:
        raise ValueError("geometry fails the J2/J1 = 1 coefficient signature")
    _, psi2, psi1 = min((abs(big[d] - big[l]) / max(big[d], big[l]), d, l) for d in dead for l in live)
    psi3 = next(k for k in live if k != psi1)
    psi4 = next(k for k in dead if k != psi2)
    return CheckerboardBasis(tuple(basis[k] for k in (psi1, psi2, psi3, psi4)), order)


@dataclass(frozen=True)
class CheckerboardRow:
    ratio: float
    coefficients: np.ndarray  # c1..c4
    residual: float


def checkerboard_coefficients(grid, lattice=CHECKERBOARD6, basis=None):
    basis = checkerboard_basis(lattice) if basis is None else basis
    rows = []
    for r in np.asarray(grid, dtype=float):
        dec = decompose(_ground(lattice, r), list(basis.coverings), basis.order)
        c = dec.coefficients
        k = int(np.argmax(np.abs(c[0]) > 0)) if abs(c[0]) > 1e-12 else int(np.argmax(np.abs(c)))
        c = c * (abs(c[k]) / c[k])
        rows.append(CheckerboardRow(float(r), c.real if np.allclose(c.imag, 0) else c, dec.residual))
    return rows


def plaquette_singlet():
    """Ground state of the uniform four-site Heisenberg ring, qubits in ring order."""
    ring = SpinSystem(4, ((1, 2, 1.0), (2, 3, 1.0), (3, 4, 1.0), (1, 4, 1.0)))
    _, space = system_ground_space(ring)
    return space[:, 0]


def product_fidelity(state, n, blocks):
    """``|<block_1 x block_2 x ...|state>|^2`` for ``blocks = [(sites, vector), ...]``.

    Each block vector is written in the order of its 1-based site list; the
    blocks together must cover all ``n`` sites.
    """
    sites = [s for group, _ in blocks for s in group]
    if sorted(sites) != list(range(1, n + 1)):
        raise ValueError("blocks must cover every site once")
    t = np.transpose(np.asarray(state).reshape((2,) * n), [s - 1 for s in sites]).reshape(-1)
    product = np.ones(1)
    for _, vec in blocks:
        product = np.kron(product, vec)
    return float(abs(np.vdot(product, t)) ** 2)


def checkerboard_ground_state(ratio, lattice=CHECKERBOARD6):
    return _ground(lattice, ratio)


def hamiltonian_expectation(system, state):
    return float(np.real(np.vdot(state, build_hamiltonian(system) @ state)))
