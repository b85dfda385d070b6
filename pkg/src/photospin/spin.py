"""Generalised Heisenberg models on small graphs and their exact spectra.

Sites are labelled ``1..n``; site 1 is the leftmost tensor factor. Spin
operators are ``S = sigma / 2`` so a singlet bond costs ``-3J/4``.
"""

from dataclasses import dataclass, field
from math import comb, isfinite

import numpy as np

from . import kernels

MAX_SITES = 14


@dataclass(frozen=True)
class SpinSystem:
    n_sites: int
    edges: tuple  # ((i, j, J), ...) with i < j

    def __post_init__(self):
        n = int(self.n_sites)
        if n < 2:
            raise ValueError("need at least two sites")
        if n > MAX_SITES:
            raise OverflowError(f"{n} sites exceeds the dense limit of {MAX_SITES}")
        canon = []
        seen = set()
        for i, j, J in self.edges:
            i, j, J = int(i), int(j), float(J)
            if i == j:
                raise ValueError(f"self-edge on site {i}")
            i, j = min(i, j), max(i, j)
            if i < 1 or j > n:
                raise ValueError(f"edge ({i}, {j}) outside 1..{n}")
            if (i, j) in seen:
                raise ValueError(f"duplicate edge ({i}, {j})")
            if not isfinite(J):
                raise ValueError(f"non-finite coupling on ({i}, {j})")
            seen.add((i, j))
            canon.append((i, j, J))
        object.__setattr__(self, "n_sites", n)
        object.__setattr__(self, "edges", tuple(canon))

    @property
    def energy_scale(self):
        return max((abs(J) for _, _, J in self.edges), default=1.0) or 1.0

    def shift_edges(self):
        n = self.n_sites
        return np.array([(n - i, n - j, J) for i, j, J in self.edges], dtype=float).reshape(-1, 3)


@dataclass(frozen=True)
class Lattice:
    """Coupling template: bonds carry coupling *names*, values come later.

    ``symmetry`` holds point-group generators as 1-based site images and
    ``boundary`` is the cyclic site order used to sign dimer coverings.
    """

    n_sites: int
    bonds: tuple  # ((i, j, name), ...)
    symmetry: tuple = ()
    boundary: tuple = None
    name: str = ""

    def system(self, **couplings):
        missing = {b[2] for b in self.bonds} - couplings.keys()
        if missing:
            raise KeyError(f"missing couplings: {sorted(missing)}")
        return SpinSystem(self.n_sites, tuple((i, j, couplings[c]) for i, j, c in self.bonds))

    def at_ratio(self, ratio, numerator="J2", denominator="J1"):
        couplings = {c: 1.0 for c in {b[2] for b in self.bonds}}
        couplings[denominator] = 1.0
        couplings[numerator] = float(ratio)
        return self.system(**couplings)


def ladder_boundary(n):
    """Two-leg ladder numbered row by row: top row forwards, bottom row back."""
    half = n // 2
    return tuple(range(1, half + 1)) + tuple(range(n, half, -1))


# J1 horizontal, J2 vertical, J3 diagonal; sites 1 2 / 3 4.
SQUARE4 = Lattice(
    4,
    ((1, 2, "J1"), (3, 4, "J1"), (1, 3, "J2"), (2, 4, "J2"), (1, 4, "J3"), (2, 3, "J3")),
    symmetry=((2, 1, 4, 3), (3, 4, 1, 2)),
    boundary=(1, 2, 4, 3),
    name="square4",
)

# 1 - 2 - 3
# | X |   |     crossed (J2) plaquette on the left, plain plaquette on the right
# 4 - 5 - 6
CHECKERBOARD6 = Lattice(
    6,
    (
        (1, 2, "J1"), (2, 3, "J1"), (4, 5, "J1"), (5, 6, "J1"),
        (1, 4, "J1"), (2, 5, "J1"), (3, 6, "J1"),
        (1, 5, "J2"), (2, 4, "J2"),
    ),
    symmetry=((4, 5, 6, 1, 2, 3),),
    boundary=(1, 2, 3, 6, 5, 4),
    name="checkerboard6",
)


def square4(J1=1.0, J2=0.0, J3=0.0):
    return SQUARE4.system(J1=J1, J2=J2, J3=J3)


def checkerboard6(J1=1.0, J2=1.0):
    return CHECKERBOARD6.system(J1=J1, J2=J2)


def build_hamiltonian(system):
    return kernels.heisenberg_dense(system.n_sites, system.shift_edges())


def apply_hamiltonian(system, state):
    return kernels.heisenberg_apply(system.n_sites, system.shift_edges(), state)


def _check_hermitian(H, tol=1e-12):
    H = np.asarray(H)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise ValueError("Hamiltonian must be square")
    scale = max(1.0, float(np.max(np.abs(H))) if H.size else 1.0)
    if np.max(np.abs(H - H.conj().T)) > tol * scale:
        raise ValueError("Hamiltonian is not Hermitian")
    return H


def ground_space(H, degeneracy_tol=1e-9):
    """Lowest eigenvalue and an orthonormal basis (columns) of its eigenspace."""
    H = _check_hermitian(H)
    w, v = np.linalg.eigh(H)
    mask = w <= w[0] + degeneracy_tol
    return float(w[0]), v[:, mask]


def system_ground_space(system, degeneracy_tol=1e-9):
    return ground_space(build_hamiltonian(system), degeneracy_tol * system.energy_scale)


@dataclass(frozen=True)
class SpectrumSlice:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # columns, in the sector basis
    sector: float = None
    basis: np.ndarray = field(default=None, repr=False)  # sector states (full-space indices)
    n_sites: int = None

    def full_vectors(self):
        """Eigenvectors embedded back into the full 2**n space."""
        if self.basis is None:
            return self.eigenvectors
        out = np.zeros((1 << self.n_sites, self.eigenvectors.shape[1]), dtype=self.eigenvectors.dtype)
        out[self.basis] = self.eigenvectors
        return out


def sector_dimension(n, sz):
    n_up = n / 2 + sz
    if abs(n_up - round(n_up)) > 1e-12 or not 0 <= n_up <= n:
        return 0
    return comb(n, int(round(n_up)))


def sz_sector_spectrum(system, sz=0.0, k=None):
    """Lowest ``k`` levels of ``H`` restricted to total ``S_z = sz``."""
    n = system.n_sites
    dim = sector_dimension(n, sz)
    if dim == 0:
        raise ValueError(f"empty S_z = {sz} sector for {n} sites")
    k = dim if k is None else int(k)
    if not 1 <= k <= dim:
        raise ValueError(f"k={k} outside 1..{dim}")
    basis = kernels.sector_basis(n, int(round(n / 2 + sz)))
    Hs = kernels.heisenberg_sector(n, system.shift_edges(), basis)
    w, v = np.linalg.eigh(Hs)
    return SpectrumSlice(w[:k], v[:, :k], float(sz), basis, n)


def total_spin_squared(state, norm_tol=1e-10):
    """``<S_tot^2>`` of a normalised state vector."""
    state = np.asarray(state, dtype=complex).ravel()
    n = state.size.bit_length() - 1
    if state.size != 1 << n:
        raise ValueError("state length is not a power of two")
    if abs(np.vdot(state, state).real - 1.0) > norm_tol:
        raise ValueError("state is not normalised")
    # S_tot^2 = 3n/4 + 2 sum_{i<j} S_i.S_j
    edges = [(n - i, n - j, 2.0) for i in range(1, n + 1) for j in range(i + 1, n + 1)]
    applied = kernels.heisenberg_apply(n, edges, state) if edges else np.zeros_like(state)
    return float(np.vdot(state, applied).real + 0.75 * n)


def total_spin_operator(n):
    edges = [(n - i, n - j, 2.0) for i in range(1, n + 1) for j in range(i + 1, n + 1)]
    return kernels.heisenberg_dense(n, edges) + 0.75 * n * np.eye(1 << n)


def total_sz_operator(n):
    states = np.arange(1 << n)
    up = sum(1 - ((states >> k) & 1) for k in range(n))
    return np.diag(up - n / 2.0)


@dataclass(frozen=True)
class GapScan:
    ratio: float  # refined location of the minimum gap
    gap: float
    grid: np.ndarray
    gaps: np.ndarray
    flat: bool  # gap constant over the grid
    degenerate: bool  # ground level degenerate at every grid point


def minimum_gap_scan(template, grid, sz=0.0, tol=1e-9):
    """Scan ``E1 - E0`` in an ``S_z`` sector.

    ``template`` maps a ratio to a :class:`SpinSystem`. The grid minimum is
    refined by a parabola through its two neighbours.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.size < 3:
        raise ValueError("need at least three grid points")
    gaps = np.empty(grid.size)
    for k, r in enumerate(grid):
        w = sz_sector_spectrum(template(r), sz, 2).eigenvalues
        gaps[k] = w[1] - w[0]
    degenerate = bool(np.all(gaps < tol))
    flat = bool(np.ptp(gaps) < tol)
    k = int(np.argmin(gaps))
    ratio, gap = float(grid[k]), float(gaps[k])
    if 0 < k < grid.size - 1 and not flat:
        x0, x1, x2 = grid[k - 1 : k + 2]
        y0, y1, y2 = gaps[k - 1 : k + 2]
        denom = (x0 - x1) * (x0 - x2) * (x1 - x2)
        a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / denom
        b = (x2**2 * (y0 - y1) + x1**2 * (y2 - y0) + x0**2 * (y1 - y2)) / denom
        if a > 0:
            xv = -b / (2 * a)
            if x0 <= xv <= x2:
                c = y1 - a * x1**2 - b * x1
                ratio, gap = float(xv), float(max(a * xv**2 + b * xv + c, 0.0))
    return GapScan(ratio, gap, grid, gaps, flat, degenerate)


def lattice_from_config(entries):
    """Build a :class:`Lattice` (and optional ratio) from parsed config entries.

    Recognised keys: ``sites``, repeated ``bond = i j NAME``, ``symmetry``,
    ``boundary`` and ``ratio J2/J1``. ``entries`` is a list of
    ``(lineno, key, value)``.
    """
    n, bonds, sym, boundary, ratio = None, [], [], None, None
    for lineno, key, value in entries:
        parts = value.split()
        try:
            if key == "sites":
                n = int(value)
            elif key == "bond":
                if len(parts) != 3:
                    raise ValueError("expected 'bond = i j NAME'")
                bonds.append((int(parts[0]), int(parts[1]), parts[2]))
            elif key == "symmetry":
                sym.append(tuple(int(p) for p in parts))
            elif key == "boundary":
                boundary = tuple(int(p) for p in parts)
            elif key.startswith("ratio"):
                ratio = (key.split(None, 1)[1] if " " in key else "J2/J1", float(value))
            else:
                raise KeyError(f"unknown lattice key {key!r}")
        except (ValueError, KeyError) as exc:
            raise ValueError(f"line {lineno}: {exc}") from exc
    if n is None:
        raise ValueError("lattice file lacks 'sites'")
    if not bonds:
        raise ValueError("lattice file has no bonds")
    lattice = Lattice(n, tuple(bonds), tuple(sym), boundary, name="custom")
    return lattice, ratio
