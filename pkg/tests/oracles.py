"""Independent brute-force references used by the tests.

Nothing here imports the package under test. Spin operators come from explicit
Kronecker products, optics from permanents and concurrence from the textbook
eigenvalue formula.
"""

from itertools import combinations, permutations

import numpy as np

SX = np.array([[0, 1], [1, 0]], dtype=complex) / 2
SY = np.array([[0, -1j], [1j, 0]], dtype=complex) / 2
SZ = np.array([[1, 0], [0, -1]], dtype=complex) / 2


def site_op(op, site, n):
    """``op`` on 1-based ``site`` of ``n``, site 1 leftmost."""
    out = np.ones((1, 1), dtype=complex)
    for k in range(1, n + 1):
        out = np.kron(out, op if k == site else np.eye(2))
    return out


def heisenberg(n, edges):
    H = np.zeros((1 << n, 1 << n), dtype=complex)
    for i, j, J in edges:
        for op in (SX, SY, SZ):
            H += J * site_op(op, i, n) @ site_op(op, j, n)
    return H


def total_spin_squared_op(n):
    S = [sum(site_op(op, k, n) for k in range(1, n + 1)) for op in (SX, SY, SZ)]
    return sum(s @ s for s in S)


def sz_zero_mask(n):
    ups = np.array([n - bin(s).count("1") for s in range(1 << n)])
    return ups == n // 2


def chords_cross(order, pairs):
    pos = {s: k for k, s in enumerate(order)}
    count = 0
    for (a, b), (c, d) in combinations(pairs, 2):
        x = sorted((pos[a], pos[b]))
        y = sorted((pos[c], pos[d]))
        inside = [x[0] < p < x[1] for p in y]
        count += inside[0] != inside[1]
    return count


def singlet_cover(n, pairs, order):
    """Signed singlet product, built by permuting a plain tensor product of singlets."""
    singlet = np.array([0, 1, -1, 0], dtype=complex) / np.sqrt(2)
    vec = np.ones(1, dtype=complex)
    for _ in pairs:
        vec = np.kron(vec, singlet)
    # tensor slot 2k, 2k+1 holds pair k; move slots to the actual sites
    slots = [s for p in pairs for s in p]
    t = vec.reshape((2,) * n)
    axes = [slots.index(site) for site in range(1, n + 1)]
    out = np.transpose(t, axes).reshape(-1)
    return out * (-1) ** chords_cross(order, pairs)


def permanent(m):
    n = m.shape[0]
    return sum(np.prod([m[i, p[i]] for i in range(n)]) for p in permutations(range(n)))


def two_port_output(U, inputs, outputs):
    """Amplitude for single photons in input ports -> single photons in output ports."""
    return permanent(U[np.ix_(inputs, outputs)])


def coupler(eta):
    t, r = np.sqrt(1 - eta), np.sqrt(eta)
    return np.array([[t, 1j * r], [1j * r, t]])


def hom_coincidence(eta, overlap):
    """Coincidence probability of two same-polarisation photons with mode overlap ``overlap``."""
    U = coupler(eta)
    same = abs(two_port_output(U, [0, 1], [0, 1])) ** 2
    # distinguishable part: classical sum of both paths
    distinct = abs(U[0, 0] * U[1, 1]) ** 2 + abs(U[0, 1] * U[1, 0]) ** 2
    return overlap**2 * same + (1 - overlap**2) * distinct


def swap_qubits(n, a, b):
    dim = 1 << n
    P = np.zeros((dim, dim))
    for s in range(dim):
        bits = [(s >> (n - k)) & 1 for k in range(1, n + 1)]
        bits[a - 1], bits[b - 1] = bits[b - 1], bits[a - 1]
        P[int("".join(map(str, bits)), 2), s] = 1
    return P


def two_singlet_postselected(eta):
    """Fourfold-coincidence state when photons 1 and 3 meet on the coupler.

    Both photons leave in their own port either by two transmissions or two
    reflections, which exchanges their polarisations: ``t^2 I + (i r)^2 SWAP``.
    """
    singlet = np.array([0, 1, -1, 0]) / np.sqrt(2)
    psi = np.kron(singlet, singlet).astype(complex)
    out = (1 - eta) * psi - eta * swap_qubits(4, 1, 3) @ psi
    return out / np.linalg.norm(out)


def wootters(rho):
    yy = np.kron([[0, -1j], [1j, 0]], [[0, -1j], [1j, 0]])
    lam = np.linalg.eigvals(rho @ yy @ rho.T @ yy)
    s = np.sort(np.sqrt(np.clip(lam.real, 0, None)))[::-1]
    return max(0.0, s[0] - s[1] - s[2] - s[3])


def werner_concurrence(p):
    return max(0.0, (3 * p - 1) / 2)


def reduce(psi, keep, n):
    t = np.asarray(psi).reshape((2,) * n)
    drop = [k - 1 for k in range(1, n + 1) if k not in keep]
    return np.tensordot(t, t.conj(), axes=(drop, drop)).reshape(1 << len(keep), 1 << len(keep))


CHECKERBOARD_EDGES = [
    (1, 2, "J1"), (2, 3, "J1"), (4, 5, "J1"), (5, 6, "J1"),
    (1, 4, "J1"), (2, 5, "J1"), (3, 6, "J1"), (1, 5, "J2"), (2, 4, "J2"),
]


def checkerboard_gap(ratio):
    edges = [(i, j, ratio if name == "J2" else 1.0) for i, j, name in CHECKERBOARD_EDGES]
    m = sz_zero_mask(6)
    w = np.linalg.eigvalsh(heisenberg(6, edges)[np.ix_(m, m)])
    return w[1] - w[0]
