"""Partial traces, Wootters concurrence, CKW monogamy and sudden death/birth.

Qubits are numbered from 1 (leftmost tensor factor). ``H``/spin-up is basis
state 0.
"""

from dataclasses import dataclass

import numpy as np

SIGMA_Y = np.array([[0, -1j], [1j, 0]])
SPIN_FLIP = np.kron(SIGMA_Y, SIGMA_Y)
DUST = 1e-10


def n_qubits(dim):
    n = int(dim).bit_length() - 1
    if 1 << n != dim:
        raise ValueError(f"dimension {dim} is not a power of two")
    return n


def as_density_matrix(x, tol=1e-10):
    """Density matrix from a state vector or matrix, with validity checks."""
    x = np.asarray(x, dtype=complex)
    if x.ndim == 1:
        norm = np.vdot(x, x).real
        if abs(norm - 1) > tol:
            raise ValueError("state vector is not normalised")
        return np.outer(x, x.conj())
    if x.ndim != 2 or x.shape[0] != x.shape[1]:
        raise ValueError("density matrix must be square")
    n_qubits(x.shape[0])
    if np.max(np.abs(x - x.conj().T)) > 1e-12 * max(1.0, np.max(np.abs(x))) + 1e-14:
        raise ValueError("density matrix is not Hermitian")
    if abs(np.trace(x).real - 1) > tol:
        raise ValueError("density matrix does not have unit trace")
    if np.linalg.eigvalsh(x).min() < -tol:
        raise ValueError("density matrix is not positive semidefinite")
    return x


def partial_trace(x, keep):
    """Reduced density matrix on the 1-based qubits in ``keep`` (ascending order)."""
    x = np.asarray(x, dtype=complex)
    n = n_qubits(x.shape[0])
    keep = sorted(set(int(k) for k in keep))
    if not keep or keep[0] < 1 or keep[-1] > n:
        raise ValueError(f"keep must be a nonempty subset of 1..{n}")
    drop = [q - 1 for q in range(1, n + 1) if q not in keep]
    d = 1 << len(keep)
    if x.ndim == 1:
        t = x.reshape((2,) * n)
        return np.tensordot(t, t.conj(), axes=(drop, drop)).reshape(d, d)
    t = x.reshape((2,) * (2 * n))
    # trace one dropped axis at a time, highest first so lower indices stay valid
    m = n
    for q in sorted(drop, reverse=True):
        t = np.trace(t, axis1=q, axis2=q + m)
        m -= 1
    return t.reshape(d, d)


def _sqrt_psd(rho):
    w, v = np.linalg.eigh(rho)
    if w.min() < -DUST:
        raise ValueError(f"density matrix has eigenvalue {w.min():.3e} below -{DUST}")
    return (v * np.sqrt(np.clip(w, 0, None))) @ v.conj().T


def concurrence_terms(rho):
    """Square roots of the eigenvalues of ``rho Sigma rho^T Sigma``, non-increasing.

    Computed as singular values of ``sqrt(rho) sqrt(rho~)`` with
    ``sqrt(rho~) = Sigma sqrt(rho)^* Sigma``, which avoids square roots of
    eigenvalue dust.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise ValueError("concurrence needs a two-qubit density matrix")
    root = _sqrt_psd(rho)
    root_tilde = SPIN_FLIP @ root.conj() @ SPIN_FLIP
    return np.linalg.svd(root @ root_tilde, compute_uv=False)


def signed_concurrence(rho):
    """``sqrt(l1) - sqrt(l2) - sqrt(l3) - sqrt(l4)`` before clipping at zero."""
    s = concurrence_terms(rho)
    return float(s[0] - s[1] - s[2] - s[3])


def concurrence(rho):
    return max(0.0, signed_concurrence(rho))


def tangle_one_vs_rest(state, focus):
    """``4 det(rho_focus)`` for a pure state."""
    r = partial_trace(state, [focus])
    return float(4 * np.linalg.det(r).real)


def _require_pure(x, tol=1e-10):
    x = np.asarray(x, dtype=complex)
    if x.ndim == 2:
        if abs(np.trace(x @ x).real - 1) > tol:
            raise ValueError("monogamy check needs a pure state")
        w, v = np.linalg.eigh(x)
        x = v[:, -1]
    if abs(np.vdot(x, x).real - 1) > tol:
        raise ValueError("state is not normalised")
    return x


@dataclass(frozen=True)
class MonogamyResult:
    sum_sq: float
    tau: float
    satisfied: bool


def monogamy_check(state, focus=1, tol=1e-9):
    """CKW inequality ``sum_j C(focus, j)^2 <= 4 det(rho_focus)`` for a pure state."""
    state = _require_pure(state)
    n = n_qubits(state.size)
    total = sum(
        concurrence(partial_trace(state, [focus, j])) ** 2 for j in range(1, n + 1) if j != focus
    )
    tau = tangle_one_vs_rest(state, focus)
    return MonogamyResult(float(total), tau, bool(total <= tau + tol))


@dataclass(frozen=True)
class ConcurrenceProfile:
    theta: np.ndarray
    pairs: tuple
    values: dict  # pair -> clipped concurrence array
    signed: dict  # pair -> pre-max quantity
    states: list = None


def pairwise_profile(family, theta_grid, pairs=((1, 2), (1, 3), (1, 4)), keep_states=False):
    """Concurrence of each pair along ``theta -> state``."""
    theta = np.asarray(theta_grid, dtype=float)
    signed = {p: np.empty(theta.size) for p in pairs}
    states = []
    for k, t in enumerate(theta):
        psi = np.asarray(family(t))
        rho = as_density_matrix(psi)
        for p in pairs:
            signed[p][k] = signed_concurrence(partial_trace(rho, p))
        if keep_states:
            states.append(psi)
    values = {p: np.clip(v, 0, None) for p, v in signed.items()}
    return ConcurrenceProfile(theta, tuple(pairs), values, signed, states if keep_states else None)


@dataclass(frozen=True)
class Crossing:
    direction: str  # "birth", "death" or "plateau"
    theta: float = None
    interval: tuple = None


def zero_crossings(theta, values, tol=1e-12):
    """Locate where a concurrence curve leaves or reaches zero.

    ``values`` may be the signed pre-max quantity (crosses zero transversally) or
    a clipped curve. Crossings are refined linearly between bracketing points;
    runs of two or more points pinned at zero are reported as plateaus.
    """
    theta = np.asarray(theta, dtype=float)
    values = np.asarray(values, dtype=float)
    if theta.shape != values.shape or theta.size < 2:
        raise ValueError("theta and values must be equal-length arrays")
    positive = values > tol
    zero = np.abs(values) <= tol
    events = []
    k = 0
    while k < theta.size:
        if zero[k]:
            start = k
            while k + 1 < theta.size and zero[k + 1]:
                k += 1
            if k > start:
                events.append(Crossing("plateau", interval=(float(theta[start]), float(theta[k]))))
        k += 1
    for k in range(theta.size - 1):
        if positive[k] == positive[k + 1]:
            continue
        v0, v1 = values[k], values[k + 1]
        x = theta[k] + (theta[k + 1] - theta[k]) * (-v0) / (v1 - v0)
        events.append(Crossing("birth" if positive[k + 1] else "death", theta=float(x)))
    events.sort(key=lambda e: e.theta if e.theta is not None else e.interval[0])
    return events


def fidelity_pure(rho, psi):
    psi = np.asarray(psi, dtype=complex)
    return float(np.vdot(psi, np.asarray(rho) @ psi).real)


def trace_distance(a, b):
    return float(0.5 * np.abs(np.linalg.eigvalsh(np.asarray(a) - np.asarray(b))).sum())
