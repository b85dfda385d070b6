"""Hot loops over the 2**n spin basis.

Every kernel exists twice: an ``@njit`` loop version and a vectorised numpy
version. Both take bond endpoints as *bit shifts* (site ``i`` of ``n`` lives at
shift ``n - i``, so site 1 is the most significant bit) and a spin-up / ``H``
state is bit 0.
"""

import numpy as np

from ._accel import HAVE_NUMBA, njit, requested_backend

_BACKEND = requested_backend()


def get_backend():
    return _BACKEND


def set_backend(name):
    """Switch kernels at runtime; returns the previous backend name."""
    global _BACKEND
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba is not installed")
    previous, _BACKEND = _BACKEND, name
    return previous


# ---------------------------------------------------------------- numba loops


@njit(cache=True)
def _dense_fill_nb(shift_i, shift_j, coupling, out):
    for s in range(out.shape[0]):
        for e in range(shift_i.shape[0]):
            bi = (s >> shift_i[e]) & 1
            bj = (s >> shift_j[e]) & 1
            J = coupling[e]
            if bi == bj:
                out[s, s] += 0.25 * J
            else:
                out[s, s] -= 0.25 * J
                t = s ^ ((1 << shift_i[e]) | (1 << shift_j[e]))
                # H is real symmetric: fill row s to stay cache friendly
                out[s, t] += 0.5 * J


def _dense_nb(n, shift_i, shift_j, coupling):
    # numpy's zeros maps pages lazily; numba's would memset the whole block up front
    out = np.zeros((1 << n, 1 << n))
    _dense_fill_nb(shift_i, shift_j, coupling, out)
    return out


@njit(cache=True)
def _sector_nb(n, shift_i, shift_j, coupling, basis):
    d = basis.shape[0]
    lookup = np.full(1 << n, -1, dtype=np.int64)
    for k in range(d):
        lookup[basis[k]] = k
    out = np.zeros((d, d))
    for k in range(d):
        s = basis[k]
        for e in range(shift_i.shape[0]):
            bi = (s >> shift_i[e]) & 1
            bj = (s >> shift_j[e]) & 1
            J = coupling[e]
            if bi == bj:
                out[k, k] += 0.25 * J
            else:
                out[k, k] -= 0.25 * J
                t = s ^ ((1 << shift_i[e]) | (1 << shift_j[e]))
                out[k, lookup[t]] += 0.5 * J
    return out


@njit(cache=True)
def _apply_nb(n, shift_i, shift_j, coupling, vec):
    dim = 1 << n
    out = np.zeros(dim, dtype=np.complex128)
    for s in range(dim):
        v = vec[s]
        if v == 0:
            continue
        for e in range(shift_i.shape[0]):
            bi = (s >> shift_i[e]) & 1
            bj = (s >> shift_j[e]) & 1
            J = coupling[e]
            if bi == bj:
                out[s] += 0.25 * J * v
            else:
                out[s] -= 0.25 * J * v
                t = s ^ ((1 << shift_i[e]) | (1 << shift_j[e]))
                out[t] += 0.5 * J * v
    return out


@njit(cache=True)
def _singlets_nb(n, shift_a, shift_b, sign):
    m = shift_a.shape[0]
    out = np.zeros(1 << n)
    amp = sign / np.sqrt(2.0) ** m
    for pattern in range(1 << m):
        s = 0
        parity = 1.0
        for k in range(m):
            if (pattern >> k) & 1:
                s |= 1 << shift_a[k]
                parity = -parity
            else:
                s |= 1 << shift_b[k]
        out[s] += parity * amp
    return out


# ----------------------------------------------------------- numpy fallbacks


def _dense_np(n, shift_i, shift_j, coupling):
    dim = 1 << n
    states = np.arange(dim, dtype=np.int64)
    out = np.zeros((dim, dim))
    diag = np.zeros(dim)
    for si, sj, J in zip(shift_i, shift_j, coupling):
        differ = ((states >> si) ^ (states >> sj)) & 1
        diag += 0.25 * J * (1 - 2 * differ)
        src = states[differ == 1]
        out[src ^ ((1 << si) | (1 << sj)), src] += 0.5 * J
    out[states, states] += diag
    return out


def _sector_np(n, shift_i, shift_j, coupling, basis):
    d = basis.shape[0]
    lookup = np.full(1 << n, -1, dtype=np.int64)
    lookup[basis] = np.arange(d)
    cols = np.arange(d)
    out = np.zeros((d, d))
    diag = np.zeros(d)
    for si, sj, J in zip(shift_i, shift_j, coupling):
        differ = ((basis >> si) ^ (basis >> sj)) & 1
        diag += 0.25 * J * (1 - 2 * differ)
        mask = differ == 1
        targets = lookup[basis[mask] ^ ((1 << si) | (1 << sj))]
        out[targets, cols[mask]] += 0.5 * J
    out[cols, cols] += diag
    return out


def _apply_np(n, shift_i, shift_j, coupling, vec):
    states = np.arange(1 << n, dtype=np.int64)
    out = np.zeros(1 << n, dtype=np.complex128)
    for si, sj, J in zip(shift_i, shift_j, coupling):
        differ = ((states >> si) ^ (states >> sj)) & 1
        out += 0.25 * J * (1 - 2 * differ) * vec
        src = states[differ == 1]
        out[src ^ ((1 << si) | (1 << sj))] += 0.5 * J * vec[src]
    return out


def _singlets_np(n, shift_a, shift_b, sign):
    m = shift_a.shape[0]
    patterns = np.arange(1 << m, dtype=np.int64)
    bits = (patterns[:, None] >> np.arange(m)) & 1
    index = (bits << shift_a).sum(axis=1) + ((1 - bits) << shift_b).sum(axis=1)
    out = np.zeros(1 << n)
    out[index] = sign * (-1.0) ** bits.sum(axis=1) / np.sqrt(2.0) ** m
    return out


# ---------------------------------------------------------------- dispatch


def _edges(edges):
    edges = np.asarray(edges, dtype=np.float64).reshape(-1, 3)
    return (
        edges[:, 0].astype(np.int64),
        edges[:, 1].astype(np.int64),
        np.ascontiguousarray(edges[:, 2]),
    )


def heisenberg_dense(n, edges):
    """Dense ``sum J S_i.S_j``; ``edges`` rows are ``(shift_i, shift_j, J)``."""
    si, sj, J = _edges(edges)
    fn = _dense_nb if _BACKEND == "numba" else _dense_np
    return fn(n, si, sj, J)


def heisenberg_sector(n, edges, basis):
    si, sj, J = _edges(edges)
    basis = np.ascontiguousarray(basis, dtype=np.int64)
    fn = _sector_nb if _BACKEND == "numba" else _sector_np
    return fn(n, si, sj, J, basis)


def heisenberg_apply(n, edges, vec):
    si, sj, J = _edges(edges)
    vec = np.ascontiguousarray(vec, dtype=np.complex128)
    fn = _apply_nb if _BACKEND == "numba" else _apply_np
    return fn(n, si, sj, J, vec)


def singlet_product(n, shift_a, shift_b, sign=1.0):
    """Product of ``(|01> - |10>)/sqrt(2)`` over (a, b) bit pairs, times ``sign``."""
    shift_a = np.ascontiguousarray(shift_a, dtype=np.int64)
    shift_b = np.ascontiguousarray(shift_b, dtype=np.int64)
    fn = _singlets_nb if _BACKEND == "numba" else _singlets_np
    return fn(n, shift_a, shift_b, float(sign))


def sector_basis(n, n_up):
    """Sorted basis states with exactly ``n_up`` zero bits (spin-up sites)."""
    states = np.arange(1 << n, dtype=np.int64)
    ones = np.zeros_like(states)
    for k in range(n):
        ones += (states >> k) & 1
    return states[ones == n - n_up]
