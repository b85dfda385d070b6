import numpy as np
import pytest

from photospin import _accel, kernels
from photospin.spin import CHECKERBOARD6, SQUARE4

import oracles


def _shift_edges(system):
    return system.shift_edges()


@pytest.mark.parametrize("system", [SQUARE4.system(J1=1, J2=0.3, J3=0.7), CHECKERBOARD6.at_ratio(1.4)])
def test_dense_matches_kronecker_oracle(backend, system):
    H = kernels.heisenberg_dense(system.n_sites, system.shift_edges())
    assert np.allclose(H, oracles.heisenberg(system.n_sites, system.edges), atol=1e-14)


def test_backends_agree_on_every_kernel(rng):
    system = CHECKERBOARD6.at_ratio(0.8)
    n, edges = system.n_sites, system.shift_edges()
    basis = kernels.sector_basis(n, 3)
    vec = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    results = {}
    for name in ("numba", "numpy"):
        previous = kernels.set_backend(name)
        try:
            results[name] = (
                kernels.heisenberg_dense(n, edges),
                kernels.heisenberg_sector(n, edges, basis),
                kernels.heisenberg_apply(n, edges, vec),
                kernels.singlet_product(n, [5, 3, 1], [4, 0, 2], -1.0),
            )
        finally:
            kernels.set_backend(previous)
    for a, b in zip(results["numba"], results["numpy"]):
        assert np.allclose(a, b, atol=1e-13)


def test_apply_equals_dense_product(backend, rng):
    system = CHECKERBOARD6.at_ratio(2.0)
    vec = rng.normal(size=64) + 1j * rng.normal(size=64)
    H = kernels.heisenberg_dense(6, system.shift_edges())
    assert np.allclose(kernels.heisenberg_apply(6, system.shift_edges(), vec), H @ vec)


def test_sector_block_is_submatrix(backend):
    system = CHECKERBOARD6.at_ratio(1.0)
    basis = kernels.sector_basis(6, 3)
    assert basis.size == 20
    H = kernels.heisenberg_dense(6, system.shift_edges())
    assert np.allclose(kernels.heisenberg_sector(6, system.shift_edges(), basis), H[np.ix_(basis, basis)])


def test_singlet_product_is_normalised(backend):
    v = kernels.singlet_product(4, [3, 1], [2, 0])
    assert np.isclose(np.linalg.norm(v), 1.0)
    singlet = np.array([0, 1, -1, 0]) / np.sqrt(2)
    assert np.allclose(v, np.kron(singlet, singlet))


def test_set_backend_rejects_unknown():
    with pytest.raises(ValueError):
        kernels.set_backend("fortran")


def test_env_flag_parsing(monkeypatch):
    monkeypatch.setenv(_accel.BACKEND_ENV, "numpy")
    assert _accel.requested_backend() == "numpy"
    monkeypatch.setenv(_accel.BACKEND_ENV, "NUMBA")
    assert _accel.requested_backend() == ("numba" if _accel.HAVE_NUMBA else "numpy")
    monkeypatch.setenv(_accel.BACKEND_ENV, "gpu")
    with pytest.raises(ValueError):
        _accel.requested_backend()
