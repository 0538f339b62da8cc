import numpy as np
import pytest

from mengerlab import kernels
from mengerlab.kernels import python_backend


def _fields(rng, nb=7, n=3, M=11):
    mk = lambda: np.ascontiguousarray(rng.normal(size=(nb, n, M)))
    a, b = rng.random(nb) * 0.3 + 0.01, rng.random(nb) * 0.3 + 0.01
    P1 = np.ascontiguousarray(rng.normal(size=(n, M)))
    return mk(), mk(), P1, mk(), mk(), np.sqrt(np.einsum("im,im->m", P1, P1)), a, b


def test_backend_is_reported():
    assert kernels.BACKEND in ("cython", "python")


@pytest.mark.skipif(kernels.BACKEND != "cython", reason="compiled extension not built")
@pytest.mark.parametrize("pq", [(2.5, 2.0), (2.4, 2.4), (2.6, 3.0)])
def test_compiled_matches_numpy(pq):
    p, q = pq
    A, B, P1, P2, P3, sp1, a, b = _fields(np.random.default_rng(0))
    ref = python_backend.menger_density(A, B, P2, P3, sp1, a, b, p, q)
    np.testing.assert_allclose(kernels.menger_density(A, B, P2, P3, sp1, a, b, p, q), ref, rtol=1e-12)
    got = kernels.menger_density_grad(A, B, P1, P2, P3, sp1, a, b, p, q)
    exp = python_backend.menger_density_grad(A, B, P1, P2, P3, sp1, a, b, p, q)
    for g, e in zip(got, exp):
        np.testing.assert_allclose(g, e, rtol=1e-11, atol=1e-12 * np.abs(e).max())


def test_density_gradient_by_finite_differences():
    p, q = 2.5, 2.0
    A, B, P1, P2, P3, sp1, a, b = _fields(np.random.default_rng(1), nb=2, M=3)
    S, gA, *_ = python_backend.menger_density_grad(A, B, P1, P2, P3, sp1, a, b, p, q)
    h = 1e-6
    Ap = A.copy()
    Ap[0, 1, 2] += h
    Am = A.copy()
    Am[0, 1, 2] -= h
    fd = (python_backend.menger_density(Ap, B, P2, P3, sp1, a, b, p, q) - python_backend.menger_density(Am, B, P2, P3, sp1, a, b, p, q)) / (2 * h)
    assert gA[0, 1, 2] == pytest.approx(fd[0, 2], rel=1e-6)
