import numpy as np
import pytest

from nlwaves import kernels


@pytest.fixture(scope="module")
def problem():
    rng = np.random.default_rng(5)
    J, M = 4, 2
    Kf = 2 * J + 1
    T = rng.standard_normal((Kf, Kf, M, M, M)) + 1j * rng.standard_normal((Kf, Kf, M, M, M))
    a = rng.standard_normal((M, Kf)) + 1j * rng.standard_normal((M, Kf))
    return T, a


def test_numpy_and_numba_paths_agree(problem):
    T, a = problem
    ref = kernels._convolve_direct_numpy(T, a, 0.25)
    assert np.allclose(kernels.convolve_direct(T, a, 0.25), ref, rtol=1e-13)
    if kernels.USE_NUMBA:
        out = kernels._convolve_direct_numba(T, a, 0.25)
        assert np.allclose(out, ref, rtol=1e-13)


def test_convolution_respects_truncation(problem):
    # a state supported only at the highest wavenumber can only feed smaller |k|
    T, a = problem
    J = 4
    a2 = np.zeros_like(a)
    a2[:, -1] = 1.0  # k = +J only
    out = kernels._convolve_direct_numpy(T, a2, 0.25)
    # the only active pair is j1 = j2 = J whose product at 2J falls off the grid
    assert np.abs(out).max() == 0.0
