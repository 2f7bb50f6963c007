"""Hot inner kernels with numba acceleration and a pure-numpy fallback.

Set NLWAVES_NO_NUMBA=1 to force the numpy path (used by the benchmark and
as an escape hatch on platforms where numba is unavailable).
"""

import os

import numpy as np

USE_NUMBA = os.environ.get("NLWAVES_NO_NUMBA", "0") not in ("1", "true", "yes")

if USE_NUMBA:
    try:
        from numba import njit
    except ImportError:  # pragma: no cover
        USE_NUMBA = False


def _convolve_direct_numpy(T, a, dk):
    """Quadratic convolution da[m, j] = dk * sum T[j, j1, m, m1, m2] a[m1, j1] a[m2, j2].

    T is indexed (jout, j1, m, m1, m2) on the full signed grid of size Kf;
    j2 = jout - j1 + J is implied and entries with j2 off-grid are zero.
    """
    Kf = T.shape[0]
    M = T.shape[2]
    J = (Kf - 1) // 2
    da = np.zeros((M, Kf), dtype=complex)
    for jout in range(Kf):
        for j1 in range(Kf):
            j2 = jout - j1 + J
            if j2 < 0 or j2 >= Kf:
                continue
            # T[jout, j1] has shape (M, M, M); contract over (m1, m2)
            da[:, jout] += np.einsum("mab,a,b->m", T[jout, j1], a[:, j1], a[:, j2])
    da *= dk
    return da


if USE_NUMBA:

    @njit(cache=True)
    def _convolve_direct_numba(T, a, dk):
        Kf = T.shape[0]
        M = T.shape[2]
        J = (Kf - 1) // 2
        da = np.zeros((M, Kf), dtype=np.complex128)
        for jout in range(Kf):
            for j1 in range(Kf):
                j2 = jout - j1 + J
                if j2 < 0 or j2 >= Kf:
                    continue
                for m in range(M):
                    acc = 0.0 + 0.0j
                    for m1 in range(M):
                        a1 = a[m1, j1]
                        for m2 in range(M):
                            acc += T[jout, j1, m, m1, m2] * a1 * a[m2, j2]
                    da[m, jout] += acc
        for m in range(M):
            for jout in range(Kf):
                da[m, jout] *= dk
        return da


def convolve_direct(T, a, dk):
    """Dispatch the direct-convolution contraction to numba or numpy."""
    a = np.ascontiguousarray(a, dtype=np.complex128)
    T = np.ascontiguousarray(T, dtype=np.complex128)
    if USE_NUMBA:
        return _convolve_direct_numba(T, a, float(dk))
    return _convolve_direct_numpy(T, a, float(dk))
