import os

import numpy as np
import pytest

# Reuse eigenbases across pytest invocations.
os.environ.setdefault("NLWAVES_CACHE", os.path.expanduser("~/.cache/nlwaves"))

from nlwaves.basis import load_or_build  # noqa: E402


@pytest.fixture(scope="session")
def small_basis():
    """Tiny validation basis: K = 13 signed wavenumbers, 3 modes each."""
    return load_or_build(h=0.5, Re=88.1, dk=0.5, k_max=3.0, M=3, n_r=24)


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)


def random_hermitian_state(rng, M, J, scale=1e-3):
    a = rng.standard_normal((M, 2 * J + 1)) + 1j * rng.standard_normal((M, 2 * J + 1))
    a *= scale
    return 0.5 * (a + np.conj(a[:, ::-1]))
