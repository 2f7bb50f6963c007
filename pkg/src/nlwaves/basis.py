"""Per-wavenumber eigenmode basis over the truncated axial grid.

Modes are solved for k >= 0 only; negative wavenumbers are the complex
conjugates by construction.  The basis also carries packed arrays (profiles,
radial derivatives, projection rows, propagation rates) used by the
pseudo-spectral right-hand side.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
import hashlib
import os

import numpy as np

from .errors import ConfigurationError
from .linstab import EigenMode, adjoint_modes, assemble_operator, solve_modes
from .meanflow import annulus_geometry, couette_profile
from .radial import radial_grid

CACHE_FORMAT_VERSION = 1


@dataclass
class EigenBasis:
    """Eigenmode sets for k = 0, dk, ..., k_max plus fast-path packed arrays.

    Attributes
    ----------
    kgrid_pos : (J+1,) wavenumbers 0..k_max
    modes : list over k-index of lists of M EigenMode (descending growth rate)
    lam : (M, J+1) complex propagation rates lambda = -i omega
    U, dU : (J+1, 3, n_r, M) mode profiles and radial derivatives
    P : (J+1, M, 3, n_r) projection rows; dA_m(k) = sum P[k,m] * N(k)
    """

    geom: object
    profile: object
    grid: object
    dk: float
    k_max: float
    M: int
    kgrid_pos: np.ndarray
    modes: list
    lam: np.ndarray
    U: np.ndarray
    dU: np.ndarray
    P: np.ndarray

    @property
    def J(self):
        return len(self.kgrid_pos) - 1

    @property
    def kgrid_full(self):
        """Full symmetric grid -k_max .. k_max."""
        return np.concatenate([-self.kgrid_pos[:0:-1], self.kgrid_pos])

    def k_index(self, k):
        """Index of wavenumber k on the full grid; raises if off-grid."""
        j = round(k / self.dk)
        if abs(j * self.dk - k) > 1e-9 * max(1.0, abs(k)) + 1e-12 or abs(j) > self.J:
            raise ConfigurationError(f"wavenumber {k} is not on the truncated grid")
        return j + self.J

    def mode(self, k, m):
        """EigenMode at signed wavenumber k (conjugate-constructed for k < 0)."""
        j = self.k_index(k) - self.J
        if not 1 <= m <= self.M:
            raise ConfigurationError(f"mode index {m} outside 1..{self.M}")
        direct = self.modes[abs(j)][m - 1]
        return direct if j >= 0 else direct.conjugate_pair()

    def lam_full(self):
        """(M, 2J+1) propagation rates on the full grid (conjugate at -k)."""
        return np.concatenate([np.conj(self.lam[:, :0:-1]), self.lam], axis=1)

    def truncate(self, M):
        """Shallow copy keeping only the leading M modes per wavenumber."""
        if not 1 <= M <= self.M:
            raise ConfigurationError(f"cannot truncate to M={M} (basis has {self.M})")
        return EigenBasis(
            geom=self.geom, profile=self.profile, grid=self.grid,
            dk=self.dk, k_max=self.k_max, M=M, kgrid_pos=self.kgrid_pos,
            modes=[ms[:M] for ms in self.modes],
            lam=self.lam[:M], U=self.U[..., :M], dU=self.dU[..., :M], P=self.P[:, :M],
        )


def _solve_one_k(grid, profile, k, M):
    pair = assemble_operator(grid, profile, k)
    modes = solve_modes(pair, grid, k, M)
    return adjoint_modes(pair, modes, grid)


def build_basis(h, Re, dk=0.25, k_max=12.0, M=20, n_r=48, workers=1):
    """Solve the eigenproblem at every non-negative grid wavenumber."""
    J = round(k_max / dk)
    if abs(J * dk - k_max) > 1e-9:
        raise ConfigurationError("k_max must be a multiple of dk")
    geom = annulus_geometry(h)
    profile = couette_profile(geom, Re)
    grid = radial_grid(n_r, geom)
    kpos = dk * np.arange(J + 1)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            per_k = list(ex.map(lambda k: _solve_one_k(grid, profile, k, M), kpos))
    else:
        per_k = [_solve_one_k(grid, profile, k, M) for k in kpos]

    n = grid.n_r
    lam = np.empty((M, J + 1), dtype=complex)
    U = np.empty((J + 1, 3, n, M), dtype=complex)
    dU = np.empty_like(U)
    P = np.empty((J + 1, M, 3, n), dtype=complex)
    rw = grid.quad_weights
    for j, modes in enumerate(per_k):
        for i, mode in enumerate(modes):
            lam[i, j] = mode.lam
            U[j, :, :, i] = mode.u
            dU[j, :, :, i] = mode.du
            P[j, i] = rw[None, :] * np.conj(mode.adj)
    return EigenBasis(
        geom=geom, profile=profile, grid=grid, dk=dk, k_max=k_max, M=M,
        kgrid_pos=kpos, modes=per_k, lam=lam, U=U, dU=dU, P=P,
    )


# ---------------------------------------------------------------------------
# binary cache

def basis_cache_key(h, Re, dk, k_max, M, n_r):
    payload = f"v{CACHE_FORMAT_VERSION}|h={h!r}|Re={Re!r}|dk={dk!r}|kmax={k_max!r}|M={M}|nr={n_r}"
    return hashlib.sha256(payload.encode()).hexdigest()[:16]


def save_basis(basis, path):
    """Write the packed basis arrays (enough to reconstruct EigenBasis)."""
    np.savez_compressed(
        path,
        version=CACHE_FORMAT_VERSION,
        h=basis.geom.h, Re=basis.profile.Re,
        dk=basis.dk, k_max=basis.k_max, M=basis.M, n_r=basis.grid.n_r,
        lam=basis.lam, U=basis.U, dU=basis.dU, P=basis.P,
    )


def load_basis(path):
    """Reconstruct an EigenBasis from a cache file (None on format mismatch)."""
    with np.load(path) as z:
        if int(z["version"]) != CACHE_FORMAT_VERSION:
            return None
        h, Re = float(z["h"]), float(z["Re"])
        dk, k_max, M, n_r = float(z["dk"]), float(z["k_max"]), int(z["M"]), int(z["n_r"])
        lam, U, dU, P = z["lam"], z["U"], z["dU"], z["P"]
    geom = annulus_geometry(h)
    profile = couette_profile(geom, Re)
    grid = radial_grid(n_r, geom)
    J = round(k_max / dk)
    kpos = dk * np.arange(J + 1)
    rw = grid.quad_weights
    per_k = []
    for j in range(J + 1):
        modes = []
        for i in range(M):
            adj = np.conj(P[j, i] / rw[None, :])
            modes.append(EigenMode(k=kpos[j], m=i + 1, omega=complex(1j * lam[i, j]),
                                   u=U[j, :, :, i], du=dU[j, :, :, i], adj=adj))
        per_k.append(modes)
    return EigenBasis(
        geom=geom, profile=profile, grid=grid, dk=dk, k_max=k_max, M=M,
        kgrid_pos=kpos, modes=per_k, lam=lam, U=U, dU=dU, P=P,
    )


def load_or_build(h, Re, dk=0.25, k_max=12.0, M=20, n_r=48, cache_dir=None, workers=1):
    """Load a cached basis when the key matches, otherwise build and cache it."""
    if cache_dir is None:
        cache_dir = os.environ.get("NLWAVES_CACHE")
    if cache_dir is None:
        return build_basis(h, Re, dk=dk, k_max=k_max, M=M, n_r=n_r, workers=workers)
    os.makedirs(cache_dir, exist_ok=True)
    key = basis_cache_key(h, Re, dk, k_max, M, n_r)
    path = os.path.join(cache_dir, f"basis_{key}.npz")
    if os.path.exists(path):
        try:
            basis = load_basis(path)
        except Exception:
            basis = None
        if basis is not None:
            return basis
    basis = build_basis(h, Re, dk=dk, k_max=k_max, M=M, n_r=n_r, workers=workers)
    save_basis(basis, path)
    return basis
