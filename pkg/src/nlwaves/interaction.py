"""Quadratic wave-interaction coefficients and nonlinear right-hand sides.

Two evaluation routes for the amplitude-equation nonlinearity:

* ``rhs_direct`` contracts a precomputed interaction tensor (the convolution
  over the wavenumber grid written out explicitly).  Memory-gated; meant for
  small validation grids.
* ``rhs_pseudospectral`` synthesizes velocity fields on a zero-padded axial
  grid, forms the convective products pointwise, transforms back and projects
  onto the adjoint eigenfunctions.  This is the production path.

Both routes weight the wavenumber integral uniformly with dk.
"""

from dataclasses import dataclass

import numpy as np
import scipy.fft

from .errors import ConfigurationError
from .kernels import convolve_direct


def convective_product(mode_a, mode_b, grid):
    """-(u_a . grad) u_b for two axisymmetric modes; carries wavenumber k_a + k_b.

    Cylindrical components with d/dz -> i k_b acting on mode_b:
    radial    u_a du_b/dr + i k_b w_a u_b - v_a v_b / r
    azimuthal u_a dv_b/dr + i k_b w_a v_b + u_a v_b / r
    axial     u_a dw_b/dr + i k_b w_a w_b
    The curvature terms use the ordered pairing; the convolution sums both
    orderings, reproducing the symmetric -v^2/r and +uv/r terms.
    """
    if mode_a.u.shape[1] != grid.n_r or mode_b.u.shape[1] != grid.n_r:
        raise ConfigurationError("mode profiles do not match the radial grid")
    r = grid.points
    ua, va, wa = mode_a.u
    ub, vb, wb = mode_b.u
    dub, dvb, dwb = mode_b.du
    ikb = 1j * mode_b.k
    out = np.empty((3, grid.n_r), dtype=complex)
    out[0] = ua * dub + ikb * wa * ub - va * vb / r
    out[1] = ua * dvb + ikb * wa * vb + ua * vb / r
    out[2] = ua * dwb + ikb * wa * wb
    return -out


def coeff_b(basis, k1, m1, k2, m2, m):
    """Interaction coefficient b(k1, k2; m1, m2 -> m) at output wavenumber k1 + k2.

    Defined as the adjoint projection of the convective product of the two
    modes; projecting onto the k = 0 basis automatically retains only the
    solenoidal mean-flow content.
    """
    k = k1 + k2
    basis.k_index(k)  # raises if off-grid
    grid = basis.grid
    ma = basis.mode(k1, m1)
    mb = basis.mode(k2, m2)
    target = basis.mode(k, m)
    N = convective_product(ma, mb, grid)
    return complex(np.sum(grid.quad_weights * N * np.conj(target.adj)))


@dataclass
class InteractionTensor:
    """Dense coefficients on the full signed grid: entries[jout, j1, m, m1, m2].

    j2 = jout - j1 is implied; slots where j2 falls off the grid are zero.
    ``key`` records the basis parameters the tensor was built from.
    """

    entries: np.ndarray
    dk: float
    J: int
    M: int
    key: str

    def entry(self, j1, j2, m1, m2, m):
        """Coefficient for signed k-indices j1, j2 (units of dk) and 1-based modes."""
        J = self.J
        jout = j1 + j2
        if abs(jout) > J or abs(j1) > J or abs(j2) > J:
            raise ConfigurationError("k-index outside the truncated grid")
        return self.entries[jout + J, j1 + J, m - 1, m1 - 1, m2 - 1]


def tensor_nbytes(J, M):
    Kf = 2 * J + 1
    return Kf * Kf * M**3 * 16


def build_tensor(basis, M=None, memory_limit=2**30):
    """Precompute the full interaction tensor (validation grids only).

    Raises ConfigurationError when the K^2 M^3 storage would exceed
    ``memory_limit`` bytes; use the pseudo-spectral route instead.
    """
    J = basis.J
    M = basis.M if M is None else M
    if M > basis.M:
        raise ConfigurationError(f"tensor M={M} exceeds basis M={basis.M}")
    need = tensor_nbytes(J, M)
    if need > memory_limit:
        raise ConfigurationError(
            f"interaction tensor would need {need / 2**30:.2f} GiB "
            f"(limit {memory_limit / 2**30:.2f} GiB); use rhs_pseudospectral"
        )
    Kf = 2 * J + 1
    grid = basis.grid
    rw = grid.quad_weights
    T = np.zeros((Kf, Kf, M, M, M), dtype=complex)
    # projection rows per non-negative k: (M, 3 n); negative k by conjugation
    for j1 in range(-J, J + 1):
        modes1 = [basis.mode(j1 * basis.dk, m + 1) for m in range(M)]
        for j2 in range(-J, J + 1):
            jout = j1 + j2
            if abs(jout) > J:
                continue
            modes2 = [basis.mode(j2 * basis.dk, m + 1) for m in range(M)]
            Pj = basis.P[abs(jout), :M].reshape(M, -1)
            if jout < 0:
                Pj = np.conj(Pj)
            for i1, ma in enumerate(modes1):
                for i2, mb in enumerate(modes2):
                    N = convective_product(ma, mb, grid).ravel()
                    T[jout + J, j1 + J, :, i1, i2] = Pj @ N
    return InteractionTensor(entries=T, dk=basis.dk, J=J, M=M,
                             key=f"J={J},M={M},n_r={grid.n_r}")


def rhs_direct(tensor, a):
    """Nonlinear RHS by explicit convolution; ``a`` is (M, 2J+1) on the full grid."""
    a = np.asarray(a)
    Kf = 2 * tensor.J + 1
    if a.shape != (tensor.M, Kf):
        raise ConfigurationError(
            f"state shape {a.shape} does not match tensor (M={tensor.M}, K={Kf})"
        )
    return convolve_direct(tensor.entries, a, tensor.dk)


class PseudoSpectralRHS:
    """Dealiased pseudo-spectral evaluation of the nonlinear RHS.

    Synthesizes (u, v, w), their radial and axial derivatives on a physical
    z-grid with at least 3/2 zero-padding, forms the convective term
    pointwise, and projects back onto the adjoint basis.  Assumes the state
    satisfies the reality invariant A(-k) = conj(A(k)).
    """

    def __init__(self, basis, nz=None):
        J = basis.J
        min_nz = 3 * J + 1
        if nz is None:
            nz = scipy.fft.next_fast_len(min_nz, real=True)
        if nz < min_nz:
            raise ConfigurationError(
                f"nz={nz} aliases the quadratic products; need nz >= {min_nz}"
            )
        self.basis = basis
        self.nz = nz
        n = basis.grid.n_r
        self.n_r = n
        self.J = J
        self.M = basis.M
        self.dk = basis.dk
        self.invr = 1.0 / basis.grid.points
        # (J+1, 6n, M): profile values stacked over their radial derivatives
        self.UdU = np.concatenate(
            [basis.U.reshape(J + 1, 3 * n, basis.M), basis.dU.reshape(J + 1, 3 * n, basis.M)],
            axis=1,
        )
        self.P = basis.P.reshape(J + 1, basis.M, 3 * n)
        self.ik = 1j * basis.kgrid_pos

    def __call__(self, a):
        """RHS array (M, 2J+1) for a full-grid state array (M, 2J+1)."""
        J, n, nz = self.J, self.n_r, self.nz
        a = np.asarray(a)
        if a.shape != (self.M, 2 * J + 1):
            raise ConfigurationError("state shape does not match basis")
        ah = np.ascontiguousarray(a[:, J:].T)  # (J+1, M)
        F = np.matmul(self.UdU, ah[:, :, None])[:, :, 0]  # (J+1, 6n)
        spec = np.zeros((9, n, nz // 2 + 1), dtype=complex)
        blk = F.T.reshape(6, n, J + 1)
        spec[:6, :, : J + 1] = blk
        spec[6:, :, : J + 1] = blk[:3] * self.ik
        phys = scipy.fft.irfft(spec, n=nz, axis=-1) * nz
        u, v, w, dur, dvr, dwr, uz, vz, wz = phys
        invr = self.invr[:, None]
        Np = np.empty((3, n, nz))
        Np[0] = u * dur + w * uz - v * v * invr
        Np[1] = u * dvr + w * vz + u * v * invr
        Np[2] = u * dwr + w * wz
        Nhat = scipy.fft.rfft(Np, axis=-1)[:, :, : J + 1] / nz
        Nk = np.ascontiguousarray(Nhat.reshape(3 * n, J + 1).T)  # (J+1, 3n)
        dah = -self.dk * np.matmul(self.P, Nk[:, :, None])[:, :, 0]  # (J+1, M)
        da = np.empty_like(a)
        da[:, J:] = dah.T
        da[:, :J] = np.conj(da[:, :J:-1])
        return da


def rhs_pseudospectral(basis, a, nz=None):
    """One-shot pseudo-spectral RHS (builds and caches the operator on the basis)."""
    op = getattr(basis, "_ps_rhs", None)
    if op is None or (nz is not None and op.nz != nz):
        op = PseudoSpectralRHS(basis, nz=nz)
        basis._ps_rhs = op
    return op(a)
