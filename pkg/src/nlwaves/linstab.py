"""Axisymmetric linear stability of circular Couette flow.

Primitive-variable (u, v, w, p) Chebyshev collocation at a single axial
wavenumber k, solved as a generalized (QZ) eigenproblem.  The time
convention is dA/dt = -i omega A, so the growth rate is sigma = Im(omega)
= Re(lambda) with lambda = -i omega.

Adjoint eigenfunctions are obtained from the conjugate-transposed pencil
and biorthonormalized against the direct modes under the r-weighted inner
product <a, b> = integral r (a . conj(b)) dr.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import ConfigurationError, DegeneracyError, NumericalError
from .meanflow import profile_eval, profile_shear
from .radial import radial_grid

#: eigenvalues with |omega| above this are treated as boundary-row artifacts
OMEGA_CUTOFF = 1.0e4

#: tolerance (relative to the profile's max magnitude) for the continuity
#: residual of a retained mode
CONTINUITY_TOL = 1.0e-8


@dataclass(frozen=True)
class SpectralIndex:
    """Wave label: axial wavenumber k, azimuthal n (fixed 0), mode index m >= 1."""

    k: float
    m: int
    n: int = 0


@dataclass
class EigenMode:
    """One eigenmode at wavenumber k: frequency, profiles and adjoint profiles.

    ``u`` stacks (u_r, u_phi, u_z) as a (3, n_r) complex array; ``du`` is its
    radial derivative.  ``adj`` holds the biorthonormalized adjoint profiles
    so that the projection of a forcing field f onto this mode is
    sum_j quad_weights[j] * (f . conj(adj))[j].
    """

    k: float
    m: int
    omega: complex
    u: np.ndarray
    du: np.ndarray
    adj: np.ndarray = None

    @property
    def lam(self):
        """Time-propagation rate lambda = -i omega (growth rate = Re lam)."""
        return -1j * self.omega

    @property
    def sigma(self):
        return self.omega.imag

    def conjugate_pair(self):
        """The mode at -k: profiles conjugated, omega -> -conj(omega)."""
        return EigenMode(
            k=-self.k,
            m=self.m,
            omega=-np.conj(self.omega),
            u=np.conj(self.u),
            du=np.conj(self.du),
            adj=None if self.adj is None else np.conj(self.adj),
        )


def assemble_operator(grid, profile, k):
    """Assemble the generalized pencil (L, B) for lambda B q = L q.

    Unknown ordering is q = [u, v, w, p], each sampled at the n_r collocation
    points.  Momentum rows at the walls are replaced by no-slip conditions;
    the continuity rows carry no time derivative (singular mass matrix, which
    eliminates the pressure implicitly).
    """
    n = grid.n_r
    r = grid.points
    D1, D2 = grid.d1, grid.d2
    V = profile_eval(profile, r)
    dV = profile_shear(profile, r)
    I = np.eye(n)
    invr = 1.0 / r
    lap = D2 + invr[:, None] * D1 - (k * k) * I
    lapm = lap - np.diag(invr**2)

    L = np.zeros((4 * n, 4 * n), dtype=complex)
    B = np.zeros((4 * n, 4 * n), dtype=complex)
    u, v, w, p = slice(0, n), slice(n, 2 * n), slice(2 * n, 3 * n), slice(3 * n, 4 * n)

    L[u, u] = lapm
    L[u, v] = np.diag(2.0 * V * invr)
    L[u, p] = -D1
    B[u, u] = I

    L[v, u] = -np.diag(dV + V * invr)
    L[v, v] = lapm
    B[v, v] = I

    L[w, w] = lap
    L[w, p] = -1j * k * I
    B[w, w] = I

    L[p, u] = D1 + np.diag(invr)
    L[p, w] = 1j * k * I

    # no-slip rows
    for blk in (u, v, w):
        for j in (blk.start, blk.stop - 1):
            L[j, :] = 0.0
            B[j, :] = 0.0
            L[j, j] = 1.0
    return L, B


def _continuity_residual(q, grid, k):
    """Max residual of (1/r) d(r u)/dr + i k w, relative to the profile scale."""
    n = grid.n_r
    u, w = q[0], q[2]
    res = grid.d1 @ u + u / grid.points + 1j * k * w
    scale = max(np.abs(q).max(), 1e-300)
    return np.abs(res[1:-1]).max() / scale


def _energy_norm(q, grid):
    return np.sqrt(np.sum(grid.quad_weights * np.sum(np.abs(q) ** 2, axis=0)).real)


def _fix_phase(q):
    """Rotate a profile so its largest entry is real positive (determinism)."""
    flat = q.ravel()
    j = int(np.argmax(np.abs(flat)))
    ph = flat[j] / abs(flat[j])
    return q / ph


def solve_modes_mean(grid, M):
    """Eigenmodes at k = 0, with adjoints.

    Continuity plus no-slip forces u_r = 0 at k = 0, so the problem decouples
    into azimuthal and axial diffusion about the base flow; the pressure
    pencil is singular there and QZ is unreliable.  Modes of both families
    are merged and sorted by descending growth rate.
    """
    n = grid.n_r
    r = grid.points
    D1, D2 = grid.d1, grid.d2
    base = D2 + (1.0 / r)[:, None] * D1
    ops = {1: base - np.diag(1.0 / r**2), 2: base}  # component index: v, w
    cand = []
    for comp, op in ops.items():
        a = op[1:-1, 1:-1]
        lam, vl, vr = scipy.linalg.eig(a, left=True, right=True)
        for i in range(len(lam)):
            cand.append((lam[i].real, comp, vr[:, i], vl[:, i]))
    cand.sort(key=lambda t: -t[0])
    rw = grid.quad_weights
    modes = []
    for sig, comp, q_int, y_int in cand[:M]:
        q = np.zeros((3, n), dtype=complex)
        q[comp, 1:-1] = q_int
        q /= _energy_norm(q, grid)
        q = _fix_phase(q)
        c = np.vdot(y_int, q[comp, 1:-1])
        if abs(c) < 1e-10 * np.abs(y_int).max() * n:
            raise DegeneracyError(f"near-defective mean-flow mode m={len(modes) + 1}")
        y = np.zeros((3, n), dtype=complex)
        y[comp, 1:-1] = y_int / np.conj(c)
        adj = y / rw[None, :]
        modes.append(
            EigenMode(k=0.0, m=len(modes) + 1, omega=complex(1j * sig),
                      u=q, du=q @ grid.d1.T, adj=adj)
        )
    if len(modes) < M:
        raise NumericalError(f"only {len(modes)} mean-flow modes available, requested {M}")
    return modes


def solve_modes(pair, grid, k, M, omega_cutoff=OMEGA_CUTOFF):
    """Solve the pencil and return the leading M modes, sorted by descending sigma.

    Spurious eigenvalues (infinite from boundary rows, |omega| above the
    cutoff, or profiles violating continuity) are discarded.  Profiles are
    normalized to unit r-weighted energy norm and phase-fixed.
    """
    if k == 0.0:
        return solve_modes_mean(grid, M)
    L, B = pair
    n = grid.n_r
    try:
        lam, vecs = scipy.linalg.eig(L, B)
    except Exception as exc:  # pragma: no cover - LAPACK failure is exotic
        raise NumericalError(f"generalized eigensolve failed at k={k}: {exc}") from exc

    finite = np.isfinite(lam)
    lam = np.where(finite, lam, 0.0)
    omega = 1j * lam
    keep = finite & (np.abs(omega) <= omega_cutoff)
    idx = np.where(keep)[0]
    # sort by descending growth rate, tie-broken by Im(lambda) for conjugate pairs
    order = np.lexsort((lam[idx].imag, -lam[idx].real))
    modes = []
    for i in idx[order]:
        q = vecs[:, i].reshape(4, n)[:3].copy()
        nrm = _energy_norm(q, grid)
        if nrm < 1e-10:
            continue
        q /= nrm
        if _continuity_residual(q, grid, k) > CONTINUITY_TOL:
            continue
        if np.abs(q[:, [0, -1]]).max() > 1e-8:
            continue
        q = _fix_phase(q)
        modes.append(
            EigenMode(k=k, m=len(modes) + 1, omega=complex(omega[i]), u=q, du=q @ grid.d1.T)
        )
        if len(modes) == M:
            break
    if len(modes) < M:
        raise NumericalError(
            f"only {len(modes)} usable modes at k={k}; requested M={M} "
            f"(increase n_r or lower M)"
        )
    return modes


def adjoint_modes(pair, modes, grid, min_overlap=1e-10):
    """Fill adjoint profiles and biorthonormalize against the direct modes.

    The adjoint pencil (L^H, B^H) is solved once; each retained mode is
    matched to the adjoint eigenvalue nearest conj(lambda).  Profiles are
    scaled so <mode_m, adj_m> = 1 under the r-weighted inner product.
    """
    if all(m.adj is not None for m in modes):
        return modes
    L, B = pair
    n = L.shape[0] // 4
    lam_a, vecs_a = scipy.linalg.eig(L.conj().T, B.conj().T)
    finite = np.isfinite(lam_a)
    rw = grid.quad_weights
    for mode in modes:
        target = np.conj(mode.lam)
        cand = np.where(finite)[0]
        j = cand[int(np.argmin(np.abs(lam_a[cand] - target)))]
        if np.abs(lam_a[j] - target) > 1e-4 * max(1.0, abs(target)):
            raise NumericalError(
                f"no adjoint eigenvalue matches mode (k={mode.k}, m={mode.m}): "
                f"nearest gap {abs(lam_a[j] - target):.3e}"
            )
        y = vecs_a[:, j].reshape(4, n)[:3]
        # overlap y^H B q reduces to the plain velocity-row sum
        c = np.sum(np.conj(y) * _mass_velocity(mode.u, grid))
        if abs(c) < min_overlap * (np.abs(y).max() * np.abs(mode.u).max() * n):
            raise DegeneracyError(
                f"near-defective pair at (k={mode.k}, m={mode.m}): overlap {abs(c):.3e}"
            )
        y = y / np.conj(c)
        mode.adj = np.conj(np.conj(y) / rw[None, :])
    return modes


def _mass_velocity(q, grid):
    """Velocity rows of B q; B carries the identity on interior momentum rows."""
    out = q.copy()
    out[:, 0] = 0.0
    out[:, -1] = 0.0
    return out


def project(mode, f, grid):
    """Amplitude of ``mode`` in a forcing field f: sum quad_weights * (f conj(adj))."""
    return np.sum(grid.quad_weights * f * np.conj(mode.adj))


def inner_r(a, b, grid):
    """<a, b> = integral r (a . conj(b)) dr over all components."""
    return np.sum(grid.quad_weights * a * np.conj(b))


def growth_rate(geom, profile, k, n_r=48, M=1, grid=None):
    """Growth rate sigma of the least-stable axisymmetric mode at wavenumber k."""
    if grid is None:
        grid = radial_grid(n_r, geom)
    pair = assemble_operator(grid, profile, k)
    modes = solve_modes(pair, grid, k, M)
    return modes[0].sigma


def neutral_band(geom, profile, n_r=48, bracket=(0.1, 12.0), coarse=48, tol=1e-3):
    """Locate the unstable wavenumber band (k_lo, k_hi) by scan plus bisection.

    Returns None when no wavenumber in the bracket is unstable.
    """
    grid = radial_grid(n_r, geom)

    def sigma(k):
        return growth_rate(geom, profile, k, grid=grid)

    ks = np.linspace(bracket[0], bracket[1], coarse)
    sig = np.array([sigma(k) for k in ks])
    pos = np.where(sig > 0.0)[0]
    if pos.size == 0:
        return None

    def bisect(k_neg, k_pos):
        # root between a stable and an unstable wavenumber
        while abs(k_pos - k_neg) > tol:
            mid = 0.5 * (k_neg + k_pos)
            if sigma(mid) > 0.0:
                k_pos = mid
            else:
                k_neg = mid
        return 0.5 * (k_neg + k_pos)

    i_lo, i_hi = pos[0], pos[-1]
    if i_lo == 0:
        k_lo = ks[0]
    else:
        k_lo = bisect(ks[i_lo - 1], ks[i_lo])
    if i_hi == len(ks) - 1:
        k_hi = ks[-1]
    else:
        k_hi = bisect(ks[i_hi + 1], ks[i_hi])
    return (k_lo, k_hi)
