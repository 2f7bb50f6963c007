"""Energy, amplitude/frequency tables, standing-wave pairs, resonances, fields.

Kinetic energy per axial wavenumber (both +-k folded in):

    E(k, t) = integral r (|u|^2 + |v|^2 + |w|^2) dr                 k != 0
    E(0, t) = 1/2 integral r (|V + v|^2 - V^2 + |u|^2 + |w|^2) dr   k  = 0

with the base-flow energy subtracted at k = 0, so E(0) measures the
mean-flow distortion and may be negative.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, DiagnosticError, DomainError
from .meanflow import profile_eval

STATIONARY_FREQ_TOL = 1e-6


def fourier_component(state, basis, k):
    """Complex radial profiles (u, v, w) of the Fourier component at wavenumber k.

    Density-to-component conversion: u_hat(k) = dk * sum_m A_m(k) u_m(k, r).
    """
    j = basis.k_index(k)  # raises DomainError-equivalent for off-grid k
    J = basis.J
    js = j - J
    ah = state.a[:, j]
    U = basis.U[abs(js)]  # (3, n_r, M)
    if js < 0:
        U = np.conj(U)
    return basis.dk * (U @ ah)


def kinetic_energy(state, basis, k):
    """E(k, t) per the energy definition above; pass k >= 0."""
    if k < 0:
        raise DomainError("pass k >= 0; negative k is folded into its partner")
    grid = basis.grid
    comp = fourier_component(state, basis, k)
    if k == 0:
        V = profile_eval(basis.profile, grid.points)
        dist = np.sum(np.abs(comp) ** 2, axis=0) + 2.0 * V * comp[1].real
        return 0.5 * float(np.sum(grid.quad_weights * dist))
    return float(np.sum(grid.quad_weights * np.sum(np.abs(comp) ** 2, axis=0)))


def energy_spectrum(state, basis):
    """Array E(k) over the non-negative wavenumber grid."""
    return np.array([kinetic_energy(state, basis, k) for k in basis.kgrid_pos])


def total_energy(state, basis):
    return float(energy_spectrum(state, basis).sum())


@dataclass
class ModeTable:
    """Grid amplitudes abar_m(k) = dk * |A_m(k)| at selected wavenumbers."""

    kvals: np.ndarray
    amps: np.ndarray  # (M, len(kvals))


@dataclass
class FrequencyTable:
    """Phase-slope frequencies d(beta_m)/dt at selected wavenumbers."""

    kvals: np.ndarray
    freqs: np.ndarray  # (M, len(kvals))


def amplitude_table(state, kvals=None):
    """ModeTable of abar = dk * |A| (all k >= 0 by default)."""
    dk = state.kgrid[1] - state.kgrid[0]
    J = (len(state.kgrid) - 1) // 2
    if kvals is None:
        kvals = state.kgrid[J:]
    kvals = np.asarray(kvals, dtype=float)
    cols = [state.k_index(k) for k in kvals]
    return ModeTable(kvals=kvals, amps=dk * np.abs(state.a[:, cols]))


def phase_frequency(series, k, m, window=None):
    """Least-squares slope of the unwrapped phase of A_m(k, t).

    ``window`` is (t_lo, t_hi); by default the trailing half of the series.
    Requires |A| > 1e-12 throughout the window.
    """
    ts = np.array([t for t, _ in series.snapshots])
    if window is None:
        window = (0.5 * (ts[0] + ts[-1]), ts[-1])
    sel = (ts >= window[0]) & (ts <= window[1])
    if sel.sum() < 3:
        raise DiagnosticError("window contains fewer than 3 snapshots")
    j = series.snapshots[0][1].k_index(k)
    vals = np.array([snap.a[m - 1, j] for (_, snap), s in zip(series.snapshots, sel) if s])
    tw = ts[sel]
    if np.abs(vals).min() < 1e-12:
        raise DiagnosticError(
            f"amplitude of (k={k}, m={m}) falls below 1e-12 in the window; phase undefined"
        )
    phase = np.unwrap(np.angle(vals))
    slope = np.polyfit(tw, phase, 1)[0]
    return float(slope)


def frequency_table(series, kvals, window=None, undefined=np.nan):
    """FrequencyTable over kvals; undefined phases recorded as ``undefined``."""
    M = series.config.M
    kvals = np.asarray(kvals, dtype=float)
    out = np.full((M, len(kvals)), float(undefined))
    for jc, k in enumerate(kvals):
        for m in range(1, M + 1):
            try:
                out[m - 1, jc] = phase_frequency(series, k, m, window=window)
            except DiagnosticError:
                pass
    return FrequencyTable(kvals=kvals, freqs=out)


def standing_wave_pairs(amps, freqs, tol=0.05):
    """Pairs (k, m_a, m_b) with opposite frequencies and equal amplitudes.

    Both the frequency sum and the amplitude gap must be below ``tol``
    relative to the pair's own scale; stationary modes (below the absolute
    stationarity threshold) are excluded.
    """
    if not np.array_equal(amps.kvals, freqs.kvals):
        raise ConfigurationError("amplitude and frequency tables use different wavenumbers")
    pairs = []
    M = amps.amps.shape[0]
    for jc, k in enumerate(amps.kvals):
        for ma in range(M):
            fa = freqs.freqs[ma, jc]
            if not np.isfinite(fa) or abs(fa) < STATIONARY_FREQ_TOL:
                continue
            for mb in range(ma + 1, M):
                fb = freqs.freqs[mb, jc]
                if not np.isfinite(fb) or abs(fb) < STATIONARY_FREQ_TOL:
                    continue
                if abs(fa + fb) >= tol * max(abs(fa), abs(fb)):
                    continue
                aa, ab = amps.amps[ma, jc], amps.amps[mb, jc]
                if abs(aa - ab) < tol * max(aa, ab):
                    pairs.append((float(k), ma + 1, mb + 1))
    return pairs


@dataclass
class Resonance:
    kind: str  # harmonic | subharmonic | quartet | mean-flow-trio
    k_in: tuple
    k_out: float
    residual: float


def classify_resonances(series, basis, tol=1e-3, energy_floor=1e-12, window=None):
    """Enumerate phase-locked triads among the energetic waves of a settled run.

    Wavenumber sums are exact on the grid; the residual is the frequency
    mismatch |f(k1) + f(k2) - f(k3)| measured from the dominant mode at each
    wavenumber.  Mean-flow trios (k = k + 0) and self-quartets
    (k = k + k - k) are always admissible and listed for every active wave.
    """
    e = np.asarray(series.energy_e[-1])
    kpos = basis.kgrid_pos
    active = [float(k) for k, ek in zip(kpos, e) if k > 0 and ek > energy_floor]
    freqs = {}
    snaps_t = np.array([t for t, _ in series.snapshots])
    if window is None:
        window = (0.5 * (snaps_t[0] + snaps_t[-1]), snaps_t[-1])
    for k in active:
        m_dom = int(np.argmax(np.abs(series.final.a[:, series.final.k_index(k)]))) + 1
        try:
            freqs[k] = phase_frequency(series, k, m_dom, window=window)
        except DiagnosticError:
            freqs[k] = np.nan
    out = []
    for k in active:
        out.append(Resonance("mean-flow-trio", (k, 0.0), k, 0.0))
        out.append(Resonance("quartet", (k, k, -k), k, 0.0))
    for i, k1 in enumerate(active):
        for k2 in active[i:]:
            k3 = k1 + k2
            if k3 not in active:
                continue
            res = abs(freqs.get(k1, np.nan) + freqs.get(k2, np.nan) - freqs.get(k3, np.nan))
            if not np.isfinite(res) or res >= tol:
                continue
            kind = "harmonic" if k1 == k2 else "subharmonic"
            out.append(Resonance(kind, (k1, k2), k3, float(res)))
    return out


def dominant_wavenumber(state, basis):
    """argmax over k > 0 of E(k); ties broken toward smaller k."""
    e = energy_spectrum(state, basis)
    kpos = basis.kgrid_pos
    mask = kpos > 0
    if not np.any(e[mask] > 0):
        raise DiagnosticError("no dominant wave: state has no energy at k > 0")
    return float(kpos[mask][int(np.argmax(e[mask]))])


def velocity_field_rz(state, basis, selector="total", nr_out=None, nz_out=64):
    """Real (u_r, u_z) samples on an (r, z) mesh over one dominant wavelength.

    selector: 'total', 'fundamental', 'second-harmonic' or 'mean'.
    Returns (r, z, u_r, u_z) with field arrays shaped (len(r), len(z)).
    """
    k0 = dominant_wavenumber(state, basis)
    wavelength = 2.0 * np.pi / k0
    z = np.linspace(0.0, wavelength, nz_out, endpoint=False)
    r = basis.grid.points
    if selector == "total":
        kset = [float(k) for k in basis.kgrid_pos]
    elif selector == "fundamental":
        kset = [k0]
    elif selector == "second-harmonic":
        kset = [2.0 * k0]
    elif selector == "mean":
        kset = [0.0]
    else:
        raise ConfigurationError(f"unknown selector {selector!r}")
    ur = np.zeros((len(r), len(z)))
    uz = np.zeros((len(r), len(z)))
    for k in kset:
        if k > basis.k_max + 1e-12:
            continue
        comp = fourier_component(state, basis, k)
        if k == 0:
            ur += comp[0].real[:, None]
            uz += comp[2].real[:, None]
        else:
            ph = np.exp(1j * k * z)[None, :]
            ur += 2.0 * (comp[0][:, None] * ph).real
            uz += 2.0 * (comp[2][:, None] * ph).real
    return r, z, ur, uz
