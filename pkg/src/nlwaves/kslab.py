"""Kuramoto-Sivashinsky testbed for time-step sensitivity experiments.

Integrates u_t + u u_x + u_xx + u_xxxx = 0 on a periodic domain of length
l_domain with a Fourier pseudo-spectral discretization (3/2-rule dealiased
quadratic term), exact linear propagation and explicit RK4 nonlinear stages.
The domain length sets the instability: modes with q < 1 grow, so short
domains (l_domain < 2 pi) are purely dissipative while l_domain around 22
is the standard chaotic window.
"""

import csv
from dataclasses import dataclass, field

import numpy as np

from .errors import BlowupError, ConfigurationError


@dataclass
class KsState:
    """Spectral state: rfft coefficients of u(x, t) (mean mode pinned to 0)."""

    n_modes: int
    l_domain: float
    uhat: np.ndarray
    t: float = 0.0

    def physical(self):
        return np.fft.irfft(self.uhat, n=self.n_modes)

    def copy(self):
        return KsState(self.n_modes, self.l_domain, self.uhat.copy(), self.t)


@dataclass
class KsTrajectory:
    n_modes: int
    l_domain: float
    dt: float
    times: list = field(default_factory=list)
    states: list = field(default_factory=list)  # physical-space snapshots

    def as_array(self):
        return np.asarray(self.times), np.asarray(self.states)


def _wavenumbers(n_modes, l_domain):
    return 2.0 * np.pi * np.arange(n_modes // 2 + 1) / l_domain


def seed_long_wave(n_modes, l_domain, mode=1, amp=1e-2, phase=0.0):
    """Single Fourier mode seed u = 2*amp*cos(q x + phase)."""
    uhat = np.zeros(n_modes // 2 + 1, dtype=complex)
    uhat[mode] = amp * n_modes * np.exp(1j * phase)
    return np.fft.irfft(uhat, n=n_modes)


class KsIntegrator:
    """Integrating-factor RK4 for the KS equation at fixed dt."""

    def __init__(self, n_modes, l_domain, dt):
        if n_modes < 32 or n_modes & (n_modes - 1):
            raise ConfigurationError("n_modes must be a power of two >= 32")
        self.n = n_modes
        self.l = l_domain
        self.dt = dt
        self.q = _wavenumbers(n_modes, l_domain)
        lam = self.q**2 - self.q**4
        self.e_half = np.exp(lam * (0.5 * dt))
        self.e_full = self.e_half**2
        self.npad = 3 * n_modes // 2
        self.iq = 1j * self.q

    def nonlinear(self, uhat):
        """-u u_x = -0.5 d(u^2)/dx, dealiased by 3/2 zero padding."""
        u = np.fft.irfft(uhat, n=self.npad) * (self.npad / self.n)
        nl = np.fft.rfft(u * u)[: self.n // 2 + 1] * (self.n / self.npad)
        nl = -0.5 * self.iq * nl
        nl[0] = 0.0  # mean is conserved by the equation; pin against roundoff
        return nl

    def step(self, uhat):
        dt, e1, e2 = self.dt, self.e_half, self.e_full
        n1 = self.nonlinear(uhat)
        n2 = self.nonlinear(e1 * (uhat + (0.5 * dt) * n1))
        n3 = self.nonlinear(e1 * uhat + (0.5 * dt) * n2)
        n4 = self.nonlinear(e2 * uhat + dt * e1 * n3)
        return e2 * uhat + (dt / 6.0) * (e2 * n1 + 2.0 * e1 * (n2 + n3) + n4)


def ks_run(n_modes, l_domain, init, dt, t_end, snapshot_every=1.0):
    """Integrate from physical-space initial data ``init``; snapshots in physical space."""
    integ = KsIntegrator(n_modes, l_domain, dt)
    init = np.asarray(init, dtype=float)
    if init.shape != (n_modes,):
        raise ConfigurationError(f"initial data must have shape ({n_modes},)")
    uhat = np.fft.rfft(init)
    uhat[0] = 0.0
    traj = KsTrajectory(n_modes=n_modes, l_domain=l_domain, dt=dt)
    n_steps = int(round(t_end / dt))
    stride = max(1, int(round(snapshot_every / dt)))
    traj.times.append(0.0)
    traj.states.append(np.fft.irfft(uhat, n=n_modes))
    for i in range(1, n_steps + 1):
        uhat = integ.step(uhat)
        if not np.all(np.isfinite(uhat)):
            raise BlowupError(f"KS blow-up at t={i * dt:.6g}", series=traj, t=i * dt)
        if i % stride == 0 or i == n_steps:
            traj.times.append(i * dt)
            traj.states.append(np.fft.irfft(uhat, n=n_modes))
    return traj


@dataclass
class SensitivityReport:
    """Pairwise trajectory divergence between runs at different time steps."""

    dt_list: list
    t_end: float
    threshold: float
    t_div: dict  # (dt_a, dt_b) -> divergence time or None
    max_separation: dict  # (dt_a, dt_b) -> max relative L2 separation
    verdict: str  # 'converged' | 'dt-dependent'

    def lines(self):
        out = [f"t_end: {self.t_end}", f"threshold: {self.threshold}",
               f"verdict: {self.verdict}"]
        for key in sorted(self.t_div):
            td = self.t_div[key]
            out.append(f"t_div[dt={key[0]:g},dt={key[1]:g}]: "
                       f"{'none' if td is None else format(td, 'g')} "
                       f"(max_sep {self.max_separation[key]:.3e})")
        return out


def timestep_sensitivity(n_modes, l_domain, init, dt_list, t_end,
                         snapshot_every=1.0, threshold=0.5):
    """Run identical initial data at each dt and compare trajectories pairwise.

    Divergence time is the first snapshot where the relative L2 separation
    exceeds ``threshold``; the verdict is 'dt-dependent' when any pair of
    distinct time steps diverges before t_end.
    """
    if len(dt_list) < 2:
        raise ConfigurationError("need at least two time steps to compare")
    for dt in dt_list:
        if abs(round(snapshot_every / dt) * dt - snapshot_every) > 1e-9:
            raise ConfigurationError(f"snapshot interval must be a multiple of dt={dt}")
    trajs = {dt: ks_run(n_modes, l_domain, init, dt, t_end, snapshot_every)
             for dt in dt_list}
    t_div, max_sep = {}, {}
    diverged = False
    dts = sorted(dt_list)
    for i, da in enumerate(dts):
        for db in dts[i + 1:]:
            ta, ua = trajs[da].as_array()
            tb, ub = trajs[db].as_array()
            nmin = min(len(ta), len(tb))
            sep = np.linalg.norm(ua[:nmin] - ub[:nmin], axis=1)
            scale = np.maximum(np.linalg.norm(ua[:nmin], axis=1),
                               np.linalg.norm(ub[:nmin], axis=1))
            rel = sep / np.maximum(scale, 1e-300)
            over = np.where(rel > threshold)[0]
            key = (da, db)
            max_sep[key] = float(rel.max())
            if over.size and da != db:
                t_div[key] = float(ta[over[0]])
                diverged = True
            else:
                t_div[key] = None
    return SensitivityReport(dt_list=list(dts), t_end=t_end, threshold=threshold,
                             t_div=t_div, max_separation=max_sep,
                             verdict="dt-dependent" if diverged else "converged")


def export_trajectory_csv(traj, path):
    """Rows (t, x_0 ... x_{n-1}) of the physical-space field."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t"] + [f"u{i}" for i in range(traj.n_modes)])
        for t, u in zip(traj.times, traj.states):
            writer.writerow([f"{t:.17g}"] + [f"{x:.17g}" for x in u])
