"""Time integration of the truncated amplitude-density system.

The stiff linear part (one decoupled rate per mode and wavenumber) is
propagated exactly by its integrating factor; the nonlinear convolution is
advanced with explicit RK4 stages.  The reality invariant
A_m(-k) = conj(A_m(k)) is re-imposed after every step.
"""

import csv
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import BlowupError, ConfigurationError
from .interaction import PseudoSpectralRHS


@dataclass
class SimConfig:
    """Numerical parameters of an amplitude-equation run (viscous units)."""

    dk: float = 0.25
    k_max: float = 12.0
    M: int = 20
    n_r: int = 48
    dt: float = 1e-3
    t_end: float = 10.0
    snapshot_every: float = 1.0
    integrator: str = "ifrk4"
    eq_window: float = 650.0
    eq_tol: float = 1e-8
    energy_every: float = 1.0

    def __post_init__(self):
        if self.dk <= 0 or self.dt <= 0 or self.M < 1:
            raise ConfigurationError("dk, dt must be positive and M >= 1")
        if abs(round(self.k_max / self.dk) * self.dk - self.k_max) > 1e-9:
            raise ConfigurationError("k_max must be a multiple of dk")
        if self.integrator != "ifrk4":
            raise ConfigurationError(f"unknown integrator {self.integrator!r}")

    @property
    def J(self):
        return round(self.k_max / self.dk)

    @property
    def kgrid(self):
        return self.dk * np.arange(-self.J, self.J + 1)


@dataclass
class AmplitudeField:
    """Complex amplitude densities A_m(k_j) on the full signed grid."""

    a: np.ndarray  # (M, 2J+1)
    kgrid: np.ndarray
    t: float = 0.0

    def copy(self):
        return AmplitudeField(a=self.a.copy(), kgrid=self.kgrid, t=self.t)

    def enforce_reality(self):
        """Symmetrize so A(-k) = conj(A(k)) exactly (k = 0 made real)."""
        self.a = 0.5 * (self.a + np.conj(self.a[:, ::-1]))
        return self

    def k_index(self, k0):
        j = round(float(k0) / (self.kgrid[1] - self.kgrid[0]))
        J = (len(self.kgrid) - 1) // 2
        if abs(j) > J or abs(self.kgrid[J + j] - k0) > 1e-9:
            raise ConfigurationError(f"wavenumber {k0} is not on the grid")
        return J + j


@dataclass
class TimeSeries:
    """Snapshot history plus energy traces and equilibrium bookkeeping."""

    config: SimConfig
    snapshots: list = field(default_factory=list)  # (t, AmplitudeField)
    energy_t: list = field(default_factory=list)
    energy_e: list = field(default_factory=list)  # E over k >= 0 grid
    equilibrium_reached: bool = False
    t_equilibrium: float = None

    @property
    def final(self):
        return self.snapshots[-1][1]


def empty_state(config):
    J = config.J
    return AmplitudeField(a=np.zeros((config.M, 2 * J + 1), dtype=complex),
                          kgrid=config.kgrid)


def init_single_mode(config, k0, m, amp):
    """Single-mode seed with grid-amplitude measure amp = dk * |A|."""
    if amp < 0:
        raise ConfigurationError("amplitude must be non-negative")
    if not 1 <= m <= config.M:
        raise ConfigurationError(f"mode index {m} outside 1..{config.M}")
    state = empty_state(config)
    j = state.k_index(k0)
    J = config.J
    state.a[m - 1, j] += amp / config.dk
    if j != J:
        state.a[m - 1, 2 * J - j] += amp / config.dk  # conjugate partner (real seed)
    return state.enforce_reality()


def add_perturbation(state, k0, m, amp):
    """Add a single-mode disturbance of grid amplitude ``amp`` to an existing state."""
    out = state.copy()
    dk = out.kgrid[1] - out.kgrid[0]
    j = out.k_index(k0)
    J = (len(out.kgrid) - 1) // 2
    out.a[m - 1, j] += amp / dk
    if j != J:
        out.a[m - 1, 2 * J - j] += amp / dk
    return out.enforce_reality()


def zero_rhs(a):
    return np.zeros_like(a)


class Stepper:
    """Integrating-factor RK4 stepper bound to a basis and a nonlinear RHS."""

    def __init__(self, basis, config, rhs=None):
        if basis.M != config.M or basis.J != config.J or abs(basis.dk - config.dk) > 1e-12:
            raise ConfigurationError("basis and config disagree on the spectral grid")
        self.basis = basis
        self.config = config
        self.rhs = PseudoSpectralRHS(basis) if rhs is None else rhs
        lam = basis.lam_full()
        self.e_half = np.exp(lam * (0.5 * config.dt))
        self.e_full = self.e_half**2

    def step(self, state):
        """Advance one dt; reality re-enforced; raises BlowupError on non-finite values."""
        dt = self.config.dt
        a = state.a
        e1, e2 = self.e_half, self.e_full
        n1 = self.rhs(a)
        n2 = self.rhs(e1 * (a + (0.5 * dt) * n1))
        n3 = self.rhs(e1 * a + (0.5 * dt) * n2)
        n4 = self.rhs(e2 * a + dt * e1 * n3)
        anew = e2 * a + (dt / 6.0) * (e2 * n1 + 2.0 * e1 * (n2 + n3) + n4)
        if not np.all(np.isfinite(anew)):
            where = int(np.argmax(~np.isfinite(anew).ravel()))
            raise BlowupError(f"non-finite amplitude at t={state.t + dt:.6g}",
                              t=state.t + dt, where=where)
        state.a = anew
        state.t += dt
        state.enforce_reality()
        return state


def run(config, initial, basis, rhs=None, blowup_amp=1e8):
    """Integrate to t_end, collecting snapshots and energy traces.

    Equilibrium is flagged when consecutive window means of every E(k) agree
    to eq_tol per unit time (window eq_window, long enough to average the
    slow standing-wave beats).  On blow-up a BlowupError carrying the partial
    series is raised.
    """
    from .diagnostics import energy_spectrum  # local import to avoid a cycle

    stepper = Stepper(basis, config, rhs=rhs)
    state = initial.copy()
    series = TimeSeries(config=config)
    n_steps = int(round(config.t_end / config.dt))
    snap_stride = max(1, int(round(config.snapshot_every / config.dt)))
    energy_stride = max(1, int(round(config.energy_every / config.dt)))

    def record(i):
        if i % snap_stride == 0 or i == n_steps:
            series.snapshots.append((state.t, state.copy()))
        if i % energy_stride == 0 or i == n_steps:
            series.energy_t.append(state.t)
            series.energy_e.append(energy_spectrum(state, basis))
            _check_equilibrium(series, config)

    record(0)
    for i in range(1, n_steps + 1):
        try:
            stepper.step(state)
        except BlowupError as err:
            err.series = series
            raise
        if np.abs(state.a).max() > blowup_amp:
            raise BlowupError(f"amplitude exceeded {blowup_amp:g} at t={state.t:.6g}",
                              series=series, t=state.t)
        record(i)
    return series


def _check_equilibrium(series, config):
    if series.equilibrium_reached or len(series.energy_t) < 2:
        return
    t = np.asarray(series.energy_t)
    win = config.eq_window
    if t[-1] - t[0] < 2 * win:
        return
    e = np.asarray(series.energy_e)
    recent = t >= t[-1] - 2 * win
    tr, er = t[recent], e[recent]
    mid = tr[0] + win
    lo, hi = er[tr < mid], er[tr >= mid]
    if not len(lo) or not len(hi):
        return
    m1 = lo.mean(axis=0)
    m2 = hi.mean(axis=0)
    scale = np.abs(np.concatenate([m1, m2])).max()
    drift = np.abs(m2 - m1) / np.maximum(np.abs(m1), 1e-9 * scale) / win
    if np.all(drift < config.eq_tol):
        series.equilibrium_reached = True
        series.t_equilibrium = float(t[-1])


def load_snapshots_csv(path, config):
    """Rebuild a snapshot-only TimeSeries from an export_snapshots_csv file."""
    series = TimeSeries(config=config)
    current_t = None
    state = None
    with open(path, newline="") as fh:
        rows = csv.reader(line for line in fh if not line.startswith("#"))
        header = next(rows)
        if header[:5] != ["t", "k", "m", "re_a", "im_a"]:
            raise ConfigurationError(f"{path} is not a snapshot CSV")
        for t_s, k_s, m_s, re_s, im_s in rows:
            t = float(t_s)
            if t != current_t:
                state = empty_state(config)
                state.t = t
                series.snapshots.append((t, state))
                current_t = t
            j = state.k_index(float(k_s))
            state.a[int(m_s) - 1, j] = complex(float(re_s), float(im_s))
    if not series.snapshots:
        raise ConfigurationError(f"{path} contains no snapshots")
    return series


def export_snapshots_csv(series, path, header_meta=None):
    """Write snapshots as rows (t, k, m, Re(A), Im(A)); metadata in '#' header lines."""
    cfg = series.config
    with open(path, "w", newline="") as fh:
        if header_meta:
            for key, val in header_meta.items():
                fh.write(f"# {key}: {val}\n")
        fh.write(f"# dk: {cfg.dk!r}\n# k_max: {cfg.k_max!r}\n# M: {cfg.M}\n"
                 f"# dt: {cfg.dt!r}\n# t_end: {cfg.t_end!r}\n")
        writer = csv.writer(fh)
        writer.writerow(["t", "k", "m", "re_a", "im_a"])
        for t, snap in series.snapshots:
            for mi in range(cfg.M):
                for j, k in enumerate(snap.kgrid):
                    val = snap.a[mi, j]
                    writer.writerow([f"{t:.17g}", f"{k:.17g}", mi + 1,
                                     f"{val.real:.17g}", f"{val.imag:.17g}"])
