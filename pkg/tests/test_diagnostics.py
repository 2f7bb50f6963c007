import numpy as np
import pytest

from nlwaves import diagnostics as diag
from nlwaves.errors import DiagnosticError, DomainError
from nlwaves.evolve import (AmplitudeField, SimConfig, TimeSeries,
                            empty_state, init_single_mode)
from nlwaves.meanflow import profile_eval


def _config(**over):
    base = dict(dk=0.5, k_max=3.0, M=3, n_r=24, dt=1e-3, t_end=1.0)
    base.update(over)
    return SimConfig(**base)


def test_single_mode_energy_equals_squared_grid_amplitude(small_basis):
    # unit-energy eigenfunctions make E(k) = (dk |A|)^2 for a one-mode state
    cfg = _config()
    abar = 2.5e-3
    state = init_single_mode(cfg, 2.0, 1, abar)
    e = diag.kinetic_energy(state, small_basis, 2.0)
    assert e == pytest.approx(abar**2, rel=1e-10)


def test_mean_flow_energy_hand_formula(small_basis):
    cfg = _config()
    state = empty_state(cfg)
    state.a[0, state.k_index(0.0)] = 2.0
    state.enforce_reality()
    comp = diag.fourier_component(state, small_basis, 0.0)
    grid = small_basis.grid
    V = profile_eval(small_basis.profile, grid.points)
    expect = 0.5 * np.sum(grid.quad_weights
                          * (np.sum(np.abs(comp) ** 2, axis=0) + 2 * V * comp[1].real))
    assert diag.kinetic_energy(state, small_basis, 0.0) == pytest.approx(expect)
    # k = 0 eigenmodes carry no radial velocity
    assert np.abs(comp[0]).max() < 1e-12


def test_energy_is_phase_invariant(small_basis, rng):
    from conftest import random_hermitian_state
    cfg = _config()
    a = random_hermitian_state(rng, 3, 6)
    s1 = AmplitudeField(a=a, kgrid=cfg.kgrid)
    # rotate each k != 0 pair by a phase consistent with reality
    phase = np.exp(1j * 0.73 * cfg.kgrid)
    s2 = AmplitudeField(a=a * phase, kgrid=cfg.kgrid)
    e1 = diag.energy_spectrum(s1, small_basis)
    e2 = diag.energy_spectrum(s2, small_basis)
    assert np.allclose(e1, e2, rtol=1e-12)


def test_negative_k_requests_rejected(small_basis):
    cfg = _config()
    state = empty_state(cfg)
    with pytest.raises(DomainError):
        diag.kinetic_energy(state, small_basis, -1.0)


def _synthetic_series(cfg, freqs_by_mode, amp=1.0, n=41, t1=4.0):
    series = TimeSeries(config=cfg)
    for t in np.linspace(0.0, t1, n):
        state = empty_state(cfg)
        j = state.k_index(1.0)
        jm = len(cfg.kgrid) - 1 - j
        for m, f in freqs_by_mode.items():
            val = amp * np.exp(1j * f * t) / cfg.dk
            state.a[m - 1, j] = val
            state.a[m - 1, jm] = np.conj(val)
        state.t = t
        series.snapshots.append((t, state))
    return series


def test_phase_frequency_recovers_slope():
    cfg = _config()
    series = _synthetic_series(cfg, {1: 0.7, 2: -0.7})
    assert diag.phase_frequency(series, 1.0, 1) == pytest.approx(0.7, rel=1e-8)
    assert diag.phase_frequency(series, 1.0, 2) == pytest.approx(-0.7, rel=1e-8)


def test_phase_frequency_rejects_vanishing_amplitude():
    cfg = _config()
    series = _synthetic_series(cfg, {1: 0.7})
    with pytest.raises(DiagnosticError):
        diag.phase_frequency(series, 1.0, 3)


def test_amplitude_and_frequency_tables():
    cfg = _config()
    series = _synthetic_series(cfg, {1: 0.7, 2: -0.7}, amp=0.25)
    amps = diag.amplitude_table(series.final, kvals=[0.0, 1.0])
    assert amps.amps[0, 1] == pytest.approx(0.25)
    assert amps.amps[0, 0] == pytest.approx(0.0, abs=1e-15)
    freqs = diag.frequency_table(series, [0.0, 1.0])
    assert freqs.freqs[0, 1] == pytest.approx(0.7, rel=1e-8)
    assert np.isnan(freqs.freqs[2, 1])


def test_standing_wave_pairs_detected():
    cfg = _config()
    series = _synthetic_series(cfg, {1: 0.7, 2: -0.7}, amp=0.25)
    amps = diag.amplitude_table(series.final, kvals=[1.0])
    freqs = diag.frequency_table(series, [1.0])
    pairs = diag.standing_wave_pairs(amps, freqs)
    assert pairs == [(1.0, 1, 2)]


def test_standing_wave_pairs_exclude_stationary():
    cfg = _config()
    series = _synthetic_series(cfg, {1: 0.0, 2: 0.0}, amp=0.25)
    amps = diag.amplitude_table(series.final, kvals=[1.0])
    freqs = diag.frequency_table(series, [1.0])
    assert diag.standing_wave_pairs(amps, freqs) == []


def test_dominant_wavenumber_and_zero_state(small_basis):
    cfg = _config()
    state = init_single_mode(cfg, 2.5, 1, 1e-3)
    assert diag.dominant_wavenumber(state, small_basis) == pytest.approx(2.5)
    with pytest.raises(DiagnosticError):
        diag.dominant_wavenumber(empty_state(cfg), small_basis)


def test_velocity_field_fundamental_antisymmetry(small_basis):
    cfg = _config()
    state = init_single_mode(cfg, 2.0, 1, 1e-2)
    r, z, ur, uz = diag.velocity_field_rz(state, small_basis,
                                          selector="fundamental", nz_out=64)
    # single harmonic: u_r(r, z + lambda/2) = -u_r(r, z)
    half = len(z) // 2
    assert np.allclose(np.roll(ur, -half, axis=1), -ur, atol=1e-12 * np.abs(ur).max())
    assert len(z) == 64 and len(r) == small_basis.grid.n_r


def test_velocity_field_mean_selector_is_z_independent(small_basis):
    cfg = _config()
    state = init_single_mode(cfg, 2.0, 1, 1e-2)
    state.a[0, state.k_index(0.0)] = 0.5
    state.enforce_reality()
    r, z, ur, uz = diag.velocity_field_rz(state, small_basis, selector="mean")
    assert np.ptp(uz, axis=1).max() < 1e-14 * max(np.abs(uz).max(), 1e-30)


def test_classify_resonances_contains_harmonic_triad(small_basis):
    cfg = _config(energy_every=1.0)
    series = _synthetic_series(cfg, {1: 0.0}, amp=0.25)
    # stationary harmonic content at k = 2 in every snapshot
    for _, state in series.snapshots:
        j2 = state.k_index(2.0)
        state.a[0, j2] = 0.1 / cfg.dk
        state.a[0, len(cfg.kgrid) - 1 - j2] = 0.1 / cfg.dk
    series.energy_t = [series.snapshots[-1][0]]
    series.energy_e = [diag.energy_spectrum(series.final, small_basis)]
    kinds = {(res.kind, res.k_in, res.k_out)
             for res in diag.classify_resonances(series, small_basis)}
    assert ("mean-flow-trio", (1.0, 0.0), 1.0) in kinds
    assert ("quartet", (1.0, 1.0, -1.0), 1.0) in kinds
    assert ("harmonic", (1.0, 1.0), 2.0) in kinds
