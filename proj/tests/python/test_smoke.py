"""Smoke tests for the Python bindings.

These exercise the binding surface end to end (config round trip, an
in-memory run checked against the analytic plane-wave solution, the
coupled ledger invariants, and the Madelung post-processing); the deep
numerical verification lives in the C++ doctest suites.
"""

import math

import numpy as np
import pytest

import sfsim

COUPLED_INI = """
[grid]
dim = 2
resolution = 16 16

[model]
lambda = 1.0
mu = 1.0
nu = 0.1
m = 0.5
M = 2.0
epsilon = 0.1

[truncation]
cutoff = 4

[initial]
kind = composite
psi_kind = random_smooth
psi_amplitude = 0.3
seed = 42
u_kind = taylor_green
u_amplitude = 0.2
u_wavevector = 1 1
density = sine_perturbed
density_base = 1.0
density_amplitude = 0.2
density_wavevector = 1 0

[stepper]
type = rk4
dt = 0.001
t_end = 0.02

[output]
interval = 1
"""


def test_config_round_trip():
    cfg = sfsim.RunConfig()
    text = cfg.serialize()
    again = sfsim.parse_config(text)
    assert again.serialize() == text

    cfg.dim = 2
    cfg.resolution = [16, 16, 1]
    cfg.cutoff = 4
    cfg.dt = 5e-4
    cfg.t_end = 0.01
    cfg.params.nu = 0.25
    back = sfsim.parse_config(cfg.serialize())
    assert back.resolution == [16, 16, 1]
    assert back.dt == 5e-4
    assert back.params.nu == 0.25
    back.validate()


def test_config_errors_are_raised():
    with pytest.raises(RuntimeError, match="line"):
        sfsim.parse_config("[grid]\nbogus = 1\n")
    bad = sfsim.RunConfig()
    bad.dt = -1.0
    with pytest.raises(RuntimeError):
        bad.validate()


PLANE_INI = """
[grid]
dim = 2
resolution = 16 16

[model]
lambda = 0.0
mu = 1.0
nu = 0.1
m = 0.5
M = 2.0
epsilon = 0.1

[truncation]
cutoff = 4

[initial]
kind = plane_wave
amplitude = 1.0
wavevector = 1 0

[stepper]
type = rk4
dt = 0.001
t_end = 0.02

[output]
interval = 1
"""


def test_free_plane_wave_matches_analytic_solution():
    cfg = sfsim.parse_config(PLANE_INI)
    report = sfsim.run(cfg, write_files=False)
    assert report.outcome == "completed"
    assert report.t_final == pytest.approx(0.02)

    # psi(x, t) = A exp(i (k.x - omega t)), omega = |k|^2/2 + mu |A|^2 = 1.5
    n = cfg.resolution[0]
    x = 2.0 * math.pi * np.arange(n) / n
    phase = np.exp(1j * (x[:, None] - 1.5 * report.t_final))
    exact = np.broadcast_to(phase, (n, n))
    assert report.psi.shape == (n, n)
    assert np.max(np.abs(report.psi - exact)) < 1e-10


def test_coupled_run_invariants():
    cfg = sfsim.parse_config(COUPLED_INI)
    report = sfsim.run(cfg, write_files=False)
    assert report.outcome == "completed"
    assert report.steps == 20
    assert len(report.records) == 21

    total = np.array([r.mass_total for r in report.records])
    assert np.max(np.abs(total - total[0]) / total[0]) < 1e-10

    mass_psi = np.array([r.mass_psi for r in report.records])
    assert np.all(np.diff(mass_psi) <= 1e-10 * mass_psi[:-1])

    residual = np.array([r.energy_residual for r in report.records])
    assert np.max(np.abs(residual)) < 1e-9

    g = sfsim.gronwall_monitor(report.records)
    assert g.x0 > 0.0

    rho = report.rho
    assert rho.shape == (16, 16)
    assert rho.min() >= cfg.params.eps
    assert len(report.velocity) == 2


def test_run_writes_and_reads_diagnostics(tmp_path):
    cfg = sfsim.parse_config(COUPLED_INI)
    report = sfsim.run(cfg, output_dir=str(tmp_path / "out"))
    back = sfsim.read_diagnostics(str(tmp_path / "out" / "diagnostics.csv"))
    assert len(back) == len(report.records)
    assert back[-1].mass_total == report.records[-1].mass_total
    assert (tmp_path / "out" / "final.ckpt").exists()


def test_madelung_circulation_quantized():
    n = 64
    x = 2.0 * math.pi * np.arange(n) / n
    psi = np.cos(x)[:, None] + 1j * np.cos(x)[None, :]
    lengths = [2.0 * math.pi, 2.0 * math.pi]

    gamma = sfsim.circulation(psi, lengths, [math.pi / 2, math.pi / 2, 0.0], 1.0)
    assert gamma == pytest.approx(2.0 * math.pi, abs=1e-6)

    density, velocity, valid = sfsim.madelung(psi, lengths, 1e-9)
    assert density.shape == (n, n)
    assert len(velocity) == 2
    assert valid.dtype == np.bool_
    assert density == pytest.approx(np.abs(psi) ** 2, abs=1e-10)
