"""Smoke tests for the python bindings: a few frozen oracle values per module."""

import math
import os
import subprocess
import sys

import numpy as np
import pytest

import gravfluid as gf

ETA = np.diag([-1.0, 1.0, 1.0, 1.0])
E0 = np.array([1.0, 0.0, 0.0, 0.0])


def test_makino_round_trip():
    eos = gf.EquationOfState(K=1.0, gamma=5.0 / 3.0)
    assert gf.makino_forward(8.0, eos) == pytest.approx(2.0)
    eos2 = gf.EquationOfState(K=1.0, gamma=2.0)
    for eps in (0.0, 0.5, 3.2):
        assert gf.makino_inverse(gf.makino_forward(eps, eos2), eos2) == pytest.approx(eps)
    with pytest.raises(RuntimeError):
        gf.makino_forward(-1.0, eos)


def test_rest_fluid_characteristic_speeds():
    eos = gf.EquationOfState(K=1.0, gamma=2.0)
    speeds = gf.characteristic_speeds(ETA, E0, 0.5, eos, (1.0, 0.0, 0.0))
    sigma = eos.sound_speed(0.5)
    assert sigma == pytest.approx(math.sqrt(0.5))
    assert speeds == pytest.approx([-sigma, 0.0, 0.0, 0.0, sigma], abs=1e-10)


def test_characteristic_polynomial_on_the_sound_cone():
    eos = gf.EquationOfState(K=1.0, gamma=2.0)
    w = 0.5 / math.sqrt(2.0)  # sigma = 0.5
    assert gf.characteristic_polynomial(ETA, E0, w, eos, (0.5, 1.0, 0.0, 0.0)) == pytest.approx(
        0.0, abs=1e-12
    )
    kappa = eos.kappa(w)
    assert gf.characteristic_polynomial(ETA, E0, w, eos, (1.0, 0.0, 0.0, 0.0)) == pytest.approx(
        kappa * kappa
    )


def test_fluid_matrices_are_symmetric():
    eos = gf.EquationOfState(K=0.8, gamma=1.9)
    A = gf.fluid_matrices(ETA, E0, 0.3, eos)
    assert A.shape == (4, 5, 5)
    for nu in range(4):
        assert np.array_equal(A[nu], A[nu].T)


def test_coupled_blocks_at_the_origin():
    eos = gf.EquationOfState(K=1.3, gamma=1.8)
    blocks = gf.assemble_point(np.zeros(55), eos)
    assert np.array_equal(blocks["A0"], np.eye(55))
    for key in ("A1", "A2", "A3"):
        assert np.all(blocks[key] == 0.0)
    assert np.count_nonzero(blocks["C1"]) == 20


def test_gauge_completion_hand_value():
    n, ext = (8, 1, 1), (6.28, 1.0, 1.0)
    h = np.zeros((8, 1, 1, 6))
    K = np.zeros((8, 1, 1, 6))
    for d in (0, 3, 5):  # diagonal sym3 slots
        h[..., d] = 1.0
        K[..., d] = 0.1
    g, dtg = gf.complete_gauge_data(h, K, n, ext)
    assert dtg[..., 0] == pytest.approx(0.6)  # dt g_00 = 2 h^ab K_ab
    assert g[..., 0] == pytest.approx(-1.0)


def test_norm_engine_monotonicity():
    n, ext = (128, 1, 1), (8.0, 8.0, 8.0)
    x = -4.0 + 8.0 * np.arange(128) / 128
    u = np.exp(-2.0 * x * x).reshape(128, 1, 1, 1)
    lo = gf.norm_hs_delta(u, n, ext, s=1.0, delta=0.0)
    hi = gf.norm_hs_delta(u, n, ext, s=2.0, delta=0.5)
    assert 0.0 < lo <= hi


def test_bessel_potential_identity_at_s0():
    n, ext = (64, 1, 1), (6.283185307179586, 1.0, 1.0)
    x = -ext[0] / 2 + ext[0] * np.arange(64) / 64
    u = np.sin(x).reshape(64, 1, 1, 1)
    out = gf.bessel_potential(u, n, ext, 0.0)
    assert np.allclose(out, u, atol=1e-12)


def test_scenario_parse_and_window_warning():
    sc = gf.parse_scenario("name = t\ngrid { nx = 16 }\n")
    assert sc["name"] == "t"
    assert sc["warnings"] == []
    sc = gf.parse_scenario("grid { nx = 16 }\neos { gamma = 2.5 }\n")
    assert len(sc["warnings"]) == 1
    with pytest.raises(ValueError):
        gf.parse_scenario("grid { nx == 16 }\n")


def test_run_vacuum_scenario(tmp_path):
    out = gf.run_scenario(
        "name = vac\ngrid { nx = 16 }\nevolve { t_end = 0.2 monitor_every = 2 }\n",
        str(tmp_path),
    )
    assert out["pass"]
    assert (tmp_path / "monitors.csv").exists()
    assert (tmp_path / "summary.json").exists()
    for row in out["monitors"]:
        assert row["norm_drift"] == 0.0
        assert row["harmonic_residual"] == 0.0


def test_cli_runs_when_available(tmp_path):
    cli = os.environ.get("GRAVFLUID_CLI")
    if not cli or not os.path.exists(cli):
        pytest.skip("CLI path not provided")
    scn = tmp_path / "vac.scn"
    scn.write_text("name = vac\ngrid { nx = 16 }\nevolve { t_end = 0.2 }\n")
    proc = subprocess.run(
        [cli, "--out", str(tmp_path / "out"), "run", str(scn)],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert "PASS" in proc.stdout
