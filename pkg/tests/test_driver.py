import math
import os
from dataclasses import replace

import numpy as np
import pytest

from conftest import interval
from ppimex import euler
from ppimex.cli import main
from ppimex.config import RunConfig, parse_config
from ppimex.convergence import mms_convergence, rate
from ppimex.errors import ConfigError
from ppimex.hyperbolic import DGSpace
from ppimex.mesh import build_mesh
from ppimex.mms import MmsSolution
from ppimex.outputs import OutputWriter, write_state
from ppimex.scenarios import get_scenario, scenario_catalog
from ppimex.strang import Simulation, run_simulation, strang_step, trial_timestep

GAS = euler.GasParams()


# configuration ---------------------------------------------------------------

def test_parse_config_fractions_and_sections():
    cfg = parse_config("[run]\nscenario = mms\npreset = q3\n[mesh]\ndx = 1/4\n[time]\nt_end = 1e-3\n")
    assert cfg.dx == 0.25 and cfg.k == 3 and cfg.energy_variant == "SEM"
    assert cfg.dt_fixed == 2.0 ** -4 * 1e-4 and cfg.t_end == 1e-3
    assert cfg.sigma_int == 0.0 and cfg.conductivity == 1.0


@pytest.mark.parametrize("text", [
    "[a]\nscenario = mms\nbogus = 1\n",
    "[a]\nscenario = mms\n[b]\nscenario = lax\n",
    "[a]\nk = 1\n",
    "[a]\nscenario = mms\nk = 4\n",
    "[a]\nscenario = nowhere\n",
    "[a]\nscenario = mms\ndx = abc\n",
    "[a]\nscenario = mms\nk = 2\nenergy_variant = Q1_IIPG\n",
])
def test_parse_config_errors(text):
    with pytest.raises(ConfigError):
        parse_config(text)


# time step -------------------------------------------------------------------

def _uniform(sp, rho, u, p):
    U0 = euler.from_primitive(rho, u, p, GAS.gamma)
    return np.ascontiguousarray(np.broadcast_to(U0[:, None, None], (sp.nvar, sp.ncells, sp.nloc)))


def test_trial_timestep_example():
    sp = DGSpace(build_mesh(interval(0.0, 1.0, periodic=True), 0.01), 1)
    dt = trial_timestep(sp, _uniform(sp, 1.4, [0.0], 1.0), GAS, 0.5)
    assert abs(dt - 0.0025) < 1e-15


def test_trial_timestep_monotone_in_speed():
    sp = DGSpace(build_mesh(interval(0.0, 1.0, periodic=True), 0.01), 2)
    a = trial_timestep(sp, _uniform(sp, 1.4, [3.0], 1.0), GAS, 1.0)
    b = trial_timestep(sp, _uniform(sp, 1.4, [6.0], 1.0), GAS, 1.0)
    assert a / 2 < b < a
    assert abs(a - sp.ps.omega_hat * 0.01 / 4.0) < 1e-15


# Strang step -----------------------------------------------------------------

def _periodic(k, **kw):
    return Simulation(RunConfig(scenario="periodic_smooth", preset=f"q{k}", **kw).resolved())


@pytest.mark.parametrize("k", [1, 2, 3])
def test_equilibrium_step(k):
    sim = _periodic(k)
    U = _uniform(sim.space, 1.1, [0.3, 0.2], 0.9)
    out, rep = strang_step(sim, U, 0.0, 0.01)
    np.testing.assert_allclose(out, U, rtol=1e-11, atol=1e-12)
    assert rep.halvings == 0 and rep.doublings == 0


@pytest.mark.parametrize("k", [1, 2, 3])
def test_conservation_per_step(k):
    sim = _periodic(k)
    U = sim.initial_state()
    scale = np.abs(sim.space.totals(U))
    scale[1:3] = scale[0] + scale[3]
    t = 0.0
    for _ in range(3):
        before = sim.space.totals(U)
        dt = trial_timestep(sim.space, U, sim.gas, sim.cfg.cfl_a)
        U, rep = strang_step(sim, U, t, dt)
        t = rep.t
        assert np.all(np.abs(sim.space.totals(U) - before) <= 1e-11 * scale)


def test_strang_symmetry_order():
    # manufactured problem with the forcing switched off
    sim = Simulation(RunConfig(scenario="mms", preset="q1", dx=1 / 8).resolved())
    sim.spec.source_H = sim.spec.source_P = None
    U = sim.initial_state()

    def gap(dt):
        one, _ = strang_step(sim, U, 0.0, dt)
        half, _ = strang_step(sim, U, 0.0, dt / 2)
        two, _ = strang_step(sim, half, dt / 2, dt / 2)
        return np.abs(one - two).max()

    order = math.log2(gap(2.5e-4) / gap(1.25e-4))
    assert order >= 1.8


def test_double_rarefaction_steps_stay_positive():
    cfg = RunConfig(scenario="double_rarefaction", max_steps=40).resolved()
    res = run_simulation(cfg)
    rows = res.log.rows
    assert res.steps == 40
    assert min(r[5] for r in rows) > 0 and min(r[6] for r in rows) > 0
    assert np.all(np.isfinite(res.U))


def test_replay_is_deterministic():
    cfg = RunConfig(scenario="double_rarefaction", max_steps=15).resolved()
    a = run_simulation(cfg).log.rows
    b = run_simulation(cfg).log.rows
    assert a == b


def test_zero_end_time_round_trip(tmp_path):
    cfg = RunConfig(scenario="sedov", t_end=0.0).resolved()
    res = run_simulation(cfg, writer=OutputWriter(str(tmp_path)))
    assert res.steps == 0 and res.t == 0.0
    np.testing.assert_array_equal(res.U, res.sim.initial_state())
    assert (tmp_path / "final.vtk").exists() and (tmp_path / "log.csv").exists()


def test_end_time_hit_exactly():
    cfg = RunConfig(scenario="lax", t_end=0.013).resolved()
    res = run_simulation(cfg)
    assert res.t == 0.013
    assert res.log.rows[-1][1] == 0.013


# presets ---------------------------------------------------------------------

def test_catalog_has_six_benchmarks():
    assert sorted(scenario_catalog()) == sorted(["lax", "double_rarefaction", "sedov",
                                                 "shock_diffraction", "double_mach",
                                                 "reflection_diffraction"])


def test_lax_right_state():
    spec = get_scenario("lax")
    U = spec.initial(np.array([[3.0]]), np.array([[3.0]]), 0.1)
    np.testing.assert_allclose(U[:, 0], euler.from_primitive(0.5, [0.0], 0.571, 1.4))


def test_sedov_energy():
    spec = get_scenario("sedov")
    dx = 1.1 / 80
    xc = np.array([[dx / 2, dx / 2], [0.5, 0.5]])
    U = spec.initial(xc, xc, dx)
    assert abs(U[-1, 0] - 0.244816 / dx ** 2) < 1e-10
    assert U[-1, 1] == 1e-12


def test_double_mach_post_shock_state():
    spec = get_scenario("double_mach")
    x = np.array([[0.0, 0.5]])
    U = spec.initial(x, x, 1 / 60)
    np.testing.assert_allclose(U[1:3, 0] / U[0, 0], [4.125 * math.sqrt(3), -4.125], rtol=1e-14)


# manufactured solution -------------------------------------------------------

def _d(f, x, axis, h=1e-3):
    """Fourth-order central difference of ``f(x)`` along ``axis``."""
    e = np.zeros(x.shape[1])
    e[axis] = h
    return (-f(x + 2 * e) + 8 * f(x + e) - 8 * f(x - e) + f(x - 2 * e)) / (12 * h)


def test_split_forcing_matches_navier_stokes_residual(rng):
    sol = MmsSolution(GAS)
    x = rng.uniform(0.1, 0.9, (25, 2))
    t = 0.03
    g, Re, lam = GAS.gamma, GAS.reynolds, GAS.lam
    U = lambda y, s=t: sol.exact_U(y, s)

    def euler_flux(y, a):
        return euler.advective_flux(U(y), g)[a]

    def visc_flux(y, a):
        vel = lambda z: sol.velocity(z, t).T
        G = np.array([[_d(lambda z: vel(z)[i], y, j) for j in range(2)] for i in range(2)])
        div = G[0, 0] + G[1, 1]
        tau = G + G.transpose(1, 0, 2) - (2 / 3) * div * np.eye(2)[:, :, None]
        v = vel(y)
        de = _d(lambda z: sol.energy(z, t), y, a)
        return np.array([np.zeros(len(y)), tau[0, a], tau[1, a],
                         tau[a, 0] * v[0] + tau[a, 1] * v[1] + lam * de]) / Re

    dt_ = 1e-4
    dUdt = (-U(x, t + 2 * dt_) + 8 * U(x, t + dt_) - 8 * U(x, t - dt_) + U(x, t - 2 * dt_)) / (12 * dt_)
    resid = dUdt + sum(_d(lambda y: euler_flux(y, a), x, a) - _d(lambda y: visc_flux(y, a), x, a)
                       for a in range(2))
    total = sol.source_H(x, t) + sol.source_P(x, t)
    assert np.abs(total - resid).max() <= 1e-6 * max(1.0, np.abs(resid).max())


def test_projection_error_rates():
    for k in (1, 2, 3):
        dxs = (1 / 8, 1 / 16) if k < 3 else (1 / 4, 1 / 8)
        rows = mms_convergence(k, dxs, t_end=0.0)
        assert all(r.steps == 0 for r in rows)
        assert abs(rows[1].rate_rho - (k + 1)) < 0.15


def test_rate_formula():
    assert rate(4.0, 1.0) == 2.0


# outputs and command line ----------------------------------------------------

def test_csv_output(tmp_path):
    sim = Simulation(RunConfig(scenario="lax").resolved())
    U = sim.initial_state()
    write_state(str(tmp_path / "s"), sim.space, U, 1.4)
    lines = (tmp_path / "s.csv").read_text().splitlines()
    assert lines[0] == "x,rho,u,p,e"
    assert len(lines) == 513
    row = [float(v) for v in lines[1].split(",")]
    assert abs(row[1] - 0.445) < 1e-15 and abs(row[3] - 3.528) < 1e-12


def test_vtk_output_marks_inactive_cells(tmp_path):
    sim = Simulation(RunConfig(scenario="shock_diffraction").resolved())
    write_state(str(tmp_path / "s"), sim.space, sim.initial_state(), 1.4, t=0.0)
    text = (tmp_path / "s.vtk").read_text()
    assert text.startswith("# vtk DataFile Version 3.0")
    assert "DATASET STRUCTURED_POINTS" in text and "SCALARS rho double 1" in text
    assert "nan" in text
    assert (tmp_path / "s.csv").read_text().splitlines()[0] == "x,y,rho,p,e,speed"


def _write(tmp_path, body):
    path = tmp_path / "run.cfg"
    path.write_text(body)
    return str(path)


def test_cli_run(tmp_path, capsys):
    cfg = _write(tmp_path, "[run]\nscenario = lax\nt_end = 0.01\n")
    assert main(["run", cfg, "-o", str(tmp_path / "out")]) == 0
    assert (tmp_path / "out" / "final.csv").exists()
    assert "outputs written" in capsys.readouterr().out


def test_cli_config_error(tmp_path):
    assert main(["run", _write(tmp_path, "[run]\nscenario = lax\nbogus = 2\n")]) == 1
    assert main(["run", str(tmp_path / "missing.cfg")]) == 1


def test_cli_numerical_failure(tmp_path):
    cfg = _write(tmp_path, "[run]\nscenario = double_rarefaction\ncfl_a = 40\nmax_halvings = 0\n")
    assert main(["run", cfg, "-o", str(tmp_path / "o")]) == 2


def test_cli_verify_matrix(tmp_path, capsys):
    cfg = _write(tmp_path, "[run]\nscenario = mms\npreset = q1\ndx = 1/4\n")
    assert main(["verify-matrix", cfg, "--dump", str(tmp_path / "A.txt")]) == 0
    out = capsys.readouterr().out
    assert "verdict: M-matrix by sign pattern" in out
    assert (tmp_path / "A.txt").exists()


def test_cli_convergence(tmp_path, capsys):
    cfg = _write(tmp_path, "[run]\nscenario = mms\npreset = q1\nt_end = 0\n"
                           "convergence_dx = 1/8, 1/16\n")
    assert main(["convergence", cfg, "-o", str(tmp_path)]) == 0
    assert (tmp_path / "convergence.csv").read_text().startswith("dx,err_rho")


def test_cli_list(capsys):
    assert main(["list-scenarios"]) == 0
    assert "double_mach" in capsys.readouterr().out
