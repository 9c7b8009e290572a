"""Strang-split IMEX time stepping: explicit Euler half-steps around an
implicit viscous step, with the adaptive step control of the full scheme."""
from dataclasses import dataclass, field
import logging
import math

import numpy as np

from . import euler
from .errors import BudgetExceeded, NegativeEnergy, NonAdmissible, NumericalFailure
from .hyperbolic import DGSpace, advance_hyperbolic, limit_on, max_face_speed, point_minima
from .mesh import build_mesh
from .parabolic import Q1_IIPG, ParabolicOperators, solve_parabolic_step
from .scenarios import get_scenario

log = logging.getLogger(__name__)


class Simulation:
    """Mesh, discrete spaces and operators for one resolved RunConfig."""

    def __init__(self, cfg):
        self.cfg = cfg
        self.gas = cfg.gas
        self.spec = get_scenario(cfg.scenario, self.gas)
        self.mesh = build_mesh(self.spec.domain, cfg.dx)
        self.space = DGSpace(self.mesh, cfg.k)
        self.ops = ParabolicOperators(self.space, cfg.ipdg)

    def initial_state(self):
        """Nodal interpolant of the initial data followed by the limiter."""
        sp = self.space
        x = sp.node_coords.reshape(-1, sp.dim)
        xc = np.repeat(self.mesh.centers, sp.nloc, axis=0)
        U = np.asarray(self.spec.initial(x, xc, self.cfg.dx), dtype=float)
        U = U.reshape(sp.nvar, sp.ncells, sp.nloc)
        eps = euler.floor_from_averages(sp.averages(U), self.cfg.floor_cap)
        return limit_on(sp, U, eps, "HP")


def trial_timestep(space, U, gas, cfl_a, t=0.0):
    """``a * omega_hat * dx / max alpha`` over all faces and face points."""
    alpha = max_face_speed(space, U, t, gas.gamma)
    return cfl_a * space.ps.omega_hat * space.dx / alpha


@dataclass
class StepReport:
    t: float
    dt: float
    halvings: int
    doublings: int
    min_rho: float
    min_rhoe: float
    eps: float
    min_e_parabolic: float


def strang_step(sim, U, t, dt, dt_trial=None, t_end=None):
    """Advance ``U`` from ``t`` by one splitting step of size ``dt``.

    ``dt_trial`` bounds the explicit substeps (defaults to ``dt``).  When the
    implicit energy solve loses positivity the whole step is restarted from
    ``U`` with twice the step, never past ``t_end``.
    """
    cfg, sp, gas = sim.cfg, sim.space, sim.gas
    dt_sub = dt if dt_trial is None else dt_trial
    eps = euler.floor_from_averages(sp.averages(U), cfg.floor_cap)
    src_H, src_P = sim.spec.source_H, sim.spec.source_P
    doublings = 0
    while True:
        step_eps = eps
        U_H, r1 = advance_hyperbolic(sp, U, t, t + 0.5 * dt, dt_sub, gas.gamma, step_eps,
                                     limit_final_P=True, source=src_H,
                                     max_halvings=cfg.max_halvings)
        U_P, prep = solve_parabolic_step(sim.ops, U_H, dt, gas, t, src_P, cfg.solver_policy,
                                         on_negative="return")
        retry = False
        if not prep.min_e > 0:
            if cfg.energy_variant == Q1_IIPG:
                raise NegativeEnergy(prep.min_e_node, prep.min_e)
            retry = cfg.doubling_trigger == "node"
        if not retry:
            Ubar = sp.averages(U_P)
            if not np.all(euler.in_G_eps(Ubar, step_eps)):
                if np.all(euler.in_G_eps(Ubar, 0.0) & (Ubar[0] > 0) & (euler.rho_e(Ubar) > 0)):
                    step_eps = min(step_eps, euler.floor_from_averages(Ubar, cfg.floor_cap))
                elif cfg.energy_variant == Q1_IIPG:
                    raise NonAdmissible(f"non-admissible cell average after the viscous step at t = {t}")
                else:
                    retry = True
        if retry:
            if doublings >= cfg.max_doublings:
                raise BudgetExceeded(f"energy stayed negative after {doublings} doublings at t = {t}")
            new_dt = 2.0 * dt
            if t_end is not None and t + new_dt > t_end:
                new_dt = t_end - t
            if not new_dt > dt:
                raise BudgetExceeded(f"cannot double the step at t = {t} without passing the end time")
            log.debug("negative energy at t=%g, restarting with dt=%g", t, new_dt)
            dt = new_dt
            doublings += 1
            continue
        U_P = limit_on(sp, U_P, step_eps, "H")
        U_new, r2 = advance_hyperbolic(sp, U_P, t + 0.5 * dt, t + dt, dt_sub, gas.gamma, step_eps,
                                       source=src_H, max_halvings=cfg.max_halvings)
        if not np.all(np.isfinite(U_new)):
            raise NonAdmissible(f"non-finite values after the step at t = {t}")
        rmin, emin = point_minima(sp, U_new, "H")
        return U_new, StepReport(t + dt, dt, r1.halvings + r2.halvings, doublings,
                                 rmin, emin, step_eps, prep.min_e)


LOG_HEADER = ("step", "t", "dt", "halvings", "doublings", "min_rho", "min_rhoe",
              "total_rho", "total_mx", "total_my", "total_E")


@dataclass
class ConservationLog:
    rows: list = field(default_factory=list)

    def record(self, step, t, dt, halvings, doublings, min_rho, min_rhoe, totals):
        totals = list(totals)
        mom = totals[1:-1] + [0.0] * (4 - len(totals))
        self.rows.append((step, t, dt, halvings, doublings, min_rho, min_rhoe,
                          totals[0], mom[0], mom[1], totals[-1]))

    @property
    def totals(self):
        return np.array([r[7:] for r in self.rows])

    def relative_drift(self):
        """Largest change of each total relative to its initial magnitude.
        A momentum total that starts at zero is measured against the
        mass plus energy scale instead."""
        T = self.totals
        ref = np.abs(T[0]).copy()
        ref[1:3] = np.where(ref[1:3] > 0, ref[1:3], np.abs(T[0, 0]) + np.abs(T[0, 3]))
        return np.max(np.abs(T - T[0]), axis=0) / ref

    def write_csv(self, path):
        with open(path, "w") as fh:
            fh.write(",".join(LOG_HEADER) + "\n")
            for r in self.rows:
                fh.write(",".join([str(r[0])] + [f"{v:.17g}" for v in r[1:3]]
                                  + [str(r[3]), str(r[4])] + [f"{v:.17g}" for v in r[5:]]) + "\n")


@dataclass
class SimulationResult:
    sim: Simulation
    U: np.ndarray
    t: float
    steps: int
    log: ConservationLog


def run_simulation(cfg, writer=None, sim=None, U0=None):
    """March a resolved RunConfig to its end time.

    ``writer`` (see ``outputs.OutputWriter``) receives snapshots at the
    configured cadence and the final state and logs.  Failures are re-raised
    with the failing time attached as ``exc.time``.
    """
    sim = sim or Simulation(cfg)
    sp = sim.space
    U = sim.initial_state() if U0 is None else U0
    T = float(cfg.t_end)
    t, step = 0.0, 0
    clog = ConservationLog()
    rmin, emin = point_minima(sp, U, "H")
    clog.record(0, 0.0, 0.0, 0, 0, rmin, emin, sp.totals(U))
    fixed_steps = None
    if cfg.dt_fixed is not None:
        n = T / cfg.dt_fixed
        if abs(n - round(n)) < 1e-9 * max(1.0, n):
            fixed_steps = int(round(n))
    try:
        while t < T and (fixed_steps is None or step < fixed_steps):
            if cfg.max_steps is not None and step >= cfg.max_steps:
                break
            dt_trial = cfg.dt_fixed or trial_timestep(sp, U, sim.gas, cfg.cfl_a, t)
            dt = min(dt_trial, T - t)
            U, rep = strang_step(sim, U, t, dt, dt_trial=dt_trial, t_end=T)
            step += 1
            if fixed_steps is not None:
                t = T if step == fixed_steps else step * cfg.dt_fixed
            else:
                t = T if T - rep.t <= 1e-12 * max(1.0, T) else rep.t
            clog.record(step, t, rep.dt, rep.halvings, rep.doublings, rep.min_rho,
                        rep.min_rhoe, sp.totals(U))
            if writer is not None and cfg.output_every and step % cfg.output_every == 0:
                writer.snapshot(sim, U, t, step)
    except NumericalFailure as exc:
        exc.time = t
        exc.args = (f"{exc.args[0] if exc.args else exc} (at t = {t:.6g}, step {step})",)
        if writer is not None:
            writer.finish(sim, U, t, step, clog)
        raise
    if writer is not None:
        writer.finish(sim, U, t, step, clog)
    return SimulationResult(sim, U, t, step, clog)
