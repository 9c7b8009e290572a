"""Mesh-refinement study against the manufactured solution."""
from dataclasses import dataclass, replace
import math

from .config import RunConfig
from .mms import l2h_errors
from .strang import run_simulation


@dataclass
class ConvergenceRow:
    dx: float
    err_rho: float
    err_m: float
    err_E: float
    rate_rho: float = math.nan
    rate_m: float = math.nan
    rate_E: float = math.nan
    steps: int = 0


def rate(e_coarse, e_fine, ratio=2.0):
    return math.log(e_coarse / e_fine) / math.log(ratio)


def mms_convergence(k, dx_list, dt_fixed=None, t_end=None, base=None):
    """Run the manufactured problem on each mesh and tabulate L2_h errors.

    ``base`` is an optional RunConfig whose non-mesh settings are reused.
    """
    base = base or RunConfig(scenario="mms")
    rows = []
    for dx in dx_list:
        cfg = replace(base, scenario="mms", preset=f"q{k}", k=k, dx=dx,
                      dt_fixed=dt_fixed if dt_fixed is not None else base.dt_fixed,
                      t_end=t_end if t_end is not None else base.t_end,
                      energy_variant=None, sigma_int=None, sigma_bdy=None,
                      sigma_tilde=None).resolved()
        res = run_simulation(cfg)
        errs = l2h_errors(res.sim.space, res.U, res.sim.spec.exact, res.t)
        row = ConvergenceRow(dx, *errs, steps=res.steps)
        if rows:
            prev = rows[-1]
            r = prev.dx / dx
            row.rate_rho = rate(prev.err_rho, row.err_rho, r)
            row.rate_m = rate(prev.err_m, row.err_m, r)
            row.rate_E = rate(prev.err_E, row.err_E, r)
        rows.append(row)
    return rows


def format_table(rows):
    lines = ["dx,err_rho,rate_rho,err_m,rate_m,err_E,rate_E,steps"]
    for r in rows:
        lines.append(f"{r.dx:.6g},{r.err_rho:.6e},{r.rate_rho:.4f},{r.err_m:.6e},"
                     f"{r.rate_m:.4f},{r.err_E:.6e},{r.rate_E:.4f},{r.steps}")
    return "\n".join(lines)
