"""Command line entry point.

Exit status: 0 on success, 1 for configuration errors, 2 when the scheme
itself fails (non-admissible state, exhausted budgets, failed solves).
"""
import argparse
import logging
import os
import sys

import numpy as np

from . import linalg
from .config import load_config
from .convergence import format_table, mms_convergence
from .errors import ConfigError, NumericalFailure, PPIMEXError, TooLarge
from .outputs import OutputWriter
from .parabolic import assemble_energy_system
from .scenarios import get_scenario, scenario_catalog
from .strang import Simulation, run_simulation, trial_timestep

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 1, 2


def _cmd_run(args):
    cfg = load_config(args.config)
    out = args.output or cfg.output_dir or os.path.join("output", cfg.scenario)
    res = run_simulation(cfg, writer=OutputWriter(out))
    rows = res.log.rows
    drift = res.log.relative_drift()
    print(f"{cfg.scenario}/{cfg.preset}: k={cfg.k} dx={cfg.dx:.6g} cells={res.sim.mesh.ncells} "
          f"steps={res.steps} t={res.t:.6g}")
    print(f"min rho={min(r[5] for r in rows):.6e} min rhoe={min(r[6] for r in rows):.6e} "
          f"halvings={sum(r[3] for r in rows)} doublings={sum(r[4] for r in rows)}")
    print("relative drift rho,mx,my,E: " + ",".join(f"{v:.3e}" for v in drift))
    print(f"outputs written to {out}")
    return EXIT_OK


def _cmd_convergence(args):
    cfg = load_config(args.config)
    spec = get_scenario(cfg.scenario, cfg.gas)
    dx_list = cfg.convergence_dx or (spec.convergence_dx or {}).get(cfg.k)
    if spec.exact is None:
        raise ConfigError(f"scenario {cfg.scenario!r} has no exact solution")
    if not dx_list:
        raise ConfigError("no mesh sequence: set convergence_dx")
    rows = mms_convergence(cfg.k, dx_list, base=cfg)
    table = format_table(rows)
    print(table)
    out = args.output or cfg.output_dir
    if out:
        os.makedirs(out, exist_ok=True)
        with open(os.path.join(out, "convergence.csv"), "w") as fh:
            fh.write(table + "\n")
    return EXIT_OK


def _cmd_verify_matrix(args):
    cfg = load_config(args.config)
    sim = Simulation(cfg)
    U = sim.initial_state()
    dt = cfg.dt_fixed or trial_timestep(sim.space, U, sim.gas, cfg.cfl_a)
    if args.dt is not None:
        dt = args.dt
    rho = U[0].ravel()
    n = rho.size
    d = sim.space.dim
    en = assemble_energy_system(sim.ops, rho, rho, np.ones(n), np.zeros(d * n), dt, sim.gas)
    A = en.matrix
    rep = linalg.mmatrix_sign_check(A)
    try:
        rep.inverse_min = linalg.inverse_nonneg_check(A, args.max_dense)
    except TooLarge as exc:
        print(f"dense inverse skipped: {exc}")
    print(f"energy system ({cfg.ipdg.energy_variant}), size {A.shape[0]}, nnz {A.nnz}, dt={dt:.6g}")
    print(f"diagonal positive: {rep.diag_positive}")
    print(f"off-diagonal nonpositive: {rep.offdiag_nonpositive}")
    print(f"row sums nonnegative: {rep.rowsums_nonnegative} (some positive: {rep.some_rowsum_positive})")
    if rep.inverse_min is not None:
        print(f"min entry of inverse: {rep.inverse_min:.6e}")
    print(f"verdict: {rep.verdict}")
    if args.dump:
        linalg.dump_coo(A, args.dump)
    return EXIT_OK


def _cmd_list(args):
    for name, spec in scenario_catalog().items():
        print(f"{name}: {spec.description}")
        for pname, p in spec.presets.items():
            mark = "*" if pname == spec.default_preset else " "
            print(f"  {mark} {pname}: k={p.k} dx={p.dx:.6g} a={p.cfl_a} Re={p.reynolds} T={p.t_end}")
    return EXIT_OK


def build_parser():
    ap = argparse.ArgumentParser(prog="ppimex", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = ap.add_subparsers(dest="command", required=True)
    p = sub.add_parser("run", help="run one configuration to its end time")
    p.add_argument("config")
    p.add_argument("-o", "--output", help="output directory (overrides output_dir)")
    p.set_defaults(func=_cmd_run)
    p = sub.add_parser("convergence", help="manufactured-solution refinement study")
    p.add_argument("config")
    p.add_argument("-o", "--output")
    p.set_defaults(func=_cmd_convergence)
    p = sub.add_parser("verify-matrix", help="monotonicity checks of the energy system")
    p.add_argument("config")
    p.add_argument("--dt", type=float, help="time step (default: dt_fixed or the trial step)")
    p.add_argument("--max-dense", type=int, default=2000, help="size limit for the dense inverse")
    p.add_argument("--dump", help="write the matrix as sorted COO triplets")
    p.set_defaults(func=_cmd_verify_matrix)
    p = sub.add_parser("list-scenarios", help="show scenarios and presets")
    p.set_defaults(func=_cmd_list)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalFailure as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except PPIMEXError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
