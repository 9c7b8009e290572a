"""Plot-ready output files: cell-average CSV, legacy VTK and run logs."""
import os

import numpy as np

from . import euler


def cell_average_fields(space, U, gamma):
    """``(rho, velocity (dim, n), p, e)`` evaluated from cell averages."""
    Ub = space.averages(U)
    rho = Ub[0]
    vel = Ub[1:-1] / rho
    re = euler.rho_e(Ub)
    return rho, vel, (gamma - 1.0) * re, re / rho


def write_csv_1d(path, space, U, gamma):
    rho, vel, p, e = cell_average_fields(space, U, gamma)
    x = space.mesh.centers[:, 0]
    with open(path, "w") as fh:
        fh.write("x,rho,u,p,e\n")
        for row in zip(x, rho, vel[0], p, e):
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")


def _lattice(mesh, values):
    grid = np.full(mesh.lattice_to_cell.shape, np.nan)
    active = mesh.lattice_to_cell >= 0
    grid[active] = values[mesh.lattice_to_cell[active]]
    return grid


def write_2d(stem, space, U, gamma, t=None):
    """Write ``stem.vtk`` and ``stem.csv`` with rho, p, e and |u| on the
    bounding cell lattice; inactive cells hold NaN."""
    mesh = space.mesh
    rho, vel, p, e = cell_average_fields(space, U, gamma)
    speed = np.sqrt(np.sum(vel * vel, axis=0))
    fields = {"rho": rho, "p": p, "e": e, "speed": speed}
    grids = {k: _lattice(mesh, v) for k, v in fields.items()}
    ny, nx = mesh.lattice_to_cell.shape
    origin = mesh.origin + 0.5 * mesh.dx
    with open(stem + ".vtk", "w") as fh:
        fh.write("# vtk DataFile Version 3.0\n")
        fh.write(f"cell averages{'' if t is None else f' t={t:.17g}'}\n")
        fh.write("ASCII\nDATASET STRUCTURED_POINTS\n")
        fh.write(f"DIMENSIONS {nx} {ny} 1\n")
        fh.write(f"ORIGIN {origin[0]:.17g} {origin[1]:.17g} 0\n")
        fh.write(f"SPACING {mesh.dx:.17g} {mesh.dx:.17g} 1\n")
        fh.write(f"POINT_DATA {nx * ny}\n")
        for name, grid in grids.items():
            fh.write(f"SCALARS {name} double 1\nLOOKUP_TABLE default\n")
            for v in grid.ravel():
                fh.write(f"{v:.17g}\n")
    ys, xs = np.meshgrid(origin[1] + mesh.dx * np.arange(ny),
                         origin[0] + mesh.dx * np.arange(nx), indexing="ij")
    with open(stem + ".csv", "w") as fh:
        fh.write("x,y,rho,p,e,speed\n")
        cols = [xs.ravel(), ys.ravel()] + [g.ravel() for g in grids.values()]
        for row in zip(*cols):
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")


def write_state(stem, space, U, gamma, t=None):
    if space.dim == 1:
        write_csv_1d(stem + ".csv", space, U, gamma)
    else:
        write_2d(stem, space, U, gamma, t)


class OutputWriter:
    """Writes snapshots, the final state and the step log into a directory."""

    def __init__(self, directory):
        self.directory = directory
        os.makedirs(directory, exist_ok=True)

    def snapshot(self, sim, U, t, step):
        write_state(os.path.join(self.directory, f"snapshot_{step:06d}"), sim.space, U,
                    sim.gas.gamma, t)

    def finish(self, sim, U, t, step, clog):
        write_state(os.path.join(self.directory, "final"), sim.space, U, sim.gas.gamma, t)
        clog.write_csv(os.path.join(self.directory, "log.csv"))
