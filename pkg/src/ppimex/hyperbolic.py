"""Nodal DG discretisation of the Euler equations and positivity-preserving
SSP-RK3 time stepping with adaptive step halving.

Fields are stored as arrays of shape ``(nvar, ncells, nloc)`` holding the
nodal (Gauss-Lobatto) coefficients of every conserved variable.
"""
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Optional

import numpy as np

from . import euler, kernels
from .basis import NodalBasis, build_point_sets
from .errors import AverageNotAdmissible, MaxHalvings, NonAdmissible

MAX_HALVINGS = 40


class DGSpace:
    """Discrete space plus all per-point evaluation matrices for one mesh."""

    def __init__(self, mesh, k):
        self.mesh = mesh
        self.k = k
        self.dim = mesh.dim
        self.nvar = mesh.dim + 2
        self.basis = NodalBasis(k, mesh.dim)
        self.ps = build_point_sets(k, mesh.dim)
        self.nloc = self.basis.nloc
        self.dx = mesh.dx
        b, ps = self.basis, self.ps
        self.w = b.weights
        self.V_vol = b.eval(ps.vol)
        self.G_vol = b.grad(ps.vol)
        self.V_face = [b.eval(ps.face[f]) for f in range(2 * self.dim)]
        self.V_H = b.eval(ps.h_points)
        self.V_HP = np.vstack([self.V_H, np.eye(self.nloc)])

    @property
    def ncells(self):
        return self.mesh.ncells

    @cached_property
    def node_coords(self):
        return self.mesh.centers[:, None, :] + self.dx * self.basis.nodes[None]

    @cached_property
    def vol_coords(self):
        return self.mesh.centers[:, None, :] + self.dx * self.ps.vol[None]

    @cached_property
    def vol_points(self):
        return self.vol_coords.reshape(-1, self.dim)

    @cached_property
    def node_points(self):
        return self.node_coords.reshape(-1, self.dim)

    def face_coords(self, f, cells):
        return self.mesh.centers[cells][:, None, :] + self.dx * self.ps.face[f][None]

    @cached_property
    def boundary_data(self):
        """Per boundary group: (local face, hyperbolic tag, cells, points, normal)."""
        out = []
        for (f, ti), cells in self.mesh.boundary_groups.items():
            axis, side = divmod(f, 2)
            n = np.zeros(self.dim)
            n[axis] = 1.0 if side else -1.0
            out.append((f, self.mesh.tags[ti].hyperbolic, cells, self.face_coords(f, cells), n))
        return out

    @cached_property
    def interior_data(self):
        out = []
        for axis in range(self.dim):
            m, p = self.mesh.interior_faces_on_axis(axis)
            n = np.zeros(self.dim)
            n[axis] = 1.0
            out.append((axis, m, p, n))
        return out

    @cached_property
    def face_nodes(self):
        """Per local face: indices of the nodes with a nonzero trace there and
        the reduced evaluation matrix at the face points."""
        out = []
        for V in self.V_face:
            idx = np.flatnonzero(np.any(V != 0.0, axis=0))
            out.append((idx, np.ascontiguousarray(V[:, idx])))
        return out

    # field utilities -----------------------------------------------------

    def averages(self, U):
        return U @ self.w

    def interpolate(self, func):
        """Nodal interpolant of ``func(x) -> (nvar, npts)``."""
        x = self.node_coords.reshape(-1, self.dim)
        vals = np.asarray(func(x), dtype=float)
        return vals.reshape(vals.shape[0], self.ncells, self.nloc)

    def totals(self, U):
        """Domain integrals of each variable with the Gauss volume rule."""
        return self.dx ** self.dim * np.einsum("vcq,q->v", U @ self.V_vol.T, self.ps.vol_weights)

    def at_points(self, U, which="H"):
        V = {"H": self.V_H, "HP": self.V_HP, "vol": self.V_vol}[which]
        return U @ V.T


@dataclass
class DGField:
    space: DGSpace
    U: np.ndarray

    def average(self):
        return self.space.averages(self.U)

    def evaluate(self, cell, xhat):
        return self.U[:, cell] @ self.space.basis.eval(np.reshape(xhat, (1, -1)))[0]

    def totals(self):
        return self.space.totals(self.U)


@dataclass
class StageReport:
    accepted: bool
    halvings: int
    dt_used: float
    min_rho: float
    min_rho_e: float


_NO_CELLS = np.zeros(0, dtype=np.int64)


def _faces(space, U, t, gamma, R=None):
    """Accumulate face fluxes into ``R`` (if given); return the largest
    face wave speed.  Raises NonAdmissible on a non-admissible trace."""
    U = np.ascontiguousarray(U)
    lift = R is not None
    if R is None:
        R = np.empty((1, 1, 1))
    wf = space.ps.face_weights
    amax = 0.0
    for axis, m, p, _ in space.interior_data:
        if not len(m):
            continue
        im, Vm = space.face_nodes[2 * axis + 1]
        ip, Vp = space.face_nodes[2 * axis]
        a = kernels.lf_faces(kernels.face_trace(U, m, im, Vm), kernels.face_trace(U, p, ip, Vp),
                             axis, 1.0, gamma, wf, m, im, Vm, p, ip, Vp, R, lift)
        if a == kernels.BAD_TRACE:
            raise NonAdmissible("non-admissible trace on a face")
        amax = max(amax, a)
    for f, tag, cells, x, n in space.boundary_data:
        axis, side = divmod(f, 2)
        idx, V = space.face_nodes[f]
        Ui = kernels.face_trace(U, cells, idx, V)
        Ug = np.ascontiguousarray(euler.ghost_state(tag, Ui, n, x, t, gamma), dtype=float)
        a = kernels.lf_faces(Ui, Ug, axis, 1.0 if side else -1.0, gamma, wf, cells, idx, V,
                             _NO_CELLS, idx, V, R, lift)
        if a == kernels.BAD_TRACE:
            raise NonAdmissible("non-admissible trace on a boundary face")
        amax = max(amax, a)
    return amax


def max_face_speed(space, U, t, gamma):
    """Largest face wave speed over all faces and face points."""
    return _faces(space, U, t, gamma)


def dg_residual(space, U, t, gamma, source=None):
    """Time derivative of the nodal coefficients.

    ``source(x, t) -> (nvar, npts)`` is an optional forcing integrated with
    the Gauss volume rule.
    """
    U = np.ascontiguousarray(U)
    F = kernels.weighted_flux(U @ space.V_vol.T, space.ps.vol_weights, gamma)
    R = F[0] @ space.G_vol[0]
    for a in range(1, space.dim):
        R += F[a] @ space.G_vol[a]
    _faces(space, U, t, gamma, R)
    R /= space.dx * space.w
    if source is not None:
        S = np.asarray(source(space.vol_points, t), dtype=float)
        S = S.reshape(space.nvar, space.ncells, -1)
        R += ((S * space.ps.vol_weights) @ space.V_vol) / space.w
    return R


class _Reject(Exception):
    pass


def _limit_in_place(space, U, eps, which):
    P = U @ {"H": space.V_H, "HP": space.V_HP}[which].T
    return kernels.check_and_limit(U, P, U @ space.w, eps)


def limit_on(space, U, eps, which="H"):
    """Apply the positivity limiter with check points ``which`` ("H" or "HP")."""
    out = np.array(U, dtype=float, order="C")
    bad = _limit_in_place(space, out, eps, which)
    if bad >= 0:
        raise AverageNotAdmissible(f"cell {bad} has a non-admissible average")
    return out


def _check_and_limit(space, U, eps, which):
    out = np.ascontiguousarray(U)
    if _limit_in_place(space, out, eps, which) >= 0:
        raise _Reject
    return out


def point_minima(space, U, which="H"):
    P = space.at_points(U, which)
    return float(np.min(P[0])), float(np.min(euler.rho_e(P)))


def ssp_rk3_adaptive(space, U, dt_target, t, gamma, eps, limit_sets="H",
                     source=None, max_halvings=MAX_HALVINGS):
    """One positivity-preserving SSP-RK3 step, halving ``dt`` on rejection.

    A stage is rejected when any cell average leaves the ``eps``-admissible
    set (or a trace becomes non-admissible); the whole step then restarts
    from ``U`` with half the step size.  ``limit_sets`` selects the check
    points of the final stage ("H" or "HP").
    """
    dt = float(dt_target)
    L = lambda V, s: dg_residual(space, V, s, gamma, source)
    for halvings in range(max_halvings + 1):
        try:
            with np.errstate(all="ignore"):
                U1 = _check_and_limit(space, U + dt * L(U, t), eps, "H")
                U2 = 0.75 * U + 0.25 * (U1 + dt * L(U1, t + dt))
                U2 = _check_and_limit(space, U2, eps, "H")
                U3 = U / 3.0 + 2.0 / 3.0 * (U2 + dt * L(U2, t + 0.5 * dt))
                U3 = _check_and_limit(space, U3, eps, limit_sets)
        except (_Reject, NonAdmissible):
            dt *= 0.5
            continue
        rmin, emin = point_minima(space, U3, limit_sets)
        return U3, StageReport(True, halvings, dt, rmin, emin)
    raise MaxHalvings(f"no admissible step after {max_halvings} halvings at t = {t}")


@dataclass
class HyperbolicReport:
    substeps: int = 0
    halvings: int = 0
    min_rho: float = np.inf
    min_rho_e: float = np.inf


def advance_hyperbolic(space, U, t_from, t_to, dt_trial, gamma, eps,
                       limit_final_P=False, source=None, max_halvings=MAX_HALVINGS):
    """March the Euler system from ``t_from`` to ``t_to`` in substeps of at
    most ``dt_trial``; the last substep is clipped to land on ``t_to``."""
    rep = HyperbolicReport()
    t = t_from
    span = t_to - t_from
    while t < t_to:
        dt = min(dt_trial, t_to - t)
        U, st = ssp_rk3_adaptive(space, U, dt, t, gamma, eps, "H", source, max_halvings)
        t = t_to if t_to - (t + st.dt_used) <= 1e-14 * max(1.0, abs(span), abs(t_to)) else t + st.dt_used
        rep.substeps += 1
        rep.halvings += st.halvings
        rep.min_rho = min(rep.min_rho, st.min_rho)
        rep.min_rho_e = min(rep.min_rho_e, st.min_rho_e)
    if limit_final_P:
        U = limit_on(space, U, eps, "HP")
    return U, rep
