"""Uniform square-cell meshes over unions of axis-aligned boxes.

A mesh is an active-cell mask on a bounding lattice.  Active cells are
numbered lexicographically by lattice coordinate with x running fastest.
Interior faces point from the cell with the lower lattice coordinate along
the face axis into the higher one; periodic wrap faces point from the last
cell of a lattice row into the first.  Boundary faces carry an outward
normal and a pair of tags (hyperbolic, parabolic).
"""
from dataclasses import dataclass, field
from functools import cached_property
import math
from typing import Any, Callable, Optional, Sequence, Union

import numpy as np

from .errors import CoverageError, SnapError

_SNAP_TOL = 1e-9


# hyperbolic boundary tags --------------------------------------------------

@dataclass(frozen=True)
class Interior:
    pass


@dataclass(frozen=True)
class Periodic:
    pass


@dataclass(frozen=True)
class Inflow:
    """Prescribed exterior state, either a constant conserved vector or
    ``f(x, t) -> (nvar, npts)`` for points ``x`` of shape ``(npts, dim)``."""

    state: Union[Sequence[float], Callable]

    def __post_init__(self):
        if not callable(self.state):
            object.__setattr__(self, "state", tuple(float(v) for v in self.state))


@dataclass(frozen=True)
class Outflow:
    pass


@dataclass(frozen=True)
class Reflective:
    pass


@dataclass(frozen=True)
class PostShock:
    shock: Any  # euler.MovingShock


# parabolic boundary tags ---------------------------------------------------

@dataclass(frozen=True)
class Neumann:
    pass


@dataclass(frozen=True)
class DirichletVelEnergy:
    """Dirichlet data for the implicit solve.

    ``velocity(x, t)`` returns ``(npts, dim)`` and ``energy(x, t)`` returns
    ``(npts,)`` specific internal energy.  Constants are accepted too.
    """

    velocity: Union[Sequence[float], Callable]
    energy: Union[float, Callable]

    def __post_init__(self):
        if not callable(self.velocity):
            object.__setattr__(self, "velocity", tuple(float(v) for v in self.velocity))

    def eval_velocity(self, x, t):
        if callable(self.velocity):
            return np.asarray(self.velocity(x, t), dtype=float)
        return np.broadcast_to(np.asarray(self.velocity, dtype=float), x.shape).copy()

    def eval_energy(self, x, t):
        if callable(self.energy):
            return np.asarray(self.energy(x, t), dtype=float)
        return np.full(len(x), float(self.energy))


@dataclass(frozen=True)
class FaceTag:
    hyperbolic: Any
    parabolic: Any


@dataclass(frozen=True)
class Segment:
    """Boundary piece normal to ``axis`` at ``coord``, spanning ``[lo, hi]``
    along the tangential axis (ignored in 1D)."""

    axis: int
    coord: float
    lo: float = -math.inf
    hi: float = math.inf
    tag: FaceTag = field(default_factory=lambda: FaceTag(Outflow(), Neumann()))


@dataclass(frozen=True)
class DomainSpec:
    """``rectangles`` is a list of ``(lo, hi)`` corner pairs."""

    rectangles: Sequence[tuple]
    boundary_segments: Sequence[Segment] = ()
    periodic_axes: frozenset = frozenset()

    @property
    def dim(self):
        return len(np.atleast_1d(self.rectangles[0][0]))


def _snap(value, dx, what):
    q = value / dx
    n = round(q)
    if abs(q - n) > _SNAP_TOL * max(1.0, abs(q)):
        raise SnapError(f"{what} = {value!r} is not a multiple of dx = {dx!r}")
    return int(n)


@dataclass(frozen=True, eq=False)
class Mesh:
    dim: int
    dx: float
    origin: np.ndarray          # physical coordinate of lattice index 0
    shape: tuple                # bounding lattice size per axis
    cells: np.ndarray           # (ncell, dim) lattice coordinates
    lattice_to_cell: np.ndarray # lattice array of cell ids, -1 when inactive
    int_minus: np.ndarray       # interior faces
    int_plus: np.ndarray
    int_axis: np.ndarray
    bnd_cell: np.ndarray        # boundary faces
    bnd_face: np.ndarray        # local face id 2*axis + side
    bnd_tag: np.ndarray         # index into ``tags``
    tags: tuple
    periodic_axes: frozenset

    @property
    def ncells(self):
        return len(self.cells)

    @property
    def n_interior_faces(self):
        return len(self.int_minus)

    @property
    def n_boundary_faces(self):
        return len(self.bnd_cell)

    @property
    def nfaces(self):
        return self.n_interior_faces + self.n_boundary_faces

    @property
    def h(self):
        """Cell diameter."""
        return math.sqrt(self.dim) * self.dx

    @cached_property
    def centers(self):
        return self.origin + (self.cells + 0.5) * self.dx

    def interior_faces_on_axis(self, axis):
        sel = self.int_axis == axis
        return self.int_minus[sel], self.int_plus[sel]

    @cached_property
    def boundary_groups(self):
        """``{(local_face, tag_index): cell ids}`` with unique cells per group."""
        groups = {}
        for f in range(2 * self.dim):
            for ti in range(len(self.tags)):
                sel = (self.bnd_face == f) & (self.bnd_tag == ti)
                if np.any(sel):
                    groups[(f, ti)] = self.bnd_cell[sel]
        return groups

    def face_normal(self, face):
        fid = int(face)
        n = np.zeros(self.dim)
        if fid < self.n_interior_faces:
            n[self.int_axis[fid]] = 1.0
        else:
            axis, side = divmod(int(self.bnd_face[fid - self.n_interior_faces]), 2)
            n[axis] = 1.0 if side else -1.0
        return n


def build_mesh(spec: DomainSpec, dx: float) -> Mesh:
    if not dx > 0:
        raise SnapError(f"dx must be positive, got {dx!r}")
    dim = spec.dim
    boxes = []
    for lo, hi in spec.rectangles:
        lo = np.atleast_1d(np.asarray(lo, dtype=float))
        hi = np.atleast_1d(np.asarray(hi, dtype=float))
        ilo = [_snap(v, dx, "rectangle corner") for v in lo]
        ihi = [_snap(v, dx, "rectangle corner") for v in hi]
        if any(b <= a for a, b in zip(ilo, ihi)):
            raise SnapError(f"degenerate rectangle {lo}..{hi} at dx = {dx}")
        boxes.append((ilo, ihi))
    for seg in spec.boundary_segments:
        _snap(seg.coord, dx, "segment position")
        for v in (seg.lo, seg.hi):
            if dim > 1 and math.isfinite(v):
                _snap(v, dx, "segment end")

    base = np.min([b[0] for b in boxes], axis=0)
    top = np.max([b[1] for b in boxes], axis=0)
    shape = tuple(int(v) for v in top - base)
    # lattice arrays are indexed [i_y, i_x] so that C order is x fastest
    active = np.zeros(shape[::-1], dtype=bool)
    for ilo, ihi in boxes:
        sl = tuple(slice(a - b0, c - b0) for a, c, b0 in zip(ilo, ihi, base))
        active[sl[::-1]] = True

    for axis in spec.periodic_axes:
        if len(boxes) != 1:
            raise SnapError("periodic axes require a single rectangular domain")

    lattice_to_cell = -np.ones(active.shape, dtype=int)
    flat = np.flatnonzero(active.ravel())
    lattice_to_cell.ravel()[flat] = np.arange(len(flat))
    cells = np.array(np.unravel_index(flat, active.shape)).T[:, ::-1].copy()
    origin = base * dx

    tags = []
    tag_index = {}
    int_m, int_p, int_a = [], [], []
    bnd_c, bnd_f, bnd_t = [], [], []
    for axis in range(dim):
        nb_up = np.full(len(cells), -1)
        nb_dn = np.full(len(cells), -1)
        for sign, out in ((1, nb_up), (-1, nb_dn)):
            shifted = cells.copy()
            shifted[:, axis] += sign
            if axis in spec.periodic_axes:
                shifted[:, axis] %= shape[axis]
            inside = np.all((shifted >= 0) & (shifted < np.array(shape)), axis=1)
            idx = tuple(shifted[inside, ::-1].T)
            out[inside] = lattice_to_cell[idx]
        have = np.flatnonzero(nb_up >= 0)
        int_m.append(have)
        int_p.append(nb_up[have])
        int_a.append(np.full(len(have), axis))
        for side, nb in ((0, nb_dn), (1, nb_up)):
            for cid in np.flatnonzero(nb < 0):
                tag = _cover(spec, dim, dx, origin, cells[cid], axis, side)
                if tag not in tag_index:
                    tag_index[tag] = len(tags)
                    tags.append(tag)
                bnd_c.append(cid), bnd_f.append(2 * axis + side), bnd_t.append(tag_index[tag])

    order = np.lexsort((np.array(bnd_f, dtype=int), np.array(bnd_c, dtype=int)))
    as_int = lambda v: np.asarray(v, dtype=int)
    return Mesh(
        dim=dim, dx=float(dx), origin=origin, shape=shape, cells=cells,
        lattice_to_cell=lattice_to_cell,
        int_minus=np.concatenate(int_m), int_plus=np.concatenate(int_p),
        int_axis=np.concatenate(int_a),
        bnd_cell=as_int(bnd_c)[order], bnd_face=as_int(bnd_f)[order],
        bnd_tag=as_int(bnd_t)[order], tags=tuple(tags),
        periodic_axes=frozenset(spec.periodic_axes),
    )


def _cover(spec, dim, dx, origin, cell, axis, side):
    coord = origin[axis] + (cell[axis] + side) * dx
    tangential = [origin[b] + (cell[b] + 0.5) * dx for b in range(dim) if b != axis]
    hits = []
    for seg in spec.boundary_segments:
        if seg.axis != axis or abs(seg.coord - coord) > _SNAP_TOL * max(dx, abs(coord)):
            continue
        if tangential and not seg.lo <= tangential[0] <= seg.hi:
            continue
        hits.append(seg)
    where = f"face {2 * axis + side} of cell {tuple(int(v) for v in cell)}"
    if not hits:
        raise CoverageError(f"boundary {where} is not covered by any segment")
    if len(hits) > 1 and len({h.tag for h in hits}) > 1:
        raise CoverageError(f"boundary {where} is covered by conflicting segments")
    return hits[0].tag


def face_neighbors(mesh: Mesh, face: int):
    """Return ``(cell, neighbour cell or FaceTag, unit normal)``.

    Face ids enumerate interior faces first, then boundary faces.
    """
    fid = int(face)
    if not 0 <= fid < mesh.nfaces:
        raise IndexError(f"face id {fid} out of range")
    n = mesh.face_normal(fid)
    if fid < mesh.n_interior_faces:
        return int(mesh.int_minus[fid]), int(mesh.int_plus[fid]), n
    b = fid - mesh.n_interior_faces
    return int(mesh.bnd_cell[b]), mesh.tags[mesh.bnd_tag[b]], n


def closed_surface_residual(mesh: Mesh):
    """Per-cell sum of face measure times outward normal; zero for valid meshes."""
    acc = np.zeros((mesh.ncells, mesh.dim))
    meas = mesh.dx ** (mesh.dim - 1)
    for f in range(mesh.n_interior_faces):
        n = mesh.face_normal(f)
        acc[mesh.int_minus[f]] += meas * n
        acc[mesh.int_plus[f]] -= meas * n
    for b in range(mesh.n_boundary_faces):
        acc[mesh.bnd_cell[b]] += meas * mesh.face_normal(mesh.n_interior_faces + b)
    return acc
