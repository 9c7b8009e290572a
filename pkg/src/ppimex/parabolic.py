"""Interior-penalty discretisation of the viscous subproblem.

All integrals use the tensor Gauss-Lobatto rule whose nodes are the basis
nodes, so every operator is written as a product of sparse "evaluation"
matrices and diagonal weight matrices:

* ``G[a]``   nodal derivative along axis ``a`` (block diagonal),
* ``Sm/Sp``  selection of the minus/plus trace at each face node,
* ``J``      jump ``Sm - Sp`` (the trace itself on Dirichlet faces),
* ``Av``     average (the trace itself on Dirichlet faces),
* ``P[c]``   extraction of velocity component ``c`` from an interleaved
  vector field (index ``node * dim + c``).

Faces entering the penalty and consistency sums are the interior faces
(periodic wrap faces included) and the Dirichlet faces; Neumann faces
contribute nothing.
"""
from dataclasses import dataclass
from functools import cached_property
from typing import Optional

import numpy as np
import scipy.sparse as sp

from . import euler, linalg
from .errors import ConfigError, NegativeEnergy, NonPositiveDensity
from .mesh import DirichletVelEnergy

Q1_IIPG = "Q1_IIPG"
SEM = "SEM"


@dataclass(frozen=True)
class IPDGParams:
    sigma_int: float = 2.0
    sigma_bdy: float = 4.0
    sigma_tilde: float = 2.0
    energy_variant: str = Q1_IIPG

    def __post_init__(self):
        if self.sigma_int < 0 or self.sigma_bdy < 0:
            raise ConfigError("NIPG penalties must be nonnegative")
        if self.energy_variant not in (Q1_IIPG, SEM):
            raise ConfigError(f"unknown energy variant {self.energy_variant!r}")

    @classmethod
    def defaults(cls, k):
        if k == 1:
            return cls(2.0, 4.0, 2.0, Q1_IIPG)
        return cls(0.0, 0.0, 0.0, SEM)


def _diag(v):
    return sp.diags(np.asarray(v, dtype=float))


def _form(L, w, R):
    """``L^T diag(w) R``."""
    return (L.T @ _diag(w) @ R).tocsr()


class SemDofMap:
    """Continuous degrees of freedom shared by coincident Gauss-Lobatto nodes."""

    def __init__(self, space):
        mesh, b = space.mesh, space.basis
        k = space.k
        lat = (mesh.cells[:, None, :] * k + b.multi_index[None]).reshape(-1, space.dim)
        for axis in mesh.periodic_axes:
            lat[:, axis] %= mesh.shape[axis] * k
        _, self.dof_of_node = np.unique(lat, axis=0, return_inverse=True)
        self.dof_of_node = self.dof_of_node.ravel()
        self.ndofs = int(self.dof_of_node.max()) + 1
        n = len(self.dof_of_node)
        self.S = sp.csr_matrix((np.ones(n), (np.arange(n), self.dof_of_node)), shape=(n, self.ndofs))


class BlockOperator:
    """Sparse operator on a uniform mesh applied block by block.

    ``vol`` acts inside every cell; ``faces`` holds ``(m, p, Bmm, Bmp, Bpm,
    Bpp)`` for groups of interior faces and ``bfaces`` ``(cells, B)`` for
    boundary faces.  Within one group each cell appears at most once.
    """

    def __init__(self, ncells, vol, faces=(), bfaces=()):
        self.ncells = ncells
        self.bs = vol.shape[0]
        self.vol = vol
        self.faces = list(faces)
        self.bfaces = list(bfaces)
        # each group as one (nface, sides*bs) @ (sides*bs, sides*bs) product
        self._groups = []
        for m, p, Bmm, Bmp, Bpm, Bpp in self.faces:
            self._groups.append((np.column_stack([m, p]), np.block([[Bmm, Bmp], [Bpm, Bpp]]).T.copy()))
        for cells, B in self.bfaces:
            self._groups.append((np.asarray(cells)[:, None], B.T.copy()))

    @property
    def shape(self):
        n = self.ncells * self.bs
        return (n, n)

    def matvec(self, x):
        X = np.asarray(x, dtype=float).reshape(self.ncells, self.bs)
        Y = X @ self.vol.T
        bs = self.bs
        for cells, W in self._groups:
            Z = X[cells].reshape(len(cells), -1) @ W
            for s in range(cells.shape[1]):
                Y[cells[:, s]] += Z[:, s * bs:(s + 1) * bs]
        return Y.ravel()

    def diagonal(self):
        D = np.tile(np.diag(self.vol), (self.ncells, 1))
        for m, p, Bmm, _, _, Bpp in self.faces:
            D[m] += np.diag(Bmm)
            D[p] += np.diag(Bpp)
        for cells, B in self.bfaces:
            D[cells] += np.diag(B)
        return D.ravel()

    def toarray(self):
        return np.column_stack([self.matvec(e) for e in np.eye(self.shape[0])])


class _Congruence:
    """``S^T A S`` for a 0/1 scatter ``S`` and a block operator ``A``."""

    def __init__(self, S, A):
        self.S, self.A = S, A
        self.ST = S.T.tocsr()
        # Jacobi diagonal (exact unless two nodes of one cell share a dof)
        self._diag = self.ST @ A.diagonal()

    def matvec(self, x):
        return self.ST @ self.A.matvec(self.S @ x)

    def diagonal(self):
        return self._diag


def _template(space, params, nx, dirichlet_face=None):
    """Operators on a 1- or 2-cell mesh with the same spacing and degree.

    ``nx`` gives the number of cells along each axis; all boundary faces
    are Neumann except ``dirichlet_face`` (local face id of cell 0).
    """
    from .hyperbolic import DGSpace
    from .mesh import DomainSpec, FaceTag, Neumann, Outflow, Segment, build_mesh
    d, dx = space.dim, space.dx
    hi = tuple(n * dx for n in nx)
    neu = FaceTag(Outflow(), Neumann())
    segs = []
    for axis in range(d):
        for side, coord in ((0, 0.0), (1, hi[axis])):
            tag = neu
            if dirichlet_face == 2 * axis + side:
                tag = FaceTag(Outflow(), DirichletVelEnergy((0.0,) * d, 1.0))
            segs.append(Segment(axis, coord, tag=tag))
    mesh = build_mesh(DomainSpec([((0.0,) * d, hi)], segs), dx)
    return ParabolicOperators(DGSpace(mesh, space.k), params)


class ParabolicOperators:
    """Mesh-dependent (but state-independent) sparse forms."""

    def __init__(self, space, params: IPDGParams):
        self.space = space
        self.params = params
        mesh, b = space.mesh, space.basis
        d, nloc, dx = space.dim, space.nloc, space.dx
        self.dim = d
        self.N = N = mesh.ncells * nloc
        self.h = mesh.h
        self.Wv = np.tile(dx ** d * b.weights, mesh.ncells)
        Dref = b.grad(b.nodes)
        eye_c = sp.identity(mesh.ncells, format="csr")
        self.G = [sp.kron(eye_c, sp.csr_matrix(Dref[a] / dx), format="csr") for a in range(d)]
        eye_n = sp.identity(N, format="csr")
        self.P = []
        for c in range(d):
            e = np.zeros((1, d))
            e[0, c] = 1.0
            self.P.append(sp.kron(eye_n, sp.csr_matrix(e), format="csr"))

        w1 = b.rule1d.weights
        rows_m, rows_p, wts, nrm, sig, isbnd, xs, dtags = [], [], [], [], [], [], [], []
        for axis in range(d):
            jm, jp = b.face_nodes(2 * axis + 1), b.face_nodes(2 * axis)
            tw = np.ones(len(jm))
            for bb in range(d):
                if bb != axis:
                    tw = tw * w1[b.multi_index[jm, bb]]
            m, p = mesh.interior_faces_on_axis(axis)
            if not len(m):
                continue
            rows_m.append((m[:, None] * nloc + jm[None]).ravel())
            rows_p.append((p[:, None] * nloc + jp[None]).ravel())
            cnt = len(m) * len(jm)
            wts.append(np.tile(tw, len(m)) * dx ** (d - 1))
            n = np.zeros((cnt, d))
            n[:, axis] = 1.0
            nrm.append(n)
            sig.append(np.full(cnt, params.sigma_int))
            isbnd.append(np.zeros(cnt, dtype=bool))
            xs.append(space.node_coords[m][:, jm].reshape(-1, d))
            dtags.append(np.full(cnt, -1))
        self.dirichlet_tags = []
        for (f, ti), cells in mesh.boundary_groups.items():
            tag = mesh.tags[ti].parabolic
            if not isinstance(tag, DirichletVelEnergy):
                continue
            axis, side = divmod(f, 2)
            jf = b.face_nodes(f)
            tw = np.ones(len(jf))
            for bb in range(d):
                if bb != axis:
                    tw = tw * w1[b.multi_index[jf, bb]]
            cnt = len(cells) * len(jf)
            rows_m.append((cells[:, None] * nloc + jf[None]).ravel())
            rows_p.append(np.full(cnt, -1))
            wts.append(np.tile(tw, len(cells)) * dx ** (d - 1))
            n = np.zeros((cnt, d))
            n[:, axis] = 1.0 if side else -1.0
            nrm.append(n)
            sig.append(np.full(cnt, params.sigma_bdy))
            isbnd.append(np.ones(cnt, dtype=bool))
            xs.append(space.node_coords[cells][:, jf].reshape(-1, d))
            dtags.append(np.full(cnt, len(self.dirichlet_tags)))
            self.dirichlet_tags.append(tag)

        cat = lambda v, shape: np.concatenate(v) if v else np.zeros(shape)
        col_m = cat(rows_m, 0).astype(int)
        col_p = cat(rows_p, 0).astype(int)
        self.nF = nF = len(col_m)
        self.Wf = cat(wts, 0)
        self.normal = cat(nrm, (0, d))
        self.sigma = cat(sig, 0)
        self.is_dir = cat(isbnd, 0).astype(bool)
        self.face_x = cat(xs, (0, d))
        self.face_tag = cat(dtags, 0).astype(int)
        self.face_node_m = col_m
        r = np.arange(nF)
        self.Sm = sp.csr_matrix((np.ones(nF), (r, col_m)), shape=(nF, N))
        hp = col_p >= 0
        self.Sp = sp.csr_matrix((np.ones(hp.sum()), (r[hp], col_p[hp])), shape=(nF, N))
        self.J = (self.Sm - self.Sp).tocsr()
        self.Av = (_diag(np.where(self.is_dir, 1.0, 0.5)) @ (self.Sm + self.Sp)).tocsr()

        self.Dref = Dref / dx

    # composite evaluation matrices (built on demand) ----------------------

    @cached_property
    def E(self):
        d = self.dim
        return [[0.5 * (self.G[bb] @ self.P[a] + self.G[a] @ self.P[bb]) for bb in range(d)]
                for a in range(d)]

    @cached_property
    def Dv(self):
        return sum(self.G[a] @ self.P[a] for a in range(self.dim)).tocsr()

    @cached_property
    def JP(self):
        return [(self.J @ self.P[c]).tocsr() for c in range(self.dim)]

    @cached_property
    def Bc(self):
        d = self.dim
        return [sum(_diag(self.normal[:, bb]) @ self.Av @ self.E[c][bb] for bb in range(d)).tocsr()
                for c in range(d)]

    @cached_property
    def Jn(self):
        return sum(_diag(self.normal[:, c]) @ self.JP[c] for c in range(self.dim)).tocsr()

    @cached_property
    def ADv(self):
        return (self.Av @ self.Dv).tocsr()

    def velocity_gradient(self, u):
        """``g[c, a] = d u_c / d x_a`` at the nodes for interleaved ``u``."""
        d, nloc = self.dim, self.space.nloc
        U = u.reshape(-1, nloc, d)
        return np.stack([np.stack([(U[:, :, c] @ self.Dref[a].T).ravel() for a in range(d)])
                         for c in range(d)])

    # bilinear forms ------------------------------------------------------

    @cached_property
    def A_eps(self):
        d, Wv, Wf = self.dim, self.Wv, self.Wf
        A = sum(_form(self.E[a][bb], 2.0 * Wv, self.E[a][bb]) for a in range(d) for bb in range(d))
        pen = Wf * self.sigma / self.h
        for c in range(d):
            A = A - _form(self.JP[c], 2.0 * Wf, self.Bc[c]) + _form(self.Bc[c], 2.0 * Wf, self.JP[c])
            A = A + _form(self.JP[c], pen, self.JP[c])
        return A.tocsr()

    @cached_property
    def A_lam(self):
        return (-_form(self.Dv, self.Wv, self.Dv) + _form(self.Jn, self.Wf, self.ADv)
                - _form(self.ADv, self.Wf, self.Jn)).tocsr()

    @cached_property
    def stiffness(self):
        return sum(_form(g, self.Wv, g) for g in self.G).tocsr()

    @cached_property
    def A_D(self):
        flux = sum(_diag(self.normal[:, a]) @ self.Av @ self.G[a] for a in range(self.dim))
        pen = self.Wf * self.params.sigma_tilde / self.h
        return (self.stiffness - _form(self.J, self.Wf, flux) + _form(self.J, pen, self.J)).tocsr()

    @cached_property
    def A_visc(self):
        """``A_eps / 2 + A_lam / 3``; the momentum matrix is mass + dt/Re times this."""
        return (0.5 * self.A_eps + self.A_lam / 3.0).tocsr()

    @cached_property
    def sem(self):
        return SemDofMap(self.space)

    # block (matrix-free) forms -------------------------------------------

    def _blocks(self, name, bs):
        """Extract the repeating blocks of form ``name`` from template meshes."""
        d = self.dim
        one = [1] * d
        vol = getattr(_template(self.space, self.params, one), name).toarray()
        faces = []
        for axis in range(d):
            m, p = self.space.mesh.interior_faces_on_axis(axis)
            if not len(m):
                continue
            two = list(one)
            two[axis] = 2
            A = getattr(_template(self.space, self.params, two), name).toarray()
            faces.append((m, p, A[:bs, :bs] - vol, A[:bs, bs:], A[bs:, :bs], A[bs:, bs:] - vol))
        bfaces = []
        mesh = self.space.mesh
        for (f, ti), cells in mesh.boundary_groups.items():
            if isinstance(mesh.tags[ti].parabolic, DirichletVelEnergy):
                A = getattr(_template(self.space, self.params, one, f), name).toarray()
                bfaces.append((cells, A - vol))
        return BlockOperator(mesh.ncells, vol, faces, bfaces)

    @cached_property
    def visc_op(self):
        return self._blocks("A_visc", self.space.nloc * self.dim)

    @cached_property
    def D_op(self):
        return self._blocks("A_D", self.space.nloc)

    @cached_property
    def sem_K_op(self):
        return _Congruence(self.sem.S, self.K_op)

    @cached_property
    def K_op(self):
        vol = _template(self.space, self.params, [1] * self.dim).stiffness.toarray()
        return BlockOperator(self.space.mesh.ncells, vol)

    # boundary data -------------------------------------------------------

    def dirichlet_data(self, t):
        """Velocity ``(nF, dim)`` and energy ``(nF,)`` at face nodes (zero off Dirichlet)."""
        uD = np.zeros((self.nF, self.dim))
        eD = np.zeros(self.nF)
        for i, tag in enumerate(self.dirichlet_tags):
            sel = self.face_tag == i
            uD[sel] = tag.eval_velocity(self.face_x[sel], t).reshape(-1, self.dim)
            eD[sel] = tag.eval_energy(self.face_x[sel], t)
        return uD, eD

    # linear forms --------------------------------------------------------

    def b_tau(self, uD):
        d = self.dim
        w = self.Wf * self.is_dir
        out = np.zeros(self.N * d)
        for c in range(d):
            for bb in range(d):
                out += 2.0 * (self.E[c][bb].T @ (self.Sm.T @ (w * self.normal[:, bb] * uD[:, c])))
            out += self.P[c].T @ (self.Sm.T @ (w * self.sigma / self.h * uD[:, c]))
        un = np.sum(uD * self.normal, axis=1)
        out -= (2.0 / 3.0) * (self.Dv.T @ (self.Sm.T @ (w * un)))
        return out

    def b_eps(self, u, uD=None):
        d = self.dim
        g = self.velocity_gradient(u)
        vol = sum((0.5 * (g[a, bb] + g[bb, a])) ** 2 for a in range(d) for bb in range(d))
        out = 2.0 * self.Wv * vol
        if np.any(self.sigma != 0.0):
            jj = np.zeros(self.nF)
            U = u.reshape(-1, d)
            for c in range(d):
                jc = self.J @ U[:, c]
                if uD is not None:
                    jc = jc - np.where(self.is_dir, uD[:, c], 0.0)
                jj += jc * jc
            out = out + self.Av.T @ (self.Wf * self.sigma / self.h * jj)
        return out

    def b_lam(self, u):
        g = self.velocity_gradient(u)
        div = sum(g[a, a] for a in range(self.dim))
        return -self.Wv * div ** 2

    def b_D(self, eD):
        return self.Sm.T @ (self.Wf * self.is_dir * self.params.sigma_tilde / self.h * eD)


# projections ---------------------------------------------------------------

def project_forward(rho, m, E):
    """Nodal ``(u, e)`` from conserved nodal values; ``m`` has shape ``(dim, ...)``."""
    rho = np.asarray(rho, dtype=float)
    if np.any(~(rho > 0)):
        bad = int(np.flatnonzero(~(np.ravel(rho) > 0))[0])
        raise NonPositiveDensity(f"non-positive density at node {bad}")
    u = np.asarray(m, dtype=float) / rho
    e = np.asarray(E, dtype=float) / rho - 0.5 * np.sum(u * u, axis=0)
    return u, e


def project_backward(rho, u, e):
    u = np.asarray(u, dtype=float)
    m = rho * u
    E = rho * e + 0.5 * rho * np.sum(u * u, axis=0)
    return m, E


def cell_average_admissible_after_parabolic(rho, u, e, eps, weights):
    """Per-cell test that the reconstructed averages lie in ``G^eps``.

    ``rho``, ``e`` have shape ``(ncells, nloc)`` and ``u`` ``(dim, ncells, nloc)``.
    """
    m, E = project_backward(rho, u, e)
    U = np.concatenate([np.asarray(rho)[None], m, np.asarray(E)[None]])
    return euler.in_G_eps(U @ weights, eps)


# assembly ------------------------------------------------------------------

def _interleave(u):
    """``(dim, N)`` -> flat interleaved vector."""
    return np.ascontiguousarray(np.asarray(u).T).ravel()


def _deinterleave(v, d):
    return v.reshape(-1, d).T


def assemble_momentum(ops, rho_P, u_H, dt, gas, t_data=0.0, rho_H=None, source=None):
    """Crank-Nicolson momentum system for the half-level velocity ``u*``.

    ``u_H`` has shape ``(dim, N)``; ``source`` is the nodal momentum forcing
    ``(dim, N)`` or None.
    """
    rho_P = np.ravel(rho_P)
    rho_H = rho_P if rho_H is None else np.ravel(rho_H)
    if np.any(~(rho_P > 0)):
        raise NonPositiveDensity(f"non-positive density at node {int(np.argmin(rho_P))}")
    d = ops.dim
    c = dt / gas.reynolds
    mass = np.repeat(ops.Wv * rho_P, d)
    rhs = np.repeat(ops.Wv * rho_H, d) * _interleave(u_H)
    if ops.is_dir.any():
        uD, _ = ops.dirichlet_data(t_data)
        rhs = rhs + 0.5 * c * ops.b_tau(uD)
    if source is not None:
        rhs = rhs + 0.5 * dt * np.repeat(ops.Wv, d) * _interleave(source)
    return linalg.LinearSystem(rhs=rhs, diag=mass, scale=c, base=ops.visc_op,
                               assembler=lambda: _diag(mass) + c * ops.A_visc)


def energy_rhs(ops, rho_H, e_H, u_star, dt, gas, t_data=0.0, source=None, include_bD=True):
    """Right-hand side of the DG energy system (``u_star`` interleaved)."""
    uD, eD = ops.dirichlet_data(t_data) if ops.is_dir.any() else (None, None)
    c = dt / gas.reynolds
    rhs = ops.Wv * np.ravel(rho_H) * np.ravel(e_H)
    rhs = rhs + c * ops.b_eps(u_star, uD) + (2.0 / 3.0) * c * ops.b_lam(u_star)
    if include_bD and uD is not None:
        rhs = rhs + c * gas.lam * ops.b_D(eD)
    if source is not None:
        rhs = rhs + dt * ops.Wv * np.ravel(source)
    return rhs, eD


def assemble_energy_system(ops, rho_P, rho_H, e_H, u_star, dt, gas, t_data=0.0, source=None):
    """Energy system in the DG space (Q1 IIPG) or the continuous space (SEM).

    For SEM the returned system acts on continuous dofs; map back with
    ``ops.sem.S``.
    """
    rho_P = np.ravel(rho_P)
    if np.any(~(rho_P > 0)):
        raise NonPositiveDensity(f"non-positive density at node {int(np.argmin(rho_P))}")
    c = dt * gas.lam / gas.reynolds
    if ops.params.energy_variant == Q1_IIPG:
        rhs, _ = energy_rhs(ops, rho_H, e_H, u_star, dt, gas, t_data, source, include_bD=True)
        mass = ops.Wv * rho_P
        return linalg.LinearSystem(rhs=rhs, diag=mass, scale=c, base=ops.D_op,
                                   assembler=lambda: _diag(mass) + c * ops.A_D)
    rhs_dg, eD = energy_rhs(ops, rho_H, e_H, u_star, dt, gas, t_data, source, include_bD=False)
    S = ops.sem.S
    mass = S.T @ (ops.Wv * rho_P)
    rhs = S.T @ rhs_dg
    keep = None
    if ops.is_dir.any():
        dofs = ops.sem.dof_of_node[ops.face_node_m[ops.is_dir]]
        vals = eD[ops.is_dir]
        dofs, first = np.unique(dofs, return_index=True)
        keep = np.ones(len(rhs))
        keep[dofs] = 0.0
        rhs = rhs.copy()
        rhs[dofs] = vals[first]

    def assemble():
        A = _diag(mass) + c * (S.T @ ops.stiffness @ S)
        if keep is not None:
            A = _diag(keep) @ A + _diag(1.0 - keep)
        return A

    return linalg.LinearSystem(rhs=rhs, symmetric=keep is None, diag=mass, scale=c,
                               base=ops.sem_K_op, keep=keep, assembler=assemble)


@dataclass
class RhsReport:
    ok: bool
    min_value: float
    node: int


def energy_rhs_nonneg_check(rhs, mass_diag=None):
    rhs = np.asarray(rhs, dtype=float)
    i = int(np.argmin(rhs))
    return RhsReport(bool(rhs[i] > 0), float(rhs[i]), i)


@dataclass
class ParabolicReport:
    min_e: float
    min_e_node: int
    rhs_min: float


def solve_parabolic_step(ops, U_H, dt, gas, t=0.0, source=None, policy="auto",
                         on_negative="raise"):
    """Viscous substep on nodal coefficients ``U_H`` of shape ``(nvar, ncells, nloc)``.

    ``source(x, t) -> (nvar, npts)`` is the conserved-variable forcing of the
    viscous subproblem, evaluated at ``t + dt/2``; Dirichlet data are taken at
    ``t + dt``.  Returns ``(U_P, report)``.
    """
    d = ops.dim
    shape = U_H.shape
    rho = U_H[0].ravel()
    u_H, e_H = project_forward(rho, U_H[1:-1].reshape(d, -1), U_H[-1].ravel())
    src_m = src_e = None
    if source is not None:
        S = np.asarray(source(ops.space.node_points, t + 0.5 * dt), dtype=float)
        src_m = S[1:-1]
    t_data = t + dt
    mom = assemble_momentum(ops, rho, u_H, dt, gas, t_data, source=src_m)
    u_star = linalg.solve(mom, policy, x0=_interleave(u_H))
    if source is not None:
        src_e = S[-1] - np.sum(_deinterleave(u_star, d) * src_m, axis=0)
    en = assemble_energy_system(ops, rho, rho, e_H, u_star, dt, gas, t_data, source=src_e)
    if ops.params.energy_variant == SEM:
        x0 = (ops.sem.S.T @ (ops.Wv * rho * np.ravel(e_H))) / en.diag
        if en.keep is not None:
            x0 = np.where(en.keep > 0, x0, en.rhs)
    else:
        x0 = np.ravel(e_H)
    e_P = linalg.solve(en, policy, x0=x0)
    if ops.params.energy_variant == SEM:
        e_P = ops.sem.S @ e_P
    u_P = 2.0 * _deinterleave(u_star, d) - u_H
    node = int(np.argmin(e_P))
    report = ParabolicReport(float(e_P[node]), node, float(np.min(en.rhs)))
    if not e_P[node] > 0 and on_negative == "raise":
        raise NegativeEnergy(node, float(e_P[node]))
    m_P, E_P = project_backward(rho, u_P, e_P)
    U_P = np.concatenate([rho[None], m_P, E_P[None]]).reshape(shape)
    return U_P, report
