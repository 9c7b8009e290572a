"""Compiled per-cell and per-face loops of the explicit Euler step.

Arrays use the package layout ``(nvar, ncells, nloc)``.  The numpy
routines in ``euler`` remain the reference; these kernels fuse the same
arithmetic to avoid temporaries on large meshes.
"""
import numpy as np
from numba import njit

BAD_TRACE = -1.0


@njit(cache=True)
def weighted_flux(Q, wv, gamma):
    """``w_q F_a(Q)`` at the volume points; ``Q`` is ``(nvar, ncells, nq)``
    and the result ``(dim, nvar, ncells, nq)``."""
    nv, nc, nq = Q.shape
    d = nv - 2
    F = np.empty((d, nv, nc, nq))
    for c in range(nc):
        for j in range(nq):
            rho = Q[0, c, j]
            E = Q[nv - 1, c, j]
            ke = 0.0
            for a in range(d):
                ke += Q[1 + a, c, j] * Q[1 + a, c, j]
            p = (gamma - 1.0) * (E - 0.5 * ke / rho)
            for a in range(d):
                ua = Q[1 + a, c, j] / rho
                F[a, 0, c, j] = wv[j] * Q[1 + a, c, j]
                for b in range(d):
                    F[a, 1 + b, c, j] = wv[j] * Q[1 + b, c, j] * ua
                F[a, 1 + a, c, j] += wv[j] * p
                F[a, nv - 1, c, j] = wv[j] * (E + p) * ua
    return F


@njit(cache=True)
def face_trace(U, cells, idx, Vr):
    """Traces ``(nvar, nface, nq)`` from the nodes ``idx`` of each cell."""
    nv = U.shape[0]
    nq, nn = Vr.shape
    out = np.empty((nv, len(cells), nq))
    for f in range(len(cells)):
        c = cells[f]
        for v in range(nv):
            for j in range(nq):
                s = 0.0
                for i in range(nn):
                    s += Vr[j, i] * U[v, c, idx[i]]
                out[v, f, j] = s
    return out


@njit(cache=True)
def _axis_flux(u, axis, gamma, F):
    nv = u.shape[0]
    rho = u[0]
    ke = 0.0
    for a in range(nv - 2):
        ke += u[1 + a] * u[1 + a]
    re = u[nv - 1] - 0.5 * ke / rho
    p = (gamma - 1.0) * re
    un = u[1 + axis] / rho
    for v in range(nv):
        F[v] = u[v] * un
    F[1 + axis] += p
    F[nv - 1] += p * un
    if not (rho > 0.0 and re > 0.0):
        return -1.0
    return abs(un) + np.sqrt(gamma * p / rho)


@njit(cache=True)
def lf_faces(Um, Up, axis, sign, gamma, wf, cm, idxm, Vm, cp, idxp, Vp, R, lift):
    """Lax-Friedrichs fluxes through a batch of faces with normal
    ``sign * e_axis`` pointing from the ``m`` side to the ``p`` side.

    With ``lift`` the weighted fluxes are subtracted from the ``m`` cells
    and added to the ``p`` cells (``cp`` may be empty for boundary faces).
    Returns the largest face speed, or ``BAD_TRACE`` on a non-admissible
    trace.
    """
    nv, nf, nq = Um.shape
    um = np.empty(nv)
    up = np.empty(nv)
    Fm = np.empty(nv)
    Fp = np.empty(nv)
    G = np.empty((nv, nq))
    amax = 0.0
    for f in range(nf):
        alpha = 0.0
        for j in range(nq):
            for v in range(nv):
                um[v] = Um[v, f, j]
                up[v] = Up[v, f, j]
            sm = _axis_flux(um, axis, gamma, Fm)
            sp = _axis_flux(up, axis, gamma, Fp)
            if sm < 0.0 or sp < 0.0:
                return BAD_TRACE
            alpha = max(alpha, sm, sp)
        amax = max(amax, alpha)
        if not lift:
            continue
        for j in range(nq):
            for v in range(nv):
                um[v] = Um[v, f, j]
                up[v] = Up[v, f, j]
            _axis_flux(um, axis, gamma, Fm)
            _axis_flux(up, axis, gamma, Fp)
            for v in range(nv):
                G[v, j] = wf[j] * (0.5 * sign * (Fm[v] + Fp[v]) - 0.5 * alpha * (up[v] - um[v]))
        c = cm[f]
        for i in range(len(idxm)):
            for v in range(nv):
                s = 0.0
                for j in range(nq):
                    s += Vm[j, i] * G[v, j]
                R[v, c, idxm[i]] -= s
        if len(cp):
            c = cp[f]
            for i in range(len(idxp)):
                for v in range(nv):
                    s = 0.0
                    for j in range(nq):
                        s += Vp[j, i] * G[v, j]
                    R[v, c, idxp[i]] += s
    return amax


@njit(cache=True)
def _rho_e(u):
    nv = u.shape[0]
    ke = 0.0
    for a in range(nv - 2):
        ke += u[1 + a] * u[1 + a]
    return u[nv - 1] - 0.5 * ke / u[0]


@njit(cache=True)
def check_and_limit(U, P, ubar, eps):
    """Limit every cell of ``U`` in place so its check-point values ``P``
    (``(nvar, ncells, npts)``) lie in G^eps.

    Returns the index of the first cell whose average ``ubar`` is not in
    G^eps (nothing is modified then), or -1 on success.
    """
    nv, nc, nl = U.shape
    npts = P.shape[2]
    for c in range(nc):
        if not (ubar[0, c] >= eps and _rho_e(ubar[:, c]) >= eps):
            return c
    pt = np.empty(nv)
    for c in range(nc):
        rbar = ubar[0, c]
        rmin = P[0, c, 0]
        for j in range(1, npts):
            rmin = min(rmin, P[0, c, j])
        th_r = 1.0
        if not rmin >= eps:
            th_r = min(1.0, (rbar - eps) / (rbar - rmin))
        emin = np.inf
        for j in range(npts):
            pt[0] = rbar + th_r * (P[0, c, j] - rbar)
            for v in range(1, nv):
                pt[v] = P[v, c, j]
            emin = min(emin, _rho_e(pt))
        th_e = 1.0
        if not emin >= eps:
            ebar = _rho_e(ubar[:, c])
            th_e = min(1.0, (ebar - eps) / (ebar - emin))
        if th_r < 1.0 or th_e < 1.0:
            for i in range(nl):
                U[0, c, i] = rbar + th_r * (U[0, c, i] - rbar)
                for v in range(nv):
                    U[v, c, i] = ubar[v, c] + th_e * (U[v, c, i] - ubar[v, c])
    return -1
