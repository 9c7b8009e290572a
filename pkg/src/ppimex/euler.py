"""Ideal-gas state algebra, advective fluxes, admissibility and limiting.

States are arrays with the conserved variables on the leading axis,
``U = [rho, m_1, ..., m_d, E]``, and arbitrary trailing shape.
"""
from dataclasses import dataclass
import math
from typing import Optional

import numpy as np

from .errors import AverageNotAdmissible, ConfigError, NonAdmissible
from .mesh import Inflow, Outflow, PostShock, Reflective

FLOOR_CAP = 1e-13


@dataclass(frozen=True)
class GasParams:
    gamma: float = 1.4
    prandtl: float = 0.72
    reynolds: float = 1.0
    conductivity: Optional[float] = None  # overrides gamma / Pr when set

    def __post_init__(self):
        if not self.gamma > 1:
            raise ConfigError(f"gamma must exceed 1, got {self.gamma}")
        if not self.prandtl > 0 or not self.reynolds > 0:
            raise ConfigError("Prandtl and Reynolds numbers must be positive")
        if self.conductivity is not None and not self.conductivity > 0:
            raise ConfigError("conductivity must be positive")

    @property
    def lam(self):
        if self.conductivity is not None:
            return float(self.conductivity)
        return self.gamma / self.prandtl


def rho_e(U):
    m = U[1:-1]
    return U[-1] - 0.5 * np.sum(m * m, axis=0) / U[0]


def pressure(U, gamma):
    return (gamma - 1.0) * rho_e(U)


def velocity(U):
    return U[1:-1] / U[0]


def from_primitive(rho, u, p, gamma):
    """Conserved state from density, velocity components and pressure."""
    rho = np.asarray(rho, dtype=float)
    u = [np.asarray(c, dtype=float) for c in u]
    E = np.asarray(p, dtype=float) / (gamma - 1.0) + 0.5 * rho * sum(c * c for c in u)
    return np.array(np.broadcast_arrays(rho, *[rho * c for c in u], E))


def advective_flux(U, gamma):
    """Flux columns, shape ``(dim, nvar, ...)``."""
    d = U.shape[0] - 2
    rho, m, E = U[0], U[1:-1], U[-1]
    u = m / rho
    p = (gamma - 1.0) * (E - 0.5 * np.sum(m * u, axis=0))
    F = np.empty((d,) + U.shape)
    for a in range(d):
        F[a, 0] = m[a]
        for b in range(d):
            F[a, 1 + b] = m[b] * u[a]
        F[a, 1 + a] += p
        F[a, -1] = (E + p) * u[a]
    return F


def normal_flux(U, n, gamma):
    """``F(U) . n`` for a constant normal ``n``."""
    F = advective_flux(U, gamma)
    return np.tensordot(np.asarray(n, dtype=float), F, axes=(0, 0))


def wave_speed(U, n, gamma):
    """``|u.n| + c`` pointwise; NaN where the state is not admissible."""
    rho = U[0]
    re = rho_e(U)
    un = np.tensordot(np.asarray(n, dtype=float), U[1:-1], axes=(0, 0)) / rho
    with np.errstate(invalid="ignore", divide="ignore"):
        c = np.sqrt(gamma * (gamma - 1.0) * re / rho)
    bad = ~((rho > 0) & (re > 0))
    return np.where(bad, np.nan, np.abs(un) + c)


def max_wave_speed(Um, Up, n, gamma):
    s = np.maximum(wave_speed(Um, n, gamma), wave_speed(Up, n, gamma))
    if np.any(np.isnan(s)):
        raise NonAdmissible("wave speed requested for a non-admissible trace")
    return float(np.max(s))


def lax_friedrichs_flux(Um, Up, n, alpha, gamma):
    """Local Lax-Friedrichs flux.  ``alpha`` broadcasts against the trailing axes."""
    return 0.5 * (normal_flux(Um, n, gamma) + normal_flux(Up, n, gamma)) - 0.5 * alpha * (Up - Um)


def in_G_eps(U, eps):
    U = np.asarray(U, dtype=float)
    with np.errstate(invalid="ignore", divide="ignore"):
        return (U[0] >= eps) & (rho_e(U) >= eps)


def floor_from_averages(Ubar, cap=FLOOR_CAP):
    """Global positivity floor ``min(cap, min rho_bar, min rhoe(U_bar))``."""
    return float(min(cap, np.min(Ubar[0]), np.min(rho_e(Ubar))))


def limiter_thetas(points, Ubar, eps):
    """Scaling factors of the two-stage limiter.

    ``points`` has shape ``(nvar, ncell, npts)`` (states at the check points)
    and ``Ubar`` shape ``(nvar, ncell)``.  Returns ``(theta_rho, theta_e)``.
    """
    if not np.all(in_G_eps(Ubar, eps)):
        bad = int(np.flatnonzero(~in_G_eps(Ubar, eps))[0])
        raise AverageNotAdmissible(f"cell {bad} has a non-admissible average")
    rbar = Ubar[0]
    rmin = np.min(points[0], axis=-1)
    with np.errstate(divide="ignore", invalid="ignore"):
        th_r = np.where(rmin >= eps, 1.0, np.minimum(1.0, (rbar - eps) / (rbar - rmin)))
    dens = rbar[:, None] + th_r[:, None] * (points[0] - rbar[:, None])
    tilde = np.concatenate([dens[None], points[1:]], axis=0)
    with np.errstate(divide="ignore", invalid="ignore"):
        emin = np.min(rho_e(tilde), axis=-1)
        ebar = rho_e(Ubar)
        th_e = np.where(emin >= eps, 1.0, np.minimum(1.0, (ebar - eps) / (ebar - emin)))
    return th_r, th_e


def apply_thetas(coeffs, Ubar, th_r, th_e):
    """Scale per-cell polynomials about their averages (affine, so acting on
    nodal coefficients is the same as acting on point values)."""
    out = coeffs.copy()
    out[0] = Ubar[0][:, None] + th_r[:, None] * (coeffs[0] - Ubar[0][:, None])
    return Ubar[..., None] + th_e[:, None] * (out - Ubar[..., None])


def limit_cells(coeffs, points, Ubar, eps):
    """Limit a batch of cells; returns the new coefficients.

    Cells with ``theta_rho = theta_e = 1`` are returned bitwise unchanged.
    """
    th_r, th_e = limiter_thetas(points, Ubar, eps)
    touched = (th_r < 1.0) | (th_e < 1.0)
    if not np.any(touched):
        return coeffs
    out = coeffs.copy()
    out[:, touched] = apply_thetas(coeffs[:, touched], Ubar[:, touched],
                                   th_r[touched], th_e[touched])
    return out


def limit_cell(U_nodal, U_bar, eps):
    """Single-cell limiter on point states ``(nvar, npts)`` about ``U_bar``."""
    U_nodal = np.asarray(U_nodal, dtype=float)
    U_bar = np.asarray(U_bar, dtype=float)
    return limit_cells(U_nodal[:, None], U_nodal[:, None], U_bar[:, None], eps)[:, 0]


def strain_norm_sq(G):
    """``eps(u):eps(u)`` for velocity gradients ``G[..., i, j] = du_i/dx_j``."""
    S = 0.5 * (G + np.swapaxes(G, -1, -2))
    return np.sum(S * S, axis=(-1, -2))


# boundary ghost states -----------------------------------------------------

@dataclass(frozen=True)
class MovingShock:
    """Planar shock ``a x + b y + c - speed t = 0`` with ``(a, b)`` a unit
    vector pointing into the pre-shock gas.  Points on the negative side
    carry the post-shock state."""

    post: tuple
    pre: tuple
    a: float
    b: float
    c: float
    speed: float

    @classmethod
    def from_line(cls, post, pre, a, b, c, speed):
        s = math.hypot(a, b)
        return cls(tuple(map(float, post)), tuple(map(float, pre)), a / s, b / s, c / s, float(speed))

    def state(self, x, t):
        x = np.atleast_2d(x)
        phi = self.a * x[:, 0] + (self.b * x[:, 1] if x.shape[1] > 1 else 0.0) + self.c - self.speed * t
        post = np.asarray(self.post)[:, None]
        pre = np.asarray(self.pre)[:, None]
        return np.where(phi[None, :] < 0, post, pre)


def normal_shock(rho0, p0, mach, gamma):
    """Post-shock ``(rho, speed of post-shock gas, p, shock speed)`` for a
    shock moving at Mach ``mach`` into gas at rest."""
    c0 = math.sqrt(gamma * p0 / rho0)
    s = mach * c0
    m2 = mach * mach
    rho1 = rho0 * (gamma + 1) * m2 / ((gamma - 1) * m2 + 2)
    p1 = p0 * (2 * gamma * m2 - (gamma - 1)) / (gamma + 1)
    u1 = s * (1 - rho0 / rho1)
    return rho1, u1, p1, s


def ghost_state(hyp_tag, U_in, n, x, t, gamma=1.4):
    """Exterior trace for a boundary face.

    ``U_in`` has shape ``(nvar, ...)`` with trailing shape matching the
    leading shape of the physical points ``x`` (``(..., dim)``).
    """
    if isinstance(hyp_tag, Outflow):
        return U_in
    if isinstance(hyp_tag, Reflective):
        n = np.asarray(n, dtype=float)
        mn = np.tensordot(n, U_in[1:-1], axes=(0, 0))
        out = U_in.copy()
        out[1:-1] -= 2.0 * n.reshape((-1,) + (1,) * mn.ndim) * mn
        return out
    x = np.asarray(x, dtype=float)
    flat = x.reshape(-1, x.shape[-1])
    if isinstance(hyp_tag, Inflow):
        if callable(hyp_tag.state):
            vals = np.asarray(hyp_tag.state(flat, t), dtype=float)
        else:
            vals = np.repeat(np.asarray(hyp_tag.state)[:, None], len(flat), axis=1)
    elif isinstance(hyp_tag, PostShock):
        vals = hyp_tag.shock.state(flat, t)
    else:
        raise TypeError(f"no ghost state for boundary tag {hyp_tag!r}")
    return vals.reshape(U_in.shape)
