"""Manufactured smooth solution on the unit square and its split forcing.

The exact fields are differentiated symbolically once; the hyperbolic
forcing is the residual of the Euler system and the parabolic forcing the
residual of the viscous subproblem, so their sum is the full Navier-Stokes
residual.
"""
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import sympy as sym

from .euler import GasParams

X, Y, T = sym.symbols("x y t", real=True)


def default_fields():
    """Density, velocity and specific internal energy of the test problem."""
    s = sym.exp(-T)
    pi2 = 2 * sym.pi
    rho = s * sym.sin(pi2 * (X + Y)) + 2
    u = s * sym.cos(pi2 * X) * sym.sin(pi2 * Y) + 2
    v = s * sym.sin(pi2 * X) * sym.cos(pi2 * Y) + 2
    e = sym.Rational(1, 2) * s * sym.cos(pi2 * X) * sym.cos(pi2 * Y) + 1
    return rho, (u, v), e


S_T = sym.Symbol("s_t", positive=True)  # stands for exp(-t)


class SeparableField:
    """Vector of expressions in ``(x, y, t)`` evaluated as polynomials in
    ``exp(-t)`` whose spatial coefficients are cached per point set."""

    def __init__(self, exprs, cache_size=8):
        self.n = len(exprs)
        polys = []
        for ex in exprs:
            ex = sym.expand(sym.sympify(ex).subs(sym.exp(-T), S_T))
            if T in ex.free_symbols:
                polys = None
                break
            polys.append(sym.Poly(ex, S_T))
        self._cache = []
        self._cache_size = cache_size
        if polys is None:
            self.degree = None
            self._direct = sym.lambdify((X, Y, T), list(exprs), modules="numpy", cse=True)
            return
        self.degree = max(p.degree() for p in polys)
        coeffs = []
        for p in polys:
            c = [p.coeff_monomial(S_T ** j) for j in range(self.degree + 1)]
            coeffs.extend(c)
        self._coeff_fn = sym.lambdify((X, Y), coeffs, modules="numpy", cse=True)

    def _coefficients(self, x):
        for xs, C in self._cache:
            if xs.shape == x.shape and np.array_equal(xs, x):
                return C
        vals = self._coeff_fn(x[:, 0], x[:, 1])
        C = np.array([np.broadcast_to(np.asarray(v, dtype=float), x[:, 0].shape) for v in vals])
        C = C.reshape(self.n, self.degree + 1, -1)
        self._cache.insert(0, (x.copy(), C))
        del self._cache[self._cache_size:]
        return C

    def __call__(self, x, t):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        if self.degree is None:
            vals = self._direct(x[:, 0], x[:, 1], float(t))
            return np.array([np.broadcast_to(np.asarray(v, dtype=float), x[:, 0].shape) for v in vals])
        C = self._coefficients(x)
        powers = np.exp(-float(t)) ** np.arange(self.degree + 1)
        return np.einsum("ejp,j->ep", C, powers)


def _lambdify(exprs):
    return SeparableField(exprs)


@dataclass
class MmsSolution:
    gas: GasParams
    rho: sym.Expr = None
    vel: tuple = None
    e: sym.Expr = None

    def __post_init__(self):
        if self.rho is None:
            self.rho, self.vel, self.e = default_fields()

    # symbolic pieces -----------------------------------------------------

    @cached_property
    def conserved(self):
        rho, (u, v), e = self.rho, self.vel, self.e
        return [rho, rho * u, rho * v, rho * e + rho * (u * u + v * v) / 2]

    @cached_property
    def _tau(self):
        u, v = self.vel
        ux, uy, vx, vy = sym.diff(u, X), sym.diff(u, Y), sym.diff(v, X), sym.diff(v, Y)
        div = ux + vy
        return [[2 * ux - sym.Rational(2, 3) * div, uy + vx],
                [uy + vx, 2 * vy - sym.Rational(2, 3) * div]]

    @cached_property
    def source_H_exprs(self):
        g = self.gas.gamma
        rho, (u, v), e = self.rho, self.vel, self.e
        U = self.conserved
        p = (g - 1) * rho * e
        Fx = [rho * u, rho * u * u + p, rho * u * v, (U[3] + p) * u]
        Fy = [rho * v, rho * u * v, rho * v * v + p, (U[3] + p) * v]
        return [sym.diff(U[i], T) + sym.diff(Fx[i], X) + sym.diff(Fy[i], Y) for i in range(4)]

    @cached_property
    def source_P_exprs(self):
        Re, lam = self.gas.reynolds, self.gas.lam
        tau = self._tau
        u, v = self.vel
        mx = -(sym.diff(tau[0][0], X) + sym.diff(tau[0][1], Y)) / Re
        my = -(sym.diff(tau[1][0], X) + sym.diff(tau[1][1], Y)) / Re
        work_x = tau[0][0] * u + tau[0][1] * v
        work_y = tau[1][0] * u + tau[1][1] * v
        lap = sym.diff(self.e, X, 2) + sym.diff(self.e, Y, 2)
        En = -(lam * lap + sym.diff(work_x, X) + sym.diff(work_y, Y)) / Re
        return [sym.Integer(0), mx, my, En]

    # numerical callables -------------------------------------------------

    @cached_property
    def exact_U(self):
        """``f(x, t) -> (4, npts)`` conserved state."""
        return _lambdify(self.conserved)

    @cached_property
    def velocity(self):
        f = _lambdify(list(self.vel))
        return lambda x, t: f(x, t).T

    @cached_property
    def energy(self):
        f = _lambdify([self.e])
        return lambda x, t: f(x, t)[0]

    @cached_property
    def source_H(self):
        return _lambdify(self.source_H_exprs)

    @cached_property
    def source_P(self):
        return _lambdify(self.source_P_exprs)


def l2h_errors(space, U, exact, t):
    """Discrete L2 errors of density, momentum and total energy measured with
    the Gauss volume rule of the hyperbolic step."""
    xq = space.vol_coords.reshape(-1, space.dim)
    ref = exact(xq, t).reshape(space.nvar, space.ncells, -1)
    diff = U @ space.V_vol.T - ref
    w = space.ps.vol_weights * space.dx ** space.dim
    sq = np.einsum("vcq,q->v", diff * diff, w)
    return float(np.sqrt(sq[0])), float(np.sqrt(np.sum(sq[1:-1]))), float(np.sqrt(sq[-1]))
