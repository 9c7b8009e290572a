"""Quadrature rules, tensor-product Lagrange bases and point families.

Everything lives on the reference element ``[-1/2, 1/2]^d``.  Quadrature
weights are normalised to sum to one, so integrals over a physical cell of
side ``dx`` pick up a factor ``dx**d`` (and ``dx**(d-1)`` on faces).

Nodal ordering is lexicographic with the x index running fastest, i.e. in 2D
node ``j`` sits at ``(r[j % (k+1)], r[j // (k+1)])``.
"""
from dataclasses import dataclass
from functools import cached_property, lru_cache
import itertools

import numpy as np

from .errors import UnsupportedOrder

_NEWTON_TOL = 1e-15
_NEWTON_MAXIT = 100


@dataclass(frozen=True)
class QuadRule1D:
    points: np.ndarray
    weights: np.ndarray

    def integrate(self, f):
        return float(np.dot(self.weights, f(self.points)))


def _legendre(n, x):
    """Return P_n(x) and P_{n-1}(x) by the three-term recurrence."""
    p_prev = np.ones_like(x)
    if n == 0:
        return p_prev, np.zeros_like(x)
    p = x.copy()
    for m in range(2, n + 1):
        p_prev, p = p, ((2 * m - 1) * x * p - (m - 1) * p_prev) / m
    return p, p_prev


@lru_cache(maxsize=None)
def _gauss(n):
    i = np.arange(n)
    x = np.cos(np.pi * (i + 0.75) / (n + 0.5))
    for _ in range(_NEWTON_MAXIT):
        p, pm1 = _legendre(n, x)
        dp = n * (x * p - pm1) / (x * x - 1.0)
        dx = p / dp
        x = x - dx
        if np.max(np.abs(dx)) < _NEWTON_TOL:
            break
    p, pm1 = _legendre(n, x)
    dp = n * (x * p - pm1) / (x * x - 1.0)
    w = 2.0 / ((1.0 - x * x) * dp * dp)
    order = np.argsort(x)
    return x[order], w[order]


@lru_cache(maxsize=None)
def _gauss_lobatto(n):
    order_ = n - 1
    x = np.cos(np.pi * np.arange(n) / order_)
    for _ in range(_NEWTON_MAXIT):
        p, pm1 = _legendre(order_, x)
        dx = (x * p - pm1) / (n * p)
        x = x - dx
        if np.max(np.abs(dx)) < _NEWTON_TOL:
            break
    p, _ = _legendre(order_, x)
    w = 2.0 / (order_ * n * p * p)
    order = np.argsort(x)
    x = x[order]
    x[0], x[-1] = -1.0, 1.0
    return x, w[order]


def gauss_rule(n):
    """``n``-point Gauss rule on ``[-1/2, 1/2]``, exact to degree ``2n-1``."""
    if not 1 <= n <= 8:
        raise UnsupportedOrder(f"Gauss rule with {n} points is not supported (1..8)")
    x, w = _gauss(n)
    return QuadRule1D(0.5 * x, 0.5 * w)


def gauss_lobatto_rule(n):
    """``n``-point Gauss-Lobatto rule on ``[-1/2, 1/2]``, exact to degree ``2n-3``."""
    if not 2 <= n <= 6:
        raise UnsupportedOrder(f"Gauss-Lobatto rule with {n} points is not supported (2..6)")
    x, w = _gauss_lobatto(n)
    return QuadRule1D(0.5 * x, 0.5 * w)


def lagrange_1d(nodes, x):
    """Values and derivatives of the Lagrange polynomials on ``nodes`` at ``x``.

    Returns two arrays of shape ``(len(x), len(nodes))``.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    n = len(nodes)
    val = np.ones((len(x), n))
    der = np.zeros((len(x), n))
    for m in range(n):
        others = [l for l in range(n) if l != m]
        denom = np.prod([nodes[m] - nodes[l] for l in others])
        for l in others:
            val[:, m] *= x - nodes[l]
        for skip in others:
            term = np.ones_like(x)
            for l in others:
                if l != skip:
                    term = term * (x - nodes[l])
            der[:, m] += term
        val[:, m] /= denom
        der[:, m] /= denom
    return val, der


@dataclass(frozen=True)
class NodalBasis:
    """Q^k Lagrange basis on the tensor Gauss-Lobatto nodes of the reference cell."""

    k: int
    dim: int

    def __post_init__(self):
        if self.k not in (1, 2, 3):
            raise UnsupportedOrder(f"polynomial degree {self.k} not supported (1..3)")
        if self.dim not in (1, 2):
            raise ValueError(f"dimension {self.dim} not supported")

    @cached_property
    def rule1d(self):
        return gauss_lobatto_rule(self.k + 1)

    @property
    def nloc(self):
        return (self.k + 1) ** self.dim

    @cached_property
    def multi_index(self):
        """``(nloc, dim)`` integer array; column 0 (x index) varies fastest."""
        rng = range(self.k + 1)
        idx = [tuple(reversed(t)) for t in itertools.product(rng, repeat=self.dim)]
        return np.array(idx, dtype=int)

    @cached_property
    def nodes(self):
        return self.rule1d.points[self.multi_index]

    @cached_property
    def weights(self):
        return np.prod(self.rule1d.weights[self.multi_index], axis=1)

    def eval(self, points):
        """Interpolation matrix ``V[p, j] = phi_j(points[p])``."""
        points = np.atleast_2d(np.asarray(points, dtype=float))
        V = np.ones((len(points), self.nloc))
        for a in range(self.dim):
            val, _ = lagrange_1d(self.rule1d.points, points[:, a])
            V *= val[:, self.multi_index[:, a]]
        return V

    def grad(self, points):
        """Reference gradients, shape ``(dim, npts, nloc)``."""
        points = np.atleast_2d(np.asarray(points, dtype=float))
        vals, ders = [], []
        for a in range(self.dim):
            val, der = lagrange_1d(self.rule1d.points, points[:, a])
            vals.append(val[:, self.multi_index[:, a]])
            ders.append(der[:, self.multi_index[:, a]])
        G = np.ones((self.dim, len(points), self.nloc))
        for a in range(self.dim):
            for b in range(self.dim):
                G[a] *= ders[b] if a == b else vals[b]
        return G

    def face_nodes(self, face):
        """Indices of the nodes lying on local face ``face = 2*axis + side``."""
        axis, side = divmod(face, 2)
        target = self.k if side else 0
        return np.flatnonzero(self.multi_index[:, axis] == target)


def basis_eval(basis, j, x):
    return float(basis.eval(np.reshape(x, (1, -1)))[0, j])


def basis_grad(basis, j, x):
    return basis.grad(np.reshape(x, (1, -1)))[:, 0, j].copy()


def lobatto_count(k):
    """Smallest N with 2N - 3 >= k."""
    return max(2, int(np.ceil((k + 3) / 2)))


def _tensor(rules_points, rules_weights):
    pts = np.array([tuple(reversed(p)) for p in itertools.product(*reversed(rules_points))])
    wts = np.array([np.prod(w) for w in itertools.product(*reversed(rules_weights))])
    return pts.reshape(len(wts), -1), wts


@dataclass(frozen=True)
class PointSets:
    """The hyperbolic face/aux/volume point families and the parabolic nodes.

    ``face`` has shape ``(2*dim, nfq, dim)``; entry ``2*a + s`` is the face
    normal to axis ``a`` on side ``s`` (0 low, 1 high), matching the local
    face numbering used throughout.
    """

    k: int
    dim: int
    n_lobatto: int
    omega_hat: float
    face: np.ndarray
    face_weights: np.ndarray
    aux: np.ndarray
    vol: np.ndarray
    vol_weights: np.ndarray
    p: np.ndarray
    p_weights: np.ndarray

    @cached_property
    def h_points(self):
        return np.concatenate([self.face.reshape(-1, self.dim), self.aux, self.vol])

    @cached_property
    def hp_points(self):
        return np.concatenate([self.h_points, self.p])


def build_point_sets(k, dim):
    if k not in (1, 2, 3):
        raise UnsupportedOrder(f"polynomial degree {k} not supported (1..3)")
    n_lob = lobatto_count(k)
    g = gauss_rule(k + 1)
    lob = gauss_lobatto_rule(n_lob)
    basis = NodalBasis(k, dim)

    faces = []
    for a in range(dim):
        for s in (-0.5, 0.5):
            tangential = [b for b in range(dim) if b != a]
            if tangential:
                tp, tw = _tensor([g.points] * len(tangential), [g.weights] * len(tangential))
            else:
                tp, tw = np.zeros((1, 0)), np.ones(1)
            pts = np.zeros((len(tw), dim))
            pts[:, a] = s
            pts[:, tangential] = tp
            faces.append(pts)
            face_weights = tw

    interior = lob.points[1:-1]
    aux = []
    if len(interior):
        for a in range(dim):
            rules = [g.points] * dim
            rules[a] = interior
            pts, _ = _tensor(rules, [np.ones(len(r)) for r in rules])
            aux.append(pts)
        aux = np.unique(np.round(np.concatenate(aux), 15), axis=0)
    else:
        aux = np.zeros((0, dim))

    vol, vol_w = _tensor([g.points] * dim, [g.weights] * dim)
    return PointSets(
        k=k, dim=dim, n_lobatto=n_lob, omega_hat=1.0 / (n_lob * (n_lob - 1)),
        face=np.array(faces), face_weights=face_weights, aux=aux,
        vol=vol, vol_weights=vol_w, p=basis.nodes, p_weights=basis.weights,
    )
