"""Sparse linear systems: solvers, monotonicity diagnostics and COO dumps."""
from dataclasses import dataclass
from typing import Optional
import warnings

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import NoConvergence, SingularMatrix, TooLarge

SIGN_TOL = 1e-13
INVERSE_TOL = -1e-11
KRYLOV_TOL = 1e-13
AUTO_MAXITER = 400


class LinearSystem:
    """``A x = rhs`` given either as an assembled matrix or in the operator
    form ``A = keep * (diag + scale * base) + (1 - keep) * I``.

    ``base`` needs ``matvec(x)`` and ``diagonal()``; ``keep`` is an optional
    0/1 row mask used for row-replaced Dirichlet unknowns.  In operator form
    the assembled matrix is built on first access from ``assembler()``.
    """

    def __init__(self, matrix=None, rhs=None, symmetric=False, *, diag=None, scale=1.0,
                 base=None, keep=None, assembler=None):
        self._matrix = None if matrix is None else as_csr(matrix)
        self.rhs = np.asarray(rhs, dtype=float)
        self.symmetric = symmetric
        self.diag, self.scale, self.base, self.keep = diag, scale, base, keep
        self._assembler = assembler
        if self._matrix is None and (base is None or assembler is None):
            raise ValueError("operator-form systems need both base and assembler")

    @property
    def matrix(self):
        if self._matrix is None:
            self._matrix = as_csr(self._assembler())
        return self._matrix

    @property
    def size(self):
        return len(self.rhs)

    @property
    def matrix_free(self):
        return self.base is not None

    def matvec(self, x):
        if self.base is None:
            return self._matrix @ x
        y = self.diag * x + self.scale * self.base.matvec(x)
        if self.keep is not None:
            y = self.keep * y + (1.0 - self.keep) * x
        return y

    def diagonal(self):
        if self.base is None:
            return self._matrix.diagonal()
        d = self.diag + self.scale * self.base.diagonal()
        if self.keep is not None:
            d = self.keep * d + (1.0 - self.keep)
        return d

    def operator(self):
        n = self.size
        return spla.LinearOperator((n, n), matvec=self.matvec, dtype=float)


def as_csr(A):
    """Canonical CSR: sorted indices, summed duplicates, no stored zeros."""
    A = sp.csr_matrix(A, dtype=float)
    A.sum_duplicates()
    A.eliminate_zeros()
    A.sort_indices()
    if A.shape[0] != A.shape[1]:
        raise ValueError(f"matrix is not square: {A.shape}")
    return A


def direct_solve(A, b):
    A = sp.csc_matrix(A, dtype=float)
    b = np.asarray(b, dtype=float)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("error", spla.MatrixRankWarning)
            lu = spla.splu(A, permc_spec="MMD_AT_PLUS_A")
    except (RuntimeError, spla.MatrixRankWarning) as exc:
        raise SingularMatrix(str(exc)) from exc
    x = lu.solve(b)
    if not np.all(np.isfinite(x)):
        raise SingularMatrix("factorization produced non-finite values")
    return x


def krylov_solve(A, b, tol=1e-12, symmetric=False, x0=None, maxiter=2000):
    """Jacobi-preconditioned CG (symmetric) or BiCGSTAB, falling back to GMRES.

    ``A`` is a sparse matrix or a LinearSystem (used matrix-free).
    """
    if isinstance(A, LinearSystem):
        d, op = A.diagonal(), A.operator()
    else:
        op = sp.csr_matrix(A)
        d = op.diagonal()
    b = np.asarray(b, dtype=float)
    bnorm = np.linalg.norm(b)
    if bnorm == 0.0:
        return np.zeros_like(b)
    d = np.where(d != 0.0, d, 1.0)
    M = spla.LinearOperator(op.shape, matvec=lambda v: v / d, dtype=float)
    count = [0]

    def cb(*_):
        count[0] += 1

    solvers = [spla.cg] if symmetric else [spla.bicgstab, spla.gmres]
    res = np.inf
    for solver in solvers:
        count[0] = 0
        kw = dict(rtol=tol, atol=0.0, M=M, maxiter=maxiter, callback=cb, x0=x0)
        if solver is spla.gmres:
            kw.update(restart=50, callback_type="legacy", maxiter=max(1, maxiter // 50))
        x, info = solver(op, b, **kw)
        res = np.linalg.norm(op @ x - b) / bnorm
        if info == 0 and res <= 10 * tol and np.all(np.isfinite(x)):
            return x
    raise NoConvergence(count[0], float(res))


def solve(system: LinearSystem, policy="auto", tol=KRYLOV_TOL, x0=None):
    """``auto`` tries a short preconditioned Krylov run (the implicit systems
    are mass dominated for CFL-sized steps) and falls back to sparse LU."""
    A = system if system.matrix_free else system.matrix
    if policy == "direct":
        return direct_solve(system.matrix, system.rhs)
    if policy == "krylov":
        return krylov_solve(A, system.rhs, tol, system.symmetric, x0=x0)
    try:
        return krylov_solve(A, system.rhs, tol, system.symmetric, x0=x0, maxiter=AUTO_MAXITER)
    except NoConvergence:
        return direct_solve(system.matrix, system.rhs)


@dataclass
class MonotonicityReport:
    diag_positive: bool
    offdiag_nonpositive: bool
    rowsums_nonnegative: bool
    some_rowsum_positive: bool
    inverse_min: Optional[float] = None

    @property
    def sign_check(self):
        return (self.diag_positive and self.offdiag_nonpositive
                and self.rowsums_nonnegative and self.some_rowsum_positive)

    @property
    def verdict(self):
        if self.sign_check:
            return "M-matrix by sign pattern"
        if self.inverse_min is not None and self.inverse_min >= INVERSE_TOL:
            return "monotone (inverse nonnegative)"
        return "not verified"


def mmatrix_sign_check(A, tol=SIGN_TOL):
    A = sp.csr_matrix(A, dtype=float)
    diag = A.diagonal()
    off = A - sp.diags(diag)
    off_max = off.max() if off.nnz else 0.0
    rows = np.asarray(A.sum(axis=1)).ravel()
    return MonotonicityReport(
        diag_positive=bool(np.all(diag > 0)),
        offdiag_nonpositive=bool(off_max <= tol),
        rowsums_nonnegative=bool(np.all(rows >= -tol)),
        some_rowsum_positive=bool(np.any(rows > tol)),
    )


def inverse_nonneg_check(A, n_max=2000):
    """Minimum entry of the dense inverse; monotone iff >= -1e-11."""
    n = A.shape[0]
    if n > n_max:
        raise TooLarge(f"dense inverse of a {n}x{n} matrix exceeds the limit {n_max}")
    dense = A.toarray() if sp.issparse(A) else np.asarray(A, dtype=float)
    try:
        inv = np.linalg.inv(dense)
    except np.linalg.LinAlgError as exc:
        raise SingularMatrix(str(exc)) from exc
    return float(inv.min())


def monotonicity_report(A, n_max=2000):
    rep = mmatrix_sign_check(A)
    if A.shape[0] <= n_max:
        rep.inverse_min = inverse_nonneg_check(A, n_max)
    return rep


def dump_coo(A, path):
    A = sp.coo_matrix(A)
    order = np.lexsort((A.col, A.row))
    with open(path, "w") as fh:
        for i in order:
            fh.write(f"{A.row[i]} {A.col[i]} {A.data[i]:.17g}\n")
