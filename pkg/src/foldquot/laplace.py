"""Discrete Dirichlet Laplacian, CG solves, and smallest eigenpairs.

Operators are the raw stencil matrix of -Laplace plus an optional diagonal
term.  With uniform quadrature weights the raw matrix symmetry carries over
to the weighted pairing, so CG and inverse iteration apply unchanged.
"""
from __future__ import annotations

import weakref
from functools import cached_property

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import ConvergenceError, IndefiniteOperatorError, PositivityError
from .mesh import Grid, ScalarField

_principal_cache: "weakref.WeakKeyDictionary[Grid, tuple[float, ScalarField]]" = (
    weakref.WeakKeyDictionary()
)


class DiscreteOperator:
    """Symmetric operator ``-Laplace_h + diag(term)`` on a grid's interior nodes."""

    def __init__(self, grid: Grid, diagonal=None):
        self.grid = grid
        if diagonal is None:
            self.diagonal = None
        else:
            diagonal = np.asarray(diagonal, dtype=float)
            if diagonal.ndim == 0:
                diagonal = np.full(grid.num_interior, float(diagonal))
            if diagonal.shape != (grid.num_interior,):
                raise ValueError("diagonal term length mismatch")
            self.diagonal = diagonal

    @cached_property
    def matrix(self) -> sp.csr_matrix:
        mat = self.grid.laplacian
        if self.diagonal is not None:
            mat = (mat + sp.diags(self.diagonal)).tocsr()
        return mat

    def apply(self, values: np.ndarray) -> np.ndarray:
        return self.matrix @ values

    def shifted(self, shift: float) -> "DiscreteOperator":
        base = self.diagonal if self.diagonal is not None else 0.0
        return DiscreteOperator(self.grid, base + float(shift))

    def gershgorin_lower(self) -> float:
        """Lower bound on the spectrum from Gershgorin rows."""
        mat = self.matrix
        diag = mat.diagonal()
        off = np.abs(mat).sum(axis=1).A1 - np.abs(diag)
        return float(np.min(diag - off))

    @cached_property
    def lu(self):
        return spla.splu(self.matrix.tocsc())


def laplacian_operator(grid: Grid) -> DiscreteOperator:
    return DiscreteOperator(grid)


def apply_laplacian(u: ScalarField) -> ScalarField:
    """Nodewise discrete -Laplace of u; exterior neighbors read as 0."""
    return ScalarField(u.grid, u.grid.laplacian @ u.values)


def linearization(u: ScalarField, lam: float, params) -> DiscreteOperator:
    """Linearized operator v -> -Laplace_h v - (lam*q*u^(q-1) + gamma*u^(gamma-1)) v."""
    if np.min(u.values) <= 0.0:
        raise PositivityError("linearization requires a strictly positive field")
    q, gamma = params.q, params.gamma
    term = lam * q * u.values ** (q - 1.0) + gamma * u.values ** (gamma - 1.0)
    return DiscreteOperator(u.grid, -term)


def solve(
    A: DiscreteOperator,
    b: ScalarField,
    tol: float = 1e-12,
    max_iter: int | None = None,
) -> ScalarField:
    """Conjugate gradients for positive definite A; residual <= tol * |b|.

    Raises IndefiniteOperatorError on a direction of negative curvature and
    ConvergenceError (with the final relative residual) on a stalled run.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if A.grid is not b.grid:
        raise ValueError("operator and right-hand side live on different grids")
    mat = A.matrix
    rhs = b.values
    b_norm = float(np.linalg.norm(rhs))
    if b_norm == 0.0:
        return ScalarField(b.grid, np.zeros_like(rhs))
    if max_iter is None:
        max_iter = 40 * rhs.size + 100

    x = np.zeros_like(rhs)
    r = rhs.copy()
    p = r.copy()
    rs = float(r @ r)
    for _ in range(max_iter):
        Ap = mat @ p
        pAp = float(p @ Ap)
        if pAp <= 0.0:
            raise IndefiniteOperatorError(
                f"negative curvature p'Ap = {pAp:.3e}: operator is not positive definite"
            )
        alpha = rs / pAp
        x += alpha * p
        r -= alpha * Ap
        rs_new = float(r @ r)
        if np.sqrt(rs_new) <= tol * b_norm:
            true_res = float(np.linalg.norm(rhs - mat @ x))
            if true_res <= tol * b_norm:
                return ScalarField(b.grid, x)
            r = rhs - mat @ x
            rs_new = float(r @ r)
            p = r.copy()
            rs = rs_new
            continue
        p = r + (rs_new / rs) * p
        rs = rs_new
    raise ConvergenceError(
        f"CG did not reach tol={tol:g} in {max_iter} iterations",
        residual=np.sqrt(rs) / b_norm,
    )


def smallest_eigenpair(
    A: DiscreteOperator,
    tol: float = 1e-10,
    *,
    shift: float | None = None,
    deflate: tuple = (),
    max_iter: int = 200,
) -> tuple[float, ScalarField]:
    """Smallest eigenpair of a symmetric operator by shifted inverse iteration.

    The shift starts at a Gershgorin lower bound (or the caller's warm value,
    which must sit below the target eigenvalue) and is pulled up to
    ``theta - 3*residual`` as the Rayleigh quotient theta settles; that
    candidate is always a lower bound on the target, so convergence stays
    locked on the smallest eigenvalue.  ``deflate`` projects out previously
    converged eigenvectors, which yields the next eigenvalue up.

    Returns (eigenvalue, eigenvector) with unit weighted norm, eigen-residual
    |A phi - theta phi|_w <= tol, and the largest-magnitude entry positive.
    Residuals below the double-precision floor eps*|A|_inf are not
    representable; tol is clamped there.
    """
    grid = A.grid
    mat = A.matrix
    w = grid.weight
    m = grid.num_interior
    floor = 8.0 * np.finfo(float).eps * float(np.abs(mat).sum(axis=1).max())
    tol = max(tol, floor)

    basis = []
    for d in deflate:
        vec = d.values if isinstance(d, ScalarField) else np.asarray(d, dtype=float)
        vec = vec / np.sqrt(float(np.dot(w * vec, vec)))
        basis.append(vec)

    def project(x):
        for d in basis:
            x = x - float(np.dot(w * d, x)) * d
        return x

    rng = np.random.default_rng(0)
    x = project(rng.standard_normal(m))
    x /= np.sqrt(float(np.dot(w * x, x)))

    lower = A.gershgorin_lower()
    sigma = float(shift) if shift is not None else lower - 1e-3 * (1.0 + abs(lower))
    lu = None
    theta = float(np.dot(w * x, mat @ x))
    for _ in range(max_iter):
        if lu is None:
            shifted = (mat - sp.diags(np.full(m, sigma))).tocsc()
            lu = spla.splu(shifted)
        y = project(lu.solve(x))
        norm = np.sqrt(float(np.dot(w * y, y)))
        if not np.isfinite(norm) or norm == 0.0:
            raise ConvergenceError("inverse iteration produced a degenerate vector")
        x = y / norm
        Ax = mat @ x
        theta = float(np.dot(w * x, Ax))
        resid = Ax - theta * x
        r = np.sqrt(float(np.dot(w * resid, resid)))
        if r <= tol:
            k = int(np.argmax(np.abs(x)))
            if x[k] < 0:
                x = -x
            return theta, ScalarField(grid, x)
        candidate = theta - 3.0 * r
        if candidate > sigma + 0.05 * max(r, theta - sigma):
            sigma = candidate
            lu = None
    raise ConvergenceError(
        f"inverse iteration did not reach tol={tol:g} in {max_iter} iterations",
        residual=r,
    )


def principal_eigenpair(grid: Grid, tol: float = 1e-12) -> tuple[float, ScalarField]:
    """Cached smallest eigenpair of the plain Dirichlet Laplacian."""
    hit = _principal_cache.get(grid)
    if hit is None:
        hit = smallest_eigenpair(laplacian_operator(grid), tol)
        _principal_cache[grid] = hit
    return hit
