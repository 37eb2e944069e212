"""Problem residual and the two-field quotient machinery.

The central object is the scaled quotient lambda(u, v): the maximum over ray
scalings t >= 0 of the two-field ratio

    R(t u, v) = (<-Du, v>*t^(1-q) - <u^gamma, v>*t^(gamma-q)) / <u^q, v>,

which is zero-homogeneous in each argument.  Its saddle points over the
positive cone are exactly the fold points of -Du = lam*u^q + u^gamma, and the
saddle value is the fold parameter itself.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConeError, PositivityError
from .mesh import Grid, ScalarField, _check_same_grid


@dataclass(frozen=True)
class ProblemParams:
    """Exponent pair (q, gamma) with 0 < q < 1 < gamma and derived constants.

    beta1 and beta2 are the convex weights (gamma-1)/(gamma-q) and
    (1-q)/(gamma-q); c is the constant that makes the closed-form scaled
    quotient equal max_t R(t u, v) exactly.  dimension_hint is only consulted
    by hypothesis_warnings for the N >= 3 subcriticality checks.
    """

    q: float
    gamma: float
    dimension_hint: int | None = None
    c: float = field(init=False)
    beta1: float = field(init=False)
    beta2: float = field(init=False)

    def __post_init__(self):
        q, gamma = float(self.q), float(self.gamma)
        if not 0.0 < q < 1.0:
            raise ValueError(f"hypothesis 0 < q < 1 violated: q = {q}")
        if not gamma > 1.0:
            raise ValueError(f"hypothesis gamma > 1 violated: gamma = {gamma}")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "gamma", gamma)
        ratio = (1.0 - q) / (gamma - q)
        object.__setattr__(
            self, "c", ratio ** ((1.0 - q) / (gamma - 1.0)) * (gamma - 1.0) / (gamma - q)
        )
        object.__setattr__(self, "beta1", (gamma - 1.0) / (gamma - q))
        object.__setattr__(self, "beta2", ratio)

    def hypothesis_warnings(self) -> list[str]:
        """Names of violated dimension-dependent growth hypotheses (never errors)."""
        out = []
        if self.dimension_hint is not None and self.dimension_hint >= 3:
            n = self.dimension_hint
            crit = 2.0 * n / (n - 2.0)
            if self.gamma >= crit - 1.0:
                out.append(f"gamma < 2*-1 (= {crit - 1.0:g} for N = {n})")
            if self.q > 2.0 / (n - 2.0):
                out.append(f"q <= 2/(N-2) (= {2.0 / (n - 2.0):g} for N = {n})")
        return out


@dataclass(frozen=True)
class Pairings:
    """The four quadrature pairings that build every quotient."""

    neg_lap: float  # <-Du, v>
    uq: float       # <u^q, v>
    ugamma: float   # <u^gamma, v>
    uv: float       # <u, v>


@dataclass(frozen=True)
class QuotientEval:
    value: float
    t_opt: float
    pairings: Pairings


def _require_positive(values: np.ndarray, name: str):
    if np.min(values) <= 0.0:
        raise PositivityError(f"{name} must be strictly positive at every node")


class QuotientWorkspace:
    """Shared kernel for quotient values and gradients on one grid.

    Caches the stencil matrix and reuses pairings between the value and the
    two gradients; the optimizers call this directly with raw arrays.
    """

    def __init__(self, grid: Grid, params: ProblemParams):
        self.grid = grid
        self.params = params
        self.mat = grid.laplacian
        self.w = grid.weight

    def pair(self, u, v, Lu=None):
        if Lu is None:
            Lu = self.mat @ u
        q, gamma = self.params.q, self.params.gamma
        wv = self.w * v
        return Pairings(
            neg_lap=float(np.dot(wv, Lu)),
            uq=float(np.dot(wv, u**q)),
            ugamma=float(np.dot(wv, u**gamma)),
            uv=float(np.dot(wv, u)),
        )

    def scale_from_pairings(self, p: Pairings) -> float:
        if p.neg_lap <= 0.0:
            raise ConeError(
                f"<-Du, v> = {p.neg_lap:.3e} <= 0: u is outside the admissible cone"
            )
        q, gamma = self.params.q, self.params.gamma
        return ((1.0 - q) * p.neg_lap / ((gamma - q) * p.ugamma)) ** (1.0 / (gamma - 1.0))

    def ray_value(self, p: Pairings, t: float) -> float:
        """R(t u, v) from the pairings of (u, v)."""
        q, gamma = self.params.q, self.params.gamma
        return (t ** (1.0 - q) * p.neg_lap - t ** (gamma - q) * p.ugamma) / p.uq

    def value_from_pairings(self, p: Pairings) -> tuple[float, float]:
        """(lambda(u, v), t_opt) with the closed form cross-checked at t_opt."""
        q, gamma = self.params.q, self.params.gamma
        t = self.scale_from_pairings(p)
        closed = (
            self.params.c
            * p.neg_lap ** ((gamma - q) / (gamma - 1.0))
            / (p.uq * p.ugamma ** ((1.0 - q) / (gamma - 1.0)))
        )
        at_t = self.ray_value(p, t)
        if abs(closed - at_t) > 1e-10 * max(abs(closed), abs(at_t), 1e-300):
            raise ArithmeticError(
                f"scaled quotient cross-check failed: closed form {closed!r} "
                f"vs ray maximum {at_t!r}"
            )
        return closed, t

    def value(self, u, v, Lu=None) -> tuple[float, float, Pairings]:
        p = self.pair(u, v, Lu)
        lam, t = self.value_from_pairings(p)
        return lam, t, p

    def value_and_grads(self, u, v, Lu=None, Lv=None):
        """lambda, t_opt, grad_u lambda, grad_v lambda, pairings.

        Both gradients are taken in the weighted inner product.  By the
        envelope identity R_t = 0 at t_opt, no dt/du or dt/dv terms appear:
        grad_u = t * grad_u R at (t u, v) and grad_v = grad_v R at (t u, v).
        """
        q, gamma = self.params.q, self.params.gamma
        if Lu is None:
            Lu = self.mat @ u
        if Lv is None:
            Lv = self.mat @ v
        p = self.pair(u, v, Lu)
        lam, t = self.value_from_pairings(p)
        uq1 = u ** (q - 1.0)
        ug1 = u ** (gamma - 1.0)
        denom = t**q * p.uq
        gu = (t / denom) * (
            Lv - (gamma * t ** (gamma - 1.0)) * ug1 * v - (lam * q * t ** (q - 1.0)) * uq1 * v
        )
        gv = (t * Lu - (lam * t**q) * (uq1 * u) - t**gamma * (ug1 * u)) / denom
        return lam, t, gu, gv, p


def residual(u: ScalarField, lam: float, params: ProblemParams) -> ScalarField:
    """Nodewise -Laplace_h u - lam*u^q - u^gamma."""
    _require_positive(u.values, "u")
    vals = u.grid.laplacian @ u.values - lam * u.values**params.q - u.values**params.gamma
    return ScalarField(u.grid, vals)


def _pairings(u: ScalarField, v: ScalarField, params: ProblemParams) -> Pairings:
    _check_same_grid(u, v)
    _require_positive(u.values, "u")
    _require_positive(v.values, "v")
    return QuotientWorkspace(u.grid, params).pair(u.values, v.values)


def rayleigh(u: ScalarField, v: ScalarField, params: ProblemParams) -> float:
    """Two-field ratio (<-Du, v> - <u^gamma, v>) / <u^q, v>."""
    p = _pairings(u, v, params)
    if p.uq == 0.0:
        raise PositivityError("<u^q, v> vanished")
    return (p.neg_lap - p.ugamma) / p.uq


def t_opt(u: ScalarField, v: ScalarField, params: ProblemParams) -> float:
    """The ray scaling maximizing t -> R(t u, v), in closed form."""
    p = _pairings(u, v, params)
    return QuotientWorkspace(u.grid, params).scale_from_pairings(p)


def lambda_scaled(u: ScalarField, v: ScalarField, params: ProblemParams) -> QuotientEval:
    """The scaled quotient lambda(u, v) = max_t R(t u, v), with its maximizer."""
    p = _pairings(u, v, params)
    lam, t = QuotientWorkspace(u.grid, params).value_from_pairings(p)
    return QuotientEval(value=lam, t_opt=t, pairings=p)


def grad_rayleigh_u(u: ScalarField, v: ScalarField, params: ProblemParams) -> ScalarField:
    """Weighted gradient of R in u: (-Dv - gamma*u^(gamma-1) v - R q u^(q-1) v)/<u^q, v>."""
    p = _pairings(u, v, params)
    q, gamma = params.q, params.gamma
    r = (p.neg_lap - p.ugamma) / p.uq
    vals = (
        u.grid.laplacian @ v.values
        - gamma * u.values ** (gamma - 1.0) * v.values
        - r * q * u.values ** (q - 1.0) * v.values
    ) / p.uq
    return ScalarField(u.grid, vals)


def grad_rayleigh_v(u: ScalarField, v: ScalarField, params: ProblemParams) -> ScalarField:
    """Weighted gradient of R in v: residual(u, R(u, v)) / <u^q, v>."""
    p = _pairings(u, v, params)
    r = (p.neg_lap - p.ugamma) / p.uq
    vals = (
        u.grid.laplacian @ u.values - r * u.values**params.q - u.values**params.gamma
    ) / p.uq
    return ScalarField(u.grid, vals)


def grad_lambda_u(u: ScalarField, v: ScalarField, params: ProblemParams) -> ScalarField:
    _check_same_grid(u, v)
    _require_positive(u.values, "u")
    _require_positive(v.values, "v")
    ws = QuotientWorkspace(u.grid, params)
    _, _, gu, _, _ = ws.value_and_grads(u.values, v.values)
    return ScalarField(u.grid, gu)


def grad_lambda_v(u: ScalarField, v: ScalarField, params: ProblemParams) -> ScalarField:
    _check_same_grid(u, v)
    _require_positive(u.values, "u")
    _require_positive(v.values, "v")
    ws = QuotientWorkspace(u.grid, params)
    _, _, _, gv, _ = ws.value_and_grads(u.values, v.values)
    return ScalarField(u.grid, gv)


def lambda_tilde(u: ScalarField, v: ScalarField, params: ProblemParams) -> float:
    """Auxiliary quotient <-Du, v> / (<u^q, v>^beta1 <u^gamma, v>^beta2).

    A fixed positive power of the scaled quotient:
    lambda = c * lambda_tilde^((gamma-q)/(gamma-1)), so both share all
    quasi-convexity/concavity structure and every argmin/argmax.
    """
    p = _pairings(u, v, params)
    if p.neg_lap <= 0.0:
        raise ConeError(
            f"<-Du, v> = {p.neg_lap:.3e} <= 0: u is outside the admissible cone"
        )
    return p.neg_lap / (p.uq**params.beta1 * p.ugamma**params.beta2)
