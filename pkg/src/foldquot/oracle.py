"""Discretization-free ground truth for the fold parameter.

On an interval the boundary value problem -u'' = lam*u^q + u^gamma reduces to
quadrature: with G(s) = lam*s^(q+1)/(q+1) + s^(gamma+1)/(gamma+1), a positive
symmetric solution of amplitude rho exists iff the half-length integral

    T(rho, lam) = int_0^rho ds / sqrt(2 (G(rho) - G(s)))

equals L/2.  T -> 0 at both ends of the rho axis and has a single interior
peak, so solutions exist iff max_rho T >= L/2 and the fold parameter is the
unique lam where the peak touches L/2.  On a disk the same outer bisection
runs over radial shooting instead of quadrature.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize

from .errors import ConvergenceError
from .quotient import ProblemParams


@dataclass(frozen=True)
class TimeMapTable:
    """Per-bisection trace of (rho, lam, T) plus the certified fold values."""

    rows: tuple
    lambda_star_oracle: float
    rho_at_fold: float

    def to_csv(self) -> str:
        lines = ["rho,lambda,T"]
        for rho, lam, t in self.rows:
            lines.append(f"{rho:.17g},{lam:.17g},{t:.17g}")
        return "\n".join(lines) + "\n"


def time_map(rho: float, lam: float, params: ProblemParams, quad_tol: float = 1e-11) -> float:
    """Half-length T(rho, lam) of the symmetric solution with amplitude rho.

    The endpoint singularity is removed by s = rho*sin(theta); the potential
    difference is evaluated through expm1 to keep the integrand stable as
    theta -> pi/2.
    """
    if rho <= 0:
        raise ValueError(f"amplitude must be positive, got {rho}")
    if lam < 0:
        raise ValueError(f"lambda must be nonnegative, got {lam}")
    q, gamma = params.q, params.gamma
    aq = lam * rho ** (q + 1.0) / (q + 1.0)
    ag = rho ** (gamma + 1.0) / (gamma + 1.0)

    def integrand(theta):
        s = np.sin(theta)
        logs = np.log(s)
        gap = -aq * np.expm1((q + 1.0) * logs) - ag * np.expm1((gamma + 1.0) * logs)
        return rho * np.cos(theta) / np.sqrt(2.0 * gap)

    value, abserr = integrate.quad(
        integrand, 0.0, np.pi / 2.0, epsabs=quad_tol, epsrel=quad_tol, limit=200
    )
    if not np.isfinite(value) or abserr > 100 * quad_tol * max(1.0, abs(value)):
        raise ConvergenceError(
            f"time-map quadrature error {abserr:.3e} exceeds tolerance", residual=abserr
        )
    return float(value)


def _peak(lam, params, quad_tol, rho_hint=None):
    """(rho_peak, T_peak) of the unimodal amplitude -> half-length map."""

    def T(rho):
        return time_map(rho, lam, params, quad_tol)

    if rho_hint is None:
        grid = np.geomspace(1e-4, 1e4, 81)
    else:
        grid = np.geomspace(rho_hint / 8.0, rho_hint * 8.0, 25)
    vals = np.array([T(r) for r in grid])
    k = int(np.argmax(vals))
    while k == 0:
        grid = np.concatenate([[grid[0] / 16.0], grid])
        vals = np.concatenate([[T(grid[0])], vals])
        k = int(np.argmax(vals))
    while k == len(grid) - 1:
        grid = np.concatenate([grid, [grid[-1] * 16.0]])
        vals = np.concatenate([vals, [T(grid[-1])]])
        k = int(np.argmax(vals))
    res = optimize.minimize_scalar(
        lambda r: -T(r),
        bounds=(grid[k - 1], grid[k + 1]),
        method="bounded",
        options={"xatol": 1e-12 * grid[k]},
    )
    return float(res.x), float(-res.fun)


def lambda_star_1d(
    L: float, params: ProblemParams, tol: float = 1e-10, quad_tol: float = 1e-12
) -> TimeMapTable:
    """Brute-force fold parameter on the interval (0, L).

    Outer bisection on lam against the feasibility test max_rho T >= L/2;
    the inner maximization is a bounded golden/parabolic scalar search.
    """
    if L <= 0:
        raise ValueError(f"interval length must be positive, got {L}")
    target = L / 2.0
    rows = []

    rho_hint = None

    def feasible(lam):
        nonlocal rho_hint
        rho, t_peak = _peak(lam, params, quad_tol, rho_hint)
        rho_hint = rho
        rows.append((rho, lam, t_peak))
        return t_peak >= target, rho, t_peak

    lo = 1e-8
    ok, rho_lo, _ = feasible(lo)
    if not ok:
        raise ConvergenceError(f"no solutions even at lambda = {lo}; bracket failed")
    hi = max(1.0, 2.0 * lo)
    for _ in range(200):
        ok, _, _ = feasible(hi)
        if not ok:
            break
        lo = hi
        hi *= 2.0
    else:
        raise ConvergenceError("failed to bracket the fold from above")

    rho_star = rho_lo
    while hi - lo > tol * hi:
        mid = 0.5 * (lo + hi)
        ok, rho, _ = feasible(mid)
        if ok:
            lo, rho_star = mid, rho
        else:
            hi = mid
    lam_star = 0.5 * (lo + hi)
    return TimeMapTable(
        rows=tuple(rows), lambda_star_oracle=float(lam_star), rho_at_fold=float(rho_star)
    )


def _disk_shot(rho: float, lam: float, radius: float, params: ProblemParams, rtol: float):
    """First zero of the radial profile started at u(0) = rho, or inf if it turns."""
    q, gamma = params.q, params.gamma

    def rhs(r, y):
        u, du = y
        g = lam * max(u, 0.0) ** q + max(u, 0.0) ** gamma
        return [du, -g - du / r]

    g0 = lam * rho**q + rho**gamma
    r0 = 1e-8 * radius
    y0 = [rho - g0 * r0**2 / 4.0, -g0 * r0 / 2.0]

    hit_zero = lambda r, y: y[0]
    hit_zero.terminal = True
    hit_zero.direction = -1
    turned = lambda r, y: y[1]
    turned.terminal = True
    turned.direction = 1

    sol = integrate.solve_ivp(
        rhs,
        (r0, 50.0 * radius),
        y0,
        events=(hit_zero, turned),
        rtol=rtol,
        atol=rtol * rho,
        dense_output=False,
        max_step=radius / 4.0,
    )
    if sol.t_events[0].size:
        return float(sol.t_events[0][0])
    return np.inf


def lambda_star_disk(
    radius: float, params: ProblemParams, tol: float = 1e-8, rtol: float = 1e-10
) -> float:
    """Fold parameter of the radial problem on a disk, by shooting.

    Mirrors lambda_star_1d: the first-zero radius plays the role of the
    half-length, its peak over the shooting amplitude is bisected against
    the domain radius.
    """
    if radius <= 0:
        raise ValueError(f"radius must be positive, got {radius}")

    rho_hint = None

    def feasible(lam):
        nonlocal rho_hint

        def span(rho):
            r = _disk_shot(rho, lam, radius, params, rtol)
            return r if np.isfinite(r) else -1.0

        if rho_hint is None:
            grid = np.geomspace(1e-4, 1e4, 61)
        else:
            grid = np.geomspace(rho_hint / 8.0, rho_hint * 8.0, 21)
        vals = np.array([span(r) for r in grid])
        k = int(np.argmax(vals))
        res = optimize.minimize_scalar(
            lambda r: -span(r),
            bounds=(grid[max(k - 1, 0)], grid[min(k + 1, len(grid) - 1)]),
            method="bounded",
            options={"xatol": 1e-10 * grid[k]},
        )
        rho_hint = float(res.x)
        return -res.fun >= radius

    lo = 1e-8
    if not feasible(lo):
        raise ConvergenceError(f"no radial solutions at lambda = {lo}; bracket failed")
    hi = 1.0
    for _ in range(200):
        if not feasible(hi):
            break
        lo = hi
        hi *= 2.0
    else:
        raise ConvergenceError("failed to bracket the disk fold from above")
    while hi - lo > tol * hi:
        mid = 0.5 * (lo + hi)
        if feasible(mid):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
