"""Numerical sixth Painlevé transcendent and the potential kernel built on it.

``p6_solve`` integrates the second-order nonlinear equation for P6 on a
grid inside (0, 1) from regular initial data.  Movable poles are flagged
and skipped, never continued through: grid points beyond the first pole in
a sweep direction carry NaN and a pole flag, and the pole location is
narrowed by step bisection.  ``w_of_p6`` evaluates the auxiliary kernel
W(tau; gamma_1..4); the stray symbol in its last factor is read as tau,
an interpretation recorded where the value is used.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

__all__ = ["P6Solution", "p6_solve", "p6_rhs", "w_of_p6", "composite_gamma"]

_BLOWUP = 1e8


def p6_rhs(tau: float, y, gammas):
    """Right side of the P6 equation as a first-order system (P, P')."""
    g1, g2, g3, g4 = gammas
    P, Pp = y
    a = 0.5 * (1.0 / P + 1.0 / (P - 1.0) + 1.0 / (P - tau)) * Pp * Pp
    b = (1.0 / tau + 1.0 / (tau - 1.0) + 1.0 / (P - tau)) * Pp
    c = (
        P * (P - 1.0) * (P - tau)
        / (tau * tau * (tau - 1.0) ** 2)
        * (
            g1
            + g2 * tau / P ** 2
            + g3 * (tau - 1.0) / (P - 1.0) ** 2
            + g4 * tau * (tau - 1.0) / (P - tau) ** 2
        )
    )
    return (Pp, a - b + c)


def composite_gamma(gammas) -> float:
    """(g2+g4) - (g1+g3) + sqrt(2 g1) - 3/4."""
    g1, g2, g3, g4 = gammas
    if g1 < 0:
        raise ValueError("gamma_1 must be non-negative for the composite constant")
    return (g2 + g4) - (g1 + g3) + math.sqrt(2.0 * g1) - 0.75


@dataclass
class P6Solution:
    """P6 samples with first derivatives on a grid in (0, 1).

    ``pole_flags[i]`` marks grid points unreachable without crossing a
    movable singularity; values there are NaN.  ``segments`` holds dense
    interpolants (lo, hi, callable) covering the pole-free part.
    """

    gammas: tuple
    grid: np.ndarray
    values: np.ndarray
    derivs: np.ndarray
    pole_flags: np.ndarray
    gamma: float
    tau0: float
    initial: tuple
    segments: list = field(default_factory=list)
    pole_locations: list = field(default_factory=list)

    def __call__(self, tau: float):
        """(P, P') at tau from the dense output; tau must be pole-free."""
        for lo, hi, sol in self.segments:
            if lo <= tau <= hi:
                out = sol(tau)
                return float(out[0]), float(out[1])
        raise ValueError(f"tau={tau} outside the pole-free segments")

    def covered(self, tau: float) -> bool:
        return any(lo <= tau <= hi for lo, hi, _ in self.segments)

    def residual(self, taus=None, h: float = 5e-4) -> float:
        """Plug-back residual max |P'' - rhs| / max(|rhs|, 1) over samples.

        P'' is estimated from the dense derivative output with a 5-point
        fourth-order stencil, so the estimate is independent of the
        stepper's own right-side evaluations.
        """
        worst = 0.0
        for lo, hi, sol in self.segments:
            if hi - lo < 10 * h:
                continue
            ts = (
                np.linspace(lo + 2 * h, hi - 2 * h, 25)
                if taus is None
                else [t for t in taus if lo + 2 * h <= t <= hi - 2 * h]
            )
            for t in ts:
                dps = [sol(t + k * h)[1] for k in (-2, -1, 1, 2)]
                ppp = (dps[0] - 8 * dps[1] + 8 * dps[2] - dps[3]) / (12 * h)
                P, Pp = sol(t)[0], sol(t)[1]
                rhs = p6_rhs(t, (P, Pp), self.gammas)[1]
                worst = max(worst, abs(ppp - rhs) / max(abs(rhs), 1.0))
        return worst


def _blowup_event(tau, y, gammas):
    return _BLOWUP - abs(y[0]) - abs(y[1])


_blowup_event.terminal = True


def _sweep(gammas, tau0, y0, tau_end, rtol, atol):
    """Integrate toward tau_end; on blowup, bisect the last step to narrow
    the pole location.  Returns (dense solution or None, reached, pole)."""
    if abs(tau_end - tau0) < 1e-14:
        return None, tau0, None
    sol = solve_ivp(
        p6_rhs,
        (tau0, tau_end),
        y0,
        args=(gammas,),
        method="DOP853",
        rtol=rtol,
        atol=atol,
        dense_output=True,
        events=_blowup_event,
        max_step=abs(tau_end - tau0) / 8,
    )
    if sol.status == 1:  # blowup event
        t_pole = float(sol.t_events[0][0])
        lo, hi = sol.t[-2] if len(sol.t) > 1 else tau0, t_pole
        # bisection toward the singular point: find where |P| first exceeds
        for _ in range(40):
            mid = 0.5 * (lo + hi)
            if abs(sol.sol(mid)[0]) + abs(sol.sol(mid)[1]) > _BLOWUP:
                hi = mid
            else:
                lo = mid
        return sol, float(lo), float(hi)
    if sol.status != 0:
        raise RuntimeError(f"P6 integration failed: {sol.message}")
    return sol, float(tau_end), None


def p6_solve(
    gammas,
    tau0: float,
    P0: float,
    dP0: float,
    grid,
    rtol: float = 1e-11,
    atol: float = 1e-11,
) -> P6Solution:
    """Integrate the P6 equation from regular data over a grid in (0, 1).

    grid: array of tau values, or (lo, hi, n) to build a uniform grid.
    The initial value must avoid the fixed singular locus {0, 1, tau0}.
    """
    gammas = tuple(float(g) for g in gammas)
    if isinstance(grid, tuple) and len(grid) == 3:
        grid = np.linspace(grid[0], grid[1], int(grid[2]))
    grid = np.asarray(grid, dtype=float)
    if np.any(grid <= 0.0) or np.any(grid >= 1.0):
        raise ValueError("grid must lie strictly inside (0, 1)")
    if not (0.0 < tau0 < 1.0):
        raise ValueError("tau0 must lie in (0, 1)")
    for bad, name in ((0.0, "0"), (1.0, "1"), (tau0, "tau0")):
        if abs(P0 - bad) < 1e-12:
            raise ValueError(f"initial value P0 sits on the singular locus P = {name}")

    y0 = (float(P0), float(dP0))
    segments = []
    poles = []
    lo_reach, hi_reach = tau0, tau0
    hi_target = float(np.max(grid))
    lo_target = float(np.min(grid))
    sol_r, reached_r, pole_r = _sweep(gammas, tau0, y0, hi_target, rtol, atol)
    if sol_r is not None:
        segments.append((tau0, reached_r, sol_r.sol))
        hi_reach = reached_r
        if pole_r is not None:
            poles.append((reached_r, pole_r))
    sol_l, reached_l, pole_l = _sweep(gammas, tau0, y0, lo_target, rtol, atol)
    if sol_l is not None:
        segments.append((reached_l, tau0, sol_l.sol))
        lo_reach = reached_l
        if pole_l is not None:
            poles.append((pole_l, reached_l))

    values = np.full(len(grid), np.nan)
    derivs = np.full(len(grid), np.nan)
    flags = np.ones(len(grid), dtype=bool)
    for i, t in enumerate(grid):
        if lo_reach <= t <= hi_reach:
            for slo, shi, s in segments:
                if slo <= t <= shi:
                    out = s(t)
                    values[i], derivs[i] = float(out[0]), float(out[1])
                    flags[i] = False
                    break
    return P6Solution(
        gammas=gammas,
        grid=grid,
        values=values,
        derivs=derivs,
        pole_flags=flags,
        gamma=composite_gamma(gammas),
        tau0=float(tau0),
        initial=(float(P0), float(dP0)),
        segments=[(lo, hi, s) for lo, hi, s in segments],
        pole_locations=poles,
    )


def w_of_p6(sol: P6Solution, tau: float) -> float:
    """The kernel W(tau) of the exotic quantum angular profile.

    Evaluated verbatim from the P6 data; the undeclared symbol multiplying
    (P6 - 1) in the final factor is read as tau.
    """
    g1, g2, g3, g4 = sol.gammas
    P, Pp = sol(tau)
    for bad, name in ((0.0, "0"), (1.0, "1"), (tau, "tau")):
        if abs(P - bad) < 1e-12:
            raise ValueError(f"W undefined where P6 = {name}")
    first = (
        tau ** 2 * (tau - 1.0) ** 2
        / (4.0 * P * (P - 1.0) * (P - tau))
        * (Pp - P * (P - 1.0) / (tau * (tau - 1.0))) ** 2
    )
    if g1 < 0:
        raise ValueError("gamma_1 must be non-negative")
    second = 0.125 * (1.0 - math.sqrt(2.0 * g1)) ** 2 * (1.0 - 2.0 * P)
    third = -0.25 * g2 * (1.0 - 2.0 * tau / P)
    fourth = -0.25 * g3 * (1.0 - 2.0 * (tau - 1.0) / (P - 1.0))
    fifth = (0.125 - 0.25 * g4) * (1.0 - 2.0 * tau * (P - 1.0) / (P - tau))
    return first + second + third + fourth + fifth
