"""Coupled fixed point of the two networks' access and collision probabilities.

A Wi-Fi AP collides when any other station (own network or LAA) transmits in
the same slot, diluted by the cross-network detection probability; the LAA
side is symmetric. Both per-node transmission probabilities must therefore be
solved jointly with both collision probabilities. The solver runs a damped
fixed-point iteration and falls back to nested bisection if the iteration
stalls, so failure to converge is always observable, never silent.
"""
from __future__ import annotations

from dataclasses import dataclass

from .core import Scenario, Solution, WifiParams
from .markov import laa_tau, wifi_tau

# Numerical guard: the chain formulas are undefined at p = 1, which only
# arises transiently inside bracketing searches.
_P_MAX = 1.0 - 1e-12

# Bisection interval is shrunk to this width before giving up.
_BISECT_WIDTH = 1e-16


@dataclass(frozen=True)
class SolverConfig:
    """Knobs of the fixed-point solve."""

    tolerance: float = 1e-10      # max |tau - map(tau)| accepted at the solution
    max_iterations: int = 10000
    damping: float = 0.5          # step fraction toward the mapped value

    def __post_init__(self) -> None:
        if not self.tolerance > 0:
            raise ValueError("tolerance must be > 0")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if not 0 < self.damping <= 1:
            raise ValueError("damping must be in (0, 1]")


class ConvergenceError(RuntimeError):
    """Raised when no iterate meets the residual tolerance.

    Carries the last iterate so callers can report how close the solve got.
    """

    def __init__(self, message: str, tau_w: float, tau_l: float,
                 residual: float, iterations: int):
        super().__init__(message)
        self.tau_w = tau_w
        self.tau_l = tau_l
        self.residual = residual
        self.iterations = iterations


def _collision_probabilities(s: Scenario, tau_w: float,
                             tau_l: float) -> tuple[float, float]:
    """Per-node collision probabilities given both access probabilities.

    The cross-network term is weighted by the detection probability; with
    perfect detection this reduces to the plain at-least-one-other-transmits
    form, so one code path serves both models.
    """
    n_w, n_l = s.n_wifi, s.n_laa
    p_w = p_l = 0.0
    if n_w:
        own_idle = (1.0 - tau_w) ** (n_w - 1)
        p_w = (1.0 - (1.0 - tau_l) ** n_l) * s.p_dw * own_idle \
            + 1.0 - own_idle
    if n_l:
        own_idle = (1.0 - tau_l) ** (n_l - 1)
        p_l = (1.0 - (1.0 - tau_w) ** n_w) * s.p_dl * own_idle \
            + 1.0 - own_idle
    return p_w, p_l


def _wifi_chain(s: Scenario, p: float) -> float:
    # Comparison mode mirrors the testbed MAC, which resets the stage right
    # after m instead of staying one extra round at the top window.
    if s.comparison_mode:
        return laa_tau(s.wifi.w0, s.wifi.m, 0, min(p, _P_MAX))
    return wifi_tau(s.wifi.w0, s.wifi.m, min(p, _P_MAX))


def _laa_chain(s: Scenario, p: float) -> float:
    return laa_tau(s.laa.w0, s.laa.m, s.laa.retry_limit, min(p, _P_MAX))


def _mapped(s: Scenario, tau_w: float, tau_l: float):
    """One application of the coupled map tau -> chain(collision(tau))."""
    p_w, p_l = _collision_probabilities(s, tau_w, tau_l)
    new_w = _wifi_chain(s, p_w) if s.n_wifi else 0.0
    new_l = _laa_chain(s, p_l) if s.n_laa else 0.0
    return new_w, new_l, p_w, p_l


def _laa_partial_fixed_point(s: Scenario, tau_w: float) -> float:
    """Solve tau_l = chain(collision(tau_w, tau_l)) by bisection, tau_w held."""
    if not s.n_laa:
        return 0.0

    def shifted(tau_l: float) -> float:
        _, p_l = _collision_probabilities(s, tau_w, tau_l)
        return tau_l - _laa_chain(s, p_l)

    lo, hi = 0.0, 1.0
    if shifted(hi) < 0.0:
        return hi
    while hi - lo > _BISECT_WIDTH:
        mid = 0.5 * (lo + hi)
        if shifted(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _solve_by_bisection(s: Scenario, cfg: SolverConfig,
                        spent_iterations: int) -> Solution:
    """Scalarized fallback: outer bisection on tau_w, nested solve for tau_l."""
    steps = 0

    if s.n_wifi:
        def shifted(tau_w: float) -> float:
            new_w, _, _, _ = _mapped(s, tau_w,
                                     _laa_partial_fixed_point(s, tau_w))
            return tau_w - new_w

        lo, hi = 0.0, 1.0
        if shifted(hi) < 0.0:
            tau_w = hi
        else:
            while hi - lo > _BISECT_WIDTH:
                mid = 0.5 * (lo + hi)
                if shifted(mid) < 0.0:
                    lo = mid
                else:
                    hi = mid
                steps += 1
            tau_w = 0.5 * (lo + hi)
    else:
        tau_w = 0.0
    tau_l = _laa_partial_fixed_point(s, tau_w)

    new_w, new_l, p_w, p_l = _mapped(s, tau_w, tau_l)
    residual = max(abs(new_w - tau_w), abs(new_l - tau_l))
    iterations = spent_iterations + steps
    if residual > cfg.tolerance:
        raise ConvergenceError(
            f"fixed point not reached: residual {residual:.3e} exceeds "
            f"tolerance {cfg.tolerance:.3e} after damped iteration and "
            f"bisection fallback",
            tau_w=tau_w, tau_l=tau_l, residual=residual,
            iterations=iterations)
    return Solution(tau_w=tau_w, tau_l=tau_l, p_w=p_w, p_l=p_l,
                    residual=residual, iterations=iterations)


# Stall detection: the residual must at least halve over this many damped
# iterations, otherwise the solve switches to the bisection fallback.
_STALL_WINDOW = 100


def solve_coexistence(s: Scenario, cfg: SolverConfig = SolverConfig()) -> Solution:
    """Jointly solve both access probabilities against both collision
    probabilities.

    Returns the fixed point (tau_w, tau_l, p_w, p_l); the collision
    probabilities are evaluated exactly at the returned access probabilities
    and the chain equations hold within ``cfg.tolerance``. When one network
    is absent its probabilities are reported as 0 and the system reduces to
    the single-technology fixed point.

    Raises ConvergenceError (with the last iterate attached) if neither the
    damped iteration nor the bisection fallback meets the tolerance.
    """
    s = s.effective()
    tau_w = 2.0 / (s.wifi.w0 + 1.0) if s.n_wifi else 0.0
    tau_l = 2.0 / (s.laa.w0 + 1.0) if s.n_laa else 0.0

    checkpoint = float("inf")
    iteration = 0
    for iteration in range(1, cfg.max_iterations + 1):
        new_w, new_l, p_w, p_l = _mapped(s, tau_w, tau_l)
        residual = max(abs(new_w - tau_w), abs(new_l - tau_l))
        if residual <= cfg.tolerance:
            return Solution(tau_w=tau_w, tau_l=tau_l, p_w=p_w, p_l=p_l,
                            residual=residual, iterations=iteration)
        if iteration % _STALL_WINDOW == 0:
            if residual > 0.5 * checkpoint:
                break
            checkpoint = residual
        tau_w += cfg.damping * (new_w - tau_w)
        tau_l += cfg.damping * (new_l - tau_l)

    return _solve_by_bisection(s, cfg, iteration)


def solve_wifi_only(n: int, w0: int, m: int,
                    cfg: SolverConfig = SolverConfig()) -> Solution:
    """Single-technology fixed point for n contending Wi-Fi stations."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return solve_coexistence(Scenario(n_wifi=n, n_laa=0,
                                      wifi=WifiParams(w0=w0, m=m)), cfg)
