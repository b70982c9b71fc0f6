"""Stationary quantities of the two per-node backoff chains.

Both technologies run a binary-exponential-backoff chain over states
(stage j, counter k): the window doubles with each collision up to stage m
and the chain then stays at the top window for a number of further failures
before resetting. Wi-Fi stays exactly one extra stage; LAA stays for a
configurable retry limit. The closed-form per-slot transmission probability
is used on hot paths; the explicit stationary distribution is materialized
only for diagnostics and cross-checks.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

# |1 - x| below this uses the limit value of (1 - x^n)/(1 - x); the factor
# cancels analytically, the closed form just cannot evaluate it at x = 1.
_POLE_EPS = 1e-9


def _geometric_sum(x: float, terms: int) -> float:
    """Sum of x**j for j in range(terms), with the removable pole at x = 1."""
    if terms <= 0:
        return 0.0
    if abs(1.0 - x) < _POLE_EPS:
        return float(terms)
    return (1.0 - x ** terms) / (1.0 - x)


def _check_collision_probability(p: float) -> None:
    if not 0.0 <= p < 1.0:
        raise ValueError(f"collision probability must be in [0, 1), got {p!r}")


def _chain_tau(w0: int, m: int, extra_stages: int, p: float) -> float:
    # Occupancy of the transmit states is proportional to sum_j p^j over all
    # stages; the window term aggregates the mean residual backoff per stage.
    n_stages = m + extra_stages + 1
    transmit = _geometric_sum(p, n_stages)
    windows = _geometric_sum(2.0 * p, m + 1) \
        + 2.0 ** m * p ** (m + 1) * _geometric_sum(p, extra_stages)
    return 2.0 / (w0 * windows / transmit + 1.0)


def wifi_tau(w0: int, m: int, p_w: float) -> float:
    """Per-slot transmission probability of a saturated Wi-Fi station.

    The chain holds the top window for one extra failure after stage m.
    Collapses to 2/(w0+1) at p_w = 0 and is continuous across the removable
    p_w = 0.5 pole of the closed form.
    """
    if w0 < 1 or m < 0:
        raise ValueError("w0 must be >= 1 and m >= 0")
    _check_collision_probability(p_w)
    return _chain_tau(w0, m, 1, p_w)


def laa_tau(w0: int, m: int, e_l: int, p_l: float) -> float:
    """Per-slot transmission probability of a saturated LAA node.

    ``e_l`` is the number of extra failures spent at the top window before
    the stage resets; ``e_l=1`` makes the chain identical to the Wi-Fi one.
    """
    if w0 < 1 or m < 0:
        raise ValueError("w0 must be >= 1 and m >= 0")
    if not 0 <= e_l <= 8:
        raise ValueError("e_l must be in [0, 8]")
    _check_collision_probability(p_l)
    return _chain_tau(w0, m, e_l, p_l)


@dataclass(frozen=True)
class StationaryDistribution:
    """Full stationary distribution of one backoff chain."""

    chain_kind: str                        # "wifi" | "laa"
    b: dict[tuple[int, int], float]        # (stage, counter) -> probability
    b00: float

    def stage_heads(self) -> list[float]:
        """b[j, 0] for each stage j, i.e. the transmit-state occupancies."""
        n_stages = 1 + max(j for j, _ in self.b)
        return [self.b[(j, 0)] for j in range(n_stages)]


def _stationary(w0: int, m: int, extra_stages: int, p: float,
                chain_kind: str) -> StationaryDistribution:
    # Direct enumeration from the per-stage recursions: head occupancies
    # scale as p^j, counters decay linearly within a window, and the
    # normalization is an explicit sum. Deliberately independent of the
    # closed forms above.
    _check_collision_probability(p)
    raw: dict[tuple[int, int], float] = {}
    for j in range(m + extra_stages + 1):
        window = 2 ** min(j, m) * w0
        head = p ** j
        for k in range(window):
            raw[(j, k)] = head * (window - k) / window
    total = math.fsum(raw.values())
    b = {jk: v / total for jk, v in raw.items()}
    return StationaryDistribution(chain_kind=chain_kind, b=b, b00=b[(0, 0)])


def wifi_stationary(w0: int, m: int, p_w: float) -> StationaryDistribution:
    """Explicit stationary distribution of the Wi-Fi chain (stages 0..m+1)."""
    return _stationary(w0, m, 1, p_w, "wifi")


def laa_stationary(w0: int, m: int, e_l: int,
                   p_l: float) -> StationaryDistribution:
    """Explicit stationary distribution of the LAA chain (stages 0..m+e_l)."""
    if not 0 <= e_l <= 8:
        raise ValueError("e_l must be in [0, 8]")
    return _stationary(w0, m, e_l, p_l, "laa")
