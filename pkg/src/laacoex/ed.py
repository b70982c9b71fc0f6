"""Energy-detector sensing: probability of detecting a cross-network signal.

The detector averages M power samples and compares against a threshold; for
large M the test statistic is Gaussian and the detection probability reduces
to a Q-function of the threshold margin in standard-deviation units.
"""
from __future__ import annotations

import math
from dataclasses import dataclass


def dbm_to_mw(x_dbm: float) -> float:
    """Convert a power from dBm to linear milliwatts."""
    return 10.0 ** (x_dbm / 10.0)


def _q(x: float) -> float:
    """Standard Gaussian tail probability P(Z > x)."""
    return 0.5 * math.erfc(x / math.sqrt(2.0))


@dataclass(frozen=True)
class EdConfig:
    """Energy-detector operating point."""

    threshold_dbm: float      # decision threshold
    signal_power_dbm: float   # received cross-network signal power
    noise_power_dbm: float
    samples: int              # sample count M averaged by the detector

    def __post_init__(self) -> None:
        if self.samples < 1:
            raise ValueError("samples must be >= 1")
        for name in ("threshold_dbm", "signal_power_dbm", "noise_power_dbm"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")

    @classmethod
    def from_snr(cls, threshold_dbm: float, snr_db: float,
                 noise_power_dbm: float, samples: int) -> "EdConfig":
        """Operating point with the signal power given as SNR over the noise."""
        return cls(threshold_dbm, noise_power_dbm + snr_db,
                   noise_power_dbm, samples)


def detection_probability(c: EdConfig) -> float:
    """Probability that the averaged energy statistic exceeds the threshold.

    Powers are converted to linear units; the statistic's mean is the total
    received power and its standard deviation is sqrt(2/M) times that, so
    the argument of the Gaussian tail is the normalized threshold margin.
    """
    eta = dbm_to_mw(c.threshold_dbm)
    total = dbm_to_mw(c.signal_power_dbm) + dbm_to_mw(c.noise_power_dbm)
    sigma = math.sqrt(2.0 / c.samples) * total
    return _q((eta - total) / sigma)
